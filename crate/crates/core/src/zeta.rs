//! Riemann zeta on the real axis `s > 1` by Euler–Maclaurin summation
//! with eight Bernoulli correction terms; absolute accuracy well below
//! 1e-10 for `s ≥ 1.5`.

/// `B_{2j}/(2j)!` for `j = 1..=8`.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
];

const CUT: u32 = 32;

/// `ζ(s)` for real `s > 1`.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta(s) implemented for s > 1 only");
    let mut acc = 0.0;
    for n in 1..CUT {
        acc += (n as f64).powf(-s);
    }
    let m = CUT as f64;
    acc += m.powf(1.0 - s) / (s - 1.0);
    acc += 0.5 * m.powf(-s);
    // Σ_j B_{2j}/(2j)! · s(s+1)⋯(s+2j-2) · M^{-s-2j+1}
    let mut rising = s;
    let mut power = m.powf(-s - 1.0);
    for (i, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        acc += coeff * rising * power;
        let j = (i + 1) as f64;
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        power /= m * m;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    #[allow(clippy::excessive_precision)]
    fn classical_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-12);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-12);
        assert!((zeta(6.0) - PI.powi(6) / 945.0).abs() < 1e-12);
        assert!((zeta(3.0) - 1.2020569031595943).abs() < 1e-12);
        assert!((zeta(1.5) - 2.6123753486854883).abs() < 1e-11);
    }
}
