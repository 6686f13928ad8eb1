//! Named verification suites behind `charpath verify <suite>`: each runs a
//! table of assertions and reports one PASS/FAIL line per check.

use charpath_core::moments::{
    divisor_count_n, divisor_lemma_check, hyper_kloosterman, ramanujan_check,
    ramanujan_tail_estimate, twisted_gauss_average,
};
use charpath_core::paths::PathGrid;
use charpath_core::series::{rough_norm, SeriesForm};
use charpath_core::steinhaus::{SeedSpec, SpfSieve, SteinhausSampler};
use charpath_core::{CharFilter, Complex64, Parity, PrimeContext};
use std::sync::Arc;

pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

/// Print the table; true iff everything passed.
pub fn report(checks: &[Check]) -> bool {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut all = true;
    for c in checks {
        all &= c.passed;
        println!(
            "{:width$}  {}  {}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail,
        );
    }
    all
}

pub fn orthogonality() -> Vec<Check> {
    let mut checks = Vec::new();
    for q in [5u64, 13, 101] {
        let ctx = PrimeContext::new(q).unwrap();
        let chars = ctx.characters(CharFilter::All);
        let mut worst = 0.0f64;
        for a in 1..q as u32 {
            for b in 1..q as u32 {
                let mut acc = Complex64::new(0.0, 0.0);
                for chi in &chars {
                    acc += chi.value_at_residue(a) * chi.value_at_residue(b).conj();
                }
                acc /= (q - 1) as f64;
                let expected = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((acc - Complex64::new(expected, 0.0)).norm());
            }
        }
        checks.push(check(
            format!("orthogonality q={q}"),
            worst < 1e-10,
            format!("max deviation {worst:.2e}"),
        ));
    }
    checks
}

pub fn gauss() -> Vec<Check> {
    let mut checks = Vec::new();
    for q in [5u64, 101, 1009] {
        let ctx = PrimeContext::new(q).unwrap();
        let mut worst = 0.0f64;
        for chi in ctx.characters(CharFilter::Nonprincipal) {
            worst = worst.max((chi.gauss_sum().norm_sqr() - q as f64).abs());
        }
        checks.push(check(
            format!("|tau|^2 = q at q={q}"),
            worst <= 1e-8 * q as f64,
            format!("max | |tau|^2 - q | = {worst:.2e}"),
        ));
    }
    let ctx5 = PrimeContext::new(5).unwrap();
    let tau0 = ctx5.character(0).unwrap().gauss_sum();
    checks.push(check(
        "principal tau mod 5",
        (tau0 - Complex64::new(-1.0, 0.0)).norm() < 1e-12,
        format!("tau(chi_0) = {tau0}"),
    ));
    checks
}

pub fn divisor() -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push(check(
        "d_2(6) = 4",
        divisor_count_n(2, 6).unwrap() == 4,
        "ordered pairs with product 6",
    ));
    checks.push(check(
        "d_3(4) = 6",
        divisor_count_n(3, 4).unwrap() == 6,
        "ordered triples with product 4",
    ));
    // d_{N1}(x1) d_{N2}(x2) <= d_{N1+N2}(x1 x2) on 10^4 random tuples
    let mut state = 0x5EEDu64;
    let mut next = move |range: u64| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) % range
    };
    let mut violations = 0u32;
    for _ in 0..10_000 {
        let x1 = 1 + next(10_000);
        let x2 = 1 + next(10_000);
        let n1 = 1 + next(4) as u32;
        let n2 = 1 + next(4) as u32;
        if !divisor_lemma_check(x1, x2, n1, n2).unwrap() {
            violations += 1;
        }
    }
    checks.push(check(
        "divisor multiplication lemma, 10^4 random tuples",
        violations == 0,
        format!("{violations} violations"),
    ));
    checks
}

pub fn deligne() -> Vec<Check> {
    let mut checks = Vec::new();
    for q in [7u64, 11, 13] {
        let ctx = PrimeContext::new(q).unwrap();
        let mut worst_ratio = 0.0f64;
        for n_fold in 1..=3u32 {
            let bound = 2.0 * n_fold as f64 * (q as f64).powf((n_fold as f64 - 1.0) / 2.0);
            for a in 1..q {
                for parity in [Parity::Odd, Parity::Even] {
                    let v = twisted_gauss_average(&ctx, n_fold, a, parity).norm();
                    worst_ratio = worst_ratio.max(v / bound);
                }
            }
        }
        checks.push(check(
            format!("twisted averages q={q}"),
            worst_ratio <= 1.0 + 1e-9,
            format!("max |avg| / bound = {worst_ratio:.4}"),
        ));
        // N=2 cross-check against direct hyper-Kloosterman enumeration
        let mut worst_gap = 0.0f64;
        for a in 1..q {
            let a_inv = mod_inverse(a, q);
            for (parity, sigma) in [(Parity::Even, 1.0), (Parity::Odd, -1.0)] {
                let lhs = twisted_gauss_average(&ctx, 2, a, parity);
                let rhs = hyper_kloosterman(q, 2, a_inv).unwrap()
                    + sigma * hyper_kloosterman(q, 2, q - a_inv).unwrap();
                worst_gap = worst_gap.max((lhs - rhs).norm());
            }
        }
        checks.push(check(
            format!("hyper-Kloosterman cross-check q={q}"),
            worst_gap < 1e-8,
            format!("max gap {worst_gap:.2e}"),
        ));
    }
    checks
}

fn mod_inverse(a: u64, q: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = a % q;
    let mut exp = q - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}

/// Rough-tail trend: the median sup-norm of the non-smooth part must
/// decrease as the smoothness bound grows.
pub fn tail() -> Vec<Check> {
    let n_terms = 10_000u32;
    let grid = PathGrid::uniform(512);
    let sieve = Arc::new(SpfSieve::new(n_terms));
    let mut medians = Vec::new();
    for y in [10u32, 100, 1000] {
        let mut norms: Vec<f64> = (0..50u64)
            .map(|seed| {
                let s = SteinhausSampler::with_sieve(SeedSpec::new(seed, 0), sieve.clone());
                rough_norm(&s, SeriesForm::Minus, y, n_terms, &grid).unwrap()
            })
            .collect();
        norms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.push((y, 0.5 * (norms[24] + norms[25])));
    }
    let monotone = medians[0].1 > medians[1].1 && medians[1].1 > medians[2].1;
    vec![check(
        "rough-tail median decreasing over y in {10,100,1000}",
        monotone,
        format!(
            "medians {:.4} > {:.4} > {:.4}",
            medians[0].1, medians[1].1, medians[2].1
        ),
    )]
}

pub fn ramanujan() -> Vec<Check> {
    let cutoff = 100_000u64;
    let mut checks = Vec::new();
    for (s, tol) in [(2.0, 1e-3), (3.0, 1e-6)] {
        let (partial, rhs) = ramanujan_check(s, cutoff);
        let tail = ramanujan_tail_estimate(s, cutoff);
        let gap = (partial + tail - rhs).abs();
        checks.push(check(
            format!("divisor-square Dirichlet series s={s}"),
            gap <= tol,
            format!("|partial+tail - zeta^4/zeta| = {gap:.2e} (tol {tol:.0e})"),
        ));
    }
    checks
}
