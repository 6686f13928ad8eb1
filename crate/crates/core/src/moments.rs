//! Joint moments of character paths and of the limiting series.
//!
//! The finite-family moment is a plain average over characters of one
//! parity. Its structural form, and the limiting moment, are divisor sums
//! built from the weighted factorization counts
//!
//! `β_{N,t}(x) = (1/x) Σ_{y₁⋯y_N = x} Π_j w(y_j t)`
//!
//! with `w(u) = 1 − cos 2πu` on the odd side and `sin 2πu` on the even
//! side, composed into `𝓑_{N̲,t̲}(x) = Σ_{x₁⋯x_k = x} Π_i β_{N_i,t_i}(x_i)`.
//! Balanced moments reduce to `π^{-2n} Σ_a 𝓑_{n̲}(a)𝓑_{m̲}(a)` (with a
//! `Σ₋` reflection term at finite q); unbalanced limiting moments vanish
//! because the global phase η averages to zero.
//!
//! The module also carries the verification surface for the supporting
//! identities: ordered-divisor counts, hyper-Kloosterman sums against the
//! twisted Gauss-sum averages they must match, and the
//! `Σ d(n)²/n^s = ζ(s)⁴/ζ(2s)` self-test of the divisor machinery.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dirichlet::{is_prime, CharFilter, Parity, PrimeContext};
use crate::series::powu;
use crate::steinhaus::SpfSieve;
use crate::sums;
use crate::trig;
use crate::zeta::zeta;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MomentError {
    #[error("t values must lie in [0,1] and increase strictly")]
    BadTimes,
    #[error("t, n and m must have the same length, with |n|+|m| ≥ 1")]
    BadShape,
    #[error("method requires |n| = |m|")]
    DegreeMismatch,
    #[error("modulus {0} is not an odd prime")]
    NotPrime(u64),
    #[error("residue {b} is not invertible mod {q}")]
    BadResidue { b: u64, q: u64 },
    #[error("divisor count overflows u64")]
    Overflow,
    #[error("enumeration of size ~{0} refused")]
    TooLarge(u128),
}

/// The tuple `(t̲, n̲, m̲, parity)` defining one joint moment.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSpec {
    times: Vec<f64>,
    n_pows: Vec<u32>,
    m_pows: Vec<u32>,
    parity: Parity,
}

impl MomentSpec {
    pub fn new(
        times: Vec<f64>,
        n_pows: Vec<u32>,
        m_pows: Vec<u32>,
        parity: Parity,
    ) -> Result<Self, MomentError> {
        if times.is_empty()
            || times.len() != n_pows.len()
            || times.len() != m_pows.len()
            || n_pows.iter().chain(&m_pows).sum::<u32>() == 0
        {
            return Err(MomentError::BadShape);
        }
        let in_range = times.iter().all(|t| (0.0..=1.0).contains(t));
        let increasing = times.windows(2).all(|w| w[0] < w[1]);
        if !in_range || !increasing {
            return Err(MomentError::BadTimes);
        }
        Ok(MomentSpec { times, n_pows, m_pows, parity })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn n_pows(&self) -> &[u32] {
        &self.n_pows
    }

    pub fn m_pows(&self) -> &[u32] {
        &self.m_pows
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn k(&self) -> usize {
        self.times.len()
    }

    pub fn total_n(&self) -> u32 {
        self.n_pows.iter().sum()
    }

    pub fn total_m(&self) -> u32 {
        self.m_pows.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentMethod {
    Direct,
    Sigma,
    Limit,
}

#[derive(Debug, Clone, Copy)]
pub struct MomentResult {
    pub value: Complex64,
    pub method: MomentMethod,
    pub truncation: Option<u64>,
    pub error_estimate: f64,
}

// ---------------------------------------------------------------------------
// divisor machinery
// ---------------------------------------------------------------------------

fn trial_factorize(mut x: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while x > 1 && d <= x / d {
        if x % d == 0 {
            let mut a = 0;
            while x % d == 0 {
                x /= d;
                a += 1;
            }
            out.push((d, a));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if x > 1 {
        out.push((x, 1));
    }
    out
}

fn divisors_from(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(p, a) in factors {
        let base = divs.clone();
        let mut pk = 1u64;
        for _ in 0..a {
            pk *= p;
            divs.extend(base.iter().map(|d| d * pk));
        }
    }
    divs.sort_unstable();
    divs
}

/// All divisors of `x`, ascending.
pub fn divisors(x: u64) -> Vec<u64> {
    divisors_from(&trial_factorize(x))
}

fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul((n - k + i) as u128)?;
        acc /= i as u128;
    }
    Some(acc)
}

/// `d_N(x)`: the number of ordered `N`-tuples of positive integers with
/// product `x`, from the prime signature via `Π C(aᵢ+N-1, N-1)`.
pub fn divisor_count_n(n_fold: u32, x: u64) -> Result<u64, MomentError> {
    if n_fold == 0 {
        return Ok(u64::from(x == 1));
    }
    let mut acc: u128 = 1;
    for (_, a) in trial_factorize(x) {
        let c = binomial_u128((a + n_fold - 1) as u64, (n_fold - 1) as u64)
            .ok_or(MomentError::Overflow)?;
        acc = acc.checked_mul(c).ok_or(MomentError::Overflow)?;
    }
    u64::try_from(acc).map_err(|_| MomentError::Overflow)
}

fn weight(y: u64, t: f64, parity: Parity) -> f64 {
    match parity {
        Parity::Odd => 1.0 - trig::cos_2pi(y as f64 * t),
        Parity::Even => trig::sin_2pi(y as f64 * t),
    }
}

/// Σ over ordered `n_fold`-tuples `y₁⋯y_N = x`, every `yⱼ ≤ cap`, of
/// `Π w(yⱼ t)`. `all_divs` must contain every divisor of `x`.
fn tuple_weight_sum(
    n_fold: u32,
    x: u64,
    cap: u64,
    t: f64,
    parity: Parity,
    all_divs: &[u64],
) -> f64 {
    if n_fold == 0 {
        return f64::from(u8::from(x == 1));
    }
    if n_fold == 1 {
        return if x <= cap { weight(x, t, parity) } else { 0.0 };
    }
    let mut acc = 0.0;
    for &y in all_divs.iter().take_while(|&&d| d <= x.min(cap)) {
        if x % y == 0 {
            acc += weight(y, t, parity) * tuple_weight_sum(n_fold - 1, x / y, cap, t, parity, all_divs);
        }
    }
    acc
}

fn beta_with_divisors(
    n_fold: u32,
    t: f64,
    x: u64,
    modulus: Option<u64>,
    parity: Parity,
    all_divs: &[u64],
) -> f64 {
    if let Some(q) = modulus {
        if x % q == 0 {
            return 0.0;
        }
    }
    let cap = modulus.unwrap_or(u64::MAX);
    tuple_weight_sum(n_fold, x, cap, t, parity, all_divs) / x as f64
}

/// `β_{N,t}(x)`, optionally capped by a modulus `q` (each factor `≤ q`,
/// zero when `q | x`).
pub fn beta(n_fold: u32, t: f64, x: u64, modulus: Option<u64>, parity: Parity) -> f64 {
    beta_with_divisors(n_fold, t, x, modulus, parity, &divisors(x))
}

fn cal_b_with_divisors(
    n_pows: &[u32],
    times: &[f64],
    x: u64,
    modulus: Option<u64>,
    parity: Parity,
    all_divs: &[u64],
) -> f64 {
    debug_assert_eq!(n_pows.len(), times.len());
    if let Some(q) = modulus {
        if x % q == 0 {
            return 0.0;
        }
    }
    if n_pows.len() == 1 {
        return beta_with_divisors(n_pows[0], times[0], x, modulus, parity, all_divs);
    }
    // component cap q^{N_1}; saturation just disables the cap
    let cap0 = modulus
        .map(|q| q.saturating_pow(n_pows[0]))
        .unwrap_or(u64::MAX);
    let mut acc = 0.0;
    for &x1 in all_divs.iter().take_while(|&&d| d <= x.min(cap0)) {
        if x % x1 == 0 {
            let head = beta_with_divisors(n_pows[0], times[0], x1, modulus, parity, all_divs);
            if head != 0.0 {
                acc += head
                    * cal_b_with_divisors(&n_pows[1..], &times[1..], x / x1, modulus, parity, all_divs);
            }
        }
    }
    acc
}

/// `𝓑_{N̲,t̲}(x) = Σ_{x₁⋯x_k = x} Π_i β_{N_i,t_i}(x_i)`, with the component
/// caps `x_i ≤ q^{N_i}` and the vanishing at `q | x` when a modulus is given.
pub fn cal_b(n_pows: &[u32], times: &[f64], x: u64, modulus: Option<u64>, parity: Parity) -> f64 {
    cal_b_with_divisors(n_pows, times, x, modulus, parity, &divisors(x))
}

// ---------------------------------------------------------------------------
// moments
// ---------------------------------------------------------------------------

/// Exact family average
/// `(2/φ(q)) Σ_χ Π_i f_χ(t_i)^{n_i} conj(f_χ(t_i))^{m_i}`
/// over the nonprincipal characters of the spec's parity.
pub fn mq_direct(ctx: &PrimeContext, spec: &MomentSpec) -> MomentResult {
    let filter = match spec.parity {
        Parity::Odd => CharFilter::Odd,
        Parity::Even => CharFilter::Even,
    };
    let chars: Vec<_> = ctx
        .characters(filter)
        .into_iter()
        .filter(|c| !c.is_principal())
        .collect();
    let total = sums::par_sum_indexed(chars.len(), |i| {
        let values = chars[i].path_values(&spec.times);
        let mut product = Complex64::new(1.0, 0.0);
        for (idx, &f) in values.iter().enumerate() {
            product *= powu(f, spec.n_pows[idx]);
            product *= powu(f.conj(), spec.m_pows[idx]);
        }
        product
    });
    MomentResult {
        value: total * (2.0 / ctx.phi() as f64),
        method: MomentMethod::Direct,
        truncation: None,
        error_estimate: 0.0,
    }
}

/// Structural form of the balanced finite-q moment:
/// `π^{-2n} (Σ₊ ∓ Σ₋)` with
/// `Σ₊ = Σ_{a<q} 𝓑_{n̲}(a)𝓑_{m̲}(a)`, `Σ₋ = Σ_{a<q} 𝓑_{n̲}(a)𝓑_{m̲}(q-a)`
/// (minus for odd parity, plus for even), using the limiting uncapped `𝓑`,
/// which coincides with the capped one on `a < q`. The reported error
/// estimate is the `(log q)^{2n}/√q` scale of the discarded terms.
pub fn mq_sigma(q: u64, spec: &MomentSpec) -> Result<MomentResult, MomentError> {
    if q < 3 || !is_prime(q) {
        return Err(MomentError::NotPrime(q));
    }
    let n = spec.total_n();
    if n != spec.total_m() {
        return Err(MomentError::DegreeMismatch);
    }
    let bn: Vec<f64> = (1..q)
        .into_par_iter()
        .map(|a| cal_b(&spec.n_pows, &spec.times, a, None, spec.parity))
        .collect();
    let bm: Vec<f64> = (1..q)
        .into_par_iter()
        .map(|a| cal_b(&spec.m_pows, &spec.times, a, None, spec.parity))
        .collect();
    let len = bn.len();
    let sigma_plus =
        sums::pairwise_sum_f64(&(0..len).map(|i| bn[i] * bm[i]).collect::<Vec<_>>());
    // b = q - a pairs index i with len-1-i
    let sigma_minus =
        sums::pairwise_sum_f64(&(0..len).map(|i| bn[i] * bm[len - 1 - i]).collect::<Vec<_>>());
    let combined = match spec.parity {
        Parity::Odd => sigma_plus - sigma_minus,
        Parity::Even => sigma_plus + sigma_minus,
    };
    let scale = std::f64::consts::PI.powi(-2 * n as i32);
    Ok(MomentResult {
        value: Complex64::new(scale * combined, 0.0),
        method: MomentMethod::Sigma,
        truncation: Some(q - 1),
        error_estimate: (q as f64).ln().powi(2 * n as i32) / (q as f64).sqrt(),
    })
}

/// The reflection term `π^{-2n} Σ_{a<q} 𝓑_{n̲}(a)𝓑_{m̲}(q-a)` on its own;
/// it decays like `q^{ε-1} log q` and is the part dropped between the two
/// parities.
pub fn sigma_minus_term(q: u64, spec: &MomentSpec) -> Result<f64, MomentError> {
    if q < 3 || !is_prime(q) {
        return Err(MomentError::NotPrime(q));
    }
    let n = spec.total_n();
    if n != spec.total_m() {
        return Err(MomentError::DegreeMismatch);
    }
    let terms: Vec<f64> = (1..q)
        .into_par_iter()
        .map(|a| {
            cal_b(&spec.n_pows, &spec.times, a, None, spec.parity)
                * cal_b(&spec.m_pows, &spec.times, q - a, None, spec.parity)
        })
        .collect();
    Ok(sums::pairwise_sum_f64(&terms) * std::f64::consts::PI.powi(-2 * n as i32))
}

/// Limiting moment. Unbalanced specs (`|n̲| ≠ |m̲|`) are exactly zero (the
/// η-average vanishes). Balanced specs return
/// `π^{-2n} Σ_{a ≤ A} 𝓑_{n̲,t̲}(a)𝓑_{m̲,t̲}(a)` with the Cauchy difference
/// `|partial(2A) − partial(A)|` as the reported truncation error.
pub fn m_limit(spec: &MomentSpec, cutoff: u64) -> MomentResult {
    let n = spec.total_n();
    if n != spec.total_m() {
        return MomentResult {
            value: Complex64::new(0.0, 0.0),
            method: MomentMethod::Limit,
            truncation: Some(cutoff),
            error_estimate: 0.0,
        };
    }
    let cutoff = cutoff.max(1);
    assert!(cutoff <= 1 << 30, "divisor-sum cutoff past desk scale");
    let sieve = SpfSieve::new((2 * cutoff).max(2) as u32);
    let bb = |a: u64| -> f64 {
        let factors: Vec<(u64, u32)> = sieve
            .factorize(a as u32)
            .into_iter()
            .map(|(p, e)| (p as u64, e))
            .collect();
        let divs = divisors_from(&factors);
        cal_b_with_divisors(&spec.n_pows, &spec.times, a, None, spec.parity, &divs)
            * cal_b_with_divisors(&spec.m_pows, &spec.times, a, None, spec.parity, &divs)
    };
    let head = sums::par_sum_range_f64(1, cutoff, bb);
    let tail = sums::par_sum_range_f64(cutoff + 1, 2 * cutoff, bb);
    let scale = std::f64::consts::PI.powi(-2 * n as i32);
    MomentResult {
        value: Complex64::new(scale * head, 0.0),
        method: MomentMethod::Limit,
        truncation: Some(cutoff),
        error_estimate: (scale * tail).abs(),
    }
}

// ---------------------------------------------------------------------------
// exponential-sum checks
// ---------------------------------------------------------------------------

/// Hyper-Kloosterman sum `Σ_{x₁⋯x_N ≡ b (q)} e((x₁+⋯+x_N)/q)` by direct
/// enumeration of `q^{N-1}` tuples; guarded to `N ≤ 3`, `q ≤ 101`.
pub fn hyper_kloosterman(q: u64, n_fold: u32, b: u64) -> Result<Complex64, MomentError> {
    if q < 3 || !is_prime(q) {
        return Err(MomentError::NotPrime(q));
    }
    if b % q == 0 {
        return Err(MomentError::BadResidue { b, q });
    }
    if n_fold > 3 || q > 101 {
        return Err(MomentError::TooLarge(
            (q as u128).pow(n_fold.saturating_sub(1)),
        ));
    }
    let b = b % q;
    if n_fold == 0 {
        // empty products: the sum is the indicator of b ≡ 1
        return Ok(Complex64::new(f64::from(u8::from(b == 1)), 0.0));
    }
    // x^{-1} table via Fermat
    let inv: Vec<u64> = (0..q)
        .map(|x| if x == 0 { 0 } else { pow_mod(x, q - 2, q) })
        .collect();
    let e_table: Vec<Complex64> = (0..q).map(|n| trig::e(n as f64 / q as f64)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    // odometer over the N-1 free coordinates
    let free = (n_fold - 1) as usize;
    let mut xs = vec![1u64; free];
    loop {
        let mut prod = 1u64;
        let mut sum = 0u64;
        for &x in &xs {
            prod = prod * x % q;
            sum += x;
        }
        let last = b * inv[prod as usize] % q;
        acc += e_table[((sum + last) % q) as usize];
        // advance
        let mut i = 0;
        loop {
            if i == free {
                return Ok(acc);
            }
            xs[i] += 1;
            if xs[i] < q {
                break;
            }
            xs[i] = 1;
            i += 1;
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// `(2/φ(q)) Σ_{χ(-1)=σ} χ(a) τ(χ)^N` over the full parity class (the
/// principal character included on the even side), from cached Gauss sums.
pub fn twisted_gauss_average(
    ctx: &PrimeContext,
    n_fold: u32,
    a: u64,
    parity: Parity,
) -> Complex64 {
    let filter = match parity {
        Parity::Odd => CharFilter::Odd,
        Parity::Even => CharFilter::Even,
    };
    let chars = ctx.characters(filter);
    let total = sums::pairwise_sum(
        &chars
            .iter()
            .map(|chi| chi.value(a as i64) * powu(chi.gauss_sum(), n_fold))
            .collect::<Vec<_>>(),
    );
    total * (2.0 / ctx.phi() as f64)
}

// ---------------------------------------------------------------------------
// divisor identities
// ---------------------------------------------------------------------------

/// `d_{N₁}(x₁)·d_{N₂}(x₂) ≤ d_{N₁+N₂}(x₁x₂)`.
pub fn divisor_lemma_check(x1: u64, x2: u64, n1: u32, n2: u32) -> Result<bool, MomentError> {
    let lhs = (divisor_count_n(n1, x1)? as u128) * (divisor_count_n(n2, x2)? as u128);
    let rhs = divisor_count_n(n1 + n2, x1.checked_mul(x2).ok_or(MomentError::Overflow)?)?;
    Ok(lhs <= rhs as u128)
}

fn divisor_count_table(cutoff: u64) -> Vec<u32> {
    let mut d = vec![0u32; cutoff as usize + 1];
    for i in 1..=cutoff as usize {
        for multiple in (i..=cutoff as usize).step_by(i) {
            d[multiple] += 1;
        }
    }
    d
}

/// `(Σ_{n≤A} d(n)²/n^s, ζ(s)⁴/ζ(2s))` — the divisor-machinery self-test.
pub fn ramanujan_check(s: f64, cutoff: u64) -> (f64, f64) {
    assert!(s > 1.0);
    let d = divisor_count_table(cutoff);
    let partial = sums::par_sum_range_f64(1, cutoff, |n| {
        let dn = d[n as usize] as f64;
        dn * dn / (n as f64).powf(s)
    });
    (partial, zeta(s).powi(4) / zeta(2.0 * s))
}

/// Estimated tail `Σ_{n>A} d(n)²/n^s`, extrapolating the empirical mean of
/// `d(n)²` over the trailing fifth of the table as `D̄·(ln x / ln A)³`.
pub fn ramanujan_tail_estimate(s: f64, cutoff: u64) -> f64 {
    assert!(s > 1.0 && cutoff >= 10);
    let d = divisor_count_table(cutoff);
    let window = (cutoff / 5).max(1);
    let mut mean = 0.0;
    for n in (cutoff - window + 1)..=cutoff {
        let dn = d[n as usize] as f64;
        mean += dn * dn;
    }
    mean /= window as f64;
    // I_k = ∫_A^∞ ln^k x / x^s dx = ln^k A/((s-1)A^{s-1}) + k/(s-1)·I_{k-1}
    let a = cutoff as f64;
    let base = (s - 1.0) * a.powf(s - 1.0);
    let mut integral = 1.0 / base;
    for k in 1..=3u32 {
        integral = a.ln().powi(k as i32) / base + k as f64 / (s - 1.0) * integral;
    }
    mean * integral / a.ln().powi(3)
}
