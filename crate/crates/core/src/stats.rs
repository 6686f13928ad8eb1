//! Distributional comparison between the character-path family and the
//! limiting process: tail curves of the path maximum, increment moments
//! for the tightness diagnostic, and finite-dimensional moment tables.
//!
//! Tail curves on the two sides are made comparable by thresholding the
//! path maximum at `(e^γ/π)·τ` on the character side and the sup of the
//! sampled series at the same scale; against the conventional `2e^γ·τ`
//! normalisation this is the identity `2π·max|F| > 2e^γτ  ⟺
//! max|F| > (e^γ/π)τ` for the series as evaluated here.

use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use crate::dirichlet::{CharFilter, Parity, PrimeContext};
use crate::moments::{m_limit, mq_direct, MomentSpec};
use crate::paths::PathGrid;
use crate::series::{grid_max_modulus, mc_joint_moment, SeriesForm, Truncation};
use crate::steinhaus::{SeedSpec, SpfSieve, SteinhausSampler};
use crate::sums;

// the scaling constants are pinned at 17 digits
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.57721566490153286;
/// `e^γ/π`
#[allow(clippy::excessive_precision)]
pub const E_GAMMA_OVER_PI: f64 = 0.56693295865554877;
/// `2e^γ`
#[allow(clippy::excessive_precision)]
pub const TWO_E_GAMMA: f64 = 3.5621448359803960;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("tail curves must share the same τ grid")]
    GridMismatch,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase", tag = "source")]
pub enum CurveKind {
    Character {
        q: u32,
        parity: Option<Parity>,
    },
    MonteCarlo {
        samples: u32,
        truncation: u32,
        grid: usize,
    },
}

/// Tail probabilities of the path maximum at increasing thresholds.
#[derive(Debug, Clone, Serialize)]
pub struct TailCurve {
    pub taus: Vec<f64>,
    pub probs: Vec<f64>,
    pub stderr: Vec<f64>,
    pub kind: CurveKind,
}

/// `Φ_q(τ)`: fraction of nonprincipal characters (of the requested parity)
/// with `max_t |S_χ(t)| > (e^γ/π)·τ`. Exact: the maximum of the step
/// function is attained at a vertex.
pub fn phi_q(ctx: &PrimeContext, taus: &[f64], parity: Option<Parity>) -> TailCurve {
    let filter = match parity {
        None => CharFilter::Nonprincipal,
        Some(Parity::Odd) => CharFilter::Odd,
        Some(Parity::Even) => CharFilter::Even,
    };
    let chars: Vec<_> = ctx
        .characters(filter)
        .into_iter()
        .filter(|c| !c.is_principal())
        .collect();
    let maxima: Vec<f64> = chars.par_iter().map(|chi| chi.max_abs_sum()).collect();
    let count = maxima.len() as f64;
    let probs: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            maxima.iter().filter(|&&m| m > E_GAMMA_OVER_PI * tau).count() as f64 / count
        })
        .collect();
    TailCurve {
        taus: taus.to_vec(),
        probs,
        stderr: vec![0.0; taus.len()],
        kind: CurveKind::Character { q: ctx.modulus(), parity },
    }
}

/// Monte Carlo tail curve of the limiting series: the fraction of samples
/// whose grid sup-norm exceeds `(e^γ/π)·τ`, with the binomial standard
/// error per threshold.
pub fn phi_limit(
    taus: &[f64],
    samples: u32,
    n_terms: u32,
    grid_points: usize,
    form: SeriesForm,
    base_seed: u64,
) -> TailCurve {
    let grid = PathGrid::uniform(grid_points);
    let sieve = Arc::new(SpfSieve::new(n_terms.max(2)));
    let maxima: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|stream| {
            let sampler =
                SteinhausSampler::with_sieve(SeedSpec::new(base_seed, stream as u64), sieve.clone());
            grid_max_modulus(&sampler, form, Truncation::Symmetric(n_terms), &grid)
                .expect("truncation within capacity")
        })
        .collect();
    let count = maxima.len() as f64;
    let mut probs = Vec::with_capacity(taus.len());
    let mut stderr = Vec::with_capacity(taus.len());
    for &tau in taus {
        let p = maxima.iter().filter(|&&m| m > E_GAMMA_OVER_PI * tau).count() as f64 / count;
        probs.push(p);
        stderr.push((p * (1.0 - p) / count).sqrt());
    }
    TailCurve {
        taus: taus.to_vec(),
        probs,
        stderr,
        kind: CurveKind::MonteCarlo { samples, truncation: n_terms, grid: grid_points },
    }
}

/// `sup_τ |probs_A − probs_B|` over a shared τ grid.
pub fn ecdf_distance(a: &TailCurve, b: &TailCurve) -> Result<f64, StatsError> {
    if a.taus.len() != b.taus.len() || a.taus.iter().zip(&b.taus).any(|(x, y)| x != y) {
        return Err(StatsError::GridMismatch);
    }
    Ok(a.probs
        .iter()
        .zip(&b.probs)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// `E|f_χ(t) − f_χ(s)|^order` averaged over all nonprincipal characters;
/// `order ∈ {2, 4}`.
pub fn increment_moment(ctx: &PrimeContext, s: f64, t: f64, order: u32) -> f64 {
    assert!(order == 2 || order == 4, "order must be 2 or 4");
    assert!((0.0..=1.0).contains(&s) && s <= t && t <= 1.0);
    let chars: Vec<_> = ctx.characters(CharFilter::Nonprincipal);
    let terms: Vec<f64> = chars
        .par_iter()
        .map(|chi| {
            let v = chi.path_values(&[s, t]);
            let d2 = (v[1] - v[0]).norm_sqr();
            if order == 2 {
                d2
            } else {
                d2 * d2
            }
        })
        .collect();
    sums::pairwise_sum_f64(&terms) / terms.len() as f64
}

/// Increment moments across a gap ladder, with the fitted log-log slope.
#[derive(Debug, Clone, Serialize)]
pub struct IncrementReport {
    pub q: u32,
    pub order: u32,
    /// (s, t) pairs, centered on 1/2.
    pub pairs: Vec<(f64, f64)>,
    pub moments: Vec<f64>,
    pub slope: f64,
}

/// Evaluate `E|f_χ(t) − f_χ(s)|^order` on pairs `(1/2 ∓ h/2)` for each gap
/// `h` and fit the slope of `log moment` against `log h`.
pub fn increment_report(ctx: &PrimeContext, gaps: &[f64], order: u32) -> IncrementReport {
    let pairs: Vec<(f64, f64)> = gaps.iter().map(|&h| (0.5 - h / 2.0, 0.5 + h / 2.0)).collect();
    let moments: Vec<f64> = pairs
        .iter()
        .map(|&(s, t)| increment_moment(ctx, s, t, order))
        .collect();
    let slope = fit_slope(
        &gaps.iter().map(|h| h.ln()).collect::<Vec<_>>(),
        &moments.iter().map(|m| m.ln()).collect::<Vec<_>>(),
    );
    IncrementReport { q: ctx.modulus(), order, pairs, moments, slope }
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

/// Reference side of a finite-dimensional comparison.
#[derive(Debug, Clone, Copy)]
pub enum Baseline {
    /// Divisor-sum limit with the given cutoff.
    Limit { cutoff: u64 },
    /// Monte Carlo over the matching series form.
    MonteCarlo { samples: u32, n_terms: u32, base_seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareEntry {
    pub n_pows: Vec<u32>,
    pub m_pows: Vec<u32>,
    pub mq_re: f64,
    pub mq_im: f64,
    pub reference_re: f64,
    pub reference_im: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub q: u32,
    pub times: Vec<f64>,
    pub parity: Parity,
    pub max_degree: u32,
    pub entries: Vec<CompareEntry>,
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for head in 0..=total {
        for mut rest in compositions(total - head, parts - 1) {
            let mut v = vec![head];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// Tabulate `M_q` against the limiting moment for every balanced pair of
/// multi-indices with `|n̲| = |m̲| ≤ max_degree`.
pub fn finite_dim_compare(
    ctx: &PrimeContext,
    times: &[f64],
    max_degree: u32,
    parity: Parity,
    baseline: Baseline,
) -> CompareReport {
    assert!((1..=3).contains(&max_degree), "degree capped at 3");
    let k = times.len();
    let mut entries = Vec::new();
    for degree in 1..=max_degree {
        let index_sets = compositions(degree, k);
        for n_pows in &index_sets {
            for m_pows in &index_sets {
                let spec =
                    MomentSpec::new(times.to_vec(), n_pows.clone(), m_pows.clone(), parity)
                        .expect("balanced spec");
                let mq = mq_direct(ctx, &spec).value;
                let reference = match baseline {
                    Baseline::Limit { cutoff } => m_limit(&spec, cutoff).value,
                    Baseline::MonteCarlo { samples, n_terms, base_seed } => {
                        let form = match parity {
                            Parity::Odd => SeriesForm::Minus,
                            Parity::Even => SeriesForm::Plus,
                        };
                        mc_joint_moment(form, times, n_pows, m_pows, n_terms, samples, base_seed)
                            .expect("truncation within capacity")
                    }
                };
                entries.push(CompareEntry {
                    n_pows: n_pows.clone(),
                    m_pows: m_pows.clone(),
                    mq_re: mq.re,
                    mq_im: mq.im,
                    reference_re: reference.re,
                    reference_im: reference.im,
                    abs_diff: (mq - reference).norm(),
                });
            }
        }
    }
    CompareReport {
        q: ctx.modulus(),
        times: times.to_vec(),
        parity,
        max_degree,
        entries,
    }
}

/// The loose exponential tail envelope for the series maximum,
/// `exp(-e^{τ-c-2}/τ)` with `c = e^{-γ} log 2`, used as a sanity ceiling
/// for Monte Carlo tail estimates.
pub fn tail_envelope(tau: f64) -> f64 {
    let c = (-EULER_GAMMA).exp() * 2f64.ln();
    (-((tau - c - 2.0).exp()) / tau).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_consistent() {
        assert!((E_GAMMA_OVER_PI - EULER_GAMMA.exp() / std::f64::consts::PI).abs() < 1e-16);
        assert!((TWO_E_GAMMA - 2.0 * EULER_GAMMA.exp()).abs() < 1e-15);
        assert!((TWO_E_GAMMA / E_GAMMA_OVER_PI - 2.0 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn phi_q_shape() {
        let ctx = PrimeContext::new(101).unwrap();
        let taus: Vec<f64> = (0..9).map(|i| i as f64 * 0.25).collect();
        let curve = phi_q(&ctx, &taus, Some(Parity::Odd));
        // τ = 0: every maximum is at least 1/√q > 0
        assert_eq!(curve.probs[0], 1.0);
        // non-increasing
        for w in curve.probs.windows(2) {
            assert!(w[0] >= w[1]);
        }
        let ctx1009 = PrimeContext::new(1009).unwrap();
        let larger = phi_q(&ctx1009, &taus, None);
        assert_eq!(larger.probs[0], 1.0);
        for w in larger.probs.windows(2) {
            assert!(w[0] >= w[1]);
        }
        // τ = 10³: the finite family has a finite maximum
        let far = phi_q(&ctx, &[1000.0], Some(Parity::Odd));
        assert_eq!(far.probs[0], 0.0);
        // both parities partition the nonprincipal family
        let both = phi_q(&ctx, &taus, None);
        let even = phi_q(&ctx, &taus, Some(Parity::Even));
        // odd family has 50 characters, even-nonprincipal 49
        let recombined: Vec<f64> = curve
            .probs
            .iter()
            .zip(&even.probs)
            .map(|(o, e)| (50.0 * o + 49.0 * e) / 99.0)
            .collect();
        for (a, b) in both.probs.iter().zip(&recombined) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_limit_reproducible_and_bounded() {
        let taus = [0.0, 0.5, 1.0, 1.5, 2.0];
        let a = phi_limit(&taus, 200, 500, 129, SeriesForm::Minus, 11);
        let b = phi_limit(&taus, 200, 500, 129, SeriesForm::Minus, 11);
        assert_eq!(a.probs, b.probs);
        assert_eq!(a.stderr, b.stderr);
        // every sample has a strictly positive sup-norm
        assert_eq!(a.probs[0], 1.0);
        for w in a.probs.windows(2) {
            assert!(w[0] >= w[1]);
        }
        // loose envelope sanity at τ = 2 (factor-3 slack)
        assert!(a.probs[4] <= 3.0 * tail_envelope(2.0));
    }

    #[test]
    fn ecdf_distance_basics() {
        let ctx = PrimeContext::new(101).unwrap();
        let taus = [0.25, 0.5, 1.0];
        let curve = phi_q(&ctx, &taus, Some(Parity::Odd));
        assert_eq!(ecdf_distance(&curve, &curve).unwrap(), 0.0);
        let mut shifted = curve.clone();
        for p in &mut shifted.probs {
            *p -= 0.1;
        }
        assert!((ecdf_distance(&curve, &shifted).unwrap() - 0.1).abs() < 1e-15);
        let mut other = curve.clone();
        other.taus[0] = 0.3;
        assert_eq!(ecdf_distance(&curve, &other), Err(StatsError::GridMismatch));
    }

    #[test]
    fn increment_moment_basics() {
        let ctx = PrimeContext::new(101).unwrap();
        assert_eq!(increment_moment(&ctx, 0.3, 0.3, 4), 0.0);
        // trivial bound E|Δf|^{2k} ≤ q^k |t-s|^{2k}
        let m4 = increment_moment(&ctx, 0.2, 0.7, 4);
        assert!(m4 <= 101f64.powi(2) * 0.5f64.powi(4));
        let m2 = increment_moment(&ctx, 0.2, 0.7, 2);
        assert!(m2 <= 101.0 * 0.25);
        // symmetric in the pair: moment depends only on the two endpoints
        let a = increment_moment(&ctx, 0.25, 0.75, 4);
        let b = increment_moment(&ctx, 0.25, 0.75, 4);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn trivial_bound_never_violated_random() {
        // 10^3 random (q, s, t, order) draws in total
        let mut state = 5u64;
        for &q in &[101u64, 1009] {
            let ctx = PrimeContext::new(q).unwrap();
            for _ in 0..250 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                let mut s = (state >> 11) as f64 / (1u64 << 53) as f64;
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                let mut t = (state >> 11) as f64 / (1u64 << 53) as f64;
                if s > t {
                    std::mem::swap(&mut s, &mut t);
                }
                for order in [2u32, 4] {
                    let m = increment_moment(&ctx, s, t, order);
                    let k = order / 2;
                    let bound = (q as f64).powi(k as i32) * (t - s).powi(order as i32);
                    assert!(m <= bound + 1e-12, "q={q} s={s} t={t} order={order}");
                }
            }
        }
    }

    #[test]
    fn finite_dim_compare_large_modulus() {
        let ctx = PrimeContext::new(10_007).unwrap();
        let report = finite_dim_compare(
            &ctx,
            &[0.5],
            1,
            Parity::Odd,
            Baseline::Limit { cutoff: 100_000 },
        );
        let entry = &report.entries[0];
        assert!((entry.reference_re - 0.5).abs() < 1e-3);
        assert!(entry.abs_diff <= 0.05, "diff={}", entry.abs_diff);
    }

    #[test]
    fn finite_dim_compare_monte_carlo_baseline() {
        let ctx = PrimeContext::new(101).unwrap();
        let report = finite_dim_compare(
            &ctx,
            &[0.5],
            1,
            Parity::Odd,
            Baseline::MonteCarlo { samples: 2000, n_terms: 1000, base_seed: 31 },
        );
        let entry = &report.entries[0];
        // MC noise ~ 0.011 plus the q=101 family gap ~ 0.012
        assert!(entry.abs_diff < 0.1, "diff={}", entry.abs_diff);
        assert!((entry.reference_re - 0.5).abs() < 0.06);
    }

    #[test]
    fn finite_dim_compare_at_zero_time() {
        let ctx = PrimeContext::new(101).unwrap();
        let report = finite_dim_compare(
            &ctx,
            &[0.0],
            2,
            Parity::Odd,
            Baseline::Limit { cutoff: 100 },
        );
        for entry in &report.entries {
            assert_eq!(entry.mq_re, 0.0);
            assert_eq!(entry.mq_im, 0.0);
            assert_eq!(entry.reference_re, 0.0);
        }
    }

    #[test]
    fn finite_dim_compare_small_modulus() {
        let ctx = PrimeContext::new(1009).unwrap();
        let report = finite_dim_compare(
            &ctx,
            &[0.5],
            1,
            Parity::Odd,
            Baseline::Limit { cutoff: 50_000 },
        );
        assert_eq!(report.entries.len(), 1);
        let entry = &report.entries[0];
        assert!((entry.reference_re - 0.5).abs() < 2e-3);
        assert!(entry.abs_diff < 0.05, "diff={}", entry.abs_diff);
    }

    #[test]
    fn compositions_enumerate_exactly() {
        let c = compositions(3, 2);
        assert_eq!(c.len(), 4); // (0,3) (1,2) (2,1) (3,0)
        assert!(c.iter().all(|v| v.iter().sum::<u32>() == 3));
        assert_eq!(compositions(2, 1), vec![vec![2]]);
    }
}
