//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible under `cargo test -- --nocapture`). Exact identities are
//! checked at rounding scale, divisor/exponential-sum identities against
//! brute-force oracles, and the asymptotic statements as convergence
//! trends at pinned tolerances.

use std::sync::Arc;

use charpath_core::moments::{
    divisor_lemma_check, hyper_kloosterman, m_limit, mq_direct, ramanujan_check,
    ramanujan_tail_estimate, twisted_gauss_average, MomentSpec,
};
use charpath_core::series::{
    eval_f_plus, mc_joint_moment, rough_norm, EtaMode, SeriesForm,
};
use charpath_core::stats::{ecdf_distance, increment_report, phi_limit, phi_q};
use charpath_core::steinhaus::{SeedSpec, Sign, SpfSieve, SteinhausSampler};
use charpath_core::trig;
use charpath_core::{CharFilter, Complex64, Parity, PathGrid, PrimeContext};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {id:02} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id:02} {name}: {detail}");
}

#[test]
fn c01_exact_identities() {
    // character orthogonality
    let mut worst_orth = 0.0f64;
    for q in [5u64, 13, 101] {
        let ctx = PrimeContext::new(q).unwrap();
        let chars = ctx.characters(CharFilter::All);
        for a in 1..q as u32 {
            for b in 1..q as u32 {
                let mut acc = Complex64::new(0.0, 0.0);
                for chi in &chars {
                    acc += chi.value_at_residue(a) * chi.value_at_residue(b).conj();
                }
                acc /= (q - 1) as f64;
                let expected = if a == b { 1.0 } else { 0.0 };
                worst_orth = worst_orth.max((acc - Complex64::new(expected, 0.0)).norm());
            }
        }
    }
    // Gauss-sum modulus
    let mut worst_gauss = 0.0f64;
    for q in [5u64, 101, 1009] {
        let ctx = PrimeContext::new(q).unwrap();
        for chi in ctx.characters(CharFilter::Nonprincipal) {
            worst_gauss =
                worst_gauss.max((chi.gauss_sum().norm_sqr() - q as f64).abs() / (1e-8 * q as f64));
        }
    }
    // path closure
    let mut worst_closure = 0.0f64;
    for q in [5u64, 101, 1009] {
        let ctx = PrimeContext::new(q).unwrap();
        for chi in ctx.characters(CharFilter::Nonprincipal) {
            worst_closure = worst_closure.max(chi.path_value(0.0).norm());
            worst_closure = worst_closure.max(chi.path_value(1.0).norm());
        }
    }
    // F_plus(1/2) = 0 exactly
    let mut plus_exact = true;
    for seed in [1u64, 99, 123456] {
        let s = SteinhausSampler::new(SeedSpec::new(seed, 0), 4096);
        for n in [1u32, 64, 4096] {
            plus_exact &=
                eval_f_plus(&s, s.eta(), 0.5, n).unwrap() == Complex64::new(0.0, 0.0);
        }
    }
    let pass = worst_orth < 1e-10 && worst_gauss <= 1.0 && worst_closure <= 1e-12 && plus_exact;
    report(
        1,
        "exact identities",
        pass,
        &format!(
            "orthogonality {worst_orth:.1e}, gauss ratio {worst_gauss:.2}, closure {worst_closure:.1e}, F+(1/2) exact = {plus_exact}"
        ),
    );
}

#[test]
fn c02_fourier_expansion_accuracy() {
    let q = 1009u64;
    let ctx = PrimeContext::new(q).unwrap();
    let bound = 10.0 * (q as f64).ln() / (q as f64).sqrt();
    let grid = PathGrid::uniform(256);
    // 20 nonprincipal indices from a fixed linear-congruential draw
    let mut state = 0xA5A5u64;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let j = 1 + (state >> 33) as u32 % (q as u32 - 2);
        let chi = ctx.character(j).unwrap();
        let exact = chi.path_values(grid.points());
        for (i, &t) in grid.points().iter().enumerate() {
            let err = (chi.fourier_path(t, q as u32 - 1).unwrap() - exact[i]).norm();
            worst = worst.max(err);
        }
    }
    report(
        2,
        "Fourier expansion accuracy",
        worst <= bound,
        &format!("max error {worst:.3} <= {bound:.3} at q={q}"),
    );
}

#[test]
fn c03_limit_moment_against_oracle() {
    let spec = MomentSpec::new(vec![0.5], vec![1], vec![1], Parity::Odd).unwrap();
    let got = m_limit(&spec, 100_000).value.re;
    // independent single-loop oracle
    let mut oracle = 0.0;
    for a in 1..=100_000u64 {
        let w = 1.0 - trig::cos_2pi(a as f64 * 0.5);
        oracle += w * w / (a * a) as f64;
    }
    oracle /= std::f64::consts::PI.powi(2);
    let near_half = (got - 0.5).abs();
    let vs_oracle = (got - oracle).abs();
    report(
        3,
        "limiting moment oracle",
        near_half <= 1e-3 && vs_oracle <= 1e-10,
        &format!("M = {got:.6}, |M - 1/2| = {near_half:.2e}, |M - oracle| = {vs_oracle:.2e}"),
    );
}

#[test]
fn c04_monte_carlo_second_moments() {
    let samples = 10_000u32;
    let n_terms = 10_000u32;
    let minus = mc_joint_moment(SeriesForm::Minus, &[0.5], &[1], &[1], n_terms, samples, 2718)
        .unwrap()
        .re;
    let plus = mc_joint_moment(SeriesForm::Plus, &[0.25], &[1], &[1], n_terms, samples, 2718)
        .unwrap()
        .re;
    let pass = (minus - 0.5).abs() <= 0.02 && (plus - 0.125).abs() <= 0.01;
    report(
        4,
        "Monte Carlo second moments",
        pass,
        &format!("E|F-(1/2)|^2 = {minus:.4} (0.5 +- 0.02), E|F+(1/4)|^2 = {plus:.4} (0.125 +- 0.01)"),
    );
}

#[test]
fn c05_moment_convergence_trend() {
    let spec = MomentSpec::new(vec![0.5], vec![1], vec![1], Parity::Odd).unwrap();
    let errs: Vec<f64> = [101u64, 1009, 10007]
        .iter()
        .map(|&q| {
            let ctx = PrimeContext::new(q).unwrap();
            (mq_direct(&ctx, &spec).value - Complex64::new(0.5, 0.0)).norm()
        })
        .collect();
    let pass = errs[0] > errs[1] && errs[1] > errs[2] && errs[2] <= 0.05;
    report(
        5,
        "moment convergence trend",
        pass,
        &format!("|Mq - 1/2| = {:.5} > {:.5} > {:.5} (last <= 0.05)", errs[0], errs[1], errs[2]),
    );
}

#[test]
fn c06_unbalanced_moment_decay() {
    let spec = MomentSpec::new(vec![0.5], vec![1], vec![2], Parity::Odd).unwrap();
    let mags: Vec<f64> = [101u64, 1009, 10007]
        .iter()
        .map(|&q| {
            let ctx = PrimeContext::new(q).unwrap();
            mq_direct(&ctx, &spec).value.norm()
        })
        .collect();
    let pass = mags[0] > mags[1] && mags[1] > mags[2];
    report(
        6,
        "unbalanced moment decay",
        pass,
        &format!("|Mq| = {:.5} > {:.5} > {:.5}", mags[0], mags[1], mags[2]),
    );
}

#[test]
fn c07_deligne_suite() {
    let mut worst_ratio = 0.0f64;
    let mut worst_gap = 0.0f64;
    for q in [7u64, 11, 13] {
        let ctx = PrimeContext::new(q).unwrap();
        for n_fold in 1..=3u32 {
            let bound = 2.0 * n_fold as f64 * (q as f64).powf((n_fold as f64 - 1.0) / 2.0);
            for a in 1..q {
                for parity in [Parity::Odd, Parity::Even] {
                    let v = twisted_gauss_average(&ctx, n_fold, a, parity).norm();
                    worst_ratio = worst_ratio.max(v / bound);
                }
            }
        }
        for a in 1..q {
            // a^{-1} by Fermat
            let mut inv = 1u64;
            let mut base = a;
            let mut exp = q - 2;
            while exp > 0 {
                if exp & 1 == 1 {
                    inv = inv * base % q;
                }
                base = base * base % q;
                exp >>= 1;
            }
            for (parity, sigma) in [(Parity::Even, 1.0), (Parity::Odd, -1.0)] {
                let lhs = twisted_gauss_average(&ctx, 2, a, parity);
                let rhs = hyper_kloosterman(q, 2, inv).unwrap()
                    + sigma * hyper_kloosterman(q, 2, q - inv).unwrap();
                worst_gap = worst_gap.max((lhs - rhs).norm());
            }
        }
    }
    let pass = worst_ratio <= 1.0 + 1e-9 && worst_gap <= 1e-8;
    report(
        7,
        "Deligne bound and hyper-Kloosterman cross-check",
        pass,
        &format!("max |avg|/bound = {worst_ratio:.4}, max cross-check gap = {worst_gap:.2e}"),
    );
}

#[test]
fn c08_divisor_lemma_and_ramanujan() {
    let mut state = 0xFACEu64;
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
    let cutoff = 100_000u64;
    let (p2, rhs2) = ramanujan_check(2.0, cutoff);
    let gap2 = (p2 + ramanujan_tail_estimate(2.0, cutoff) - rhs2).abs();
    let (p3, rhs3) = ramanujan_check(3.0, cutoff);
    let gap3 = (p3 + ramanujan_tail_estimate(3.0, cutoff) - rhs3).abs();
    let pass = violations == 0 && gap2 <= 1e-3 && gap3 <= 1e-6;
    report(
        8,
        "divisor lemma and Ramanujan identity",
        pass,
        &format!("violations = {violations}, s=2 gap {gap2:.2e} (tol 1e-3), s=3 gap {gap3:.2e} (tol 1e-6)"),
    );
}

#[test]
fn c09_rough_tail_trend() {
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
        medians.push(0.5 * (norms[24] + norms[25]));
    }
    let pass = medians[0] > medians[1] && medians[1] > medians[2];
    report(
        9,
        "rough-tail trend",
        pass,
        &format!("medians {:.4} > {:.4} > {:.4}", medians[0], medians[1], medians[2]),
    );
}

#[test]
fn c10_tightness_statistic() {
    let q = 1009u64;
    let ctx = PrimeContext::new(q).unwrap();
    let gaps: Vec<f64> = (1..=6).map(|e| 2f64.powi(-e)).collect();
    let rep = increment_report(&ctx, &gaps, 4);
    let mut trivial_ok = true;
    for (i, &h) in gaps.iter().enumerate() {
        trivial_ok &= rep.moments[i] <= (q as f64).powi(2) * h.powi(4) + 1e-12;
    }
    let pass = rep.slope >= 1.5 && trivial_ok;
    report(
        10,
        "tightness statistic",
        pass,
        &format!("log-log slope = {:.3} (>= 1.5), trivial bound held = {trivial_ok}", rep.slope),
    );
}

#[test]
fn c11_distribution_match() {
    let taus: Vec<f64> = (0..8).map(|i| 0.25 + i as f64 * 0.25).collect();
    let ctx = PrimeContext::new(10_007).unwrap();
    let character_curve = phi_q(&ctx, &taus, Some(Parity::Odd));
    let mc_curve = phi_limit(&taus, 10_000, 10_000, 4096, SeriesForm::Minus, 1009);
    let d = ecdf_distance(&character_curve, &mc_curve).unwrap();
    report(
        11,
        "distribution match",
        d <= 0.05,
        &format!("sup_tau |Phi_q - Phi_MC| = {d:.4} (<= 0.05)"),
    );
}

#[test]
fn c12_determinism_within_library() {
    // byte determinism of the CLI across thread counts is exercised in the
    // cli crate's acceptance test; here: repeated library runs are bitwise
    // stable, including under sampled η and parallel ensembles
    let spec = MomentSpec::new(vec![0.25, 0.5], vec![1, 1], vec![0, 2], Parity::Odd).unwrap();
    let ctx = PrimeContext::new(1009).unwrap();
    let a = mq_direct(&ctx, &spec).value;
    let b = mq_direct(&ctx, &spec).value;
    let series_spec = charpath_core::SeriesSpec {
        form: SeriesForm::General(Sign::Minus),
        truncation: charpath_core::Truncation::Symmetric(2048),
        grid: PathGrid::uniform(257),
        eta_mode: EtaMode::Sampled,
    };
    let ens_a = charpath_core::series::sample_ensemble(&series_spec, 16, 7).unwrap();
    let ens_b = charpath_core::series::sample_ensemble(&series_spec, 16, 7).unwrap();
    let same_ensemble = ens_a
        .iter()
        .zip(&ens_b)
        .all(|(x, y)| x.values == y.values && x.eta == y.eta);
    let pass = a == b && same_ensemble;
    report(
        12,
        "determinism (library half)",
        pass,
        &format!("moment bitwise stable = {}, ensemble bitwise stable = {same_ensemble}", a == b),
    );
}
