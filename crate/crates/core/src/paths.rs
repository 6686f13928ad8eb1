//! Character paths: normalised partial sums `S_χ(t)`, their piecewise-linear
//! interpolation `f_χ(t)`, and the truncated Gauss-sum Fourier expansion.
//!
//! `S_χ(t) = q^{-1/2} Σ_{n ≤ qt} χ(n)` is a step function;
//! `f_χ(t) = S_χ(t) + ({qt}/√q)·χ(⌈qt⌉)` is the closed polygon through its
//! vertices. All full-path scans are a single O(q) accumulation of character
//! values.

use num_complex::Complex64;
use serde::Serialize;

use crate::dirichlet::{Character, Parity};
use crate::trig;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PathError {
    #[error("the principal character has no primitive Fourier expansion")]
    PrincipalCharacter,
    #[error("Fourier cutoff {cutoff} out of range [1, {max}]")]
    BadCutoff { cutoff: u32, max: u32 },
    #[error("grid points must be strictly increasing within [0, 1]")]
    BadGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    /// `t = j/q` for `j = 0..=q`: the exact polygon vertices.
    Vertex,
    /// Evenly spaced points including both endpoints.
    Uniform,
    Custom,
}

/// A sorted grid of evaluation points in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct PathGrid {
    points: Vec<f64>,
    kind: GridKind,
}

impl PathGrid {
    pub fn vertex(q: u32) -> Self {
        let points = (0..=q).map(|j| j as f64 / q as f64).collect();
        PathGrid { points, kind: GridKind::Vertex }
    }

    /// `n` evenly spaced points `i/(n-1)`, `i = 0..n`; requires `n ≥ 2`.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 2, "uniform grid needs at least two points");
        let step = 1.0 / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        points[n - 1] = 1.0;
        PathGrid { points, kind: GridKind::Uniform }
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self, PathError> {
        let ok = !points.is_empty()
            && points.windows(2).all(|w| w[0] < w[1])
            && *points.first().unwrap() >= 0.0
            && *points.last().unwrap() <= 1.0;
        if !ok {
            return Err(PathError::BadGrid);
        }
        Ok(PathGrid { points, kind: GridKind::Custom })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A character path sampled on a grid.
#[derive(Debug, Clone)]
pub struct CharacterPath {
    pub q: u32,
    pub chi_index: u32,
    pub grid: PathGrid,
    pub values: Vec<Complex64>,
}

/// Split `qt` into integer part and fractional part, snapping to the nearest
/// integer when `q·t` is within relative 1e-12 of one. Vertex abscissae
/// supplied as binary-rounded `j/q` then land exactly on their vertex instead
/// of an adjacent step.
fn split_qt(q: u32, t: f64) -> (u32, f64) {
    let x = (q as f64 * t).clamp(0.0, q as f64);
    let r = x.round_ties_even();
    if (x - r).abs() <= 1e-12 * x.abs().max(1.0) {
        (r as u32, 0.0)
    } else {
        let fl = x.floor();
        (fl as u32, x - fl)
    }
}

impl<'a> Character<'a> {
    /// `S_χ(t) = q^{-1/2} Σ_{n ≤ qt} χ(n)`.
    pub fn partial_sum(&self, t: f64) -> Complex64 {
        let q = self.context().modulus();
        let (m, _) = split_qt(q, t);
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1..=m.min(q) {
            acc += self.value_at_residue(n % q);
        }
        acc / (q as f64).sqrt()
    }

    /// `f_χ(t) = S_χ(t) + ({qt}/√q)·χ(⌈qt⌉)`, the polygon through the
    /// partial-sum vertices. Continuous; agrees with `S_χ` at `t = j/q`.
    pub fn path_value(&self, t: f64) -> Complex64 {
        self.path_values(&[t])[0]
    }

    /// Path values at a sorted list of abscissae in one O(q + len) scan.
    pub fn path_values(&self, ts: &[f64]) -> Vec<Complex64> {
        let q = self.context().modulus();
        let sqrt_q = (q as f64).sqrt();
        let mut out = Vec::with_capacity(ts.len());
        let mut prefix = Complex64::new(0.0, 0.0);
        let mut upto = 0u32; // prefix holds Σ_{n ≤ upto}
        for &t in ts {
            let (m, frac) = split_qt(q, t);
            debug_assert!(m >= upto, "path_values needs sorted abscissae");
            while upto < m {
                upto += 1;
                prefix += self.value_at_residue(upto % q);
            }
            let mut v = prefix;
            if frac > 0.0 {
                v += frac * self.value_at_residue((m + 1) % q);
            }
            out.push(v / sqrt_q);
        }
        out
    }

    /// Sample the path on a grid; on the vertex grid this is the exact
    /// polygon of the partial sums.
    pub fn sample_path(&self, grid: &PathGrid) -> CharacterPath {
        let q = self.context().modulus();
        let values = match grid.kind() {
            GridKind::Vertex => {
                let sqrt_q = (q as f64).sqrt();
                let mut values = Vec::with_capacity(q as usize + 1);
                let mut prefix = Complex64::new(0.0, 0.0);
                values.push(prefix);
                for n in 1..=q {
                    prefix += self.value_at_residue(n % q);
                    values.push(prefix / sqrt_q);
                }
                values
            }
            _ => self.path_values(grid.points()),
        };
        CharacterPath {
            q,
            chi_index: self.index(),
            grid: grid.clone(),
            values,
        }
    }

    /// Truncated Fourier expansion of the path,
    /// `(τ(χ)/(2πi√q)) Σ_{0<|k|≤K} (χ̄(k)/k)(1 − e(-kt))`,
    /// evaluated in the parity-reduced form obtained by pairing `±k` with
    /// `χ̄(-k) = χ(-1)χ̄(k)`:
    /// odd `χ`:  `(τ/(πi√q)) Σ_k (χ̄(k)/k)(1 − cos 2πkt)`;
    /// even `χ`: `(τ/(π√q))  Σ_k (χ̄(k)/k) sin 2πkt`.
    pub fn fourier_path(&self, t: f64, cutoff: u32) -> Result<Complex64, PathError> {
        if self.is_principal() {
            return Err(PathError::PrincipalCharacter);
        }
        let q = self.context().modulus();
        if cutoff == 0 || cutoff > q - 1 {
            return Err(PathError::BadCutoff { cutoff, max: q - 1 });
        }
        let parity = self.parity();
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=cutoff {
            let weight = match parity {
                Parity::Odd => 1.0 - trig::cos_2pi(k as f64 * t),
                Parity::Even => trig::sin_2pi(k as f64 * t),
            };
            if weight != 0.0 {
                acc += self.value_at_residue(k % q).conj() * (weight / k as f64);
            }
        }
        let tau = self.gauss_sum();
        let scale = tau / (std::f64::consts::PI * (q as f64).sqrt());
        Ok(match parity {
            // 1/i = -i
            Parity::Odd => scale * acc * Complex64::new(0.0, -1.0),
            Parity::Even => scale * acc,
        })
    }

    /// `max_{0 ≤ j ≤ q} |S_χ(j/q)|` — exact for the step function.
    pub fn max_abs_sum(&self) -> f64 {
        let q = self.context().modulus();
        let mut prefix = Complex64::new(0.0, 0.0);
        let mut best = 0.0f64;
        for n in 1..=q {
            prefix += self.value_at_residue(n % q);
            best = best.max(prefix.norm_sqr());
        }
        best.sqrt() / (q as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::{CharFilter, PrimeContext};

    fn ctx(q: u64) -> PrimeContext {
        PrimeContext::new(q).unwrap()
    }

    #[test]
    fn partial_sums_mod_5() {
        let ctx = ctx(5);
        let chi = ctx.character(1).unwrap();
        let s5 = 5f64.sqrt();
        assert!(chi.partial_sum(1.0).norm() < 1e-15);
        assert!((chi.partial_sum(0.2) - Complex64::new(1.0 / s5, 0.0)).norm() < 1e-15);
        // χ_1(2) = i from the dlog table
        assert!((chi.partial_sum(0.4) - Complex64::new(1.0 / s5, 1.0 / s5)).norm() < 1e-15);
    }

    #[test]
    fn path_value_interpolates() {
        let ctx = ctx(5);
        let chi = ctx.character(1).unwrap();
        // midpoint of the first segment: {qt} = 0.5 times χ(1)
        let v = chi.path_value(0.1);
        assert!((v - Complex64::new(0.5 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert_eq!(chi.path_value(0.0), Complex64::new(0.0, 0.0));
        assert!(chi.path_value(1.0).norm() < 1e-15);
    }

    #[test]
    fn closure_for_nonprincipal() {
        for q in [5u64, 101, 1009] {
            let ctx = PrimeContext::new(q).unwrap();
            for chi in ctx.characters(CharFilter::Nonprincipal) {
                assert!(chi.path_value(0.0).norm() <= 1e-12);
                assert!(chi.path_value(1.0).norm() <= 1e-12, "q={q} j={}", chi.index());
            }
        }
    }

    #[test]
    fn interpolation_stays_within_vertex_gap() {
        let ctx = ctx(101);
        let bound = 1.0 / 101f64.sqrt() + 1e-15;
        let mut state = 99u64;
        for _ in 0..1000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = 1 + (state >> 33) as u32 % 99;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let t = (state >> 11) as f64 / (1u64 << 53) as f64;
            let chi = ctx.character(j).unwrap();
            assert!((chi.path_value(t) - chi.partial_sum(t)).norm() <= bound);
        }
    }

    #[test]
    fn vertex_sampling_mod_5() {
        let c = ctx(5);
        let chi = c.character(1).unwrap();
        let path = chi.sample_path(&PathGrid::vertex(5));
        assert_eq!(path.values.len(), 6);
        assert_eq!(path.values[0], Complex64::new(0.0, 0.0));
        assert!(path.values[5].norm() < 1e-15);
        // vertex values agree with single-point evaluation
        for (j, &v) in path.values.iter().enumerate() {
            assert!((v - chi.path_value(j as f64 / 5.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn principal_path_grows_to_phi() {
        let c = ctx(7);
        let principal = c.character(0).unwrap();
        let path = principal.sample_path(&PathGrid::vertex(7));
        let last = path.values.last().unwrap();
        assert!((last - Complex64::new(6.0 / 7f64.sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn uniform_grid_tracks_partial_sums() {
        let c = ctx(5);
        let chi = c.character(1).unwrap();
        let grid = PathGrid::uniform(11);
        let path = chi.sample_path(&grid);
        let bound = 1.0 / 5f64.sqrt() + 1e-15;
        for (i, &t) in grid.points().iter().enumerate() {
            assert!((path.values[i] - chi.partial_sum(t)).norm() <= bound);
        }
    }

    #[test]
    fn fourier_zero_cases() {
        let c = ctx(5);
        let chi_odd = c.character(1).unwrap();
        for cutoff in [1u32, 2, 4] {
            assert_eq!(
                chi_odd.fourier_path(0.0, cutoff).unwrap(),
                Complex64::new(0.0, 0.0)
            );
        }
        // even character at t = 1/2: every sin(πk) vanishes
        let chi_even = c.character(2).unwrap();
        assert!(chi_even.fourier_path(0.5, 4).unwrap().norm() < 1e-12);
    }

    #[test]
    fn fourier_rejects_bad_inputs() {
        let c = ctx(5);
        assert_eq!(
            c.character(0).unwrap().fourier_path(0.3, 4),
            Err(PathError::PrincipalCharacter)
        );
        assert!(matches!(
            c.character(1).unwrap().fourier_path(0.3, 5),
            Err(PathError::BadCutoff { .. })
        ));
    }

    /// Literal symmetric-sum oracle for the Fourier expansion: evaluates
    /// `(τ/(2πi√q)) Σ_{0<|k|≤K} (χ̄(k)/k)(1 − e(-kt))` term by term with
    /// signed arguments, independent of the paired implementation.
    fn fourier_literal(chi: &Character<'_>, t: f64, cutoff: u32) -> Complex64 {
        let q = chi.context().modulus();
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=cutoff as i64 {
            for kk in [k, -k] {
                let term = chi.value(kk).conj() / kk as f64
                    * (Complex64::new(1.0, 0.0) - trig::e(-(kk as f64) * t));
                acc += term;
            }
        }
        let tau = chi.gauss_sum();
        tau / (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * (q as f64).sqrt()) * acc
    }

    #[test]
    fn parity_reduced_matches_literal_form() {
        let c = ctx(101);
        for j in [1u32, 2, 7, 40, 99] {
            let chi = c.character(j).unwrap();
            for &t in &[0.1, 0.37, 0.5, 0.93] {
                let paired = chi.fourier_path(t, 100).unwrap();
                let literal = fourier_literal(&chi, t, 100);
                assert!(
                    (paired - literal).norm() < 1e-10,
                    "j={j} t={t} paired={paired} literal={literal}"
                );
            }
        }
    }

    #[test]
    fn fourier_approximates_path_mod_101() {
        let c = ctx(101);
        let bound = 10.0 * (101f64).ln() / 101f64.sqrt();
        for j in [1u32, 2, 15, 64] {
            let chi = c.character(j).unwrap();
            for &t in &[0.15, 0.4, 0.77] {
                let err = (chi.fourier_path(t, 100).unwrap() - chi.path_value(t)).norm();
                assert!(err <= bound, "j={j} t={t} err={err}");
            }
        }
    }

    #[test]
    fn max_abs_sum_examples() {
        let c = ctx(5);
        // partial sums of χ_1: 1, 1+i, 1, 0 → max = √2, normalised by √5
        let m = c.character(1).unwrap().max_abs_sum();
        assert!((m - (2f64.sqrt() / 5f64.sqrt())).abs() < 1e-14);
        let principal = c.character(0).unwrap().max_abs_sum();
        assert!((principal - 4.0 / 5f64.sqrt()).abs() < 1e-14);
        // any nonprincipal character reaches at least the first partial sum
        let c101 = ctx(101);
        for chi in c101.characters(CharFilter::Nonprincipal) {
            assert!(chi.max_abs_sum() >= 1.0 / 101f64.sqrt() - 1e-15);
        }
    }

    /// Even characters satisfy Σ_{n=q-j}^{q-1} χ(n) = Σ_{n=1}^{j} χ(n): the
    /// reflected tail equals the head term by term, so with matching
    /// accumulation order the floating-point sums are bit-identical.
    #[test]
    fn even_reflection_symmetry_is_exact() {
        let c = ctx(101);
        let q = 101u32;
        for j_char in [2u32, 4, 36] {
            let chi = c.character(j_char).unwrap();
            for j in [1u32, 17, 50, 99] {
                let mut tail = Complex64::new(0.0, 0.0);
                for n in (q - j)..q {
                    tail += chi.value_at_residue(n);
                }
                let mut head = Complex64::new(0.0, 0.0);
                for m in (1..=j).rev() {
                    head += chi.value_at_residue(m);
                }
                assert_eq!(tail, head, "j_char={j_char} j={j}");
                // equivalently Σ_{n≤j} = Σ_{all} − Σ_{n≤q-j-1}
                let s = |x: f64| chi.partial_sum(x);
                let lhs = s(j as f64 / q as f64);
                let rhs = s(1.0) - s((q - j - 1) as f64 / q as f64);
                assert!((lhs - rhs).norm() < 1e-12, "j_char={j_char} j={j}");
            }
        }
    }

    #[test]
    fn grid_validation() {
        assert!(PathGrid::from_points(vec![0.0, 0.5, 0.5]).is_err());
        assert!(PathGrid::from_points(vec![0.0, 1.5]).is_err());
        assert!(PathGrid::from_points(vec![]).is_err());
        let g = PathGrid::from_points(vec![0.0, 0.25, 1.0]).unwrap();
        assert_eq!(g.kind(), GridKind::Custom);
        let u = PathGrid::uniform(11);
        assert_eq!(u.points().len(), 11);
        assert_eq!(u.points()[0], 0.0);
        assert_eq!(*u.points().last().unwrap(), 1.0);
    }
}
