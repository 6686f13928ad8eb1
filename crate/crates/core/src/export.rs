//! File formats: CSV tables, SVG path plots, and JSON records/manifests.
//!
//! Floats in CSV output are printed with 17 significant digits
//! (`{:.16e}`), enough to round-trip f64 exactly.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::dirichlet::Parity;
use crate::moments::{MomentMethod, MomentResult, MomentSpec};
use crate::series::{SeriesForm, SeriesSample, Truncation};
use crate::stats::{IncrementReport, TailCurve};
use crate::steinhaus::MIXER_ID;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// `t,re,im` rows, one per grid point.
pub fn write_path_csv<W: Write>(w: &mut W, ts: &[f64], values: &[Complex64]) -> io::Result<()> {
    writeln!(w, "t,re,im")?;
    for (t, v) in ts.iter().zip(values) {
        writeln!(w, "{},{},{}", fmt(*t), fmt(v.re), fmt(v.im))?;
    }
    Ok(())
}

/// `tau,prob,stderr` rows.
pub fn write_tail_csv<W: Write>(w: &mut W, curve: &TailCurve) -> io::Result<()> {
    writeln!(w, "tau,prob,stderr")?;
    for i in 0..curve.taus.len() {
        writeln!(
            w,
            "{},{},{}",
            fmt(curve.taus[i]),
            fmt(curve.probs[i]),
            fmt(curve.stderr[i])
        )?;
    }
    Ok(())
}

/// `s,t,moment4` rows (column name tracks the report order).
pub fn write_increment_csv<W: Write>(w: &mut W, report: &IncrementReport) -> io::Result<()> {
    writeln!(w, "s,t,moment{}", report.order)?;
    for (pair, m) in report.pairs.iter().zip(&report.moments) {
        writeln!(w, "{},{},{}", fmt(pair.0), fmt(pair.1), fmt(*m))?;
    }
    Ok(())
}

/// A closed path plot: one `polyline` over the complex samples, viewBox
/// fitted to the data with a 5% margin, stroke width 0.5% of the span.
/// The imaginary axis points up.
pub fn svg_polyline(values: &[Complex64]) -> String {
    let xs = values.iter().map(|v| v.re);
    let ys = values.iter().map(|v| -v.im);
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in xs {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
    }
    for y in ys {
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    if !min_x.is_finite() {
        min_x = 0.0;
        max_x = 1.0;
        min_y = 0.0;
        max_y = 1.0;
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let margin = 0.05 * span;
    let view_w = max_x - min_x + 2.0 * margin;
    let view_h = max_y - min_y + 2.0 * margin;
    let stroke = 0.005 * span;
    let mut points = String::new();
    for v in values {
        points.push_str(&format!("{:.6},{:.6} ", v.re, -v.im));
    }
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"{h:.0}\" ",
            "viewBox=\"{x:.6} {y:.6} {w:.6} {vh:.6}\">\n",
            "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"{s:.6}\" points=\"{p}\"/>\n",
            "</svg>\n"
        ),
        h = 800.0 * view_h / view_w,
        x = min_x - margin,
        y = min_y - margin,
        w = view_w,
        vh = view_h,
        s = stroke,
        p = points.trim_end(),
    )
}

#[derive(Serialize)]
pub struct TruncationRecord {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cap: Option<u32>,
}

impl From<Truncation> for TruncationRecord {
    fn from(t: Truncation) -> Self {
        match t {
            Truncation::Symmetric(n) => {
                TruncationRecord { kind: "symmetric", n: Some(n), y: None, cap: None }
            }
            Truncation::Smooth { y, cap } => {
                TruncationRecord { kind: "smooth", n: None, y: Some(y), cap: Some(cap) }
            }
        }
    }
}

fn form_label(form: SeriesForm) -> &'static str {
    match form {
        SeriesForm::Plus => "plus",
        SeriesForm::Minus => "minus",
        SeriesForm::General(crate::steinhaus::Sign::Plus) => "general(+1)",
        SeriesForm::General(crate::steinhaus::Sign::Minus) => "general(-1)",
    }
}

/// Ensemble manifest: everything needed to regenerate the samples.
#[derive(Serialize)]
pub struct EnsembleManifest {
    pub seed: u64,
    pub streams: Vec<u64>,
    pub parity: String,
    pub truncation: TruncationRecord,
    pub grid: usize,
    pub mixer_id: &'static str,
}

impl EnsembleManifest {
    pub fn from_samples(samples: &[SeriesSample]) -> Self {
        let first = samples.first().expect("non-empty ensemble");
        EnsembleManifest {
            seed: first.seed.seed,
            streams: samples.iter().map(|s| s.seed.stream).collect(),
            parity: form_label(first.form).to_string(),
            truncation: first.truncation.into(),
            grid: first.grid.len(),
            mixer_id: MIXER_ID,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialises")
    }
}

/// JSON record of one moment computation.
#[derive(Serialize)]
pub struct MomentRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    pub k: usize,
    pub t: Vec<f64>,
    pub n: Vec<u32>,
    pub m: Vec<u32>,
    pub parity: Parity,
    pub method: MomentMethod,
    pub re: f64,
    pub im: f64,
    pub error_estimate: f64,
    pub truncation: Option<u64>,
}

impl MomentRecord {
    pub fn new(q: Option<u64>, spec: &MomentSpec, result: &MomentResult) -> Self {
        MomentRecord {
            q,
            k: spec.k(),
            t: spec.times().to_vec(),
            n: spec.n_pows().to_vec(),
            m: spec.m_pows().to_vec(),
            parity: spec.parity(),
            method: result.method,
            re: result.value.re,
            im: result.value.im,
            error_estimate: result.error_estimate,
            truncation: result.truncation,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serialises")
    }
}
