//! Unit-circle evaluation `e(x) = exp(2πix)` with exact quarter-turn values.

use num_complex::Complex64;

/// Sine and cosine of `2πx`.
///
/// The argument is reduced to a quadrant offset in `[-1/8, 1/8]` before
/// calling libm, so quarter-turn inputs produce exact results:
/// `sin_cos_2pi(k/4)` for integer `k` returns `±0.0` and `±1.0` bit-exactly.
/// Series identities such as `F₊(1/2) = 0` then hold termwise in f64, not
/// just up to rounding.
pub fn sin_cos_2pi(x: f64) -> (f64, f64) {
    let r = x - x.floor(); // [0, 1)
    let quadrant = (4.0 * r).round_ties_even(); // 0.0..=4.0
    let d = r - 0.25 * quadrant; // [-1/8, 1/8]
    let (s, c) = (std::f64::consts::TAU * d).sin_cos();
    match quadrant as u32 % 4 {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// `e(x) = exp(2πix)`.
pub fn e(x: f64) -> Complex64 {
    let (s, c) = sin_cos_2pi(x);
    Complex64::new(c, s)
}

pub fn cos_2pi(x: f64) -> f64 {
    sin_cos_2pi(x).1
}

pub fn sin_2pi(x: f64) -> f64 {
    sin_cos_2pi(x).0
}
