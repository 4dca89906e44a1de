//! The J-function: mutual information between a bit and a consistent Gaussian
//! LLR `L ~ N(s^2/2, s^2)`,
//!
//! ```text
//! J(s) = 1 - E[log2(1 + exp(-L))]
//! ```
//!
//! Values come from a table computed once by composite Simpson quadrature
//! and interpolated linearly; [`jinv`] inverts the same piecewise-linear
//! curve, so `jinv(J(s)) == s` up to rounding inside the table range.

use std::sync::OnceLock;

/// Table step in `s`.
const STEP: f64 = 0.005;
/// Largest tabulated `s`; `J` equals 1 to double precision well before it.
pub const JINV_CAP: f64 = 20.0;
/// Simpson intervals per quadrature, over `z` in `[-Z_SPAN, Z_SPAN]`.
const INTERVALS: usize = 2400;
const Z_SPAN: f64 = 12.0;

struct Table {
    values: Vec<f64>,
    /// Index of the first entry equal to the table maximum; `jinv` of
    /// anything at or above it returns the corresponding `s`.
    top: usize,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = (JINV_CAP / STEP).round() as usize;
        let mut values: Vec<f64> = (0..=n).map(|k| j_quadrature(k as f64 * STEP)).collect();
        // enforce monotonicity against rounding in the saturated tail
        for k in 1..values.len() {
            if values[k] < values[k - 1] {
                values[k] = values[k - 1];
            }
        }
        let max = *values.last().unwrap();
        let top = values.iter().position(|&v| v == max).unwrap();
        Table { values, top }
    })
}

/// `J(s)` evaluated by quadrature. Exact up to the Simpson error, used to
/// build the table.
pub fn j_quadrature(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let mean = 0.5 * s * s;
    let h = 2.0 * Z_SPAN / INTERVALS as f64;
    let f = |z: f64| {
        let l = mean + s * z;
        // log2(1 + e^{-l}) without overflow
        let softplus = (-l).max(0.0) + (-l.abs()).exp().ln_1p();
        softplus / std::f64::consts::LN_2 * (-0.5 * z * z).exp()
    };
    let mut acc = f(-Z_SPAN) + f(Z_SPAN);
    for k in 1..INTERVALS {
        let z = -Z_SPAN + k as f64 * h;
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(z);
    }
    let loss = acc * h / 3.0 / (2.0 * std::f64::consts::PI).sqrt();
    (1.0 - loss).clamp(0.0, 1.0)
}

/// Mutual information carried by a consistent Gaussian LLR of standard
/// deviation `s`. Monotone, `J(0) = 0`, `J(s) -> 1`.
pub fn jfun(s: f64) -> f64 {
    let t = table();
    if s <= 0.0 {
        return 0.0;
    }
    let pos = s / STEP;
    let k = pos.floor() as usize;
    if k + 1 >= t.values.len() {
        return *t.values.last().unwrap();
    }
    let frac = pos - k as f64;
    t.values[k] + frac * (t.values[k + 1] - t.values[k])
}

/// Inverse of [`jfun`]. Inputs at or below 0 map to 0; inputs at or above
/// the saturated top of the table (including 1) map to [`JINV_CAP`].
pub fn jinv(i: f64) -> f64 {
    let t = table();
    if i <= 0.0 {
        return 0.0;
    }
    if i >= t.values[t.top] {
        return JINV_CAP;
    }
    // first index with value > i, within the strictly useful range
    let k = t.values[..=t.top].partition_point(|&v| v <= i);
    let (a, b) = (t.values[k - 1], t.values[k]);
    let frac = if b > a { (i - a) / (b - a) } else { 0.0 };
    ((k - 1) as f64 + frac) * STEP
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_monotonicity() {
        assert_eq!(jfun(0.0), 0.0);
        assert!(jfun(1.0) < jfun(2.0) && jfun(2.0) < jfun(5.0));
        assert!(jfun(30.0) > 1.0 - 1e-12);
        assert_eq!(jinv(1.0), JINV_CAP);
        assert_eq!(jinv(0.0), 0.0);
    }

    #[test]
    fn round_trip_on_working_range() {
        let mut s = 0.01;
        while s <= 10.0 {
            assert!((jinv(jfun(s)) - s).abs() <= 1e-3, "s = {s}");
            s += 0.037;
        }
    }

    #[test]
    fn interpolation_tracks_quadrature() {
        for k in 0..400 {
            let s = 0.0123 + k as f64 * 0.0371;
            assert!((jfun(s) - j_quadrature(s)).abs() < 1e-5, "s = {s}");
        }
    }
}
