//! Bhattacharyya-parameter bound recursion for binary-input symmetric
//! channels:
//!
//! ```text
//! B_{t+1}(i) <= B_0 * prod_{j in E_v(e_i)} sum_{i' in E_c(e_j)} B_t(i')
//! ```
//!
//! Iterating the right-hand side gives per-edge upper bounds on the message
//! error probability. Over the BEC the Bhattacharyya parameter of the channel
//! is the erasure probability itself.

use crate::de_bec::leave_one_out_sum;
use crate::error::{Error, Result};
use crate::proto::Protograph;

/// Values are clamped here so a diverging recursion never overflows.
pub const BHATT_CLAMP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct BhattState {
    pub b0: f64,
    /// Per-edge bounds, unclamped up to [`BHATT_CLAMP`].
    pub b: Vec<f64>,
}

impl BhattState {
    /// Initial state `B_0(i) = B_0` for every edge.
    pub fn initial(p: &Protograph, b0: f64) -> Self {
        Self {
            b0,
            b: vec![b0; p.num_edges()],
        }
    }

    pub fn max(&self) -> f64 {
        self.b.iter().copied().fold(0.0, f64::max)
    }

    /// Bounds clamped to `[0, 1]` for reporting.
    pub fn reported(&self) -> Vec<f64> {
        self.b.iter().map(|v| v.clamp(0.0, 1.0)).collect()
    }
}

pub fn bhatt_step(state: &BhattState, p: &Protograph) -> BhattState {
    // sum over the other edges at each check, per edge
    let mut check_sum = vec![0.0; p.num_edges()];
    let mut scratch = Vec::new();
    for c in 0..p.num_checks() {
        leave_one_out_sum(p.check_edges(c), |i| state.b[i], &mut scratch, |j, s| check_sum[j] = s);
    }
    let b = (0..p.num_edges())
        .map(|i| {
            let prod: f64 = p.ev(i).iter().map(|&j| check_sum[j]).product();
            (state.b0 * prod).min(BHATT_CLAMP)
        })
        .collect();
    BhattState { b0: state.b0, b }
}

pub const BHATT_CONV: f64 = 1e-10;
pub const BHATT_MAX_STEPS: usize = 100_000;

/// True when iterating [`bhatt_step`] from `B_0` drives every bound below
/// [`BHATT_CONV`] within [`BHATT_MAX_STEPS`]. A bound above 1 is declared
/// divergent.
pub fn bhatt_converges(p: &Protograph, b0: f64) -> bool {
    let mut s = BhattState::initial(p, b0);
    for _ in 0..=BHATT_MAX_STEPS {
        let m = s.max();
        if m < BHATT_CONV {
            return true;
        }
        if m > 1.0 {
            return false;
        }
        s = bhatt_step(&s, p);
    }
    false
}

/// Largest `B_0` (to `resolution`) for which the bound recursion vanishes.
/// A conservative proxy for the true threshold.
pub fn bhatt_bound_threshold(p: &Protograph, resolution: f64) -> Result<f64> {
    if !(resolution >= 1e-6) {
        return Err(Error::InvalidParameter(format!(
            "resolution {resolution} below 1e-6"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if bhatt_converges(p, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bhattacharyya parameter of BIAWGN with unit-energy BPSK and noise
/// standard deviation `sigma`: `exp(-1 / (2 sigma^2))`.
pub fn awgn_b0(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::BadSigma(sigma));
    }
    Ok((-1.0 / (2.0 * sigma * sigma)).exp())
}
