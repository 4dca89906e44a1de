//! Protograph density evolution over the binary erasure channel.
//!
//! One erasure probability is tracked per protograph edge type:
//!
//! ```text
//! x_0(i)     = eps
//! y_{t+1}(j) = 1 - prod_{i in E_c(e_j)} (1 - x_t(i))
//! x_{t+1}(i) = eps * prod_{j in E_v(e_i)} y_{t+1}(j)
//! ```
//!
//! [`run_de`] iterates in the linear domain and switches to log-probabilities
//! once `min_i x_t(i)` drops below [`LOG_DOMAIN_SWITCH`], so traces can follow
//! a doubly-exponential fall far below the smallest positive `f64`.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::proto::Protograph;

/// Once `min_i x_t(i)` falls below this the recursion continues on
/// log-probabilities, early enough that no product underflows before the switch.
pub const LOG_DOMAIN_SWITCH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DeConfig {
    pub t_max: usize,
    /// Natural log of the convergence tolerance: the run is declared
    /// converged once `ln max_i x_t(i) < log_delta_conv`. Kept in the log
    /// domain so tolerances below `f64::MIN_POSITIVE` are expressible.
    pub log_delta_conv: f64,
    pub stall_window: usize,
    /// Relative decrease of `max_i x_t(i)` over `stall_window` iterations
    /// below which the run is declared stalled.
    pub stall_rel: f64,
    /// Keep per-iteration per-edge vectors in the trace.
    pub record_edges: bool,
}

impl DeConfig {
    /// Settings used for threshold bisection: `delta = 1e-10`, `t_max = 100000`.
    pub fn threshold() -> Self {
        Self {
            t_max: 100_000,
            log_delta_conv: 1e-10f64.ln(),
            stall_window: 100,
            stall_rel: 1e-12,
            record_edges: false,
        }
    }

    /// Long-tail settings for decay diagnostics: runs until `max_i x_t(i)`
    /// falls below `exp(-1e5)` or `t_max` iterations.
    pub fn decay(t_max: usize) -> Self {
        Self {
            t_max,
            log_delta_conv: -1e5,
            ..Self::threshold()
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.log_delta_conv = delta.ln();
        self
    }

    pub fn with_t_max(mut self, t_max: usize) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_edges = true;
        self
    }
}

impl Default for DeConfig {
    fn default() -> Self {
        Self::threshold()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `max_i x_t(i)` fell below the tolerance at iteration `t`.
    Converged { t: usize },
    /// Progress fell below the stall criterion at iteration `t`.
    Stalled { t: usize },
    MaxIters,
}

impl Verdict {
    pub fn converged(self) -> bool {
        matches!(self, Verdict::Converged { .. })
    }
}

/// Per-iteration record of a density-evolution run.
#[derive(Debug, Clone, PartialEq)]
pub struct DeTrace {
    pub epsilon: f64,
    /// `ln max_i x_t(i)` for `t = 0, 1, ...`; `-inf` when every entry is 0.
    pub log_xbar: Vec<f64>,
    /// `x_t` for every iteration, when recorded. Entries below the smallest
    /// `f64` read as 0.
    pub x: Option<Vec<Vec<f64>>>,
    /// `y_t` for `t >= 1`, when recorded (`y[0]` corresponds to `t = 1`).
    pub y: Option<Vec<Vec<f64>>>,
    pub verdict: Verdict,
}

impl DeTrace {
    pub fn xbar(&self) -> Vec<f64> {
        self.log_xbar.iter().map(|l| l.exp()).collect()
    }

    pub fn iterations(&self) -> usize {
        self.log_xbar.len() - 1
    }

    pub fn final_log_xbar(&self) -> f64 {
        *self.log_xbar.last().expect("trace has t = 0")
    }

    /// Writes `t,xbar,ln_xbar[,x1,...,x|E|]`.
    pub fn write_csv<W: Write>(&self, mut w: W, per_edge: bool) -> io::Result<()> {
        let edges = self.x.as_ref().filter(|_| per_edge);
        write!(w, "t,xbar,ln_xbar")?;
        if let Some(x) = edges {
            for i in 0..x[0].len() {
                write!(w, ",x{}", i + 1)?;
            }
        }
        writeln!(w)?;
        for (t, l) in self.log_xbar.iter().enumerate() {
            write!(w, "{t},{:e},{l}", l.exp())?;
            if let Some(x) = edges {
                for v in &x[t] {
                    write!(w, ",{v:e}")?;
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// One round of the recursion: returns `(y_{t+1}, x_{t+1})` from `x_t`.
pub fn de_step(p: &Protograph, x: &[f64], eps: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != p.num_edges() {
        return Err(Error::DimensionMismatch {
            expected: p.num_edges(),
            found: x.len(),
        });
    }
    let mut y = vec![0.0; x.len()];
    let mut next = vec![0.0; x.len()];
    let mut scratch = Vec::new();
    step_into(p, x, eps, &mut y, &mut next, &mut scratch);
    Ok((y, next))
}

/// Linear-domain step with leave-one-out products by prefix/suffix scans.
/// Check products run on `ln(1 - x)` so that `1 - prod(1 - x)` keeps full
/// relative precision for tiny `x`.
fn step_into(
    p: &Protograph,
    x: &[f64],
    eps: f64,
    y: &mut [f64],
    next: &mut [f64],
    scratch: &mut Vec<f64>,
) {
    for c in 0..p.num_checks() {
        leave_one_out_sum(p.check_edges(c), |i| (-x[i]).ln_1p(), scratch, |e, sum| {
            y[e] = -sum.exp_m1();
        });
    }
    for v in 0..p.num_vars() {
        leave_one_out(p.var_edges(v), |j| y[j], scratch, |e, prod| {
            next[e] = eps * prod;
        });
    }
}

/// Calls `out(e, prod_{f in group, f != e} val(f))` for each `e` in `group`.
fn leave_one_out(
    group: &[usize],
    val: impl Fn(usize) -> f64,
    suffix: &mut Vec<f64>,
    mut out: impl FnMut(usize, f64),
) {
    suffix.clear();
    suffix.resize(group.len() + 1, 1.0);
    for k in (0..group.len()).rev() {
        suffix[k] = suffix[k + 1] * val(group[k]);
    }
    let mut prefix = 1.0;
    for (k, &e) in group.iter().enumerate() {
        out(e, prefix * suffix[k + 1]);
        prefix *= val(e);
    }
}

/// Additive counterpart of [`leave_one_out`].
pub(crate) fn leave_one_out_sum(
    group: &[usize],
    val: impl Fn(usize) -> f64,
    suffix: &mut Vec<f64>,
    mut out: impl FnMut(usize, f64),
) {
    suffix.clear();
    suffix.resize(group.len() + 1, 0.0);
    for k in (0..group.len()).rev() {
        suffix[k] = suffix[k + 1] + val(group[k]);
    }
    let mut prefix = 0.0;
    for (k, &e) in group.iter().enumerate() {
        out(e, prefix + suffix[k + 1]);
        prefix += val(e);
    }
}

/// Log-domain step. A check message is `ln(sum x)` when every incoming `x`
/// is below `1e-20`, where the two agree to double precision, and
/// `ln(1 - prod(1 - x))` through `ln_1p`/`exp_m1` otherwise.
fn log_step(p: &Protograph, lx: &[f64], ln_eps: f64, ly: &mut [f64], lnext: &mut [f64]) {
    let tiny = 1e-20f64.ln();
    for c in 0..p.num_checks() {
        let group = p.check_edges(c);
        for &j in group {
            let others = group.iter().filter(|&&i| i != j).map(|&i| lx[i]);
            let m = others.clone().fold(f64::NEG_INFINITY, f64::max);
            ly[j] = if m < tiny {
                log_sum_exp(others)
            } else {
                let s: f64 = others.map(|l| (-l.exp()).ln_1p()).sum();
                (-s.exp_m1()).ln()
            };
        }
    }
    for e in 0..p.num_edges() {
        lnext[e] = ln_eps + p.ev(e).iter().map(|&j| ly[j]).sum::<f64>();
    }
}

fn log_sum_exp(vals: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = vals.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + vals.map(|v| (v - m).exp()).sum::<f64>().ln()
}

fn log_min(x: &[f64]) -> f64 {
    x.iter().copied().fold(1.0, f64::min).ln()
}

fn log_max(x: &[f64]) -> f64 {
    x.iter().copied().fold(0.0, f64::max).ln()
}

/// Runs the recursion from `x_0(i) = eps`.
pub fn run_de(p: &Protograph, eps: f64, cfg: &DeConfig) -> DeTrace {
    let x0 = vec![eps; p.num_edges()];
    run_de_from(p, eps, &x0, cfg)
}

/// Runs the recursion from an arbitrary starting vector.
pub fn run_de_from(p: &Protograph, eps: f64, x0: &[f64], cfg: &DeConfig) -> DeTrace {
    assert_eq!(x0.len(), p.num_edges(), "starting vector length");
    let n = p.num_edges();
    let mut x = x0.to_vec();
    let mut y = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut scratch = Vec::new();
    let mut log_xbar = vec![log_max(&x)];
    let mut xs = cfg.record_edges.then(|| vec![x.clone()]);
    let mut ys = cfg.record_edges.then(Vec::new);

    let verdict = 'run: {
        if log_xbar[0] < cfg.log_delta_conv {
            break 'run Verdict::Converged { t: 0 };
        }
        // linear phase
        let mut t = 0;
        while t < cfg.t_max && log_min(&x) >= LOG_DOMAIN_SWITCH.ln() {
            step_into(p, &x, eps, &mut y, &mut next, &mut scratch);
            std::mem::swap(&mut x, &mut next);
            t += 1;
            log_xbar.push(log_max(&x));
            if let (Some(xs), Some(ys)) = (xs.as_mut(), ys.as_mut()) {
                xs.push(x.clone());
                ys.push(y.clone());
            }
            if let Some(v) = check_stop(&log_xbar, t, cfg) {
                break 'run v;
            }
        }
        // log phase
        let ln_eps = eps.ln();
        let mut lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let mut ly = vec![0.0; n];
        let mut lnext = vec![0.0; n];
        while t < cfg.t_max {
            log_step(p, &lx, ln_eps, &mut ly, &mut lnext);
            std::mem::swap(&mut lx, &mut lnext);
            t += 1;
            log_xbar.push(lx.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            if let (Some(xs), Some(ys)) = (xs.as_mut(), ys.as_mut()) {
                xs.push(lx.iter().map(|l| l.exp()).collect());
                ys.push(ly.iter().map(|l| l.exp()).collect());
            }
            if let Some(v) = check_stop(&log_xbar, t, cfg) {
                break 'run v;
            }
        }
        Verdict::MaxIters
    };

    DeTrace {
        epsilon: eps,
        log_xbar,
        x: xs,
        y: ys,
        verdict,
    }
}

fn check_stop(log_xbar: &[f64], t: usize, cfg: &DeConfig) -> Option<Verdict> {
    let cur = log_xbar[t];
    if cur < cfg.log_delta_conv {
        return Some(Verdict::Converged { t });
    }
    if t >= cfg.stall_window {
        let past = log_xbar[t - cfg.stall_window];
        // relative decrease (past - cur) / past
        let rel = -(cur - past).exp_m1();
        if rel < cfg.stall_rel {
            return Some(Verdict::Stalled { t });
        }
    }
    None
}

/// True when the recursion at `eps` drives every erasure probability to the
/// tolerance. Stalled runs count as not converged.
pub fn converges(p: &Protograph, eps: f64, cfg: &DeConfig) -> bool {
    run_de(p, eps, cfg).verdict.converged()
}

/// Bisection for the BEC threshold with [`DeConfig::threshold`] settings.
pub fn bec_threshold(p: &Protograph, resolution: f64) -> f64 {
    bec_threshold_with(p, resolution, &DeConfig::threshold())
}

/// Bisection on `[0, 1]` with `run_de` as the predicate, valid because the
/// recursion is monotone in `eps`. Returns the midpoint of the final bracket,
/// whose width is at most `resolution`.
pub fn bec_threshold_with(p: &Protograph, resolution: f64, cfg: &DeConfig) -> f64 {
    let resolution = resolution.max(1e-12);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if converges(p, mid, cfg) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Thresholds of several protographs, evaluated independently.
pub fn bec_thresholds(protos: &[Protograph], resolution: f64, exec: Execution) -> Vec<f64> {
    exec.map_slice(protos, |p| bec_threshold(p, resolution))
}

/// Least-squares fit of `log2(-ln xbar_t) = log2(beta) + alpha * t` over the
/// tail of a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub alpha: f64,
    pub beta: f64,
    pub tail_start: usize,
    pub points: usize,
}

/// Tail region: iterations with `xbar_t < 1e-3`.
pub const DECAY_TAIL_LEVEL: f64 = 1e-3;
pub const DECAY_MIN_POINTS: usize = 10;

/// Fits the decay exponent on the trace's tail. A clearly positive slope
/// certifies a doubly-exponential fall; a purely exponential fall gives a
/// slope tending to zero.
pub fn decay_diagnostic(trace: &DeTrace) -> Result<DecayFit> {
    decay_fit(&trace.log_xbar)
}

/// [`decay_diagnostic`] on a raw `ln xbar_t` sequence. The tail starts at the
/// first iteration below [`DECAY_TAIL_LEVEL`] and ends at the first
/// non-finite value (an exact zero).
pub fn decay_fit(log_xbar: &[f64]) -> Result<DecayFit> {
    let level = DECAY_TAIL_LEVEL.ln();
    let start = log_xbar.iter().position(|&l| l < level);
    let pts: Vec<(f64, f64)> = match start {
        Some(s) => log_xbar[s..]
            .iter()
            .take_while(|l| l.is_finite())
            .enumerate()
            .map(|(k, &l)| ((s + k) as f64, (-l).log2()))
            .collect(),
        None => Vec::new(),
    };
    if pts.len() < DECAY_MIN_POINTS {
        return Err(Error::InsufficientTail {
            found: pts.len(),
            needed: DECAY_MIN_POINTS,
        });
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let alpha = sxy / sxx;
    let intercept = my - alpha * mt;
    Ok(DecayFit {
        alpha,
        beta: intercept.exp2(),
        tail_start: start.unwrap_or(0),
        points: pts.len(),
    })
}

/// Union bound on the block-error probability of a length-`n` code whose
/// bit-to-check erasure probabilities are all at most `xbar`.
pub fn union_bound_block_error(n: u64, xbar: f64) -> f64 {
    (n as f64 * xbar).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proto::{BaseMatrix, Protograph};
    use crate::registry::builtin_protograph;

    fn example_2x4() -> Protograph {
        builtin_protograph("ex-2x4").unwrap()
    }

    #[test]
    fn step_matches_hand_evaluation() {
        let p = example_2x4();
        let (y, x) = de_step(&p, &[0.5; 9], 0.5).unwrap();
        for e in 0..9 {
            let expect = if p.edge(e).check == 0 { 0.9375 } else { 0.875 };
            assert!((y[e] - expect).abs() < 1e-15, "y[{e}]");
        }
        assert!((x[0] - 0.4375).abs() < 1e-15);
        assert!((x[1] - 0.46875).abs() < 1e-15);
        assert!((x[6] - 0.41015625).abs() < 1e-15);
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let p = example_2x4();
        let (y, x) = de_step(&p, &[0.0; 9], 0.7).unwrap();
        assert!(y.iter().chain(&x).all(|&v| v == 0.0));
        let (_, x) = de_step(&p, &[0.9; 9], 0.0).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn step_rejects_wrong_length() {
        assert!(matches!(
            de_step(&example_2x4(), &[0.1; 3], 0.5),
            Err(Error::DimensionMismatch { expected: 9, found: 3 })
        ));
    }

    #[test]
    fn zero_erasure_converges_immediately() {
        let t = run_de(&example_2x4(), 0.0, &DeConfig::threshold());
        assert_eq!(t.verdict, Verdict::Converged { t: 0 });
    }

    #[test]
    fn r12_4x8_brackets_its_threshold() {
        let p = builtin_protograph("r12-4x8").unwrap();
        assert!(converges(&p, 0.45, &DeConfig::threshold()));
        assert!(!converges(&p, 0.49, &DeConfig::threshold()));
    }

    #[test]
    fn degree_one_conventions() {
        // one check with a degree-1 bit: E_v is empty so x' = eps
        let p = Protograph::new(BaseMatrix::from_rows(&[[1, 2]])).unwrap();
        let (_, x) = de_step(&p, &[0.3; 3], 0.4).unwrap();
        assert!((x[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn synthetic_decay_fits() {
        let doubling: Vec<f64> = (0..=20).map(|t| -(2f64.powi(t))).collect();
        let fit = decay_fit(&doubling).unwrap();
        assert!((fit.alpha - 1.0).abs() < 0.01, "{fit:?}");
        let geometric: Vec<f64> = (0..=200).map(|t| t as f64 * 0.5f64.ln()).collect();
        let fit = decay_fit(&geometric).unwrap();
        assert!(fit.alpha <= 0.05, "{fit:?}");
        assert!(decay_fit(&[-1.0, -2.0]).is_err());
    }

    #[test]
    fn union_bound_values() {
        assert!((union_bound_block_error(10, 1e-5) - 1e-4).abs() < 1e-18);
        assert_eq!(union_bound_block_error(1_000_000, 1.0), 1.0);
        assert!((union_bound_block_error(957_728, 1e-12) - 9.57728e-7).abs() < 1e-18);
    }

    #[test]
    fn log_phase_continues_the_linear_recursion() {
        let p = builtin_protograph("r12-4x8").unwrap();
        let t = run_de(&p, 0.45, &DeConfig::decay(200));
        assert!(t.verdict.converged());
        assert!(t.final_log_xbar() < 1e-200f64.ln());
        assert!(t.log_xbar.windows(2).all(|w| w[1] <= w[0]));
    }
}
