//! Protograph EXIT analysis over the BIAWGN channel.
//!
//! Messages are modelled as consistent Gaussian LLRs and tracked per edge
//! type by their mutual information:
//!
//! ```text
//! I_ec(j) = 1 - J( sqrt( sum_{i in E_c(e_j)} jinv(1 - I_ev(i))^2 ) )
//! I_ev(i) = J( sqrt( s_ch^2 + sum_{j in E_v(e_i)} jinv(I_ec(j))^2 ) )
//! I_app(v) = J( sqrt( s_ch^2 + sum_{j at v} jinv(I_ec(j))^2 ) )
//! ```
//!
//! with channel LLR variance `s_ch^2 = 8 R Eb/N0` for unit-energy BPSK.

use std::fmt;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::proto::Protograph;

use super::jfun::{jfun, jinv};

/// How an SNR in dB maps to the channel LLR variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnrConvention {
    /// `Eb/N0`: `s_ch^2 = 8 R 10^(snr/10)`.
    #[default]
    EbN0,
    /// Signal power over per-dimension noise variance, `1/sigma^2`:
    /// `s_ch^2 = 4 * 10^(snr/10)`. Equals `Eb/N0 + 10 log10(2R)`; the two
    /// coincide at rate 1/2.
    PerDimension,
}

impl SnrConvention {
    pub fn llr_variance(self, snr_db: f64, rate: f64) -> f64 {
        let lin = 10f64.powf(snr_db / 10.0);
        match self {
            SnrConvention::EbN0 => 8.0 * rate * lin,
            SnrConvention::PerDimension => 4.0 * lin,
        }
    }

    /// Converts an `Eb/N0` in dB into this convention.
    pub fn from_ebn0_db(self, ebn0_db: f64, rate: f64) -> f64 {
        match self {
            SnrConvention::EbN0 => ebn0_db,
            SnrConvention::PerDimension => ebn0_db + 10.0 * (2.0 * rate).log10(),
        }
    }
}

impl fmt::Display for SnrConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SnrConvention::EbN0 => "ebn0",
            SnrConvention::PerDimension => "per-dimension",
        })
    }
}

/// Per-edge and per-bit mutual informations after an EXIT run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitState {
    pub i_ev: Vec<f64>,
    pub i_ec: Vec<f64>,
    pub i_app: Vec<f64>,
    pub sigma_ch2: f64,
}

impl ExitState {
    pub fn new(p: &Protograph, sigma_ch2: f64) -> Self {
        Self {
            i_ev: vec![0.0; p.num_edges()],
            i_ec: vec![0.0; p.num_edges()],
            i_app: vec![0.0; p.num_vars()],
            sigma_ch2,
        }
    }

    pub fn min_app(&self) -> f64 {
        self.i_app.iter().copied().fold(1.0, f64::min)
    }
}

/// One check update followed by one variable update, in place.
pub fn exit_step(p: &Protograph, st: &mut ExitState) {
    // squared message stds leaving variables
    let sq_ev: Vec<f64> = st.i_ev.iter().map(|&i| jinv(1.0 - i).powi(2)).collect();
    for c in 0..p.num_checks() {
        let group = p.check_edges(c);
        let total: f64 = group.iter().map(|&i| sq_ev[i]).sum();
        for &j in group {
            st.i_ec[j] = 1.0 - jfun((total - sq_ev[j]).max(0.0).sqrt());
        }
    }
    let sq_ec: Vec<f64> = st.i_ec.iter().map(|&i| jinv(i).powi(2)).collect();
    for v in 0..p.num_vars() {
        let group = p.var_edges(v);
        let total: f64 = st.sigma_ch2 + group.iter().map(|&j| sq_ec[j]).sum::<f64>();
        for &i in group {
            st.i_ev[i] = jfun((total - sq_ec[i]).max(0.0).sqrt());
        }
        st.i_app[v] = jfun(total.sqrt());
    }
}

pub const EXIT_MAX_ITERS: usize = 1000;
pub const EXIT_TARGET: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ExitRun {
    pub converged: bool,
    pub iterations: usize,
    pub state: ExitState,
}

/// Runs EXIT from `I_ev = 0` until every `I_app >= 1 - 1e-6` or
/// [`EXIT_MAX_ITERS`] iterations.
pub fn run_exit(p: &Protograph, sigma_ch2: f64) -> ExitRun {
    let mut st = ExitState::new(p, sigma_ch2);
    for it in 1..=EXIT_MAX_ITERS {
        exit_step(p, &mut st);
        if st.min_app() >= EXIT_TARGET {
            return ExitRun {
                converged: true,
                iterations: it,
                state: st,
            };
        }
    }
    ExitRun {
        converged: false,
        iterations: EXIT_MAX_ITERS,
        state: st,
    }
}

pub fn exit_converges(p: &Protograph, snr_db: f64, conv: SnrConvention) -> bool {
    run_exit(p, conv.llr_variance(snr_db, p.rate_f64())).converged
}

/// BIAWGN threshold in dB (in `conv`) by bisection over the SNR.
pub fn awgn_threshold_with(p: &Protograph, resolution_db: f64, conv: SnrConvention) -> Result<f64> {
    if !(resolution_db >= 0.005) {
        return Err(Error::InvalidParameter(format!(
            "resolution {resolution_db} dB below 0.005"
        )));
    }
    let (mut lo, mut hi) = (-5.0f64, 10.0f64);
    while exit_converges(p, lo, conv) {
        lo -= 5.0;
        if lo < -60.0 {
            return Ok(lo);
        }
    }
    while !exit_converges(p, hi, conv) {
        hi += 10.0;
        if hi > 60.0 {
            return Err(Error::InvalidParameter(
                "EXIT analysis does not converge at any SNR".to_string(),
            ));
        }
    }
    while hi - lo > resolution_db {
        let mid = 0.5 * (lo + hi);
        if exit_converges(p, mid, conv) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// BIAWGN `Eb/N0` threshold in dB.
pub fn awgn_threshold(p: &Protograph, resolution_db: f64) -> Result<f64> {
    awgn_threshold_with(p, resolution_db, SnrConvention::EbN0)
}

/// `Eb/N0` in dB at which BIAWGN capacity equals `rate`: the channel LLR
/// std `s` solves `J(s) = rate` and `Eb/N0 = s^2 / (8 rate)`.
pub fn capacity_ebn0_db(rate: f64) -> f64 {
    let s = jinv(rate);
    10.0 * (s * s / (8.0 * rate)).log10()
}

/// One row of a threshold report.
#[derive(Debug, Clone, PartialEq)]
pub struct AwgnThresholdRow {
    pub name: String,
    pub rate: f64,
    pub ebn0_th_db: f64,
    pub snr_th_db: f64,
    pub gap_to_capacity_db: f64,
}

impl AwgnThresholdRow {
    pub fn csv_header() -> &'static str {
        "name,rate,ebn0_th_db,snr_th_db,gap_to_capacity_db"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.4},{:.4},{:.4},{:.4}",
            self.name, self.rate, self.ebn0_th_db, self.snr_th_db, self.gap_to_capacity_db
        )
    }
}

/// Thresholds for several named protographs; `snr_th_db` is reported in the
/// per-dimension convention alongside `Eb/N0`.
pub fn awgn_threshold_rows(
    protos: &[(String, Protograph)],
    resolution_db: f64,
    exec: Execution,
) -> Result<Vec<AwgnThresholdRow>> {
    exec.map_slice(protos, |(name, p)| {
        let rate = p.rate_f64();
        let ebn0 = awgn_threshold(p, resolution_db)?;
        Ok(AwgnThresholdRow {
            name: name.clone(),
            rate,
            ebn0_th_db: ebn0,
            snr_th_db: SnrConvention::PerDimension.from_ebn0_db(ebn0, rate),
            gap_to_capacity_db: ebn0 - capacity_ebn0_db(rate),
        })
    })
    .into_iter()
    .collect()
}
