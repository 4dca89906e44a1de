use std::fmt;
use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::exec::{derive_seed, Execution};

use super::awgn::awgn_decode;
use super::bec::{bec_decode, sample_erasures};
use super::code::SparseCode;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    Bec { eps: f64 },
    /// `sigma^2 = 1 / (2 R 10^(ebn0_db / 10))` with the code's design rate.
    Awgn { ebn0_db: f64 },
}

impl Channel {
    pub fn param(&self) -> f64 {
        match *self {
            Channel::Bec { eps } => eps,
            Channel::Awgn { ebn0_db } => ebn0_db,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Channel::Bec { eps } if !(0.0..=1.0).contains(&eps) => Err(Error::InvalidParameter(format!(
                "erasure probability {eps} outside [0, 1]"
            ))),
            Channel::Awgn { ebn0_db } if !ebn0_db.is_finite() => {
                Err(Error::InvalidParameter(format!("Eb/N0 {ebn0_db} dB")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Bec { eps } => write!(f, "bec({eps})"),
            Channel::Awgn { ebn0_db } => write!(f, "awgn({ebn0_db} dB)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub channel: Channel,
    pub seed: u64,
    pub max_frames: u64,
    pub min_frame_errors: u64,
    pub max_iter: usize,
    pub exec: Execution,
}

impl SimConfig {
    /// Defaults: 100 frame errors or 10^6 frames; 200 peeling rounds on the
    /// BEC, 100 sum-product iterations on BIAWGN.
    pub fn new(channel: Channel) -> Self {
        Self {
            channel,
            seed: 0,
            max_frames: 1_000_000,
            min_frame_errors: 100,
            max_iter: match channel {
                Channel::Bec { .. } => 200,
                Channel::Awgn { .. } => 100,
            },
            exec: Execution::default(),
        }
    }
}

/// Error counts below which the normal-approximation intervals are flagged.
pub const RELIABLE_ERRORS: u64 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub channel_param: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    /// 95% half-widths, normal approximation.
    pub ber_ci: f64,
    pub fer_ci: f64,
    pub seed: u64,
    pub max_iter: usize,
}

impl SimResult {
    pub fn reliable(&self) -> bool {
        self.frame_errors >= RELIABLE_ERRORS
    }

    pub fn csv_header() -> &'static str {
        "channel_param,frames,bit_errors,frame_errors,ber,fer,ber_ci,fer_ci,seed"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6e},{:.6e},{:.3e},{:.3e},{}",
            self.channel_param,
            self.frames,
            self.bit_errors,
            self.frame_errors,
            self.ber,
            self.fer,
            self.ber_ci,
            self.fer_ci,
            self.seed
        )
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::csv_header())?;
        writeln!(w, "{}", self.csv_row())
    }
}

/// Frames decoded per parallel batch. Results are scanned in frame order, so
/// the stopping frame does not depend on the batch split.
const BATCH: u64 = 256;

/// Decodes one frame of the all-zero codeword; returns the bit errors.
pub fn run_frame(code: &SparseCode, channel: Channel, seed: u64, frame: u64, max_iter: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[frame]));
    let n = code.blocklength();
    match channel {
        Channel::Bec { eps } => {
            let erased = sample_erasures(&mut rng, eps, n);
            bec_decode(code, &erased, max_iter).residual.len() as u64
        }
        Channel::Awgn { ebn0_db } => {
            let sigma2 = 1.0 / (2.0 * code.design_rate() * 10f64.powf(ebn0_db / 10.0));
            let noise = Normal::new(0.0, sigma2.sqrt()).expect("finite positive sigma");
            let llr: Vec<f64> = (0..n).map(|_| 2.0 * (1.0 + noise.sample(&mut rng)) / sigma2).collect();
            let out = awgn_decode(code, &llr, max_iter);
            out.hard.iter().map(|&h| h as u64).sum()
        }
    }
}

/// Monte-Carlo error rates. Frame `k` uses the stream `(seed, k)`; frames
/// are counted in order until `min_frame_errors` frame errors or
/// `max_frames` frames, so results do not depend on the worker count.
pub fn simulate(code: &SparseCode, cfg: &SimConfig) -> Result<SimResult> {
    cfg.channel.validate()?;
    if cfg.max_frames == 0 || cfg.min_frame_errors == 0 || cfg.max_iter == 0 {
        return Err(Error::InvalidParameter(
            "max_frames, min_frame_errors and max_iter must be positive".into(),
        ));
    }
    if matches!(cfg.channel, Channel::Awgn { .. }) && code.design_rate() <= 0.0 {
        return Err(Error::InvalidParameter("Eb/N0 needs a positive code rate".into()));
    }
    let (mut frames, mut bit_errors, mut frame_errors) = (0u64, 0u64, 0u64);
    'outer: while frames < cfg.max_frames {
        let start = frames;
        let len = BATCH.min(cfg.max_frames - start);
        let errs = cfg.exec.map(len as usize, |k| {
            run_frame(code, cfg.channel, cfg.seed, start + k as u64, cfg.max_iter)
        });
        for e in errs {
            frames += 1;
            bit_errors += e;
            frame_errors += u64::from(e > 0);
            if frame_errors >= cfg.min_frame_errors {
                break 'outer;
            }
        }
    }
    let n = code.blocklength() as f64;
    let fer = frame_errors as f64 / frames as f64;
    let ber = bit_errors as f64 / (frames as f64 * n);
    Ok(SimResult {
        channel_param: cfg.channel.param(),
        frames,
        bit_errors,
        frame_errors,
        ber,
        fer,
        ber_ci: 1.96 * (ber * (1.0 - ber) / (frames as f64 * n)).sqrt(),
        fer_ci: 1.96 * (fer * (1.0 - fer) / frames as f64).sqrt(),
        seed: cfg.seed,
        max_iter: cfg.max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::code::tests::hamming;

    fn cfg(channel: Channel, frames: u64) -> SimConfig {
        SimConfig {
            max_frames: frames,
            ..SimConfig::new(channel)
        }
    }

    #[test]
    fn erasure_extremes() {
        let c = hamming();
        let zero = simulate(&c, &cfg(Channel::Bec { eps: 0.0 }, 500)).unwrap();
        assert_eq!((zero.frames, zero.fer, zero.ber), (500, 0.0, 0.0));
        let one = simulate(&c, &cfg(Channel::Bec { eps: 1.0 }, 500)).unwrap();
        assert_eq!(one.fer, 1.0);
        assert_eq!(one.ber, 1.0);
        assert_eq!(one.frames, 100);
    }

    #[test]
    fn stop_point_independent_of_workers() {
        let c = hamming();
        let mut a = cfg(Channel::Bec { eps: 0.3 }, 5000);
        a.min_frame_errors = 37;
        a.exec = Execution::Sequential;
        let mut b = a.clone();
        b.exec = Execution::Parallel;
        let (ra, rb) = (simulate(&c, &a).unwrap(), simulate(&c, &b).unwrap());
        assert_eq!(ra, rb);
        assert_eq!(ra.frame_errors, 37);
        assert!(ra.ber <= ra.fer);
    }

    #[test]
    fn awgn_runs_and_validates() {
        let c = hamming();
        let r = simulate(&c, &cfg(Channel::Awgn { ebn0_db: 4.0 }, 300)).unwrap();
        assert!(r.fer < 0.5);
        assert!(simulate(&c, &cfg(Channel::Bec { eps: 1.5 }, 10)).is_err());
        let mut bad = cfg(Channel::Bec { eps: 0.1 }, 10);
        bad.max_iter = 0;
        assert!(simulate(&c, &bad).is_err());
        assert!(SimResult::csv_header().starts_with("channel_param,frames"));
    }
}
