use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::{derive_seed, Execution};

use super::code::SparseCode;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BecOutcome {
    /// Bits still erased at the fixed point, ascending.
    pub residual: Vec<u32>,
    /// Peeling rounds that resolved at least one bit.
    pub iterations: usize,
}

impl BecOutcome {
    pub fn success(&self) -> bool {
        self.residual.is_empty()
    }
}

/// Peeling decoder in flooding rounds: each round resolves every erased bit
/// that is the only erased neighbour of some check. Stops at the fixed point
/// or after `max_iter` rounds. The fixed point (the largest stopping set
/// inside the erasures) does not depend on the resolution order.
pub fn bec_decode(code: &SparseCode, erased: &[u32], max_iter: usize) -> BecOutcome {
    let mut is_erased = vec![false; code.blocklength()];
    for &b in erased {
        is_erased[b as usize] = true;
    }
    let checks = code.edge_checks();
    let m = code.num_checks();
    let mut count = vec![0u32; m];
    // xor of erased bit indices per check recovers the last one directly
    let mut acc = vec![0u32; m];
    for &b in erased {
        for &e in code.bit_edges(b as usize) {
            let c = checks[e as usize] as usize;
            count[c] += 1;
            acc[c] ^= b;
        }
    }
    let mut ready: Vec<usize> = (0..m).filter(|&c| count[c] == 1).collect();
    let mut iterations = 0;
    let mut next = Vec::new();
    while !ready.is_empty() && iterations < max_iter {
        let mut resolved_any = false;
        let mut resolved = Vec::new();
        for &c in &ready {
            if count[c] != 1 {
                continue;
            }
            let b = acc[c] as usize;
            if is_erased[b] {
                is_erased[b] = false;
                resolved.push(b);
                resolved_any = true;
            }
        }
        for &b in &resolved {
            for &e in code.bit_edges(b) {
                let c = checks[e as usize] as usize;
                count[c] -= 1;
                acc[c] ^= b as u32;
                if count[c] == 1 {
                    next.push(c);
                }
            }
        }
        if !resolved_any {
            break;
        }
        iterations += 1;
        std::mem::swap(&mut ready, &mut next);
        next.clear();
    }
    let residual = (0..code.blocklength() as u32).filter(|&b| is_erased[b as usize]).collect();
    BecOutcome { residual, iterations }
}

/// `words` 64-bit masks whose bits are independently 1 with probability `p`.
/// Each bit compares the binary expansion of a uniform variate with that of
/// `p`, word-parallel, drawing on average about eight words per mask.
pub fn bernoulli_masks<R: RngCore>(rng: &mut R, p: f64, words: usize) -> Vec<u64> {
    (0..words).map(|_| bernoulli_word(rng, p)).collect()
}

pub fn bernoulli_word<R: RngCore>(rng: &mut R, p: f64) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return u64::MAX;
    }
    let mut out = 0u64;
    let mut open = u64::MAX;
    let mut frac = p;
    for _ in 0..53 {
        frac *= 2.0;
        let bit = frac >= 1.0;
        if bit {
            frac -= 1.0;
        }
        let r = rng.next_u64();
        if bit {
            out |= open & !r;
            open &= r;
        } else {
            open &= !r;
        }
        if open == 0 || frac == 0.0 {
            break;
        }
    }
    out
}

/// Erased bit positions of one frame.
pub fn sample_erasures<R: RngCore>(rng: &mut R, eps: f64, n: usize) -> Vec<u32> {
    let masks = bernoulli_masks(rng, eps, n.div_ceil(64));
    let mut out = Vec::new();
    for (w, &m) in masks.iter().enumerate() {
        let mut m = m;
        while m != 0 {
            let b = w * 64 + m.trailing_zeros() as usize;
            if b < n {
                out.push(b as u32);
            }
            m &= m - 1;
        }
    }
    out
}

/// Per edge type, per iteration `t = 1..=t_max`, the fraction of erased
/// bit-to-check messages under flooding message passing, with its standard
/// error from per-word batch means.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageRates {
    pub frames: usize,
    /// `rate[t - 1][type]`.
    pub rate: Vec<Vec<f64>>,
    pub std_err: Vec<Vec<f64>>,
}

/// Runs flooding BEC message passing on `frames` frames (rounded up to a
/// multiple of 64) and records erased message fractions per edge type.
///
/// Frames are bit-sliced 64 to a word: word `w` draws its channel from the
/// stream `(seed, w)`, so results do not depend on `exec`.
pub fn message_erasure_rates(
    code: &SparseCode,
    eps: f64,
    t_max: usize,
    frames: usize,
    seed: u64,
    exec: Execution,
) -> Result<MessageRates> {
    let types = code
        .edge_types()
        .ok_or_else(|| Error::InvalidParameter("code has no edge types".into()))?;
    let ntypes = types.iter().map(|&t| t as usize + 1).max().unwrap_or(0);
    let mut per_type = vec![0usize; ntypes];
    for &t in types {
        per_type[t as usize] += 1;
    }
    let words = frames.div_ceil(64);
    // counts[w][t][type]
    let counts: Vec<Vec<Vec<u64>>> = exec.map(words, |w| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[w as u64]));
        word_counts(code, types, ntypes, eps, t_max, &mut rng)
    });
    let mut rate = vec![vec![0.0; ntypes]; t_max];
    let mut std_err = vec![vec![0.0; ntypes]; t_max];
    for t in 0..t_max {
        for k in 0..ntypes {
            let denom = 64.0 * per_type[k] as f64;
            let samples: Vec<f64> = counts.iter().map(|c| c[t][k] as f64 / denom).collect();
            let mean = samples.iter().sum::<f64>() / words as f64;
            let var = if words > 1 {
                samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (words - 1) as f64
            } else {
                0.0
            };
            rate[t][k] = mean;
            std_err[t][k] = (var / words as f64).sqrt();
        }
    }
    Ok(MessageRates {
        frames: words * 64,
        rate,
        std_err,
    })
}

fn word_counts<R: Rng>(
    code: &SparseCode,
    types: &[u32],
    ntypes: usize,
    eps: f64,
    t_max: usize,
    rng: &mut R,
) -> Vec<Vec<u64>> {
    let n = code.blocklength();
    let channel: Vec<u64> = (0..n).map(|_| bernoulli_word(rng, eps)).collect();
    let ne = code.num_edges();
    let mut v2c: Vec<u64> = (0..ne).map(|e| channel[code.edge_bit(e)]).collect();
    let mut c2v = vec![0u64; ne];
    let mut out = vec![vec![0u64; ntypes]; t_max];
    let mut suffix = Vec::new();
    for row in out.iter_mut() {
        // check update: erased unless every other incoming message is known
        for c in 0..code.num_checks() {
            let r = code.check_range(c);
            suffix.clear();
            suffix.resize(r.len() + 1, 0u64);
            for k in (0..r.len()).rev() {
                suffix[k] = suffix[k + 1] | v2c[r.start + k];
            }
            let mut prefix = 0u64;
            for k in 0..r.len() {
                c2v[r.start + k] = prefix | suffix[k + 1];
                prefix |= v2c[r.start + k];
            }
        }
        // bit update: erased only if the channel and all other checks are
        for b in 0..n {
            let es = code.bit_edges(b);
            suffix.clear();
            suffix.resize(es.len() + 1, u64::MAX);
            for k in (0..es.len()).rev() {
                suffix[k] = suffix[k + 1] & c2v[es[k] as usize];
            }
            let mut prefix = channel[b];
            for k in 0..es.len() {
                let e = es[k] as usize;
                v2c[e] = prefix & suffix[k + 1];
                prefix &= c2v[e];
            }
        }
        for e in 0..ne {
            row[types[e] as usize] += v2c[e].count_ones() as u64;
        }
    }
    out
}
