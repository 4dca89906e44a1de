use super::code::SparseCode;

/// LLR magnitude clamp applied before `tanh` and to check outputs.
pub const LLR_CLAMP: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AwgnOutcome {
    /// Hard decisions, 1 where the posterior LLR is negative.
    pub hard: Vec<u8>,
    /// All parity checks satisfied by `hard`.
    pub converged: bool,
    pub iterations: usize,
}

fn decide(llr: &[f64], out: &mut [u8]) {
    for (h, &l) in out.iter_mut().zip(llr) {
        *h = u8::from(l < 0.0);
    }
}

/// Flooding sum-product decoding with the tanh rule. Stops as soon as the
/// hard decisions satisfy every check, which is tested before the first
/// iteration too.
pub fn awgn_decode(code: &SparseCode, llr: &[f64], max_iter: usize) -> AwgnOutcome {
    assert_eq!(llr.len(), code.blocklength(), "llr length");
    let n = code.blocklength();
    let ne = code.num_edges();
    let mut hard = vec![0u8; n];
    decide(llr, &mut hard);
    if code.syndrome_ok(&hard) {
        return AwgnOutcome {
            hard,
            converged: true,
            iterations: 0,
        };
    }
    let mut v2c: Vec<f64> = (0..ne).map(|e| llr[code.edge_bit(e)]).collect();
    let mut c2v = vec![0.0; ne];
    let mut post = vec![0.0; n];
    let mut th = Vec::new();
    let mut suffix = Vec::new();
    for it in 1..=max_iter {
        for c in 0..code.num_checks() {
            let r = code.check_range(c);
            th.clear();
            th.extend(r.clone().map(|e| (0.5 * v2c[e].clamp(-LLR_CLAMP, LLR_CLAMP)).tanh()));
            suffix.clear();
            suffix.resize(th.len() + 1, 1.0);
            for k in (0..th.len()).rev() {
                suffix[k] = suffix[k + 1] * th[k];
            }
            let mut prefix = 1.0;
            for k in 0..th.len() {
                let prod: f64 = prefix * suffix[k + 1];
                c2v[r.start + k] = (2.0 * prod.atanh()).clamp(-LLR_CLAMP, LLR_CLAMP);
                prefix *= th[k];
            }
        }
        for b in 0..n {
            let es = code.bit_edges(b);
            let total = llr[b] + es.iter().map(|&e| c2v[e as usize]).sum::<f64>();
            post[b] = total;
            for &e in es {
                v2c[e as usize] = total - c2v[e as usize];
            }
        }
        decide(&post, &mut hard);
        if code.syndrome_ok(&hard) {
            return AwgnOutcome {
                hard,
                converged: true,
                iterations: it,
            };
        }
    }
    AwgnOutcome {
        hard,
        converged: false,
        iterations: max_iter,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::code::tests::hamming;

    #[test]
    fn clean_and_empty_inputs() {
        let c = hamming();
        let out = awgn_decode(&c, &[100.0; 7], 50);
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
        let zero = awgn_decode(&c, &[0.0; 7], 50);
        assert!(zero.converged);
        assert_eq!(zero.hard, vec![0; 7]);
    }

    #[test]
    fn corrects_single_flip() {
        let c = hamming();
        let mut llr = [8.0; 7];
        llr[0] = -3.0;
        let out = awgn_decode(&c, &llr, 50);
        assert!(out.converged);
        assert!(out.iterations <= 2);
        assert_eq!(out.hard, vec![0; 7]);
    }

    #[test]
    fn saturated_messages_stay_finite() {
        let c = hamming();
        let mut llr = [1e6; 7];
        llr[3] = -1e6;
        let out = awgn_decode(&c, &llr, 20);
        assert_eq!(out.hard.len(), 7);
    }
}
