use proptest::prelude::*;
use protolab::lift::{complete_bipartite, edge_color, node_split};
use protolab::registry::builtin_protograph;
use protolab::sim::{awgn_decode, bec_decode, simulate, Channel, SimConfig, SparseCode};
use protolab::Execution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random parity-check matrix on `n` bits with `m` checks of weight 2..=5.
fn random_code(n: usize, m: usize, rng: &mut ChaCha8Rng) -> SparseCode {
    let bits: Vec<u32> = (0..n as u32).collect();
    let rows: Vec<Vec<u32>> = (0..m)
        .map(|_| {
            let w = rng.random_range(2..=5.min(n));
            let mut r: Vec<u32> = bits.choose_multiple(rng, w).copied().collect();
            r.sort_unstable();
            r
        })
        .collect();
    SparseCode::from_rows(n, &rows).unwrap()
}

/// Resolves one degree-one check at a time in random order.
fn naive_peel(code: &SparseCode, erased: &[u32], rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut left: Vec<bool> = vec![false; code.blocklength()];
    for &b in erased {
        left[b as usize] = true;
    }
    let mut order: Vec<usize> = (0..code.num_checks()).collect();
    loop {
        order.shuffle(rng);
        let hit = order.iter().find_map(|&c| {
            let open: Vec<u32> = code.check_bits(c).iter().copied().filter(|&b| left[b as usize]).collect();
            (open.len() == 1).then(|| open[0])
        });
        match hit {
            Some(b) => left[b as usize] = false,
            None => break,
        }
    }
    (0..code.blocklength() as u32).filter(|&b| left[b as usize]).collect()
}

fn coupled_erasures(u: &[f64], eps: f64) -> Vec<u32> {
    (0..u.len() as u32).filter(|&b| u[b as usize] < eps).collect()
}

fn small_lift() -> SparseCode {
    let p = builtin_protograph("ex-2x4").unwrap();
    let g = edge_color(complete_bipartite(p.num_edges())).unwrap();
    SparseCode::from_lifted(&node_split(&p, &g).unwrap())
}

proptest! {
    #[test]
    fn peeling_result_is_order_independent(n in 4usize..40, seed in any::<u64>(), eps in 0.0..1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(n, n / 2 + 1, &mut rng);
        let u: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let erased = coupled_erasures(&u, eps);
        let fast = bec_decode(&code, &erased, usize::MAX);
        prop_assert_eq!(&fast.residual, &naive_peel(&code, &erased, &mut rng));
        prop_assert!(fast.residual.iter().all(|b| erased.contains(b)));
    }

    #[test]
    fn residual_grows_with_erasures(n in 4usize..40, seed in any::<u64>(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(n, n / 2 + 1, &mut rng);
        let u: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let small = bec_decode(&code, &coupled_erasures(&u, lo), usize::MAX).residual;
        let large = bec_decode(&code, &coupled_erasures(&u, hi), usize::MAX).residual;
        prop_assert!(small.iter().all(|x| large.contains(x)));
    }

    #[test]
    fn noiseless_llrs_decode_to_zero(n in 4usize..30, seed in any::<u64>(), mag in 0.5..20.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(n, n / 2 + 1, &mut rng);
        let out = awgn_decode(&code, &vec![mag; n], 10);
        prop_assert!(out.converged);
        prop_assert_eq!(out.iterations, 0);
        prop_assert!(out.hard.iter().all(|&h| h == 0));
    }
}

#[test]
fn frame_error_rate_rises_with_erasure_probability() {
    let code = small_lift();
    let mut last: Option<(f64, f64)> = None;
    for eps in [0.2, 0.35, 0.5, 0.65] {
        let mut cfg = SimConfig::new(Channel::Bec { eps });
        cfg.max_frames = 4000;
        cfg.min_frame_errors = 4000;
        let r = simulate(&code, &cfg).unwrap();
        if let Some((fer, ci)) = last {
            assert!(r.fer + r.fer_ci + ci >= fer, "eps {eps}: {} after {fer}", r.fer);
        }
        last = Some((r.fer, r.fer_ci));
    }
    assert!(last.unwrap().0 > 0.5);
}

#[test]
fn parallel_and_sequential_simulation_agree() {
    let code = small_lift();
    for channel in [Channel::Bec { eps: 0.4 }, Channel::Awgn { ebn0_db: 1.0 }] {
        let mut cfg = SimConfig::new(channel);
        cfg.max_frames = 3000;
        cfg.min_frame_errors = 40;
        cfg.seed = 5;
        cfg.exec = Execution::Sequential;
        let seq = simulate(&code, &cfg).unwrap();
        cfg.exec = Execution::Parallel;
        assert_eq!(simulate(&code, &cfg).unwrap(), seq);
    }
}
