//! Acceptance suite. Prints one PASS/FAIL line per criterion, with details
//! indented below it, and exits non-zero if any criterion fails.
//!
//! Run a subset by number: `cargo test --release --test acceptance -- 1 7`.

mod common;

use std::time::Instant;

use common::{graphs, matrix_with_edges, regular_threshold};
use protolab::de_bec::{bec_threshold, de_step, decay_diagnostic, run_de, DeConfig};
use protolab::de_bms::{awgn_threshold_with, bhatt_step, BhattState, SnrConvention};
use protolab::lift::{bipartite_girth, d2q_graph, edge_color, lifted_girth, node_split, RegularBipartiteGraph};
use protolab::optimizer::{optimize, DeOptConfig, OptimizeResult};
use protolab::proto::check_theorem1;
use protolab::registry::{builtin, builtin_protograph, BUILTINS};
use protolab::sim::{message_erasure_rates, simulate, Channel, SimConfig, SparseCode};
use protolab::stability::classify_stability;
use protolab::{BaseMatrix, Execution, Protograph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "MISS" }));
    }

    fn note(&mut self, line: String) {
        self.details.push(format!("     {line}"));
    }
}

fn bec_thresholds() -> Outcome {
    let mut o = Outcome::new();
    for b in BUILTINS.iter().filter(|b| b.bec_threshold.is_some()) {
        let want = b.bec_threshold.unwrap();
        let tol = if b.name == "r12-16x32" { 1e-3 } else { 5e-4 };
        let t0 = Instant::now();
        let got = bec_threshold(&b.protograph(), 1e-5);
        o.check(
            (got - want).abs() <= tol,
            format!("{}: {got:.5} vs {want} (tol {tol:e}, {:.2?})", b.name, t0.elapsed()),
        );
    }
    o
}

fn stability_example() -> Outcome {
    let mut o = Outcome::new();
    let r = classify_stability(&builtin_protograph("ex-2x4").unwrap()).unwrap();
    o.check(r.r_max == 2, format!("r_max {}", r.r_max));
    o.check(r.case.number() == 3 && (r.case_bound - 0.5).abs() < 1e-12, format!("case {} bound {}", r.case.number(), r.case_bound));
    o.check((r.epsilon_star - 0.5).abs() <= 1e-4, format!("epsilon_star {:.6}", r.epsilon_star));
    o
}

fn awgn_thresholds() -> Outcome {
    let mut o = Outcome::new();
    for b in BUILTINS.iter().filter(|b| b.awgn_snr_db.is_some()) {
        let p = b.protograph();
        let t0 = Instant::now();
        let per_dim = awgn_threshold_with(&p, 0.005, SnrConvention::PerDimension).unwrap();
        let want = b.awgn_snr_db.unwrap();
        o.check(
            (per_dim - want).abs() <= 0.1,
            format!("{} per-dimension SNR: {per_dim:.3} dB vs {want} ({:.2?})", b.name, t0.elapsed()),
        );
        if let Some(want) = b.awgn_ebn0_db {
            let ebn0 = awgn_threshold_with(&p, 0.005, SnrConvention::EbN0).unwrap();
            o.check((ebn0 - want).abs() <= 0.1, format!("{} Eb/N0: {ebn0:.3} dB vs {want}", b.name));
        }
    }
    o
}

fn construction_sizes() -> Outcome {
    let mut o = Outcome::new();
    for (name, q, want) in [("r12-16x32", 173, 957_728), ("r23-4x12", 61, 44_652), ("r34-3x12", 61, 44_652)] {
        let t0 = Instant::now();
        let p = builtin_protograph(name).unwrap();
        let l = node_split(&p, &d2q_graph(q).unwrap()).unwrap();
        o.check(l.blocklength() == want, format!("{name} via d2q:{q}: n = {} ({:.2?})", l.blocklength(), t0.elapsed()));
    }
    o
}

fn girth_properties() -> Outcome {
    let mut o = Outcome::new();
    for q in [5u64, 7, 11, 13] {
        let g = d2q_graph(q).unwrap();
        let girth = bipartite_girth(&g, None, Execution::default());
        let plain = g.to_graph();
        o.check(
            g.num_vertices() as u64 == 2 * q * q
                && plain.regular_degree() == Some(q as usize)
                && girth.lower_bound() >= 6,
            format!("d2q:{q}: {} vertices, degree {:?}, girth {girth}", g.num_vertices(), plain.regular_degree()),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut cases, mut kept) = (0, 0);
    for d in [5u32, 7] {
        for (_, g) in graphs(d as usize) {
            let gg = bipartite_girth(&g, None, Execution::default()).lower_bound();
            for _ in 0..2 {
                let p = Protograph::new(matrix_with_edges(d, &mut rng)).unwrap();
                let l = node_split(&p, &g).unwrap();
                cases += 1;
                if l.validate().is_ok() && lifted_girth(&l, None, Execution::default()).lower_bound() >= gg {
                    kept += 1;
                }
            }
        }
    }
    o.check(cases == 20 && kept == cases, format!("node_split keeps girth on {kept}/{cases} grid cases"));
    o
}

fn double_exponential_fall() -> Outcome {
    let mut o = Outcome::new();
    let p = builtin_protograph("r12-4x8").unwrap();
    let tr = run_de(&p, 0.45, &DeConfig::decay(200));
    let fit = decay_diagnostic(&tr).unwrap();
    let hit = tr.log_xbar.iter().position(|&l| l < 1e-200f64.ln());
    o.check(fit.alpha > 0.1, format!("r12-4x8 at 0.45: alpha {:.3}", fit.alpha));
    o.check(hit.is_some_and(|t| t <= 200), format!("r12-4x8 at 0.45: xbar below 1e-200 at t = {hit:?}"));
    let ex = builtin_protograph("ex-2x4").unwrap();
    let th = bec_threshold(&ex, 1e-4);
    for frac in [0.2, 0.5, 0.8, 0.95] {
        let eps = frac * th;
        let tr = run_de(&ex, eps, &DeConfig::decay(3000));
        let fit = decay_diagnostic(&tr).unwrap();
        o.check(fit.alpha <= 0.05, format!("ex-2x4 at {eps:.4}: alpha {:.4}", fit.alpha));
    }
    o
}

fn de_matches_simulation() -> Outcome {
    let mut o = Outcome::new();
    let p = builtin_protograph("r23-4x12").unwrap();
    let q = builtin("r23-4x12").unwrap().lift_q.unwrap();
    let l = node_split(&p, &d2q_graph(q).unwrap()).unwrap();
    let g = lifted_girth(&l, Some(8), Execution::default());
    o.note(format!("lift of r23-4x12 via d2q:{q}: n = {}, girth {g}", l.blocklength()));
    let code = SparseCode::from_lifted(&l);
    let eps = 0.3;
    let t0 = Instant::now();
    let rates = message_erasure_rates(&code, eps, 2, 100_000, 1, Execution::default()).unwrap();
    o.note(format!("{} frames at eps = {eps} ({:.2?})", rates.frames, t0.elapsed()));
    let mut x = vec![eps; p.num_edges()];
    for t in 1..=2 {
        x = de_step(&p, &x, eps).unwrap().1;
        let worst = (0..p.num_edges())
            .map(|i| {
                let se = rates.std_err[t - 1][i];
                let diff = (rates.rate[t - 1][i] - x[i]).abs();
                if se > 0.0 { diff / se } else if diff == 0.0 { 0.0 } else { f64::INFINITY }
            })
            .fold(0.0, f64::max);
        o.check(worst <= 3.0, format!("t = {t}: worst |z| over {} edge types {worst:.2}", p.num_edges()));
    }
    o
}

fn fer_spot_check() -> Outcome {
    let mut o = Outcome::new();
    let p = builtin_protograph("r23-4x12").unwrap();
    let g = d2q_graph(61).unwrap();
    let run = |g: &RegularBipartiteGraph| {
        let code = SparseCode::from_lifted(&node_split(&p, g).unwrap());
        let mut cfg = SimConfig::new(Channel::Bec { eps: 0.312 });
        cfg.max_frames = 10_000;
        cfg.min_frame_errors = 10_000;
        cfg.seed = 2;
        simulate(&code, &cfg).unwrap()
    };
    let t0 = Instant::now();
    let r = run(&g);
    let within = r.fer >= 5e-3 / 3.0 && r.fer <= 5e-3 * 3.0;
    o.check(
        within,
        format!("closed-form coloring: FER {:.4} +- {:.4}, BER {:.2e} over {} frames ({:.2?})", r.fer, r.fer_ci, r.ber, r.frames, t0.elapsed()),
    );
    let recolored = run(&edge_color(g.without_coloring()).unwrap());
    o.note(format!("Konig recoloring: FER {:.4} +- {:.4}, BER {:.2e}", recolored.fer, recolored.fer_ci, recolored.ber));
    o
}

fn bhattacharyya_bound() -> Outcome {
    let mut o = Outcome::new();
    let (mut pairs, mut worst) = (0usize, 0.0f64);
    let mut ok = true;
    for b in BUILTINS {
        let p = b.protograph();
        for eps in [0.2, 0.4] {
            let mut x = vec![eps; p.num_edges()];
            let mut bh = BhattState::initial(&p, eps);
            for _ in 1..=100 {
                x = de_step(&p, &x, eps).unwrap().1;
                bh = bhatt_step(&bh, &p);
                for (xi, bi) in x.iter().zip(&bh.b) {
                    pairs += 1;
                    ok &= xi <= bi;
                    if *bi > 0.0 {
                        worst = worst.max(xi / bi);
                    }
                }
            }
        }
    }
    o.check(ok, format!("x_t(i) <= B_t(i) on {pairs} (edge, t, eps, protograph) cases; max ratio {worst:.4}"));
    o
}

fn optimizer_properties() -> Outcome {
    let mut o = Outcome::new();
    let cfg = |exec| {
        let mut c = DeOptConfig::new(3, 6);
        c.population = Some(30);
        c.generations = 8;
        c.resolution = 1e-3;
        c.seed = 2024;
        c.exec = exec;
        c
    };
    let in_pool = |threads: usize| -> OptimizeResult {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| optimize(&cfg(Execution::Parallel), None).unwrap())
    };
    let base = optimize(&cfg(Execution::Sequential), None).unwrap();
    let monotone = base.trace.windows(2).all(|w| w[1].best_fitness >= w[0].best_fitness);
    o.check(monotone, format!("best fitness {:.4} -> {:.4} over {} generations", base.trace[0].best_fitness, base.best.fitness, base.trace.len() - 1));
    let admissible = base
        .population
        .iter()
        .all(|c| check_theorem1(&Protograph::new(c.matrix.clone()).unwrap()).satisfied());
    o.check(admissible, format!("all {} population members satisfy the structural conditions", base.population.len()));
    let same = [1, 2, 4].iter().all(|&t| in_pool(t) == base);
    o.check(same && optimize(&cfg(Execution::Sequential), None).unwrap() == base, "identical results sequentially and with 1, 2, 4 threads".into());
    o
}

fn scalar_oracle() -> Outcome {
    let mut o = Outcome::new();
    for d in 3..=5u32 {
        let p = Protograph::new(BaseMatrix::from_rows(&[[d, d]])).unwrap();
        let got = bec_threshold(&p, 1e-5);
        let want = regular_threshold(d, 2 * d, 1e-6);
        o.check((got - want).abs() <= 5e-4, format!("[[{d}, {d}]]: {got:.5} vs oracle {want:.5}"));
    }
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("BEC thresholds", bec_thresholds),
        ("stability of the 2x4 example", stability_example),
        ("BIAWGN thresholds", awgn_thresholds),
        ("construction blocklengths", construction_sizes),
        ("girth properties", girth_properties),
        ("double-exponential fall", double_exponential_fall),
        ("DE vs simulated message rates", de_matches_simulation),
        ("FER spot check at eps 0.312", fer_spot_check),
        ("Bhattacharyya bound", bhattacharyya_bound),
        ("optimizer properties", optimizer_properties),
        ("scalar oracle", scalar_oracle),
    ];
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let n = k + 1;
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let t0 = Instant::now();
        let out = f();
        println!("{} {n:>2} {name} ({:.1?})", if out.pass { "PASS" } else { "FAIL" }, t0.elapsed());
        for d in &out.details {
            println!("         {d}");
        }
        if !out.pass {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
