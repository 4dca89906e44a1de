//! Differential-evolution search over base matrices.
//!
//! Each generation, every member `k` of the population gets a mutant
//! `|B_r1 + F (B_r2 - B_r3)|` (rounded, capped), is crossed over with it
//! entrywise, repaired back into the admissible set and replaced if the
//! offspring has strictly larger fitness. Admissible matrices have every
//! column sum at least 2, no cycle among degree-2 columns and (unless
//! `paper_strict`) every degree-2 column sharing a check with a column of
//! degree at least 3.

use std::collections::HashMap;
use std::io::{self, Write};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::de_bec::{bec_threshold_with, DeConfig};
use crate::de_bms::awgn_threshold;
use crate::error::{Error, Result};
use crate::exec::{derive_seed, Execution};
use crate::proto::{check_theorem1, degree_two_cycle, BaseMatrix, Node, Protograph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// BEC threshold.
    Bec,
    /// Negated BIAWGN `Eb/N0` threshold in dB.
    Awgn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeOptConfig {
    pub rows: usize,
    pub cols: usize,
    /// `N_P`; `None` means `10 * rows * cols`.
    pub population: Option<usize>,
    pub crossover: f64,
    pub scale: f64,
    pub generations: usize,
    pub entry_cap: u32,
    pub objective: Objective,
    pub seed: u64,
    /// Skip the degree-2 attachment repair.
    pub paper_strict: bool,
    /// Bisection resolution: erasure probability for `Bec`, dB for `Awgn`.
    pub resolution: f64,
    pub de: DeConfig,
    pub exec: Execution,
}

impl DeOptConfig {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            population: None,
            crossover: 0.88,
            scale: 0.5,
            generations: 100,
            entry_cap: 9,
            objective: Objective::Bec,
            seed: 0,
            paper_strict: false,
            resolution: 1e-4,
            de: DeConfig::threshold(),
            exec: Execution::default(),
        }
    }

    pub fn population_size(&self) -> usize {
        self.population.unwrap_or(10 * self.rows * self.cols)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if self.population_size() < 4 {
            return Err(Error::InvalidParameter(format!(
                "population {} below 4",
                self.population_size()
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover) {
            return Err(Error::InvalidParameter(format!(
                "crossover probability {} outside [0, 1]",
                self.crossover
            )));
        }
        if self.entry_cap < 2 {
            return Err(Error::InvalidParameter("entry cap below 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub matrix: BaseMatrix,
    pub fitness: f64,
    pub deg2_cycle_free: bool,
    pub deg2_attached: bool,
}

impl Candidate {
    pub fn is_admissible(&self, paper_strict: bool) -> bool {
        self.deg2_cycle_free && (paper_strict || self.deg2_attached)
    }
}

/// Fitness of a base matrix; `-inf` for matrices that are not protographs.
pub fn fitness(b: &BaseMatrix, cfg: &DeOptConfig) -> f64 {
    let Ok(p) = Protograph::new(b.clone()) else {
        return f64::NEG_INFINITY;
    };
    match cfg.objective {
        Objective::Bec => bec_threshold_with(&p, cfg.resolution, &cfg.de),
        Objective::Awgn => awgn_threshold(&p, cfg.resolution.max(0.005)).map_or(f64::NEG_INFINITY, |t| -t),
    }
}

/// `|r1 + scale (r2 - r3)|` entrywise, rounded half away from zero and
/// capped.
pub fn mutate(r1: &BaseMatrix, r2: &BaseMatrix, r3: &BaseMatrix, scale: f64, cap: u32) -> Result<BaseMatrix> {
    for m in [r2, r3] {
        if m.shape() != r1.shape() {
            return Err(Error::ShapeMismatch {
                expected: r1.shape(),
                found: m.shape(),
            });
        }
    }
    let entries = r1
        .entries()
        .iter()
        .zip(r2.entries())
        .zip(r3.entries())
        .map(|((&a, &b), &c)| {
            let x = (a as f64 + scale * (b as f64 - c as f64)).abs().round();
            (x as u32).min(cap)
        })
        .collect();
    BaseMatrix::new(r1.rows(), r1.cols(), entries)
}

fn structural_ok(b: &BaseMatrix, paper_strict: bool) -> Option<(bool, bool)> {
    let p = Protograph::new(b.clone()).ok()?;
    if (0..b.cols()).any(|c| b.col_sum(c) < 2) {
        return None;
    }
    let r = check_theorem1(&p);
    Some((r.deg2_cycle_free, paper_strict || r.every_deg2_touches_deg3plus))
}

fn bump<R: Rng>(b: &mut BaseMatrix, rows: &[usize], col: usize, cap: u32, rng: &mut R) -> bool {
    let open: Vec<usize> = rows.iter().copied().filter(|&r| b.get(r, col) < cap).collect();
    if open.is_empty() {
        return false;
    }
    let r = open[rng.random_range(0..open.len())];
    b.set(r, col, b.get(r, col) + 1);
    true
}

pub const REPAIR_ROUNDS: usize = 100;
/// Rounds in which cycles are broken by moving edges; later rounds add an
/// edge to the cycle column instead.
pub const MOVE_ROUNDS: usize = 20;

/// Moves and adds edges until `b` is admissible, at most [`REPAIR_ROUNDS`]
/// rounds. Each round fixes light columns and empty rows, then breaks one
/// degree-2 cycle, then attaches one isolated degree-2 column.
pub fn repair<R: Rng>(mut b: BaseMatrix, cap: u32, paper_strict: bool, rng: &mut R) -> Option<BaseMatrix> {
    let (m, n) = b.shape();
    let all_rows: Vec<usize> = (0..m).collect();
    for round in 0..REPAIR_ROUNDS {
        if let Some((true, true)) = structural_ok(&b, paper_strict) {
            return Some(b);
        }
        for c in 0..n {
            while b.col_sum(c) < 2 {
                if !bump(&mut b, &all_rows, c, cap, rng) {
                    return None;
                }
            }
        }
        for r in 0..m {
            if b.row_sum(r) == 0 {
                let c = rng.random_range(0..n);
                b.set(r, c, 1);
            }
        }
        let Ok(p) = Protograph::new(b.clone()) else {
            continue;
        };
        if let Some(cycle) = degree_two_cycle(&p) {
            // cycle is v, c, v', c', ..., v; pick a bit and one of its cycle checks
            let hops = cycle.len() - 1;
            let k = 2 * rng.random_range(0..hops / 2);
            let Node::Bit(v) = cycle[k] else { unreachable!() };
            let side = if rng.random_bool(0.5) { k + 1 } else { (k + hops - 1) % hops };
            let Node::Check(from) = cycle[side] else { unreachable!() };
            let others: Vec<usize> = (0..m).filter(|&r| r != from && b.get(r, v) < cap).collect();
            if round < MOVE_ROUNDS && !others.is_empty() {
                let to = others[rng.random_range(0..others.len())];
                b.set(from, v, b.get(from, v) - 1);
                b.set(to, v, b.get(to, v) + 1);
            } else {
                bump(&mut b, &all_rows, v, cap, rng);
            }
            continue;
        }
        if !paper_strict {
            let report = check_theorem1(&p);
            if let Some(&v) = report.isolated_deg2.first() {
                let checks: Vec<usize> = p.var_edges(v).iter().map(|&e| p.edge(e).check).collect();
                let c = checks[rng.random_range(0..checks.len())];
                let heavy: Vec<usize> = (0..n)
                    .filter(|&u| u != v && p.var_degree(u) >= 3 && b.get(c, u) < cap)
                    .collect();
                if heavy.is_empty() {
                    bump(&mut b, &all_rows, v, cap, rng);
                } else {
                    let u = heavy[rng.random_range(0..heavy.len())];
                    b.set(c, u, b.get(c, u) + 1);
                }
            }
        }
    }
    structural_ok(&b, paper_strict)
        .filter(|&(a, c)| a && c)
        .map(|_| b)
}

/// Entrywise crossover followed by [`repair`]; `None` when repair fails.
pub fn crossover_and_repair<R: Rng>(
    target: &BaseMatrix,
    mutant: &BaseMatrix,
    crossover: f64,
    cap: u32,
    paper_strict: bool,
    rng: &mut R,
) -> Option<BaseMatrix> {
    let entries = target
        .entries()
        .iter()
        .zip(mutant.entries())
        .map(|(&t, &m)| if rng.random_bool(crossover) { m } else { t })
        .collect();
    let child = BaseMatrix::new(target.rows(), target.cols(), entries).ok()?;
    repair(child, cap, paper_strict, rng)
}

/// The fitter of two candidates; ties keep `old`.
pub fn select(old: Candidate, new: Candidate) -> Candidate {
    if new.fitness > old.fitness {
        new
    } else {
        old
    }
}

fn stream(seed: u64, generation: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, &[generation, index]))
}

/// `N_P` admissible matrices with i.i.d. uniform binary entries; draws
/// that cannot be repaired are redrawn from the same stream.
pub fn init_population(cfg: &DeOptConfig) -> Result<Vec<BaseMatrix>> {
    cfg.validate()?;
    let n = cfg.population_size();
    cfg.exec
        .map(n, |k| {
            let mut rng = stream(cfg.seed, 0, k as u64);
            for _ in 0..1000 {
                let entries = (0..cfg.rows * cfg.cols).map(|_| rng.random_range(0..2u32)).collect();
                let b = BaseMatrix::new(cfg.rows, cfg.cols, entries).expect("shape matches");
                if let Some(b) = repair(b, cfg.entry_cap, cfg.paper_strict, &mut rng) {
                    return Ok(b);
                }
            }
            Err(Error::InvalidParameter(format!(
                "no admissible {}x{} matrix found",
                cfg.rows, cfg.cols
            )))
        })
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub best: Candidate,
    pub population: Vec<Candidate>,
    pub trace: Vec<GenerationStats>,
    pub evaluations: usize,
}

impl OptimizeResult {
    pub fn write_trace_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "generation,best_fitness,mean_fitness")?;
        for s in &self.trace {
            writeln!(w, "{},{:.6},{:.6}", s.generation, s.best_fitness, s.mean_fitness)?;
        }
        Ok(())
    }
}

struct Evaluator<'a> {
    cfg: &'a DeOptConfig,
    cache: HashMap<Vec<u32>, f64>,
    evaluations: usize,
}

impl Evaluator<'_> {
    fn evaluate(&mut self, ms: Vec<BaseMatrix>) -> Vec<Candidate> {
        let mut fresh: Vec<&BaseMatrix> = Vec::new();
        for m in &ms {
            if !self.cache.contains_key(m.entries()) && !fresh.iter().any(|f| f.entries() == m.entries()) {
                fresh.push(m);
            }
        }
        let values = self.cfg.exec.map_slice(&fresh, |m| fitness(m, self.cfg));
        self.evaluations += fresh.len();
        for (m, v) in fresh.iter().zip(values) {
            self.cache.insert(m.entries().to_vec(), v);
        }
        ms.into_iter()
            .map(|matrix| {
                let report = Protograph::new(matrix.clone()).ok().map(|p| check_theorem1(&p));
                Candidate {
                    fitness: self.cache[matrix.entries()],
                    deg2_cycle_free: report.as_ref().is_some_and(|r| r.deg2_cycle_free),
                    deg2_attached: report.as_ref().is_some_and(|r| r.every_deg2_touches_deg3plus),
                    matrix,
                }
            })
            .collect()
    }
}

fn stats(generation: usize, pop: &[Candidate]) -> GenerationStats {
    let best = pop.iter().map(|c| c.fitness).fold(f64::NEG_INFINITY, f64::max);
    let mean = pop.iter().map(|c| c.fitness).sum::<f64>() / pop.len() as f64;
    GenerationStats {
        generation,
        best_fitness: best,
        mean_fitness: mean,
    }
}

fn best_of(pop: &[Candidate]) -> Candidate {
    pop.iter()
        .cloned()
        .reduce(|a, b| if b.fitness > a.fitness { b } else { a })
        .expect("population is non-empty")
}

/// Runs `cfg.generations` generations, or fewer if `wall` elapses.
pub fn optimize(cfg: &DeOptConfig, wall: Option<Duration>) -> Result<OptimizeResult> {
    optimize_with(cfg, wall, |_| {})
}

/// Like [`optimize`], calling `on_generation` after each generation.
pub fn optimize_with<F: FnMut(&GenerationStats)>(
    cfg: &DeOptConfig,
    wall: Option<Duration>,
    mut on_generation: F,
) -> Result<OptimizeResult> {
    let start = Instant::now();
    let mut eval = Evaluator {
        cfg,
        cache: HashMap::new(),
        evaluations: 0,
    };
    let mut pop = eval.evaluate(init_population(cfg)?);
    let np = pop.len();
    let mut trace = vec![stats(0, &pop)];
    on_generation(&trace[0]);
    for g in 1..=cfg.generations {
        if wall.is_some_and(|w| start.elapsed() >= w) {
            break;
        }
        let offspring: Vec<Option<BaseMatrix>> = cfg.exec.map(np, |k| {
            let mut rng = stream(cfg.seed, g as u64, k as u64);
            let mut pick = |taken: &[usize]| loop {
                let r = rng.random_range(0..np);
                if !taken.contains(&r) {
                    break r;
                }
            };
            let r1 = pick(&[k]);
            let r2 = pick(&[k, r1]);
            let r3 = pick(&[k, r1, r2]);
            let mutant = mutate(&pop[r1].matrix, &pop[r2].matrix, &pop[r3].matrix, cfg.scale, cfg.entry_cap)
                .expect("population shares one shape");
            crossover_and_repair(&pop[k].matrix, &mutant, cfg.crossover, cfg.entry_cap, cfg.paper_strict, &mut rng)
        });
        let slots: Vec<usize> = (0..np).filter(|&k| offspring[k].is_some()).collect();
        let children = eval.evaluate(offspring.into_iter().flatten().collect());
        for (k, child) in slots.into_iter().zip(children) {
            let old = std::mem::replace(&mut pop[k], child.clone());
            pop[k] = select(old, child);
        }
        let s = stats(g, &pop);
        on_generation(&s);
        trace.push(s);
    }
    Ok(OptimizeResult {
        best: best_of(&pop),
        population: pop,
        trace,
        evaluations: eval.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u32]]) -> BaseMatrix {
        BaseMatrix::from_rows(rows)
    }

    #[test]
    fn mutation_arithmetic() {
        let r = |v| m(&[&[v]]);
        assert_eq!(mutate(&r(1), &r(0), &r(2), 0.5, 9).unwrap().get(0, 0), 0);
        assert_eq!(mutate(&r(1), &r(2), &r(1), 0.5, 9).unwrap().get(0, 0), 2);
        assert_eq!(mutate(&r(0), &r(0), &r(0), 0.5, 9).unwrap().get(0, 0), 0);
        assert_eq!(mutate(&r(0), &r(0), &r(5), 0.5, 9).unwrap().get(0, 0), 3);
        assert_eq!(mutate(&r(8), &r(9), &r(0), 0.5, 9).unwrap().get(0, 0), 9);
        assert!(matches!(
            mutate(&r(0), &m(&[&[0, 1]]), &r(0), 0.5, 9),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn repair_breaks_degree_two_cycle() {
        let bad = m(&[&[1, 1, 1], &[1, 1, 1]]);
        let p = Protograph::new(bad.clone()).unwrap();
        assert!(!check_theorem1(&p).deg2_cycle_free);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fixed = repair(bad, 9, false, &mut rng).unwrap();
        let r = check_theorem1(&Protograph::new(fixed).unwrap());
        assert!(r.satisfied());
    }

    #[test]
    fn crossover_extremes() {
        let target = m(&[&[2, 1, 1], &[1, 2, 2]]);
        let mutant = m(&[&[3, 1, 0], &[0, 2, 3]]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let keep = crossover_and_repair(&target, &mutant, 0.0, 9, false, &mut rng).unwrap();
        assert_eq!(keep, target);
        let take = crossover_and_repair(&target, &mutant, 1.0, 9, false, &mut rng).unwrap();
        let again = repair(mutant, 9, false, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_eq!(take, again);
    }

    #[test]
    fn select_ties_keep_old() {
        let c = |f| Candidate {
            matrix: m(&[&[2]]),
            fitness: f,
            deg2_cycle_free: true,
            deg2_attached: true,
        };
        assert_eq!(select(c(0.30), c(0.32)).fitness, 0.32);
        assert_eq!(select(c(0.32), c(0.30)).fitness, 0.32);
        let mut tie = c(0.3);
        tie.matrix = m(&[&[3]]);
        assert_eq!(select(c(0.3), tie).matrix, m(&[&[2]]));
    }

    #[test]
    fn population_is_admissible_and_reproducible() {
        let mut cfg = DeOptConfig::new(3, 6);
        cfg.seed = 11;
        let a = init_population(&cfg).unwrap();
        assert_eq!(a.len(), 180);
        for b in &a {
            assert!(check_theorem1(&Protograph::new(b.clone()).unwrap()).satisfied());
            assert!((0..6).all(|c| b.col_sum(c) >= 2));
        }
        cfg.exec = Execution::Sequential;
        assert_eq!(init_population(&cfg).unwrap(), a);
    }

    #[test]
    fn config_validation() {
        let mut cfg = DeOptConfig::new(2, 4);
        cfg.population = Some(3);
        assert!(cfg.validate().is_err());
        cfg.population = None;
        cfg.crossover = 1.5;
        assert!(cfg.validate().is_err());
    }
}
