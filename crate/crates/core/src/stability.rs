//! Linearized stability of BEC density evolution at the origin.
//!
//! The Jacobian of the recursion at `x = 0` is `eps * A` for a 0/1 pattern
//! `A` that does not depend on `eps`: `A(i, i') = 1` iff the variable at edge
//! `i` has degree 2 and `i'` is one of the other edges at the check reached
//! through the variable's second edge. Stability holds iff
//! `eps * rho(A) < 1`, and `rho(A)` is the largest Perron root over the
//! strongly connected components of the directed graph of `A`.

use std::fmt;

use crate::error::{Error, Result};
use crate::proto::{degree_two_cycle, Protograph};

/// Sparse 0/1 gradient pattern together with its SCC decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPattern {
    /// `succ[i]` lists the columns `i'` with `A(i, i') = 1`, ascending.
    succ: Vec<Vec<usize>>,
    /// Strongly connected components in topological order, i.e. the
    /// diagonal blocks of the Frobenius normal form.
    sccs: Vec<Vec<usize>>,
}

impl GradientPattern {
    pub fn size(&self) -> usize {
        self.succ.len()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.succ[i].binary_search(&j).is_ok()
    }

    pub fn dense(&self) -> Vec<Vec<u8>> {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }

    pub fn sccs(&self) -> &[Vec<usize>] {
        &self.sccs
    }

    /// Number of diagonal blocks `s_f`.
    pub fn block_count(&self) -> usize {
        self.sccs.len()
    }

    /// Components that carry a cycle (size > 1 or a self-loop); all other
    /// diagonal blocks are 1x1 zeros.
    pub fn nontrivial_sccs(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.sccs
            .iter()
            .filter(|c| c.len() > 1 || self.get(c[0], c[0]))
    }

    pub fn max_row_sum(&self) -> usize {
        self.succ.iter().map(Vec::len).max().unwrap_or(0)
    }
}

pub fn gradient_pattern(p: &Protograph) -> GradientPattern {
    let succ: Vec<Vec<usize>> = (0..p.num_edges())
        .map(|i| {
            if p.edge_var_degree(i) != 2 {
                return Vec::new();
            }
            let partner = p.ev(i)[0];
            let mut row = p.ec(partner).to_vec();
            row.sort_unstable();
            row
        })
        .collect();
    let sccs = strongly_connected_components(&succ);
    GradientPattern { succ, sccs }
}

/// Tarjan's algorithm, iterative. Returns components in topological order
/// (every arc goes from an earlier or the same component to a later one).
pub fn strongly_connected_components(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*k) {
                *k += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    comps.reverse();
    comps
}

pub const POWER_ITERATION_CAP: usize = 100_000;

/// Spectral radius of `A`, the maximum Perron root over its nontrivial
/// diagonal blocks (0 when there are none).
///
/// Each block is irreducible, so `A_b + I` is primitive and power iteration
/// on it converges from the all-ones vector even for periodic blocks. The
/// Collatz-Wielandt ratios bracket the Perron root at every step; iteration
/// stops once the bracket is narrower than `tol`.
pub fn spectral_radius(a: &GradientPattern, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} outside (0, 1e-3]"
        )));
    }
    let mut rho: f64 = 0.0;
    for comp in a.nontrivial_sccs() {
        rho = rho.max(block_perron_root(a, comp, tol)?);
    }
    Ok(rho)
}

fn block_perron_root(a: &GradientPattern, comp: &[usize], tol: f64) -> Result<f64> {
    let local = |g: usize| comp.binary_search(&g).ok();
    let rows: Vec<Vec<usize>> = comp
        .iter()
        .map(|&g| a.row(g).iter().filter_map(|&h| local(h)).collect())
        .collect();
    let n = comp.len();
    let mut x = vec![1.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..POWER_ITERATION_CAP {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let s = x[i] + rows[i].iter().map(|&j| x[j]).sum::<f64>();
            next[i] = s;
            let r = s / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi) - 1.0);
        }
        let norm = next.iter().copied().fold(0.0, f64::max);
        for (xi, ni) in x.iter_mut().zip(&next) {
            *xi = ni / norm;
        }
    }
    Err(Error::NoConvergence(POWER_ITERATION_CAP))
}

/// Which structural stability condition applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityCase {
    /// The degree-2 subgraph is a forest: stable for every `eps`.
    Deg2Forest,
    /// Cycles of the degree-2 subgraph are edge-disjoint: stable for `eps < 1`.
    DisjointCycles,
    /// Overlapping cycles: stable for `eps < 1 / r_max`.
    RmaxBound,
}

impl StabilityCase {
    pub fn number(self) -> u8 {
        match self {
            StabilityCase::Deg2Forest => 1,
            StabilityCase::DisjointCycles => 2,
            StabilityCase::RmaxBound => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub case: StabilityCase,
    /// `max` over edges `e` at degree-2 variables of the number of other
    /// edges at `e`'s check that also end on degree-2 variables.
    pub r_max: usize,
    /// Bound attached to `case` (infinite for case 1). Only `epsilon_star` is exact.
    pub case_bound: f64,
    pub spectral_radius: f64,
    /// Exact stability limit `1 / rho(A)`; infinite when `rho(A) = 0`.
    pub epsilon_star: f64,
}

impl StabilityReport {
    pub fn csv_header() -> &'static str {
        "case,r_max,rho,epsilon_star"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6},{}",
            self.case.number(),
            self.r_max,
            self.spectral_radius,
            fmt_eps(self.epsilon_star)
        )
    }
}

fn fmt_eps(e: f64) -> String {
    if e.is_infinite() {
        "inf".to_string()
    } else {
        format!("{e:.6}")
    }
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case: {}", self.case.number())?;
        writeln!(f, "r_max: {}", self.r_max)?;
        writeln!(f, "case_bound: {}", fmt_eps(self.case_bound))?;
        writeln!(f, "rho: {:.6}", self.spectral_radius)?;
        write!(f, "epsilon_star: {}", fmt_eps(self.epsilon_star))
    }
}

/// Absolute tolerance used for the Perron roots in [`classify_stability`].
pub const RHO_TOLERANCE: f64 = 1e-9;

pub fn classify_stability(p: &Protograph) -> Result<StabilityReport> {
    let r_max = stability_r_max(p);
    let case = if degree_two_cycle(p).is_none() {
        StabilityCase::Deg2Forest
    } else if degree_two_cycles_edge_disjoint(p) {
        StabilityCase::DisjointCycles
    } else {
        StabilityCase::RmaxBound
    };
    let case_bound = match case {
        StabilityCase::Deg2Forest => f64::INFINITY,
        StabilityCase::DisjointCycles => 1.0,
        StabilityCase::RmaxBound => 1.0 / r_max as f64,
    };
    let rho = spectral_radius(&gradient_pattern(p), RHO_TOLERANCE)?;
    // a converged bracket around 0 can land a hair below it
    let rho = if rho < RHO_TOLERANCE { 0.0 } else { rho };
    Ok(StabilityReport {
        case,
        r_max,
        case_bound,
        spectral_radius: rho,
        epsilon_star: if rho == 0.0 { f64::INFINITY } else { 1.0 / rho },
    })
}

pub fn stability_r_max(p: &Protograph) -> usize {
    let in_e2 = |e: usize| p.edge_var_degree(e) == 2;
    (0..p.num_edges())
        .filter(|&e| in_e2(e))
        .map(|e| p.ec(e).iter().filter(|&&f| in_e2(f)).count())
        .max()
        .unwrap_or(0)
}

/// True when no two cycles of the degree-2 subgraph share an edge, i.e.
/// every biconnected block of that multigraph is a bridge or a single cycle.
pub fn degree_two_cycles_edge_disjoint(p: &Protograph) -> bool {
    let nv = p.num_vars();
    let n = nv + p.num_checks();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut ends = Vec::new();
    for (id, e) in p.edges().iter().enumerate() {
        if p.var_degree(e.var) == 2 {
            let (a, b) = (e.var, nv + e.check);
            adj[a].push((b, id));
            adj[b].push((a, id));
            ends.push((id, a, b));
        }
    }
    biconnected_blocks(&adj).iter().all(|block| {
        if block.len() == 1 {
            return true;
        }
        let mut verts: Vec<usize> = block
            .iter()
            .flat_map(|&id| {
                let &(_, a, b) = ends.iter().find(|t| t.0 == id).expect("edge id");
                [a, b]
            })
            .collect();
        verts.sort_unstable();
        verts.dedup();
        verts.len() == block.len()
    })
}

/// Edge sets of the biconnected blocks of an undirected multigraph given as
/// `(neighbor, edge id)` lists.
fn biconnected_blocks(adj: &[Vec<(usize, usize)>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut blocks = Vec::new();
    // (vertex, edge id used to enter it, next adjacency position)
    let mut call: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != UNSEEN || adj[root].is_empty() {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        call.push((root, UNSEEN, 0));
        while let Some(&mut (v, via, ref mut k)) = call.last_mut() {
            if let Some(&(w, id)) = adj[v].get(*k) {
                *k += 1;
                if id == via {
                    continue;
                }
                if disc[w] == UNSEEN {
                    edge_stack.push(id);
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    call.push((w, id, 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(id);
                    low[v] = low[v].min(disc[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(u, _, _)) = call.last() {
                low[u] = low[u].min(low[v]);
                if low[v] >= disc[u] {
                    let mut block = Vec::new();
                    while let Some(id) = edge_stack.pop() {
                        block.push(id);
                        if id == via {
                            break;
                        }
                    }
                    blocks.push(block);
                }
            }
        }
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proto::BaseMatrix;
    use crate::registry::builtin_protograph;

    #[test]
    fn example_gradient_rows() {
        let a = gradient_pattern(&builtin_protograph("ex-2x4").unwrap());
        assert_eq!(a.row(0), &[3, 5, 8]);
        assert!(a.row(6).is_empty());
        assert_eq!(a.nontrivial_sccs().count(), 1);
        assert_eq!(
            a.nontrivial_sccs().next().unwrap(),
            &vec![0, 1, 2, 3, 4, 5]
        );
    }

    #[test]
    fn no_degree_two_means_zero_pattern() {
        let p = Protograph::new(BaseMatrix::from_rows(&[[3, 3]])).unwrap();
        let a = gradient_pattern(&p);
        assert_eq!(a.block_count(), p.num_edges());
        assert_eq!(spectral_radius(&a, 1e-6).unwrap(), 0.0);
    }

    #[test]
    fn three_degree_two_bits_on_two_checks() {
        // degree-2 subgraph of the stability example: one SCC on all 6 edges
        let p = Protograph::new(BaseMatrix::from_rows(&[[1, 1, 1], [1, 1, 1]])).unwrap();
        let a = gradient_pattern(&p);
        let big: Vec<_> = a.nontrivial_sccs().collect();
        assert_eq!(big.len(), 1);
        assert_eq!(big[0].len(), 6);
    }

    #[test]
    fn example_radius_and_report() {
        let p = builtin_protograph("ex-2x4").unwrap();
        let rho = spectral_radius(&gradient_pattern(&p), 1e-6).unwrap();
        assert!((rho - 2.0).abs() < 1e-6);
        let r = classify_stability(&p).unwrap();
        assert_eq!(r.case, StabilityCase::RmaxBound);
        assert_eq!(r.r_max, 2);
        assert_eq!(r.case_bound, 0.5);
        assert!((r.epsilon_star - 0.5).abs() < 1e-6);
    }

    #[test]
    fn parallel_pair_is_a_unit_cycle() {
        let p = Protograph::new(BaseMatrix::from_rows(&[[2]])).unwrap();
        let rho = spectral_radius(&gradient_pattern(&p), 1e-6).unwrap();
        assert!((rho - 1.0).abs() < 1e-6);
        let r = classify_stability(&p).unwrap();
        assert_eq!(r.case, StabilityCase::DisjointCycles);
        assert!((r.epsilon_star - 1.0).abs() < 1e-6);
    }

    #[test]
    fn optimized_rate_half_is_a_forest() {
        let r = classify_stability(&builtin_protograph("r12-4x8").unwrap()).unwrap();
        assert_eq!(r.case, StabilityCase::Deg2Forest);
        assert!(r.epsilon_star.is_infinite());
    }

    #[test]
    fn bad_tolerance_rejected() {
        let a = gradient_pattern(&builtin_protograph("ex-2x4").unwrap());
        assert!(spectral_radius(&a, 0.0).is_err());
        assert!(spectral_radius(&a, 0.1).is_err());
    }

    #[test]
    fn scc_order_is_topological() {
        // 0 -> 1 <-> 2 -> 3
        let succ = vec![vec![1], vec![2], vec![1, 3], vec![]];
        let comps = strongly_connected_components(&succ);
        assert_eq!(comps, vec![vec![0], vec![1, 2], vec![3]]);
    }

    #[test]
    fn long_cycle_block_converges() {
        // a single degree-2 ring of length 2k yields two directed k-cycles
        let k = 9;
        let mut rows = vec![vec![0u32; k]; k];
        for i in 0..k {
            rows[i][i] = 1;
            rows[(i + 1) % k][i] = 1;
        }
        // add a degree-3 column so checks stay meaningful
        for r in rows.iter_mut() {
            r.push(1);
        }
        let p = Protograph::new(BaseMatrix::from_rows(&rows)).unwrap();
        let rho = spectral_radius(&gradient_pattern(&p), 1e-9).unwrap();
        assert!((rho - 1.0).abs() < 1e-8, "{rho}");
        let r = classify_stability(&p).unwrap();
        assert_eq!(r.case, StabilityCase::DisjointCycles);
    }
}
