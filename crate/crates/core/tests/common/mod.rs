#![allow(dead_code)]

use proptest::prelude::*;
use protolab::lift::{bipartite_double_cover, complete_bipartite, d2q_graph, degree_split, edge_color};
use protolab::lift::{Graph, RegularBipartiteGraph};
use protolab::{BaseMatrix, Protograph};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Fixes empty rows and columns by setting a diagonal-ish entry.
pub fn patch(rows: usize, cols: usize, mut e: Vec<u32>) -> BaseMatrix {
    for r in 0..rows {
        if (0..cols).all(|c| e[r * cols + c] == 0) {
            e[r * cols + r % cols] = 1;
        }
    }
    for c in 0..cols {
        if (0..rows).all(|r| e[r * cols + c] == 0) {
            e[(c % rows) * cols + c] = 1;
        }
    }
    BaseMatrix::new(rows, cols, e).unwrap()
}

/// Valid base matrices of up to `max_rows x max_cols` with entries `0..=max_entry`.
pub fn base_matrix(max_rows: usize, max_cols: usize, max_entry: u32) -> impl Strategy<Value = BaseMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(0..=max_entry, r * c).prop_map(move |e| patch(r, c, e))
    })
}

pub fn protograph(max_rows: usize, max_cols: usize, max_entry: u32) -> impl Strategy<Value = Protograph> {
    base_matrix(max_rows, max_cols, max_entry).prop_map(|b| Protograph::new(b).unwrap())
}

/// Every valid matrix of the given shape with entries `0..=max_entry`.
pub fn all_matrices(rows: usize, cols: usize, max_entry: u32) -> Vec<BaseMatrix> {
    let n = rows * cols;
    let base = max_entry as usize + 1;
    let total = base.pow(n as u32);
    (0..total)
        .filter_map(|mut k| {
            let mut e = vec![0u32; n];
            for x in e.iter_mut() {
                *x = (k % base) as u32;
                k /= base;
            }
            BaseMatrix::new(rows, cols, e).ok().filter(|b| b.validate().is_ok())
        })
        .collect()
}

/// Edge sets (as lists of edge ids) of all simple cycles of the multigraph
/// with the given `(a, b)` endpoint pairs, by subset enumeration: a nonempty
/// connected subset in which every touched vertex has degree exactly 2.
pub fn simple_cycles(ends: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let m = ends.len();
    assert!(m <= 16);
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        let ids: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let mut deg = std::collections::HashMap::new();
        for &i in &ids {
            *deg.entry(ends[i].0).or_insert(0) += 1;
            *deg.entry(ends[i].1).or_insert(0) += 1;
        }
        if deg.values().any(|&d| d != 2) {
            continue;
        }
        // connected: flood from the first edge
        let mut seen = vec![ids[0]];
        let mut grew = true;
        while grew {
            grew = false;
            for &i in &ids {
                if seen.contains(&i) {
                    continue;
                }
                let touches = seen.iter().any(|&j| {
                    let (a, b) = ends[j];
                    let (c, d) = ends[i];
                    a == c || a == d || b == c || b == d
                });
                if touches {
                    seen.push(i);
                    grew = true;
                }
            }
        }
        if seen.len() == ids.len() {
            out.push(ids);
        }
    }
    out
}

/// Protograph edges at degree-2 variables as `(bit, n_vars + check)` pairs,
/// with their protograph edge ids.
pub fn degree_two_edges(p: &Protograph) -> (Vec<usize>, Vec<(usize, usize)>) {
    let nv = p.num_vars();
    let ids: Vec<usize> = (0..p.num_edges()).filter(|&e| p.edge_var_degree(e) == 2).collect();
    let ends = ids.iter().map(|&e| (p.edge(e).var, nv + p.edge(e).check)).collect();
    (ids, ends)
}

/// Lengths of all simple directed cycles of a digraph given by successor lists.
pub fn directed_cycle_lengths(succ: &[Vec<usize>]) -> Vec<usize> {
    fn dfs(s: usize, u: usize, succ: &[Vec<usize>], on: &mut Vec<bool>, depth: usize, out: &mut Vec<usize>) {
        for &w in &succ[u] {
            if w == s {
                out.push(depth);
            } else if w > s && !on[w] {
                on[w] = true;
                dfs(s, w, succ, on, depth + 1, out);
                on[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..succ.len() {
        let mut on = vec![false; succ.len()];
        on[s] = true;
        dfs(s, s, succ, &mut on, 1, &mut out);
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Scalar DE for the `(dv, dc)`-regular ensemble.
pub fn regular_de_converges(dv: u32, dc: u32, eps: f64) -> bool {
    let mut x = eps;
    for _ in 0..100_000 {
        let next = eps * (1.0 - (1.0 - x).powi(dc as i32 - 1)).powi(dv as i32 - 1);
        if next < 1e-10 {
            return true;
        }
        if x - next < 1e-12 * x {
            return false;
        }
        x = next;
    }
    false
}

/// Threshold of the scalar oracle by plain bisection.
pub fn regular_threshold(dv: u32, dc: u32, resolution: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > resolution / 4.0 {
        let mid = 0.5 * (lo + hi);
        if regular_de_converges(dv, dc, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Random base matrix with exactly `edges` edges and no empty row or column.
pub fn matrix_with_edges(edges: u32, rng: &mut ChaCha8Rng) -> BaseMatrix {
    loop {
        let rows = rng.random_range(1..=2);
        let cols = rng.random_range(rows..=(edges as usize - rows + 1).min(4));
        let mut e = vec![0u32; rows * cols];
        for _ in 0..edges {
            let k = rng.random_range(0..e.len());
            e[k] += 1;
        }
        if let Ok(b) = BaseMatrix::new(rows, cols, e) {
            if b.validate().is_ok() {
                return b;
            }
        }
    }
}

pub fn complete_graph(n: usize) -> Graph {
    let edges = (0..n as u32).flat_map(|a| (a + 1..n as u32).map(move |b| (a, b))).collect();
    Graph::from_edges(n, edges).unwrap()
}

/// The five graph families used for lifting, all `d`-regular and colored.
pub fn graphs(d: usize) -> Vec<(&'static str, RegularBipartiteGraph)> {
    vec![
        ("complete", edge_color(complete_bipartite(d)).unwrap()),
        ("d2q", d2q_graph(d as u64).unwrap()),
        ("d2q-recolored", edge_color(d2q_graph(d as u64).unwrap().without_coloring()).unwrap()),
        ("double-cover", edge_color(bipartite_double_cover(&complete_graph(d + 1)).unwrap()).unwrap()),
        ("split", degree_split(&edge_color(complete_bipartite(2 * d)).unwrap(), d).unwrap()),
    ]
}
