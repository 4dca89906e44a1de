use crate::error::{Error, Result};

use super::graph::{Graph, RegularBipartiteGraph};

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= q {
        if q.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Point-line incidence graph `D(2, q)` over `F_q`, `q` a prime `>= 5`.
///
/// Points `(p1, p11)` are left vertices `p1 * q + p11`, lines `[l1, l11]` are
/// right vertices `l1 * q + l11`; a point lies on a line iff
/// `l11 - p11 = l1 * p1 (mod q)`. The graph is `q`-regular on `2 q^2`
/// vertices with girth at least 6, and comes with the coloring
/// `color = p1 + l1 (mod q)`.
pub fn d2q_graph(q: u64) -> Result<RegularBipartiteGraph> {
    if q < 5 || !is_prime(q) {
        return Err(Error::BadPrime(q));
    }
    let qs = q as usize;
    let lists = (0..qs * qs)
        .map(|p| {
            let (p1, p11) = ((p / qs) as u64, (p % qs) as u64);
            (0..q)
                .map(|l1| {
                    let l11 = (p11 + l1 * p1) % q;
                    (l1 * q + l11) as u32
                })
                .collect()
        })
        .collect();
    let mut g = RegularBipartiteGraph::new(qs * qs, lists)?;
    let colors: Vec<u32> = (0..g.num_edges())
        .map(|e| {
            let (p, l) = g.edge(e);
            ((p / qs + l / qs) % qs) as u32
        })
        .collect();
    g.set_coloring(&colors)?;
    Ok(g)
}

/// Bipartite double cover of a simple `d`-regular graph: left and right
/// copies of the vertex set, with `x -- y'` and `y -- x'` for each edge
/// `{x, y}`.
pub fn bipartite_double_cover(g: &Graph) -> Result<RegularBipartiteGraph> {
    let n = g.num_vertices();
    let d = if n == 0 { 0 } else { g.degree(0) };
    if let Some(v) = (0..n).find(|&v| g.degree(v) != d) {
        return Err(Error::NotRegular {
            vertex: v,
            degree: g.degree(v),
            expected: d,
        });
    }
    if let Some((a, b)) = g.parallel_edge() {
        return Err(Error::NotSimple(a, b));
    }
    let lists = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&(w, _)| w).collect())
        .collect();
    RegularBipartiteGraph::new(n, lists)
}

/// Splits every vertex of a colored `d`-regular bipartite graph into `d / t`
/// vertices of degree `t`: copy `k` of a vertex keeps the edges with colors
/// `k t .. (k + 1) t`. Vertex `v` copy `k` becomes `v * (d / t) + k`; the
/// result keeps the induced coloring `color - k t`.
pub fn degree_split(g: &RegularBipartiteGraph, t: usize) -> Result<RegularBipartiteGraph> {
    let d = g.degree();
    if t == 0 || !d.is_multiple_of(t) {
        return Err(Error::DegreeNotDivisible { degree: d, target: t });
    }
    let col = g.coloring().ok_or(Error::MissingColoring)?;
    let parts = d / t;
    let mut lists = Vec::with_capacity(g.n_left() * parts);
    let mut colors = Vec::with_capacity(g.num_edges());
    for v in 0..g.n_left() {
        for k in 0..parts {
            let mut row: Vec<(u32, u32)> = (k * t..(k + 1) * t)
                .map(|j| {
                    let u = col.at_left(v, j);
                    ((u * parts + j / t) as u32, (j - k * t) as u32)
                })
                .collect();
            row.sort_unstable();
            colors.extend(row.iter().map(|&(_, c)| c));
            lists.push(row.into_iter().map(|(u, _)| u).collect());
        }
    }
    let mut out = RegularBipartiteGraph::new(g.n_right() * parts, lists)?;
    out.set_coloring(&colors)?;
    Ok(out)
}

/// Complete bipartite graph `K_{n,n}`.
pub fn complete_bipartite(n: usize) -> RegularBipartiteGraph {
    let lists = (0..n).map(|_| (0..n as u32).collect()).collect();
    RegularBipartiteGraph::new(n, lists).expect("complete bipartite graph is regular")
}
