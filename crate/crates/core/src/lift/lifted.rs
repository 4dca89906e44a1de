use crate::error::{Error, Result};
use crate::proto::Protograph;

use super::graph::{Graph, RegularBipartiteGraph};

/// A `T`-fold lifting of a protograph.
///
/// Edge type `e` joining `v` and `c` is expanded into `T` edges: copy `t`
/// joins lifted bit `v * T + t` to lifted check `c * T + perm[e][t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedGraph {
    proto: Protograph,
    lift: usize,
    perms: Vec<Vec<u32>>,
    /// Edge type assigned to each color of the source coloring, when built
    /// by node splitting.
    color_to_type: Option<Vec<usize>>,
}

impl LiftedGraph {
    pub fn protograph(&self) -> &Protograph {
        &self.proto
    }

    pub fn lift_size(&self) -> usize {
        self.lift
    }

    pub fn perms(&self) -> &[Vec<u32>] {
        &self.perms
    }

    pub fn perm(&self, e: usize) -> &[u32] {
        &self.perms[e]
    }

    pub fn color_to_type(&self) -> Option<&[usize]> {
        self.color_to_type.as_deref()
    }

    pub fn blocklength(&self) -> usize {
        self.lift * self.proto.num_vars()
    }

    pub fn num_checks(&self) -> usize {
        self.lift * self.proto.num_checks()
    }

    pub fn num_edges(&self) -> usize {
        self.lift * self.proto.num_edges()
    }

    /// Endpoints `(bit, check)` of lifted edge `(e, t)`.
    pub fn lifted_edge(&self, e: usize, t: usize) -> (usize, usize) {
        let pe = self.proto.edge(e);
        (pe.var * self.lift + t, pe.check * self.lift + self.perms[e][t] as usize)
    }

    /// Lifted edges in type-major order, `(e, t)` at index `e * T + t`.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for e in 0..self.proto.num_edges() {
            for t in 0..self.lift {
                out.push(self.lifted_edge(e, t));
            }
        }
        out
    }

    /// Tanner graph view: bits `0..n`, checks `n..n+m`.
    pub fn to_graph(&self) -> Graph {
        let n = self.blocklength();
        let edges = self
            .edge_list()
            .into_iter()
            .map(|(b, c)| (b as u32, (n + c) as u32))
            .collect();
        Graph::from_edges(n + self.num_checks(), edges).expect("lifted edges in range")
    }

    /// Re-checks the structural invariants: each perm is a permutation, each
    /// lifted node sees exactly the edge types of its protograph node, and no
    /// two lifted edges share both endpoints.
    pub fn validate(&self) -> Result<()> {
        let t = self.lift;
        let p = &self.proto;
        for (e, perm) in self.perms.iter().enumerate() {
            check_permutation(e, perm, t)?;
        }
        let mut bit_types = vec![Vec::new(); self.blocklength()];
        let mut check_types = vec![Vec::new(); self.num_checks()];
        for e in 0..p.num_edges() {
            for k in 0..t {
                let (b, c) = self.lifted_edge(e, k);
                bit_types[b].push(e);
                check_types[c].push(e);
            }
        }
        for (b, types) in bit_types.iter().enumerate() {
            if types.as_slice() != p.var_edges(b / t) {
                return Err(Error::InvalidParameter(format!(
                    "lifted bit {b} has edge types {types:?}"
                )));
            }
        }
        for (c, types) in check_types.iter_mut().enumerate() {
            types.sort_unstable();
            if types.as_slice() != p.check_edges(c / t) {
                return Err(Error::InvalidParameter(format!(
                    "lifted check {c} has edge types {types:?}"
                )));
            }
        }
        check_simple(p, &self.perms, t)
    }
}

fn check_permutation(e: usize, perm: &[u32], t: usize) -> Result<()> {
    let mut seen = vec![false; t];
    if perm.len() != t {
        return Err(Error::BadPermutation { edge: e, size: t });
    }
    for &x in perm {
        let x = x as usize;
        if x >= t || seen[x] {
            return Err(Error::BadPermutation { edge: e, size: t });
        }
        seen[x] = true;
    }
    Ok(())
}

/// Parallel lifted edges can only come from parallel protograph edges whose
/// permutations agree on some copy.
fn check_simple(p: &Protograph, perms: &[Vec<u32>], t: usize) -> Result<()> {
    for v in 0..p.num_vars() {
        let group = p.var_edges(v);
        for (a, &e1) in group.iter().enumerate() {
            for &e2 in &group[a + 1..] {
                if p.edge(e1).check != p.edge(e2).check {
                    continue;
                }
                if let Some(copy) = (0..t).find(|&k| perms[e1][k] == perms[e2][k]) {
                    return Err(Error::ParallelLiftedEdge {
                        first: e1,
                        second: e2,
                        copy,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Lifting from explicit permutations, one per edge type, each over `0..t`.
pub fn copy_permute(p: &Protograph, t: usize, perms: Vec<Vec<u32>>) -> Result<LiftedGraph> {
    if perms.len() != p.num_edges() {
        return Err(Error::DimensionMismatch {
            expected: p.num_edges(),
            found: perms.len(),
        });
    }
    for (e, perm) in perms.iter().enumerate() {
        check_permutation(e, perm, t)?;
    }
    check_simple(p, &perms, t)?;
    Ok(LiftedGraph {
        proto: p.clone(),
        lift: t,
        perms,
        color_to_type: None,
    })
}

/// Lifting by node splitting an `|E|`-regular edge-colored bipartite graph.
///
/// Color `j` is identified with edge type `j`. Left vertex `t` becomes the
/// bits of copy `t`, right vertex `u` the checks of copy `u`, and the
/// color-`j` edge `t -- u` becomes the lifted edge of type `j` between them,
/// so `perm[j][t] = u`. The lift size is `n_L`.
pub fn node_split(p: &Protograph, g: &RegularBipartiteGraph) -> Result<LiftedGraph> {
    if g.degree() != p.num_edges() {
        return Err(Error::DegreeMismatch {
            graph: g.degree(),
            edges: p.num_edges(),
        });
    }
    let col = g.coloring().ok_or(Error::MissingColoring)?;
    let t = g.n_left();
    let perms = (0..p.num_edges())
        .map(|j| (0..t).map(|v| col.at_left(v, j) as u32).collect())
        .collect();
    let mut out = copy_permute(p, t, perms)?;
    out.color_to_type = Some((0..p.num_edges()).collect());
    Ok(out)
}
