//! Protograph data model.
//!
//! A [`BaseMatrix`] counts parallel edges between check `i` and variable `j`.
//! A [`Protograph`] materializes one edge per parallel copy, ordered
//! variable-major: ascending by (variable, check, copy). Every per-edge vector
//! elsewhere in the crate (erasure probabilities, Bhattacharyya bounds, mutual
//! informations, lifting permutations) is indexed in this order.

use std::collections::VecDeque;
use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// `rows x cols` matrix of non-negative edge multiplicities.
///
/// Shape is fixed at construction. Non-zero rows and columns are checked by
/// [`BaseMatrix::validate`], which every protograph construction runs; the
/// optimizer manipulates intermediate matrices that may violate it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl BaseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty base matrix");
        Self {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    /// Builds a matrix from row slices. Panics on ragged input; intended for
    /// literals.
    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(
            rows.iter().all(|r| r.as_ref().len() == cols),
            "ragged base matrix literal"
        );
        let entries = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(rows.len(), cols, entries).expect("non-empty literal")
    }

    /// Number of check nodes.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of variable nodes.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u32) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [u32] {
        &mut self.entries
    }

    pub fn row_sum(&self, row: usize) -> u32 {
        self.entries[row * self.cols..(row + 1) * self.cols].iter().sum()
    }

    pub fn col_sum(&self, col: usize) -> u32 {
        (0..self.rows).map(|r| self.get(r, col)).sum()
    }

    /// Total number of protograph edges `|E|`.
    pub fn edge_count(&self) -> usize {
        self.entries.iter().map(|&e| e as usize).sum()
    }

    pub fn max_entry(&self) -> u32 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    /// Checks that no row or column is identically zero.
    pub fn validate(&self) -> Result<()> {
        if let Some(r) = (0..self.rows).find(|&r| self.row_sum(r) == 0) {
            return Err(Error::ZeroRow(r + 1));
        }
        if let Some(c) = (0..self.cols).find(|&c| self.col_sum(c) == 0) {
            return Err(Error::ZeroColumn(c + 1));
        }
        Ok(())
    }

    /// True when every variable node has degree at least 2, the minimum the
    /// design search admits.
    pub fn has_min_bit_degree_two(&self) -> bool {
        (0..self.cols).all(|c| self.col_sum(c) >= 2)
    }
}

impl fmt::Display for BaseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Parses whitespace-separated integer rows. `#` starts a comment that runs
/// to the end of the line; blank lines are ignored.
pub fn parse_base_matrix(text: &str) -> Result<BaseMatrix> {
    let mut cols = None;
    let mut rows = 0;
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        for tok in &tokens {
            let v: u32 = tok.parse().map_err(|_| Error::BadEntry {
                line: idx + 1,
                token: (*tok).to_string(),
            })?;
            entries.push(v);
        }
        match cols {
            None => cols = Some(tokens.len()),
            Some(c) if c != tokens.len() => {
                return Err(Error::RaggedRow {
                    line: idx + 1,
                    expected: c,
                    found: tokens.len(),
                })
            }
            Some(_) => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or(Error::EmptyMatrix)?;
    let m = BaseMatrix::new(rows, cols, entries)?;
    m.validate()?;
    Ok(m)
}

/// One protograph edge: endpoints as 0-based node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtoEdge {
    pub var: usize,
    pub check: usize,
}

/// A node of the protograph; indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Bit(usize),
    Check(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Bit(v) => write!(f, "v{}", v + 1),
            Node::Check(c) => write!(f, "c{}", c + 1),
        }
    }
}

/// Typed-edge multigraph view of a base matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Protograph {
    base: BaseMatrix,
    edges: Vec<ProtoEdge>,
    var_edges: Vec<Vec<usize>>,
    check_edges: Vec<Vec<usize>>,
    ev: Vec<Vec<usize>>,
    ec: Vec<Vec<usize>>,
}

impl Protograph {
    pub fn new(base: BaseMatrix) -> Result<Self> {
        base.validate()?;
        let mut edges = Vec::with_capacity(base.edge_count());
        let mut var_edges = vec![Vec::new(); base.cols()];
        let mut check_edges = vec![Vec::new(); base.rows()];
        for v in 0..base.cols() {
            for c in 0..base.rows() {
                for _ in 0..base.get(c, v) {
                    let id = edges.len();
                    edges.push(ProtoEdge { var: v, check: c });
                    var_edges[v].push(id);
                    check_edges[c].push(id);
                }
            }
        }
        let others = |group: &[usize], e: usize| -> Vec<usize> {
            group.iter().copied().filter(|&i| i != e).collect()
        };
        let ev = edges
            .iter()
            .enumerate()
            .map(|(e, pe)| others(&var_edges[pe.var], e))
            .collect();
        let ec = edges
            .iter()
            .enumerate()
            .map(|(e, pe)| others(&check_edges[pe.check], e))
            .collect();
        Ok(Self {
            base,
            edges,
            var_edges,
            check_edges,
            ev,
            ec,
        })
    }

    pub fn base(&self) -> &BaseMatrix {
        &self.base
    }

    pub fn num_vars(&self) -> usize {
        self.base.cols()
    }

    pub fn num_checks(&self) -> usize {
        self.base.rows()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[ProtoEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> ProtoEdge {
        self.edges[e]
    }

    /// Edges incident to variable `v`, ascending.
    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edges[v]
    }

    /// Edges incident to check `c`, ascending.
    pub fn check_edges(&self, c: usize) -> &[usize] {
        &self.check_edges[c]
    }

    /// `E_v(e)`: the other edges at the variable end of `e`.
    pub fn ev(&self, e: usize) -> &[usize] {
        &self.ev[e]
    }

    /// `E_c(e)`: the other edges at the check end of `e`.
    pub fn ec(&self, e: usize) -> &[usize] {
        &self.ec[e]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_edges[v].len()
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_edges[c].len()
    }

    /// Degree of the variable node at edge `e`, `l(e)`.
    pub fn edge_var_degree(&self, e: usize) -> usize {
        self.var_degree(self.edges[e].var)
    }

    /// Degree of the check node at edge `e`, `r(e)`.
    pub fn edge_check_degree(&self, e: usize) -> usize {
        self.check_degree(self.edges[e].check)
    }

    /// Re-derives the base matrix from the edge list.
    pub fn to_base_matrix(&self) -> BaseMatrix {
        let mut m = BaseMatrix::zeros(self.num_checks(), self.num_vars());
        for e in &self.edges {
            let v = m.get(e.check, e.var);
            m.set(e.check, e.var, v + 1);
        }
        m
    }

    /// Design rate `1 - |C|/|V|`, exact.
    pub fn design_rate(&self) -> Ratio<i64> {
        design_rate(self)
    }

    pub fn rate_f64(&self) -> f64 {
        let r = self.design_rate();
        *r.numer() as f64 / *r.denom() as f64
    }

    /// Variables of degree exactly 2.
    pub fn degree_two_vars(&self) -> Vec<usize> {
        (0..self.num_vars())
            .filter(|&v| self.var_degree(v) == 2)
            .collect()
    }
}

pub fn build_protograph(b: BaseMatrix) -> Result<Protograph> {
    Protograph::new(b)
}

pub fn design_rate(p: &Protograph) -> Ratio<i64> {
    Ratio::new(1, 1) - Ratio::new(p.num_checks() as i64, p.num_vars() as i64)
}

/// Outcome of the structural checks that guarantee doubly-exponential decay
/// of the erasure probabilities below threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report {
    /// The subgraph induced by degree-2 variables has no cycle. Parallel
    /// edges count as a cycle of length 2.
    pub deg2_cycle_free: bool,
    /// Every degree-2 variable shares a check with a variable of degree >= 3.
    pub every_deg2_touches_deg3plus: bool,
    pub deg2_node_count: usize,
    /// A closed walk `n0, n1, ..., n0` through degree-2 variables when
    /// `deg2_cycle_free` is false.
    pub cycle_witness: Option<Vec<Node>>,
    /// Degree-2 variables with no degree >= 3 neighbor through any check.
    pub isolated_deg2: Vec<usize>,
}

impl Theorem1Report {
    pub fn satisfied(&self) -> bool {
        self.deg2_cycle_free && self.every_deg2_touches_deg3plus
    }
}

pub fn check_theorem1(p: &Protograph) -> Theorem1Report {
    let deg2 = p.degree_two_vars();
    let cycle_witness = degree_two_cycle(p);
    let isolated_deg2: Vec<usize> = deg2
        .iter()
        .copied()
        .filter(|&v| !touches_high_degree(p, v))
        .collect();
    Theorem1Report {
        deg2_cycle_free: cycle_witness.is_none(),
        every_deg2_touches_deg3plus: isolated_deg2.is_empty(),
        deg2_node_count: deg2.len(),
        cycle_witness,
        isolated_deg2,
    }
}

fn touches_high_degree(p: &Protograph, v: usize) -> bool {
    p.var_edges(v).iter().any(|&e| {
        let c = p.edge(e).check;
        p.check_edges(c)
            .iter()
            .any(|&f| p.edge(f).var != v && p.edge_var_degree(f) >= 3)
    })
}

/// Finds a cycle in the degree-2 subgraph, or `None` if it is a forest.
///
/// Edges are added in canonical order to a union-find forest; the first edge
/// whose endpoints are already connected closes a cycle, which is recovered
/// by a BFS over the forest built so far.
pub fn degree_two_cycle(p: &Protograph) -> Option<Vec<Node>> {
    let nv = p.num_vars();
    let id = |n: Node| match n {
        Node::Bit(v) => v,
        Node::Check(c) => nv + c,
    };
    let node_of = |i: usize| {
        if i < nv {
            Node::Bit(i)
        } else {
            Node::Check(i - nv)
        }
    };
    let total = nv + p.num_checks();
    let mut dsu = Dsu::new(total);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
    for e in p.edges() {
        if p.var_degree(e.var) != 2 {
            continue;
        }
        let a = id(Node::Bit(e.var));
        let b = id(Node::Check(e.check));
        if !dsu.union(a, b) {
            let path = forest_path(&adj, b, a);
            let mut cycle: Vec<Node> = path.into_iter().map(node_of).collect();
            cycle.push(node_of(b));
            return Some(normalize_cycle(cycle));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    None
}

/// Path from `from` to `to` in a forest given as adjacency lists.
fn forest_path(adj: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; adj.len()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &w in &adj[u] {
            if prev[w] == usize::MAX {
                prev[w] = u;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Rotates a closed walk (first == last) to start at its smallest node and
/// picks the direction whose second node is smaller.
fn normalize_cycle(mut cycle: Vec<Node>) -> Vec<Node> {
    cycle.pop();
    let n = cycle.len();
    let start = (0..n).min_by_key(|&i| cycle[i]).unwrap_or(0);
    let fwd: Vec<Node> = (0..n).map(|k| cycle[(start + k) % n]).collect();
    let bwd: Vec<Node> = (0..n).map(|k| cycle[(start + n - k) % n]).collect();
    let mut best = if n > 1 && bwd[1] < fwd[1] { bwd } else { fwd };
    best.push(best[0]);
    best
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
