use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::lift::io::{parse_alist, write_alist};
use crate::lift::LiftedGraph;

/// Sparse parity-check matrix. Edges are numbered check-major: the edges of
/// check `c` are `check_ptr[c]..check_ptr[c + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseCode {
    n: usize,
    check_ptr: Vec<usize>,
    /// Bit at the end of each edge.
    edge_bit: Vec<u32>,
    bit_ptr: Vec<usize>,
    /// Edge ids grouped by bit.
    bit_edges: Vec<u32>,
    /// Protograph edge type of each edge, for lifted codes.
    edge_type: Option<Vec<u32>>,
}

impl SparseCode {
    /// Builds from per-check bit lists; rejects repeated bits in a check.
    pub fn from_rows(n: usize, rows: &[Vec<u32>]) -> Result<Self> {
        Self::build(n, rows, None)
    }

    fn build(n: usize, rows: &[Vec<u32>], types: Option<&[Vec<u32>]>) -> Result<Self> {
        let mut check_ptr = vec![0usize];
        let mut edge_bit = Vec::new();
        let mut edge_type = types.map(|_| Vec::new());
        for (c, row) in rows.iter().enumerate() {
            let mut order: Vec<usize> = (0..row.len()).collect();
            order.sort_unstable_by_key(|&k| row[k]);
            for w in order.windows(2) {
                if row[w[0]] == row[w[1]] {
                    return Err(Error::NotSimple(c, row[w[0]] as usize));
                }
            }
            for k in order {
                if row[k] as usize >= n {
                    return Err(Error::InvalidParameter(format!(
                        "bit {} out of range for blocklength {n}",
                        row[k]
                    )));
                }
                edge_bit.push(row[k]);
                if let (Some(out), Some(t)) = (edge_type.as_mut(), types) {
                    out.push(t[c][k]);
                }
            }
            check_ptr.push(edge_bit.len());
        }
        let mut bit_ptr = vec![0usize; n + 1];
        for &b in &edge_bit {
            bit_ptr[b as usize + 1] += 1;
        }
        for b in 0..n {
            bit_ptr[b + 1] += bit_ptr[b];
        }
        let mut fill = bit_ptr.clone();
        let mut bit_edges = vec![0u32; edge_bit.len()];
        for (e, &b) in edge_bit.iter().enumerate() {
            bit_edges[fill[b as usize]] = e as u32;
            fill[b as usize] += 1;
        }
        Ok(Self {
            n,
            check_ptr,
            edge_bit,
            bit_ptr,
            bit_edges,
            edge_type,
        })
    }

    /// Parity-check structure of a lifting, keeping edge types.
    pub fn from_lifted(l: &LiftedGraph) -> Self {
        let m = l.num_checks();
        let mut rows = vec![Vec::new(); m];
        let mut types = vec![Vec::new(); m];
        let t = l.lift_size();
        for (k, (b, c)) in l.edge_list().into_iter().enumerate() {
            rows[c].push(b as u32);
            types[c].push((k / t) as u32);
        }
        Self::build(l.blocklength(), &rows, Some(&types)).expect("validated lifting is simple")
    }

    pub fn from_alist(text: &str) -> Result<Self> {
        let (n, rows) = parse_alist(text)?;
        Self::from_rows(n, &rows)
    }

    pub fn write_alist<W: Write>(&self, w: W) -> io::Result<()> {
        write_alist(self.n, &self.rows(), w)
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        (0..self.num_checks()).map(|c| self.check_bits(c).to_vec()).collect()
    }

    pub fn blocklength(&self) -> usize {
        self.n
    }

    pub fn num_checks(&self) -> usize {
        self.check_ptr.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.edge_bit.len()
    }

    /// `1 - m / n`.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.num_checks() as f64 / self.n as f64
    }

    pub fn check_range(&self, c: usize) -> std::ops::Range<usize> {
        self.check_ptr[c]..self.check_ptr[c + 1]
    }

    pub fn check_bits(&self, c: usize) -> &[u32] {
        &self.edge_bit[self.check_range(c)]
    }

    pub fn edge_bit(&self, e: usize) -> usize {
        self.edge_bit[e] as usize
    }

    pub fn bit_edges(&self, b: usize) -> &[u32] {
        &self.bit_edges[self.bit_ptr[b]..self.bit_ptr[b + 1]]
    }

    pub fn edge_types(&self) -> Option<&[u32]> {
        self.edge_type.as_deref()
    }

    /// Check of each edge.
    pub fn edge_checks(&self) -> Vec<u32> {
        let mut out = vec![0u32; self.num_edges()];
        for c in 0..self.num_checks() {
            for e in self.check_range(c) {
                out[e] = c as u32;
            }
        }
        out
    }

    /// True when every check sees an even number of ones in `hard`.
    pub fn syndrome_ok(&self, hard: &[u8]) -> bool {
        (0..self.num_checks()).all(|c| self.check_bits(c).iter().fold(0u8, |a, &b| a ^ hard[b as usize]) == 0)
    }
}
