use crate::error::{Error, Result};

/// Undirected multigraph in CSR form. Every edge has an id, so parallel
/// edges stay distinguishable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    /// `(neighbor, edge id)` pairs, grouped by vertex.
    adj: Vec<(u32, u32)>,
}

impl Graph {
    pub fn from_edges(n: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        let mut deg = vec![0usize; n + 1];
        for (k, &(a, b)) in edges.iter().enumerate() {
            if a as usize >= n || b as usize >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge {k} ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {a}")));
            }
            deg[a as usize + 1] += 1;
            deg[b as usize + 1] += 1;
        }
        for v in 0..n {
            deg[v + 1] += deg[v];
        }
        let offsets = deg;
        let mut fill = offsets.clone();
        let mut adj = vec![(0u32, 0u32); offsets[n]];
        for (k, &(a, b)) in edges.iter().enumerate() {
            adj[fill[a as usize]] = (b, k as u32);
            fill[a as usize] += 1;
            adj[fill[b as usize]] = (a, k as u32);
            fill[b as usize] += 1;
        }
        Ok(Self {
            n,
            edges,
            offsets,
            adj,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// `(neighbor, edge id)` pairs at `v`.
    pub fn neighbors(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = if self.n == 0 { 0 } else { self.degree(0) };
        (0..self.n).all(|v| self.degree(v) == d).then_some(d)
    }

    /// First pair of vertices joined by more than one edge.
    pub fn parallel_edge(&self) -> Option<(usize, usize)> {
        let mut seen = vec![u32::MAX; self.n];
        for v in 0..self.n {
            for &(w, _) in self.neighbors(v) {
                if seen[w as usize] == v as u32 {
                    return Some((v.min(w as usize), v.max(w as usize)));
                }
                seen[w as usize] = v as u32;
            }
        }
        None
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w as usize);
                }
            }
        }
        count == self.n
    }
}

/// Proper edge coloring of a regular bipartite graph with colors `0..d`
/// (shown as `1..d`). Both lookups are dense `vertex * d + color` tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    degree: usize,
    /// Right endpoint of the edge of each color at each left vertex.
    left: Vec<u32>,
    /// Left endpoint of the edge of each color at each right vertex.
    right: Vec<u32>,
}

impl EdgeColoring {
    /// Right neighbour of left vertex `v` along color `j` (0-based).
    pub fn at_left(&self, v: usize, j: usize) -> usize {
        self.left[v * self.degree + j] as usize
    }

    /// Left neighbour of right vertex `u` along color `j` (0-based).
    pub fn at_right(&self, u: usize, j: usize) -> usize {
        self.right[u * self.degree + j] as usize
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

/// A `d`-regular simple bipartite graph. Left neighbour lists are stored
/// flat and sorted; edge `v * d + k` is the `k`-th edge at left vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularBipartiteGraph {
    n_left: usize,
    n_right: usize,
    degree: usize,
    nbrs: Vec<u32>,
    coloring: Option<EdgeColoring>,
}

impl RegularBipartiteGraph {
    /// Builds from per-left-vertex neighbour lists; checks regularity on both
    /// sides and simplicity.
    pub fn new(n_right: usize, lists: Vec<Vec<u32>>) -> Result<Self> {
        let n_left = lists.len();
        let degree = lists.first().map_or(0, Vec::len);
        let mut nbrs = Vec::with_capacity(n_left * degree);
        let mut right_deg = vec![0usize; n_right];
        for (v, mut list) in lists.into_iter().enumerate() {
            if list.len() != degree {
                return Err(Error::NotRegular {
                    vertex: v,
                    degree: list.len(),
                    expected: degree,
                });
            }
            list.sort_unstable();
            for w in list.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::NotSimple(v, w[0] as usize));
                }
            }
            for &u in &list {
                if u as usize >= n_right {
                    return Err(Error::InvalidParameter(format!(
                        "right vertex {u} out of range for {n_right}"
                    )));
                }
                right_deg[u as usize] += 1;
            }
            nbrs.extend(list);
        }
        if let Some((u, &d)) = right_deg.iter().enumerate().find(|&(_, &d)| d != degree) {
            return Err(Error::NotRegular {
                vertex: n_left + u,
                degree: d,
                expected: degree,
            });
        }
        Ok(Self {
            n_left,
            n_right,
            degree,
            nbrs,
            coloring: None,
        })
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_vertices(&self) -> usize {
        self.n_left + self.n_right
    }

    pub fn num_edges(&self) -> usize {
        self.nbrs.len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.nbrs[v * self.degree..(v + 1) * self.degree]
    }

    /// Endpoints `(left, right)` of edge `e`.
    pub fn edge(&self, e: usize) -> (usize, usize) {
        (e / self.degree, self.nbrs[e] as usize)
    }

    pub fn coloring(&self) -> Option<&EdgeColoring> {
        self.coloring.as_ref()
    }

    /// Colors per edge id in `0..d`, if a coloring is attached.
    pub fn edge_colors(&self) -> Option<Vec<u32>> {
        let col = self.coloring.as_ref()?;
        let mut out = vec![0u32; self.num_edges()];
        for v in 0..self.n_left {
            for j in 0..self.degree {
                let u = col.at_left(v, j) as u32;
                let k = self.neighbors(v).binary_search(&u).expect("colored edge exists");
                out[v * self.degree + k] = j as u32;
            }
        }
        Some(out)
    }

    /// Attaches a coloring given per edge id, after checking it is proper.
    pub fn set_coloring(&mut self, colors: &[u32]) -> Result<()> {
        let d = self.degree;
        if colors.len() != self.num_edges() {
            return Err(Error::DimensionMismatch {
                expected: self.num_edges(),
                found: colors.len(),
            });
        }
        let mut left = vec![u32::MAX; self.n_left * d];
        let mut right = vec![u32::MAX; self.n_right * d];
        for (e, &j) in colors.iter().enumerate() {
            let (v, u) = self.edge(e);
            let j = j as usize;
            if j >= d {
                return Err(Error::ImproperColoring {
                    vertex: v,
                    color: j + 1,
                });
            }
            if left[v * d + j] != u32::MAX {
                return Err(Error::ImproperColoring {
                    vertex: v,
                    color: j + 1,
                });
            }
            if right[u * d + j] != u32::MAX {
                return Err(Error::ImproperColoring {
                    vertex: self.n_left + u,
                    color: j + 1,
                });
            }
            left[v * d + j] = u as u32;
            right[u * d + j] = v as u32;
        }
        self.coloring = Some(EdgeColoring {
            degree: d,
            left,
            right,
        });
        Ok(())
    }

    pub fn without_coloring(mut self) -> Self {
        self.coloring = None;
        self
    }

    /// Plain graph view: left vertices first, right vertex `u` at `n_left + u`.
    pub fn to_graph(&self) -> Graph {
        let edges = (0..self.num_edges())
            .map(|e| {
                let (v, u) = self.edge(e);
                (v as u32, (self.n_left + u) as u32)
            })
            .collect();
        Graph::from_edges(self.num_vertices(), edges).expect("valid bipartite edges")
    }
}
