use std::collections::VecDeque;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::exec::Execution;

use super::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Girth {
    Finite(usize),
    /// No cycle shorter than the bound exists; longer ones were not searched.
    AtLeast(usize),
    Acyclic,
}

impl Girth {
    /// Lower bound on the girth; `usize::MAX` when acyclic.
    pub fn lower_bound(self) -> usize {
        match self {
            Girth::Finite(g) | Girth::AtLeast(g) => g,
            Girth::Acyclic => usize::MAX,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::AtLeast(g) => write!(f, ">= {g}"),
            Girth::Acyclic => f.write_str("acyclic"),
        }
    }
}

/// Length of the shortest cycle through `s`, or something larger when it
/// passes only near `s`; never less than the girth. Searches only cycles
/// shorter than `limit`.
fn shortest_from(g: &Graph, s: usize, limit: usize, dist: &mut [u32], via: &mut [u32], touched: &mut Vec<usize>) -> usize {
    let mut best = limit;
    let mut queue = VecDeque::new();
    dist[s] = 0;
    via[s] = u32::MAX;
    touched.push(s);
    queue.push_back(s);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x] as usize;
        if 2 * dx + 1 >= best {
            break;
        }
        for &(y, e) in g.neighbors(x) {
            if e == via[x] {
                continue;
            }
            let y = y as usize;
            if dist[y] == u32::MAX {
                dist[y] = dx as u32 + 1;
                via[y] = e;
                touched.push(y);
                queue.push_back(y);
            } else {
                best = best.min(dx + dist[y] as usize + 1);
            }
        }
    }
    for &v in touched.iter() {
        dist[v] = u32::MAX;
    }
    touched.clear();
    best
}

/// Girth by breadth-first search from every vertex in `sources` (every
/// cycle must touch one of them). With `stop_at = Some(b)` the search only
/// looks for cycles shorter than `b` and reports [`Girth::AtLeast`] if there
/// are none.
pub fn girth_from(g: &Graph, sources: &[usize], stop_at: Option<usize>, exec: Execution) -> Girth {
    let limit = stop_at.unwrap_or(usize::MAX);
    let best = AtomicUsize::new(limit);
    let chunk = 256;
    let chunks = sources.len().div_ceil(chunk);
    exec.map(chunks, |k| {
        let mut dist = vec![u32::MAX; g.num_vertices()];
        let mut via = vec![u32::MAX; g.num_vertices()];
        let mut touched = Vec::new();
        for &s in &sources[k * chunk..((k + 1) * chunk).min(sources.len())] {
            let cur = best.load(Ordering::Relaxed);
            let found = shortest_from(g, s, cur, &mut dist, &mut via, &mut touched);
            best.fetch_min(found, Ordering::Relaxed);
        }
    });
    let b = best.into_inner();
    match (b == limit, stop_at) {
        (false, _) => Girth::Finite(b),
        (true, Some(bound)) => Girth::AtLeast(bound),
        (true, None) => Girth::Acyclic,
    }
}

/// Exact girth.
pub fn girth(g: &Graph, exec: Execution) -> Girth {
    let sources: Vec<usize> = (0..g.num_vertices()).collect();
    girth_from(g, &sources, None, exec)
}
