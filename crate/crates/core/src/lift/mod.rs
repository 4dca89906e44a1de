//! Structured liftings: regular bipartite graphs of large girth are
//! edge-colored and node-split into protograph liftings.

pub mod color;
pub mod construct;
pub mod girth;
pub mod graph;
pub mod io;
pub mod lifted;

pub use color::{edge_color, konig_coloring};
pub use construct::{bipartite_double_cover, complete_bipartite, d2q_graph, degree_split, is_prime};
pub use girth::{girth, girth_from, Girth};
pub use graph::{EdgeColoring, Graph, RegularBipartiteGraph};
pub use lifted::{copy_permute, node_split, LiftedGraph};

use crate::exec::Execution;

/// Girth of a regular bipartite graph, searching from the left side only.
pub fn bipartite_girth(g: &RegularBipartiteGraph, stop_at: Option<usize>, exec: Execution) -> Girth {
    let sources: Vec<usize> = (0..g.n_left()).collect();
    girth_from(&g.to_graph(), &sources, stop_at, exec)
}

/// Girth of a lifted Tanner graph, searching from the bits.
pub fn lifted_girth(l: &LiftedGraph, stop_at: Option<usize>, exec: Execution) -> Girth {
    let sources: Vec<usize> = (0..l.blocklength()).collect();
    girth_from(&l.to_graph(), &sources, stop_at, exec)
}
