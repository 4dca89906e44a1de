use crate::error::Result;

use super::graph::RegularBipartiteGraph;

const FREE: u32 = u32::MAX;

/// Proper `d`-edge-coloring of a `d`-regular bipartite graph (König).
///
/// Edges are colored in id order. When the color free at the left end is
/// busy at the right end, the alternating path of the two colors starting at
/// the right end is swapped first; in a bipartite graph that path never
/// reaches the left end.
pub fn konig_coloring(g: &RegularBipartiteGraph) -> Vec<u32> {
    let d = g.degree();
    let nl = g.n_left();
    // at[vertex * d + color] = edge id, vertices numbered left then right
    let mut at = vec![FREE; g.num_vertices() * d];
    let mut color = vec![FREE; g.num_edges()];
    let ends = |e: usize| {
        let (v, u) = g.edge(e);
        (v, nl + u)
    };
    let mut path = Vec::new();
    for e in 0..g.num_edges() {
        let (v, u) = ends(e);
        let a = (0..d).find(|&c| at[v * d + c] == FREE).expect("free color at left end");
        if at[u * d + a] != FREE {
            let b = (0..d).find(|&c| at[u * d + c] == FREE).expect("free color at right end");
            path.clear();
            let (mut x, mut want) = (u, a);
            while at[x * d + want] != FREE {
                let f = at[x * d + want] as usize;
                path.push(f);
                let (p, r) = ends(f);
                x = if p == x { r } else { p };
                want = if want == a { b } else { a };
            }
            for &f in &path {
                let (p, r) = ends(f);
                let c = color[f] as usize;
                at[p * d + c] = FREE;
                at[r * d + c] = FREE;
            }
            for &f in &path {
                let (p, r) = ends(f);
                let c = if color[f] as usize == a { b } else { a };
                color[f] = c as u32;
                at[p * d + c] = f as u32;
                at[r * d + c] = f as u32;
            }
        }
        color[e] = a as u32;
        at[v * d + a] = e as u32;
        at[u * d + a] = e as u32;
    }
    color
}

/// Attaches a coloring to `g` unless one is already present.
pub fn edge_color(mut g: RegularBipartiteGraph) -> Result<RegularBipartiteGraph> {
    if g.coloring().is_none() {
        let colors = konig_coloring(&g);
        g.set_coloring(&colors)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::construct::{complete_bipartite, d2q_graph};

    #[test]
    fn four_cycle_alternates() {
        let g = RegularBipartiteGraph::new(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let c = konig_coloring(&g);
        assert_eq!(c[0], c[3]);
        assert_eq!(c[1], c[2]);
        assert_ne!(c[0], c[1]);
    }

    #[test]
    fn complete_bipartite_nine() {
        let g = edge_color(complete_bipartite(9)).unwrap();
        assert_eq!(g.coloring().unwrap().degree(), 9);
    }

    #[test]
    fn konig_on_d2q_is_proper() {
        let g = d2q_graph(11).unwrap().without_coloring();
        let mut h = g.clone();
        h.set_coloring(&konig_coloring(&g)).unwrap();
    }
}
