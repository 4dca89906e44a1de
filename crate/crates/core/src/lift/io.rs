//! Text formats.
//!
//! Bipartite graph file: a header `bipartite n_L n_R d` followed by one
//! `left right [color]` line per edge, vertices 0-based and colors `1..d`.
//! Either every edge carries a color or none does.
//!
//! Plain graph file (input to the double cover): a header `graph n`
//! followed by one `x y` line per edge.
//!
//! Permutation file: a line with `T`, then one line per edge type holding
//! `T` 0-based values `perm[e][0..T]`.
//!
//! Parity-check matrices use the alist layout: `n m`, the maximum column
//! and row weights, the `n` column weights, the `m` row weights, then one
//! line per column listing its 1-based rows and one line per row listing
//! its 1-based columns, each padded with zeros to the maximum weight.
//!
//! Lines starting with `#` and blank lines are ignored everywhere.

use std::io::{self, Write};

use crate::error::{Error, Result};

use super::graph::{Graph, RegularBipartiteGraph};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers(line: usize, s: &str) -> Result<Vec<u64>> {
    s.split_whitespace()
        .map(|t| t.parse::<u64>().map_err(|_| parse_err(line, format!("bad number `{t}`"))))
        .collect()
}

pub fn write_bipartite<W: Write>(g: &RegularBipartiteGraph, mut w: W) -> io::Result<()> {
    writeln!(w, "bipartite {} {} {}", g.n_left(), g.n_right(), g.degree())?;
    let colors = g.edge_colors();
    for e in 0..g.num_edges() {
        let (v, u) = g.edge(e);
        match &colors {
            Some(c) => writeln!(w, "{v} {u} {}", c[e] + 1)?,
            None => writeln!(w, "{v} {u}")?,
        }
    }
    Ok(())
}

pub fn parse_bipartite(text: &str) -> Result<RegularBipartiteGraph> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("bipartite") {
        return Err(parse_err(hl, "expected `bipartite n_L n_R d`"));
    }
    let dims = numbers(hl, &fields.collect::<Vec<_>>().join(" "))?;
    let [nl, nr, d] = dims[..] else {
        return Err(parse_err(hl, "expected `bipartite n_L n_R d`"));
    };
    let (nl, nr, d) = (nl as usize, nr as usize, d as usize);
    let mut lists = vec![Vec::with_capacity(d); nl];
    let mut colored: Vec<(usize, u32, u32)> = Vec::new();
    let mut has_color = None;
    for (ln, l) in lines {
        let v = numbers(ln, l)?;
        let (a, b, c) = match v[..] {
            [a, b] => (a, b, None),
            [a, b, c] => (a, b, Some(c)),
            _ => return Err(parse_err(ln, "expected `left right [color]`")),
        };
        if *has_color.get_or_insert(c.is_some()) != c.is_some() {
            return Err(parse_err(ln, "colors must be given on every edge or none"));
        }
        if a as usize >= nl || b as usize >= nr {
            return Err(parse_err(ln, "vertex index out of range"));
        }
        lists[a as usize].push(b as u32);
        if let Some(c) = c {
            if c == 0 || c as usize > d {
                return Err(parse_err(ln, format!("color {c} outside 1..{d}")));
            }
            colored.push((a as usize, b as u32, c as u32 - 1));
        }
    }
    if nl != nr {
        return Err(parse_err(hl, "regular bipartite graph needs n_L = n_R"));
    }
    if let Some(v) = lists.iter().position(|l| l.len() != d) {
        return Err(Error::NotRegular {
            vertex: v,
            degree: lists[v].len(),
            expected: d,
        });
    }
    let mut g = RegularBipartiteGraph::new(nr, lists)?;
    if has_color == Some(true) {
        let mut colors = vec![0u32; g.num_edges()];
        for (v, u, c) in colored {
            let k = g.neighbors(v).binary_search(&u).expect("edge was inserted");
            colors[v * d + k] = c;
        }
        g.set_coloring(&colors)?;
    }
    Ok(g)
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut fields = header.split_whitespace();
    let n = match (fields.next(), fields.next().map(str::parse::<usize>), fields.next()) {
        (Some("graph"), Some(Ok(n)), None) => n,
        _ => return Err(parse_err(hl, "expected `graph n`")),
    };
    let mut edges = Vec::new();
    for (ln, l) in lines {
        match numbers(ln, l)?[..] {
            [a, b] => edges.push((a as u32, b as u32)),
            _ => return Err(parse_err(ln, "expected `x y`")),
        }
    }
    Graph::from_edges(n, edges)
}

pub fn write_graph<W: Write>(g: &Graph, mut w: W) -> io::Result<()> {
    writeln!(w, "graph {}", g.num_vertices())?;
    for &(a, b) in g.edges() {
        writeln!(w, "{a} {b}")?;
    }
    Ok(())
}

pub fn write_perms<W: Write>(perms: &[Vec<u32>], t: usize, mut w: W) -> io::Result<()> {
    writeln!(w, "{t}")?;
    for p in perms {
        let line: Vec<String> = p.iter().map(u32::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn parse_perms(text: &str) -> Result<(usize, Vec<Vec<u32>>)> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing lift size"))?;
    let t: usize = header
        .parse()
        .map_err(|_| parse_err(hl, "expected the lift size T"))?;
    let perms = lines
        .map(|(ln, l)| {
            let v = numbers(ln, l)?;
            if v.len() != t {
                return Err(parse_err(ln, format!("expected {t} values, found {}", v.len())));
            }
            Ok(v.into_iter().map(|x| x as u32).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((t, perms))
}

/// Writes an `m x n` parity-check matrix given as per-check 0-based bit lists.
pub fn write_alist<W: Write>(n: usize, rows: &[Vec<u32>], mut w: W) -> io::Result<()> {
    let m = rows.len();
    let mut cols = vec![Vec::new(); n];
    for (c, r) in rows.iter().enumerate() {
        for &b in r {
            cols[b as usize].push(c as u32);
        }
    }
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = rows.iter().map(Vec::len).max().unwrap_or(0);
    let join = |v: &mut dyn Iterator<Item = usize>| {
        v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    writeln!(w, "{n} {m}")?;
    writeln!(w, "{max_col} {max_row}")?;
    writeln!(w, "{}", join(&mut cols.iter().map(Vec::len)))?;
    writeln!(w, "{}", join(&mut rows.iter().map(Vec::len)))?;
    for (lists, width) in [(&cols, max_col), (&rows.to_vec(), max_row)] {
        for l in lists.iter() {
            let mut entries: Vec<usize> = l.iter().map(|&x| x as usize + 1).collect();
            entries.sort_unstable();
            entries.resize(width, 0);
            writeln!(w, "{}", join(&mut entries.into_iter()))?;
        }
    }
    Ok(())
}

/// Reads an alist file into `(n, per-check 0-based bit lists)`; the column
/// section must agree with the row section.
pub fn parse_alist(text: &str) -> Result<(usize, Vec<Vec<u32>>)> {
    let mut lines = content_lines(text);
    let mut next = |what: &str| -> Result<(usize, Vec<u64>)> {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("unexpected end of file reading {what}")))?;
        Ok((ln, numbers(ln, l)?))
    };
    let (ln, nm) = next("dimensions")?;
    let [n, m] = nm[..] else {
        return Err(parse_err(ln, "expected `n m`"));
    };
    let (n, m) = (n as usize, m as usize);
    next("maximum weights")?;
    let (ln, col_w) = next("column weights")?;
    if col_w.len() != n {
        return Err(parse_err(ln, format!("expected {n} column weights")));
    }
    let (ln, row_w) = next("row weights")?;
    if row_w.len() != m {
        return Err(parse_err(ln, format!("expected {m} row weights")));
    }
    let mut from_cols = vec![Vec::new(); m];
    for (b, &wt) in col_w.iter().enumerate() {
        let (ln, v) = next("column list")?;
        let entries: Vec<u64> = v.into_iter().filter(|&x| x != 0).collect();
        if entries.len() != wt as usize {
            return Err(parse_err(ln, format!("column {} weight mismatch", b + 1)));
        }
        for c in entries {
            if c as usize > m {
                return Err(parse_err(ln, format!("row index {c} out of range")));
            }
            from_cols[c as usize - 1].push(b as u32);
        }
    }
    let mut rows = Vec::with_capacity(m);
    for (c, &wt) in row_w.iter().enumerate() {
        let (ln, v) = next("row list")?;
        let mut entries: Vec<u32> = v
            .into_iter()
            .filter(|&x| x != 0)
            .map(|x| x as u32 - 1)
            .collect();
        if entries.len() != wt as usize || entries.iter().any(|&b| b as usize >= n) {
            return Err(parse_err(ln, format!("row {} malformed", c + 1)));
        }
        entries.sort_unstable();
        let mut check = from_cols[c].clone();
        check.sort_unstable();
        if check != entries {
            return Err(parse_err(ln, format!("row {} disagrees with the column lists", c + 1)));
        }
        rows.push(entries);
    }
    Ok((n, rows))
}
