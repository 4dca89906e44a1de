use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use protolab::de_bec::bec_threshold;
use protolab::de_bms::{awgn_threshold_with, bhatt_bound_threshold, capacity_ebn0_db, SnrConvention};
use protolab::lift::io::{parse_bipartite, parse_graph, write_bipartite, write_perms};
use protolab::lift::{
    bipartite_double_cover, bipartite_girth, d2q_graph, degree_split, edge_color, girth_from, node_split,
    RegularBipartiteGraph,
};
use protolab::optimizer::{optimize_with, DeOptConfig, Objective};
use protolab::proto::parse_base_matrix;
use protolab::registry::{builtin, builtin_protograph, BUILTINS};
use protolab::sim::{simulate, Channel, SimConfig, SparseCode};
use protolab::stability::classify_stability;
use protolab::{Execution, Protograph};

use crate::args::*;

pub fn load_proto(spec: &str) -> Result<Protograph> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok(builtin_protograph(name)?);
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
    Ok(Protograph::new(parse_base_matrix(&text)?)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn parse_d2q(spec: &str) -> Result<Option<u64>> {
    match spec.strip_prefix("d2q:") {
        Some(q) => Ok(Some(q.parse().with_context(|| format!("bad prime in `{spec}`"))?)),
        None => Ok(None),
    }
}

/// First non-comment token of a text file.
fn header_token(text: &str) -> Option<&str> {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .and_then(|l| l.split_whitespace().next())
}

fn load_bipartite(spec: &str) -> Result<RegularBipartiteGraph> {
    if let Some(q) = parse_d2q(spec)? {
        return Ok(d2q_graph(q)?);
    }
    Ok(parse_bipartite(&read(Path::new(spec))?)?)
}

fn maybe_recolor(g: RegularBipartiteGraph, recolor: bool) -> Result<RegularBipartiteGraph> {
    let g = if recolor { g.without_coloring() } else { g };
    Ok(edge_color(g)?)
}

pub fn run(cli: &Cli, exec: Execution, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Threshold(a) => threshold(a, out),
        Command::Stability(a) => {
            let p = load_proto(&a.proto)?;
            writeln!(out, "{}", classify_stability(&p)?)?;
            Ok(())
        }
        Command::Optimize(a) => optimize(a, exec, out),
        Command::BuildGraph(a) => build_graph(a, out),
        Command::Lift(a) => lift(a, out),
        Command::Girth(a) => girth(a, exec, out),
        Command::Simulate(a) => sim(a, exec, out),
        Command::Show(a) => show(a, out),
    }
}

fn threshold(a: &ThresholdArgs, out: &mut dyn Write) -> Result<()> {
    let p = load_proto(&a.proto)?;
    let res = a.resolution.unwrap_or(default_resolution(a.channel));
    writeln!(out, "rate: {}", p.design_rate())?;
    match a.channel {
        ChannelKind::Bec => {
            if !(res > 0.0 && res < 0.5) {
                bail!("resolution {res} outside (0, 0.5)");
            }
            let th = bec_threshold(&p, res);
            writeln!(out, "threshold: {th:.4}")?;
            if a.bound {
                writeln!(out, "bhattacharyya_threshold: {:.4}", bhatt_bound_threshold(&p, res)?)?;
            }
        }
        ChannelKind::Awgn => {
            let conv = match a.snr {
                SnrKind::Ebn0 => SnrConvention::EbN0,
                SnrKind::PerDimension => SnrConvention::PerDimension,
            };
            let th = awgn_threshold_with(&p, res, conv)?;
            let rate = p.rate_f64();
            writeln!(out, "snr_convention: {conv}")?;
            writeln!(out, "threshold_db: {th:.3}")?;
            let ebn0 = match conv {
                SnrConvention::EbN0 => th,
                SnrConvention::PerDimension => th - 10.0 * (2.0 * rate).log10(),
            };
            writeln!(out, "gap_to_capacity_db: {:.3}", ebn0 - capacity_ebn0_db(rate))?;
        }
    }
    Ok(())
}

fn optimize(a: &OptimizeArgs, exec: Execution, out: &mut dyn Write) -> Result<()> {
    let mut cfg = DeOptConfig::new(a.rows, a.cols);
    cfg.objective = match a.objective {
        ObjectiveKind::Bec => Objective::Bec,
        ObjectiveKind::Awgn => Objective::Awgn,
    };
    cfg.generations = a.generations;
    cfg.seed = a.seed;
    cfg.population = a.population;
    cfg.crossover = a.crossover;
    cfg.scale = a.scale;
    cfg.entry_cap = a.entry_cap;
    cfg.paper_strict = a.paper_strict;
    if let Some(r) = a.resolution {
        cfg.resolution = r;
    } else if cfg.objective == Objective::Awgn {
        cfg.resolution = default_resolution(ChannelKind::Awgn);
    }
    cfg.exec = exec;
    cfg.validate()?;
    let res = optimize_with(&cfg, a.wall_secs.map(Duration::from_secs), |s| {
        eprintln!("generation {} best {:.6} mean {:.6}", s.generation, s.best_fitness, s.mean_fitness);
    })?;
    writeln!(out, "best_fitness: {:.6}", res.best.fitness)?;
    writeln!(out, "generations: {}", res.trace.len() - 1)?;
    writeln!(out, "evaluations: {}", res.evaluations)?;
    write!(out, "{}", res.best.matrix)?;
    if let Some(path) = &a.out {
        let mut w = create(path)?;
        write!(w, "{}", res.best.matrix)?;
        w.flush()?;
    }
    if let Some(path) = &a.trace {
        let mut w = create(path)?;
        res.write_trace_csv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn build_graph(a: &BuildGraphArgs, out: &mut dyn Write) -> Result<()> {
    let g = if a.kind.is_some() {
        d2q_graph(a.q.context("--kind d2q needs --q")?)?
    } else if let Some(path) = &a.double_cover {
        bipartite_double_cover(&parse_graph(&read(path)?)?)?
    } else {
        let t = a.degree_split.context("no graph source given")?;
        let g = maybe_recolor(load_bipartite(a.graph.as_deref().context("--degree-split needs --graph")?)?, false)?;
        degree_split(&g, t)?
    };
    let g = maybe_recolor(g, a.recolor)?;
    writeln!(out, "left: {}", g.n_left())?;
    writeln!(out, "right: {}", g.n_right())?;
    writeln!(out, "degree: {}", g.degree())?;
    let mut w = create(&a.out)?;
    write_bipartite(&g, &mut w)?;
    w.flush()?;
    Ok(())
}

fn lift(a: &LiftArgs, out: &mut dyn Write) -> Result<()> {
    let p = load_proto(&a.proto)?;
    let g = maybe_recolor(load_bipartite(&a.graph)?, a.recolor)?;
    let l = node_split(&p, &g)?;
    writeln!(out, "lift_size: {}", l.lift_size())?;
    writeln!(out, "blocklength: {}", l.blocklength())?;
    writeln!(out, "checks: {}", l.num_checks())?;
    writeln!(out, "edges: {}", l.num_edges())?;
    let code = SparseCode::from_lifted(&l);
    let mut w = create(&a.out)?;
    code.write_alist(&mut w)?;
    w.flush()?;
    if let Some(path) = &a.perms {
        let mut w = create(path)?;
        write_perms(l.perms(), l.lift_size(), &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn girth(a: &GirthArgs, exec: Execution, out: &mut dyn Write) -> Result<()> {
    let stop = a.lower_bound_only;
    let g = if let Some(q) = parse_d2q(&a.graph)? {
        bipartite_girth(&d2q_graph(q)?, stop, exec)
    } else {
        let text = read(Path::new(&a.graph))?;
        match header_token(&text) {
            Some("bipartite") => bipartite_girth(&parse_bipartite(&text)?, stop, exec),
            Some("graph") => {
                let g = parse_graph(&text)?;
                let sources: Vec<usize> = (0..g.num_vertices()).collect();
                girth_from(&g, &sources, stop, exec)
            }
            _ => {
                let code = SparseCode::from_alist(&text)?;
                let n = code.blocklength();
                let edges = code
                    .rows()
                    .iter()
                    .enumerate()
                    .flat_map(|(c, r)| r.iter().map(move |&b| (b, (n + c) as u32)))
                    .collect();
                let g = protolab::lift::Graph::from_edges(n + code.num_checks(), edges)?;
                let sources: Vec<usize> = (0..n).collect();
                girth_from(&g, &sources, stop, exec)
            }
        }
    };
    writeln!(out, "girth: {g}")?;
    Ok(())
}

fn sim(a: &SimulateArgs, exec: Execution, out: &mut dyn Write) -> Result<()> {
    let code = SparseCode::from_alist(&read(&a.code)?)?;
    let channel = match a.channel {
        ChannelKind::Bec => Channel::Bec { eps: a.param },
        ChannelKind::Awgn => Channel::Awgn { ebn0_db: a.param },
    };
    let mut cfg = SimConfig::new(channel);
    cfg.seed = a.seed;
    cfg.max_frames = a.max_frames;
    cfg.min_frame_errors = a.min_frame_errors;
    if let Some(m) = a.max_iter {
        cfg.max_iter = m;
    }
    cfg.exec = exec;
    let r = simulate(&code, &cfg)?;
    let mut buf = Vec::new();
    r.write_csv(&mut buf)?;
    out.write_all(&buf)?;
    if !r.reliable() {
        eprintln!("warning: only {} frame errors; intervals are approximate", r.frame_errors);
    }
    if let Some(path) = &a.out {
        fs::write(path, &buf).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn show(a: &ShowArgs, out: &mut dyn Write) -> Result<()> {
    if a.builtin == "list" {
        for b in BUILTINS {
            writeln!(out, "{:<16} {}", b.name, b.description)?;
        }
        return Ok(());
    }
    let b = builtin(&a.builtin)?;
    let p = b.protograph();
    writeln!(out, "name: {}", b.name)?;
    writeln!(out, "description: {}", b.description)?;
    writeln!(out, "shape: {}x{}", p.num_checks(), p.num_vars())?;
    writeln!(out, "edges: {}", p.num_edges())?;
    writeln!(out, "rate: {}", p.design_rate())?;
    if let Some(t) = b.bec_threshold {
        writeln!(out, "published_bec_threshold: {t}")?;
    }
    if let Some(t) = b.awgn_snr_db {
        writeln!(out, "published_awgn_snr_db: {t}")?;
    }
    if let Some(t) = b.awgn_ebn0_db {
        writeln!(out, "published_awgn_ebn0_db: {t}")?;
    }
    if let Some(q) = b.lift_q {
        writeln!(out, "lift_graph: d2q:{q}")?;
    }
    if let Some(n) = b.note {
        writeln!(out, "note: {n}")?;
    }
    write!(out, "{}", b.base_matrix())?;
    Ok(())
}
