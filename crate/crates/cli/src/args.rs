use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "protolab", version, about = "Protograph LDPC design toolkit")]
pub struct Cli {
    /// Worker threads [default: available parallelism]
    #[arg(long, global = true, env = "PROTOLAB_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Decoding threshold of a protograph on the BEC or BIAWGN channel
    Threshold(ThresholdArgs),
    /// Structural stability classification of the degree-2 subgraph
    Stability(StabilityArgs),
    /// Differential-evolution search for a base matrix
    Optimize(OptimizeArgs),
    /// Builds a regular bipartite graph and writes it with its edge coloring
    BuildGraph(BuildGraphArgs),
    /// Lifts a protograph by node splitting an edge-colored graph
    Lift(LiftArgs),
    /// Girth of a bipartite graph, plain graph or parity-check matrix
    Girth(GirthArgs),
    /// Monte-Carlo error rates of a parity-check code
    Simulate(SimulateArgs),
    /// Lists the built-in protographs or prints one
    Show(ShowArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelKind {
    Bec,
    Awgn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SnrKind {
    Ebn0,
    PerDimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    D2q,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ThresholdArgs {
    #[arg(long, value_enum, default_value = "bec")]
    pub channel: ChannelKind,
    /// Base-matrix file or builtin:NAME
    #[arg(long)]
    pub proto: String,
    /// Bisection resolution: erasure probability (bec) or dB (awgn)
    /// [default: 1e-4 for bec, 0.005 for awgn]
    #[arg(long)]
    pub resolution: Option<f64>,
    /// SNR axis for awgn
    #[arg(long, value_enum, default_value = "ebn0")]
    pub snr: SnrKind,
    /// Also report the Bhattacharyya-bound threshold (bec)
    #[arg(long)]
    pub bound: bool,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct StabilityArgs {
    /// Base-matrix file or builtin:NAME
    #[arg(long)]
    pub proto: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveKind {
    Bec,
    Awgn,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    #[arg(long, value_enum, default_value = "bec")]
    pub objective: ObjectiveKind,
    #[arg(long, default_value_t = 100)]
    pub generations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Population size [default: 10 * rows * cols]
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long, default_value_t = 0.88)]
    pub crossover: f64,
    #[arg(long, default_value_t = 0.5)]
    pub scale: f64,
    /// Largest allowed base-matrix entry
    #[arg(long, default_value_t = 9)]
    pub entry_cap: u32,
    /// Fitness bisection resolution [default: 1e-4 for bec, 0.005 for awgn]
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Skip the degree-2 attachment repair
    #[arg(long)]
    pub paper_strict: bool,
    /// Wall-clock budget in seconds, in addition to --generations
    #[arg(long)]
    pub wall_secs: Option<u64>,
    /// Best matrix output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-generation CSV trace
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["kind", "double_cover", "degree_split"])))]
pub struct BuildGraphArgs {
    #[arg(long, value_enum, requires = "q")]
    pub kind: Option<GraphKind>,
    /// Prime q >= 5 for d2q
    #[arg(long)]
    pub q: Option<u64>,
    /// Plain graph file to double-cover
    #[arg(long, value_name = "FILE")]
    pub double_cover: Option<PathBuf>,
    /// Target degree for splitting the vertices of --graph
    #[arg(long, value_name = "T", requires = "graph")]
    pub degree_split: Option<usize>,
    /// Input for --degree-split: bipartite file or d2q:Q
    #[arg(long)]
    pub graph: Option<String>,
    /// Replace any coloring by one from alternating-path augmentation
    #[arg(long)]
    pub recolor: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct LiftArgs {
    /// Base-matrix file or builtin:NAME
    #[arg(long)]
    pub proto: String,
    /// Bipartite graph file or d2q:Q
    #[arg(long)]
    pub graph: String,
    /// Replace any coloring by one from alternating-path augmentation
    #[arg(long)]
    pub recolor: bool,
    /// Parity-check matrix output (alist)
    #[arg(long)]
    pub out: PathBuf,
    /// Permutation output
    #[arg(long)]
    pub perms: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct GirthArgs {
    /// Bipartite file, plain graph file, alist file or d2q:Q
    #[arg(long)]
    pub graph: String,
    /// Stop once the girth is known to be at least G
    #[arg(long, value_name = "G")]
    pub lower_bound_only: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SimulateArgs {
    /// Parity-check matrix (alist)
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long, value_enum)]
    pub channel: ChannelKind,
    /// Erasure probability (bec) or Eb/N0 in dB (awgn)
    #[arg(long, allow_negative_numbers = true)]
    pub param: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_frames: u64,
    #[arg(long, default_value_t = 100)]
    pub min_frame_errors: u64,
    /// Decoder iterations [default: 200 for bec, 100 for awgn]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// CSV output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ShowArgs {
    /// `list` or a built-in name
    #[arg(long, default_value = "list")]
    pub builtin: String,
}

pub fn default_resolution(kind: ChannelKind) -> f64 {
    match kind {
        ChannelKind::Bec => 1e-4,
        ChannelKind::Awgn => 0.005,
    }
}

fn value_name<E: ValueEnum>(v: &E) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn push(out: &mut Vec<String>, flag: &str, value: impl ToString) {
    out.push(format!("--{flag}"));
    out.push(value.to_string());
}

fn push_opt(out: &mut Vec<String>, flag: &str, value: Option<impl ToString>) {
    if let Some(v) = value {
        push(out, flag, v);
    }
}

fn push_flag(out: &mut Vec<String>, flag: &str, on: bool) {
    if on {
        out.push(format!("--{flag}"));
    }
}

fn path(p: &std::path::Path) -> String {
    p.display().to_string()
}

impl Cli {
    /// Fills every defaulted option with its effective value.
    pub fn materialize(mut self) -> Self {
        self.threads = Some(self.threads.unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        }));
        match &mut self.command {
            Command::Threshold(a) => {
                a.resolution.get_or_insert(default_resolution(a.channel));
            }
            Command::Optimize(a) => {
                let kind = match a.objective {
                    ObjectiveKind::Bec => ChannelKind::Bec,
                    ObjectiveKind::Awgn => ChannelKind::Awgn,
                };
                a.resolution.get_or_insert(default_resolution(kind));
                a.population.get_or_insert(10 * a.rows * a.cols);
            }
            Command::Simulate(a) => {
                a.max_iter.get_or_insert(match a.channel {
                    ChannelKind::Bec => 200,
                    ChannelKind::Awgn => 100,
                });
            }
            _ => {}
        }
        self
    }

    /// Arguments that reproduce this invocation, program name excluded.
    pub fn to_args(&self) -> Vec<String> {
        let mut out = Vec::new();
        match &self.command {
            Command::Threshold(a) => {
                out.push("threshold".into());
                push(&mut out, "channel", value_name(&a.channel));
                push(&mut out, "proto", &a.proto);
                push_opt(&mut out, "resolution", a.resolution);
                push(&mut out, "snr", value_name(&a.snr));
                push_flag(&mut out, "bound", a.bound);
            }
            Command::Stability(a) => {
                out.push("stability".into());
                push(&mut out, "proto", &a.proto);
            }
            Command::Optimize(a) => {
                out.push("optimize".into());
                push(&mut out, "rows", a.rows);
                push(&mut out, "cols", a.cols);
                push(&mut out, "objective", value_name(&a.objective));
                push(&mut out, "generations", a.generations);
                push(&mut out, "seed", a.seed);
                push_opt(&mut out, "population", a.population);
                push(&mut out, "crossover", a.crossover);
                push(&mut out, "scale", a.scale);
                push(&mut out, "entry-cap", a.entry_cap);
                push_opt(&mut out, "resolution", a.resolution);
                push_flag(&mut out, "paper-strict", a.paper_strict);
                push_opt(&mut out, "wall-secs", a.wall_secs);
                push_opt(&mut out, "out", a.out.as_deref().map(path));
                push_opt(&mut out, "trace", a.trace.as_deref().map(path));
            }
            Command::BuildGraph(a) => {
                out.push("build-graph".into());
                push_opt(&mut out, "kind", a.kind.as_ref().map(value_name));
                push_opt(&mut out, "q", a.q);
                push_opt(&mut out, "double-cover", a.double_cover.as_deref().map(path));
                push_opt(&mut out, "degree-split", a.degree_split);
                push_opt(&mut out, "graph", a.graph.as_ref());
                push_flag(&mut out, "recolor", a.recolor);
                push(&mut out, "out", path(&a.out));
            }
            Command::Lift(a) => {
                out.push("lift".into());
                push(&mut out, "proto", &a.proto);
                push(&mut out, "graph", &a.graph);
                push_flag(&mut out, "recolor", a.recolor);
                push(&mut out, "out", path(&a.out));
                push_opt(&mut out, "perms", a.perms.as_deref().map(path));
            }
            Command::Girth(a) => {
                out.push("girth".into());
                push(&mut out, "graph", &a.graph);
                push_opt(&mut out, "lower-bound-only", a.lower_bound_only);
            }
            Command::Simulate(a) => {
                out.push("simulate".into());
                push(&mut out, "code", path(&a.code));
                push(&mut out, "channel", value_name(&a.channel));
                push(&mut out, "param", a.param);
                push(&mut out, "seed", a.seed);
                push(&mut out, "max-frames", a.max_frames);
                push(&mut out, "min-frame-errors", a.min_frame_errors);
                push_opt(&mut out, "max-iter", a.max_iter);
                push_opt(&mut out, "out", a.out.as_deref().map(path));
            }
            Command::Show(a) => {
                out.push("show".into());
                push(&mut out, "builtin", &a.builtin);
            }
        }
        push_opt(&mut out, "threads", self.threads);
        out
    }

    /// One-line effective configuration, `#`-prefixed so CSV readers skip it.
    pub fn banner(&self) -> String {
        let args: Vec<String> = self
            .to_args()
            .into_iter()
            .map(|a| {
                if a.is_empty() || a.contains(char::is_whitespace) {
                    format!("'{a}'")
                } else {
                    a
                }
            })
            .collect();
        format!("# protolab {}", args.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(argv: &[&str]) {
        let cli = Cli::try_parse_from(argv).unwrap().materialize();
        let mut again = vec!["protolab".to_string()];
        again.extend(cli.to_args());
        let back = Cli::try_parse_from(&again).unwrap();
        assert_eq!(back, cli, "{again:?}");
    }

    #[test]
    fn banners_round_trip() {
        round_trip(&["protolab", "threshold", "--proto", "builtin:r12-4x8"]);
        round_trip(&["protolab", "threshold", "--channel", "awgn", "--proto", "x.bm", "--snr", "per-dimension"]);
        round_trip(&["protolab", "stability", "--proto", "builtin:ex-2x4", "--threads", "3"]);
        round_trip(&["protolab", "optimize", "--rows", "2", "--cols", "4", "--paper-strict", "--out", "b.bm"]);
        round_trip(&["protolab", "build-graph", "--kind", "d2q", "--q", "7", "--out", "g.txt"]);
        round_trip(&["protolab", "build-graph", "--degree-split", "3", "--graph", "d2q:7", "--out", "g.txt"]);
        round_trip(&["protolab", "lift", "--proto", "p.bm", "--graph", "d2q:61", "--out", "c.alist", "--recolor"]);
        round_trip(&["protolab", "girth", "--graph", "g.txt", "--lower-bound-only", "8"]);
        round_trip(&["protolab", "simulate", "--code", "c.alist", "--channel", "awgn", "--param", "-0.5"]);
        round_trip(&["protolab", "show", "--builtin", "r23-4x12"]);
    }

    #[test]
    fn materialized_defaults() {
        let cli = Cli::try_parse_from(["protolab", "simulate", "--code", "c", "--channel", "bec", "--param", "0.3"])
            .unwrap()
            .materialize();
        let Command::Simulate(a) = &cli.command else {
            panic!()
        };
        assert_eq!(a.max_iter, Some(200));
        assert!(cli.threads.unwrap() >= 1);
        assert!(cli.banner().contains("--max-iter 200"));
    }

    #[test]
    fn build_graph_needs_a_source() {
        assert!(Cli::try_parse_from(["protolab", "build-graph", "--out", "g"]).is_err());
        assert!(Cli::try_parse_from(["protolab", "build-graph", "--kind", "d2q", "--out", "g"]).is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
