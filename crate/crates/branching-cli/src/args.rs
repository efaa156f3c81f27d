use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "branching", version, about = "Path counts, branching graphs, central chains and walk experiments")]
pub struct Cli {
    /// Output file (or file prefix for `simulate`); relative paths resolve against $BRANCHING_OUT_DIR
    #[arg(long, global = true)]
    pub out: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Ballot/Motzkin counts, Motzkin and Fuss-Catalan numbers, bracket dimensions
    Count(CountArgs),
    /// Export a branching graph, or check the B# isomorphism
    Graph(GraphArgs),
    /// Transition tables of the central chains
    Chain(ChainArgs),
    /// Monte Carlo experiments and the SU(2) quadrature
    Simulate(SimulateArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    /// Ballot paths `a,b..c,d`
    #[arg(long)]
    pub ballot: Option<String>,
    /// Motzkin paths `a,b..c,d`
    #[arg(long)]
    pub motzkin: Option<String>,
    /// List the paths as step words as well (at most 16 steps)
    #[arg(long)]
    pub enumerate: bool,
    /// Motzkin numbers for a range `i..j` (inclusive)
    #[arg(long)]
    pub motzkin_numbers: Option<String>,
    /// Fuss-Catalan numbers for a range `i..j`, order `--s`
    #[arg(long)]
    pub fuss_catalan: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub s: u32,
    /// Bracket dimensions, e.g. `--bracket s=2 n=0..6 w=ε [derooted]`
    #[arg(long, num_args = 1..)]
    pub bracket: Option<Vec<String>>,
}

#[derive(Debug, Args, Serialize)]
pub struct GraphArgs {
    #[arg(long)]
    pub semi_pascal: bool,
    #[arg(long)]
    pub motzkin: bool,
    #[arg(long)]
    pub half_line: bool,
    /// Fuss-Catalan tree, `s=K` (default s=2)
    #[arg(long, num_args = 0..=1, default_missing_value = "s=2")]
    pub fc_tree: Option<String>,
    #[arg(long)]
    pub bsharp: bool,
    /// Remove the root of the Fuss-Catalan tree
    #[arg(long)]
    pub derooted: bool,
    /// Pascalize the selected graph
    #[arg(long)]
    pub pascalize: bool,
    /// Keep even levels only
    #[arg(long)]
    pub even: bool,
    /// Number of levels shown (levels 0..N-1)
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    #[arg(long, conflicts_with = "json")]
    pub dot: bool,
    #[arg(long)]
    pub json: bool,
    /// Check B# against pascalize(derooted FT) through the relabeling, up to this level
    #[arg(long, alias = "verify-bsharp-iso")]
    pub verify_iso: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ChainKind {
    Ballot,
    Motzkin,
    Fib,
    Aux,
    /// Constant up-probability on the semi-Pascal graph (non-central control)
    Control,
}

#[derive(Debug, Args, Serialize)]
pub struct ChainArgs {
    #[arg(value_enum)]
    pub kind: ChainKind,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub l1: Option<String>,
    #[arg(long)]
    pub l2: Option<String>,
    /// End as `prefix:period` labels (default: all labels s)
    #[arg(long)]
    pub end: Option<String>,
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub s: u32,
    #[arg(long)]
    pub derooted: bool,
    /// Up-probability of the control chain
    #[arg(long)]
    pub p: Option<String>,
    /// Number of transition levels
    #[arg(long, alias = "depth", default_value_t = 8)]
    pub levels: usize,
    /// `N TOL`: exhaustive centrality check to level N
    #[arg(long, num_args = 2, value_names = ["N", "TOL"])]
    pub verify_centrality: Option<Vec<String>>,
    /// Print marginals instead of transitions
    #[arg(long)]
    pub marginals: bool,
    /// Print trace weights at this level instead of transitions
    #[arg(long)]
    pub trace_weights: Option<usize>,
    /// Print crossing products p(v,w) p(w,v) of a tree walk instead of transitions
    #[arg(long)]
    pub crossing: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Returns,
    ExitTimes,
    Lln,
    Convergence,
    Recurrence,
    Su2,
    Trajectories,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Increments,
    Direct,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum WalkKind {
    Fib,
    Aux,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(long, default_value = "0.1")]
    pub eta: String,
    #[arg(long, default_value = "2")]
    pub end: String,
    #[arg(long, default_value_t = 2)]
    pub s: u32,
    /// Half-length of the return loop, or the SU(2) moment
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Method::Increments)]
    pub method: Method,
    #[arg(long, default_value_t = 100_000)]
    pub horizon: usize,
    #[arg(long, default_value_t = branching::montecarlo::DEFAULT_MARGIN)]
    pub margin: usize,
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    #[arg(long, default_value_t = 20)]
    pub threshold: usize,
    #[arg(long, value_enum, default_value_t = WalkKind::Fib)]
    pub walk: WalkKind,
    /// Comma-separated increasing horizons
    #[arg(long, default_value = "1000,10000")]
    pub horizons: String,
    #[arg(long, default_value = "0.5")]
    pub l1: String,
    #[arg(long, default_value = "0.5")]
    pub l2: String,
    #[arg(long, default_value_t = 32)]
    pub order: usize,
    #[arg(long)]
    pub derooted: bool,
}
