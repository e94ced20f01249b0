//! `mchairs`: build, simulate, verify and analyze oblivious word systems.
//!
//! Every command prints one JSON document on stdout and a short summary on
//! stderr. Exit codes: 0 success, 1 negative finding, 2 usage or input
//! error, 3 resource cap exceeded.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mchairs_core::sim::SchedulerKind;

pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "mchairs",
    version,
    about = "Oblivious musical-chairs and renaming word systems"
)]
pub struct Cli {
    /// Worker threads for batch workloads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write a run manifest (version, arguments, input and output digests) here.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    /// Keep wall-clock timings in the JSON output (breaks byte-identical reruns).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a word system.
    #[command(subcommand)]
    Construct(Construct),
    /// Append one word to a system whose every `players`-subset is oblivious.
    Extend(ExtendArgs),
    /// Decide obliviousness by exhaustive cycle detection.
    Verify(VerifyArgs),
    /// Check every k-subset of a renaming system from its first letters.
    VerifyRenaming(VerifyRenamingArgs),
    /// Run one adversarial schedule.
    Simulate(SimulateArgs),
    /// Re-execute a recorded schedule trace.
    Replay(ReplayArgs),
    /// Compare cycle existence under the immediate, pairwise and canonical relations.
    ProbeEquivalence(ProbeArgs),
    /// Look for an oblivious system among all small full words.
    SearchImpossible(SearchArgs),
    /// Quantitative tools.
    #[command(subcommand)]
    Analyze(Analyze),
}

#[derive(Subcommand, Debug)]
pub enum Construct {
    /// The recursive families on 2n-1 and 2n chairs.
    Recursive(RecursiveArgs),
    /// Renaming words for N participants.
    Renaming(RenamingArgs),
    /// Words with i.i.d. uniform letters.
    RandomWords(RandomWordsArgs),
    /// Uniform random permutations.
    RandomPerms(RandomPermsArgs),
    /// Permutations from polynomial graphs over a prime field.
    Algebraic(AlgebraicArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    S,
    W,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    Immediate,
    Pairwise,
    Canonical,
}

impl From<RelationArg> for SchedulerKind {
    fn from(r: RelationArg) -> Self {
        match r {
            RelationArg::Immediate => SchedulerKind::Immediate,
            RelationArg::Pairwise => SchedulerKind::Pairwise,
            RelationArg::Canonical => SchedulerKind::Canonical,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Random,
    GreedyCanonical,
}

#[derive(Args, Debug)]
pub struct OutFile {
    /// Also write the word file here.
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RecursiveArgs {
    #[arg(long)]
    pub n: usize,
    /// Which family to emit; `both` puts the s-words before the w-words on 2n chairs.
    #[arg(long, value_enum, default_value = "both")]
    pub side: SideArg,
    #[command(flatten)]
    pub out: OutFile,
}

#[derive(Args, Debug)]
pub struct RenamingArgs {
    /// Number of participants N.
    #[arg(long)]
    pub n: usize,
    /// Comma-separated segment exponents; computed when absent.
    #[arg(long, value_delimiter = ',')]
    pub exponents: Option<Vec<String>>,
    #[arg(long, default_value_t = mchairs_core::verify::DEFAULT_STATE_CAP)]
    pub cap: u64,
    #[command(flatten)]
    pub out: OutFile,
}

#[derive(Args, Debug)]
pub struct RandomWordsArgs {
    /// Intended number of active players.
    #[arg(long)]
    pub n: usize,
    /// Number of words.
    #[arg(long = "N")]
    pub big_n: usize,
    #[arg(long)]
    pub m: u32,
    /// Word length; `ceil(c n ln N)` when absent.
    #[arg(long)]
    pub len: Option<usize>,
    #[arg(long, default_value_t = 6.0)]
    pub c: f64,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutFile,
}

#[derive(Args, Debug)]
pub struct RandomPermsArgs {
    #[arg(long = "N")]
    pub big_n: usize,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutFile,
}

#[derive(Args, Debug)]
pub struct AlgebraicArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub d: u32,
    #[command(flatten)]
    pub out: OutFile,
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    /// Word file, or `-` for stdin.
    pub file: String,
    /// Padding length; the exact longest schedule plus one when absent.
    #[arg(long, conflicts_with = "auto")]
    pub t: Option<String>,
    #[arg(long)]
    pub auto: bool,
    /// Size of the subsets that must stay oblivious; default `(m+1)/2`, at most N.
    #[arg(long)]
    pub players: Option<usize>,
    #[arg(long, default_value_t = mchairs_core::verify::DEFAULT_STATE_CAP)]
    pub cap: u64,
    #[command(flatten)]
    pub out: OutFile,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub file: String,
    /// Comma-separated 0-based word indices; all words when absent.
    #[arg(long, value_delimiter = ',', conflicts_with = "each")]
    pub players: Option<Vec<usize>>,
    /// Verify every subset of this size instead of a single one.
    #[arg(long)]
    pub each: Option<usize>,
    #[arg(long, default_value_t = mchairs_core::verify::DEFAULT_STATE_CAP)]
    pub cap: u64,
    #[arg(long, value_enum, default_value = "pairwise")]
    pub relation: RelationArg,
}

#[derive(Args, Debug)]
pub struct VerifyRenamingArgs {
    pub file: String,
    /// Number of participants; every k-subset of the words is checked.
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = mchairs_core::verify::DEFAULT_STATE_CAP)]
    pub cap: u64,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub file: String,
    #[arg(long, value_enum, default_value = "random")]
    pub strategy: StrategyArg,
    #[arg(long)]
    pub seed: u64,
    /// Step cap.
    #[arg(long, default_value_t = 100_000)]
    pub cap: u64,
    #[arg(long, value_delimiter = ',')]
    pub players: Option<Vec<usize>>,
    /// Comma-separated start positions; drawn from the seed when absent
    /// (first letters for renaming systems).
    #[arg(long, value_delimiter = ',')]
    pub init: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "pairwise")]
    pub relation: RelationArg,
    /// Write the trace JSON here as well.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub file: String,
    /// Trace JSON written by `simulate`.
    #[arg(long)]
    pub trace: PathBuf,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    pub file: String,
    #[arg(long, value_delimiter = ',')]
    pub players: Option<Vec<usize>>,
    #[arg(long, default_value_t = mchairs_core::verify::DEFAULT_PROBE_CAP)]
    pub cap: u64,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub max_len: usize,
    /// Maximum number of tuples examined.
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: u64,
}

#[derive(Subcommand, Debug)]
pub enum Analyze {
    /// Pairwise cyclic LCS of a permutation family and the resulting player bound.
    Lcs(LcsArgs),
    /// Exact drift bound of the random-words potential.
    Drift(DriftArgs),
    /// Expected and sampled pairwise collisions of a uniform configuration.
    Collisions(CollisionArgs),
    /// Batch experiment described by a JSON config.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
pub struct LcsArgs {
    pub file: String,
}

#[derive(Args, Debug)]
pub struct DriftArgs {
    /// Rational such as `1/7`.
    #[arg(long)]
    pub q: String,
    #[arg(long, conflicts_with = "optimize")]
    pub x: Option<String>,
    #[arg(long)]
    pub optimize: bool,
}

#[derive(Args, Debug)]
pub struct CollisionArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub m: u64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    pub config: PathBuf,
    /// Write one CSV row per run here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(commands::run(cli))
}
