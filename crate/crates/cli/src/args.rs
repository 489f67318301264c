use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "qcfa", version, about = "Two-way finite automata with quantum and classical states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate halting probabilities by sampling runs.
    Simulate(RunArgs),
    /// Halting probabilities in closed form, or truncated when the run has
    /// no round structure.
    Exact(RunArgs),
    /// Build, minimise and audit the classical DFA for a family.
    Dfa(DfaArgs),
    /// Run the lemma oracles.
    Verify(VerifyArgs),
    /// Two-way classical state lower bounds.
    Bounds(BoundsArgs),
    /// Quantum machine sizes next to classical lower bounds.
    Report(ReportArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the document to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct MachineArgs {
    /// Machine family: length, aeq, leq, twin, twin-m, exact-length.
    #[arg(long, visible_alias = "machine", conflicts_with = "machine_file")]
    pub family: Option<String>,
    /// Family parameter.
    #[arg(long)]
    pub m: Option<u64>,
    /// One-sided error bound, as p/q or a decimal.
    #[arg(long, default_value = "1/4")]
    pub eps: String,
    /// Machine definition (JSON) instead of a family.
    #[arg(long)]
    pub machine_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub machine: MachineArgs,
    /// Input word.
    #[arg(long, default_value = "")]
    pub input: String,
    /// Number of sampled runs.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also report the halting probabilities within this many rounds.
    #[arg(long)]
    pub max_rounds: Option<u64>,
    /// Step cap per sampled run, and the horizon of truncated evolution.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_steps: u64,
    /// Working precision in bits for certified intervals.
    #[arg(long)]
    pub precision: Option<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct DfaArgs {
    /// aeq or twin-m.
    #[arg(long, visible_alias = "machine")]
    pub family: String,
    #[arg(long)]
    pub m: u64,
    /// Run the DFA on this word.
    #[arg(long)]
    pub input: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma {
    All,
    KClosure,
    NoCollision,
    BasisAvoidance,
    XyGap,
    Rotation,
    Walk,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Lemma::All)]
    pub lemma: Lemma,
    /// Word-length cap for the enumerating oracles.
    #[arg(long, default_value_t = 8)]
    pub max_len: usize,
    /// Upper end of the rotation sweep and the random-walk range.
    #[arg(long, default_value_t = 100)]
    pub d_max: u64,
    /// Random vectors for the collision check.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// aeq or twin-m.
    #[arg(long, visible_alias = "machine")]
    pub family: String,
    #[arg(long, conflicts_with = "m_range")]
    pub m: Option<u64>,
    /// `lo..hi` (inclusive) or a comma-separated list.
    #[arg(long)]
    pub m_range: Option<String>,
    /// Exponent constant of the 2PFA simulation.
    #[arg(long, default_value_t = 1)]
    pub b: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// aeq or twin-m.
    #[arg(long, visible_alias = "machine")]
    pub family: String,
    #[arg(long, conflicts_with = "m_range")]
    pub m: Option<u64>,
    /// `lo..hi` (inclusive) or a comma-separated list.
    #[arg(long)]
    pub m_range: Option<String>,
    #[arg(long, default_value = "1/4")]
    pub eps: String,
    #[arg(long, default_value_t = 1)]
    pub b: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}
