use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "returnset", version, about = "Return sets of discrete dynamical systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Return set, density curve, decomposition and witness of a system.
    Analyze(AnalyzeArgs),
    /// Exhaustive verification over all small finite spaces.
    Verify(VerifyArgs),
    /// Block sizes, density bounds and the recursive ratio bound.
    Bounds(BoundsArgs),
    /// Write a window file for a generated set.
    Generate(GenerateArgs),
    /// Extract a shift/subset witness from a window file.
    Witness(WitnessArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["input", "system"]))]
pub struct AnalyzeArgs {
    /// System description file (finite-space or algebraic JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Inline system description.
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub horizon: u64,
    /// Interval lengths for the density sweep [default: 1, 2, 4, …, H].
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<u64>>,
    /// Residual density below which decomposition stops, in (0, 1).
    #[arg(long, default_value = "1/16")]
    pub threshold: String,
    /// Interval length at which the residual density is judged [default: H/4].
    #[arg(long)]
    pub min_len: Option<u64>,
    /// Seed for sampled invariance checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest total degree of a symbolic iterate.
    #[arg(long, default_value_t = 4096)]
    pub degree_cap: u64,
    /// Largest number of terms per coordinate of a symbolic iterate.
    #[arg(long, default_value_t = 4096)]
    pub term_cap: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=5))]
    pub max_points: u64,
    /// Cap on (space, map, start) instances.
    #[arg(long, default_value_t = u64::MAX)]
    pub budget: u64,
    /// Largest N for the corollary inequality check.
    #[arg(long, default_value_t = 10_000)]
    pub corollary_max: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Conservative,
    Floating,
    Both,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Density, as "p/q" in (0, 1].
    #[arg(long, allow_hyphen_values = true, required_unless_present = "params")]
    pub delta: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub m: u64,
    #[arg(long = "D", default_value_t = 1)]
    pub d: u64,
    #[arg(long, default_value_t = 1)]
    pub e: u64,
    /// JSON file {"delta", "m", "D", "e"}; overrides the flags.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = returnset::bounds::DEFAULT_EXPONENT_CAP)]
    pub exponent_cap: u64,
    #[arg(long, default_value_t = returnset::bounds::DEFAULT_PRECISION)]
    pub precision: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub kind: GenerateKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WindowFormat {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum GenerateKind {
    /// Sums Σ cᵢ·p^(ℓᵢ·nᵢ) over 0 ≤ nᵢ ≤ nmax.
    Fset {
        #[arg(long)]
        p: u64,
        /// Comma-separated "c:ℓ" terms, c rational.
        #[arg(long)]
        terms: String,
        #[arg(long)]
        nmax: u32,
        #[arg(long)]
        horizon: u64,
        #[arg(long, value_enum, default_value_t = WindowFormat::Text)]
        format: WindowFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Union of progressions "b:a" or "b:a:t" plus exceptional points.
    Apset {
        #[arg(long, default_value = "")]
        progressions: String,
        #[arg(long, default_value = "")]
        exceptional: String,
        #[arg(long)]
        horizon: u64,
        #[arg(long, value_enum, default_value_t = WindowFormat::Text)]
        format: WindowFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WitnessModeArg {
    Lemma,
    Corollary,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    /// Window file, text or JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Declared density d [default: |S|/H].
    #[arg(long)]
    pub density: Option<String>,
    #[arg(long, value_enum, default_value_t = WitnessModeArg::Lemma)]
    pub mode: WitnessModeArg,
    #[command(flatten)]
    pub output: OutputArgs,
}
