use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "kahler-hardy", version, about = "Kähler geometry of ARMA/ARFIMA filters in weighted Hardy spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complex cepstrum (or power cepstrum / impulse response) of a model.
    Cepstrum(CepstrumArgs),
    /// Impulse response of a model.
    Impulse(SeriesArgs),
    /// Kähler potential.
    Potential(GeometryArgs),
    /// Potential and metric tensor.
    Metric(GeometryArgs),
    /// Potential, metric and connection.
    Connection(GeometryArgs),
    /// Potential, metric and Ricci tensor.
    Ricci(GeometryArgs),
    /// Weighted distance between two models.
    Distance(DistanceArgs),
    /// Pairwise distances between every model file in a directory.
    DistanceMatrix(DistanceMatrixArgs),
    /// Reproducing kernel k_u(v) of a weight.
    Kernel(KernelArgs),
    /// Randomized cross-route verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformArg {
    Identity,
    Log,
    LogSquaredModulus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum C0Arg {
    One,
    LogGain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesArg {
    Complex,
    Power,
    Impulse,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Payload format; `distance-matrix` defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    /// Write the payload here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct WeightArgs {
    /// Weight as inline JSON or a path to a JSON file; defaults to hardy.
    #[arg(long, conflicts_with = "order_m")]
    pub weight: Option<String>,
    /// Shorthand for the power weight ω_s = s^m.
    #[arg(long, allow_hyphen_values = true)]
    pub order_m: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Highest coefficient index N.
    #[arg(long, default_value_t = 16)]
    pub truncation: usize,
    #[command(flatten)]
    pub weight: WeightArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CepstrumArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Which coefficient series to emit.
    #[arg(long = "series", value_enum, default_value = "complex")]
    pub kind: SeriesArg,
    #[arg(long, value_enum, default_value = "one")]
    pub c0: C0Arg,
    /// Coarsest contour grid for the power cepstrum.
    #[arg(long)]
    pub grid_size: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub weight: WeightArgs,
    #[arg(long, value_enum, default_value = "log")]
    pub transform: TransformArg,
    /// Fixed truncation; the log transform otherwise sums adaptively.
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub fd_step: Option<f64>,
    #[arg(long, value_enum, default_value = "one")]
    pub c0: C0Arg,
    /// Put d in the chart (default: only when d ≠ 0).
    #[arg(long, conflicts_with = "exclude_d")]
    pub include_d: bool,
    #[arg(long)]
    pub exclude_d: bool,
    /// Also evaluate the Kähler-condition residuals.
    #[arg(long)]
    pub check: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DistanceOptions {
    #[command(flatten)]
    pub weight: WeightArgs,
    #[arg(long, value_enum, default_value = "log")]
    pub transform: TransformArg,
    #[arg(long, default_value_t = 4096)]
    pub truncation: usize,
    #[arg(long, value_enum, default_value = "one")]
    pub c0: C0Arg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DistanceArgs {
    /// Exactly two model files.
    #[arg(long, num_args = 1, required = true)]
    pub model: Vec<PathBuf>,
    #[command(flatten)]
    pub options: DistanceOptions,
}

#[derive(Debug, Clone, Args)]
pub struct DistanceMatrixArgs {
    /// Directory of `*.json` model files, taken in sorted order.
    #[arg(long)]
    pub dir: PathBuf,
    #[command(flatten)]
    pub options: DistanceOptions,
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    /// `re,im`
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    /// `re,im`
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    #[command(flatten)]
    pub weight: WeightArgs,
    #[arg(long, default_value_t = 1e-14)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random models.
    #[arg(long, default_value_t = 12)]
    pub models: usize,
    /// Negate the closed-form metric, to check that the suite can fail.
    #[arg(long, hide = true)]
    pub inject_sign_error: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}
