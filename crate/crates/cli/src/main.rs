//! `annuli` command-line tool.
//!
//! Exit codes: 0 success, 1 a checked property was violated, 2 usage or
//! parameter error, 3 IO failure.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::Format;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    /// The command ran and found a property violation.
    Violation(String),
}

impl From<annuli::Error> for CliError {
    fn from(e: annuli::Error) -> Self {
        match e {
            annuli::Error::Io(m) => CliError::Io(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "annuli", version, about = "Hausdorff dimension of limsup sets of annuli")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension of the annulus limsup set (isotropic or weighted).
    Dim(DimArgs),
    /// Threshold 2/(n-1) and the regime of a given tau_psi.
    Threshold(ThresholdArgs),
    /// Check geometric constructions: decomposition, sandwich, inscribed cube.
    Verify(VerifyArgs),
    /// Wang-Wu lower bound for explicit (delta, a, t).
    Mtp(MtpArgs),
    /// Exponent selection (b, a, t) for one coordinate.
    Select(SelectArgs),
    /// Predicted vs measured cover counts and the critical exponent.
    Cover(CoverArgs),
    /// Seeded formula-vs-transference consistency sweep.
    Sweep(SweepArgs),
    /// Stream a shape family as newline-delimited JSON.
    Stream(StreamArgs),
    /// List the (p, q) whose rectangular annulus contains x.
    Scan(ScanArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ProfileArgs {
    /// Ambient dimension; defaults to the length of the exponent lists.
    #[arg(long)]
    pub n: Option<usize>,
    /// Outer radius exponent(s), comma separated; one value is broadcast.
    #[arg(long, allow_hyphen_values = true)]
    pub tau_psi: String,
    /// Thickness exponent(s), comma separated; one value is broadcast.
    #[arg(long, allow_hyphen_values = true)]
    pub tau_phi: String,
}

#[derive(Args, Debug, Serialize)]
pub struct DimArgs {
    /// Ambient dimension.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau_psi: String,
    /// Thickness exponent(s); `inf` or `0` select the limits.
    #[arg(long, allow_hyphen_values = true)]
    pub tau_phi: String,
    /// Use the weighted (per-coordinate) formula.
    #[arg(long)]
    pub weighted: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub tau_psi: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyKind {
    Decomposition,
    Sandwich,
    Cube,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub kind: VerifyKind,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    /// Centre numerators, comma separated; defaults to the origin.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long, default_value = "1")]
    pub tau_psi: String,
    #[arg(long, default_value = "1")]
    pub tau_phi: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Required for the sampled checks.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Inner norm exponent for the cube check.
    #[arg(long, default_value = "2")]
    pub rho: String,
    /// Check the printed constants instead of the corrected ones.
    #[arg(long)]
    pub printed: bool,
    /// Succeed only if the check fails.
    #[arg(long)]
    pub expect_fail: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct MtpArgs {
    /// Regularity exponents; defaults to 1 in every coordinate.
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub t: String,
    #[arg(long, default_value = "0")]
    pub kappa: String,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SelectArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Coordinate, 1-based.
    #[arg(long)]
    pub j: usize,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CoverArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Denominators, comma separated.
    #[arg(long, default_value = "16,32,64,128,256,512,1024")]
    pub q: String,
    /// Accepted measured/predicted ratio band is [1/band, band].
    #[arg(long, default_value = "8")]
    pub band: String,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    /// Largest accepted |dim_formula - dim_mtp|.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Annulus,
    RectAnnulus,
    QuasiAnnulus,
    ShiftedRect,
    Ball,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Args, Debug, Serialize)]
pub struct StreamArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long)]
    pub rho: Option<String>,
    /// Coordinate for shifted rectangles, 1-based.
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long, value_enum, default_value = "plus")]
    pub sign: SignArg,
    #[arg(long)]
    pub q_lo: u64,
    #[arg(long)]
    pub q_hi: u64,
    /// Keep only primitive (p, q). Experimental.
    #[arg(long)]
    pub coprime: bool,
    /// Print the count instead of the shapes.
    #[arg(long)]
    pub count_only: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    /// Point in [0,1]^n, comma separated.
    #[arg(long)]
    pub x: String,
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long)]
    pub q_max: u64,
    #[arg(long)]
    pub coprime: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Dim(a) => commands::dim(a),
        Command::Threshold(a) => commands::threshold(a),
        Command::Verify(a) => commands::verify(a),
        Command::Mtp(a) => commands::mtp(a),
        Command::Select(a) => commands::select(a),
        Command::Cover(a) => commands::cover(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Stream(a) => commands::stream(a),
        Command::Scan(a) => commands::scan(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Violation(m)) => {
            eprintln!("violation: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Io(m)) => {
            eprintln!("io error: {m}");
            ExitCode::from(3)
        }
    }
}
