//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mermin_core::{Convention, HalfInt};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "mermin", version, about = "Mermin's high-spin inequality for lossy Schwinger-encoded photon pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Violation along the angle family alpha = -(pi/2+theta), beta = pi/2+theta, gamma = 0.
    SweepTheta(SweepThetaArgs),
    /// Violation against detector efficiency at the lossless optimal angles.
    SweepEta(GridArgs),
    /// Full (s, r, eta) violation table at the lossless optimal angles.
    Surface(GridArgs),
    /// Optimal analyzer angles for each (s, eta).
    Optimize(OptimizeArgs),
    /// Run the reduction, oracle and exponent checks.
    Validate(ValidateArgs),
    /// Photon-number distribution of one squeezed pair.
    FockWeights(FockWeightsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PolicyArgs {
    /// Relative tolerance of the source-sector sum.
    #[arg(long, default_value_t = 1e-6)]
    pub policy_tol: f64,
    /// Highest source spin summed, as an offset above the measured spin.
    #[arg(long, default_value = "15")]
    pub policy_max_s: HalfInt,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ConventionChoice {
    #[default]
    Conditioned,
    Unconditioned,
    Both,
}

impl ConventionChoice {
    pub fn list(self) -> Vec<Convention> {
        match self {
            ConventionChoice::Conditioned => vec![Convention::Conditioned],
            ConventionChoice::Unconditioned => vec![Convention::Unconditioned],
            ConventionChoice::Both => vec![Convention::Conditioned, Convention::Unconditioned],
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepThetaArgs {
    #[arg(long, default_value = "1")]
    pub s: HalfInt,
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    /// Comma-separated efficiencies, one curve each.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub eta: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub theta_max: f64,
    /// Number of evenly spaced angles, endpoints included.
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = ConventionChoice::Conditioned)]
    pub conventions: ConventionChoice,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Comma-separated measured spins.
    #[arg(long, value_delimiter = ',', default_value = "1/2,1,3/2,2,5/2,3,7/2,4,9/2")]
    pub s: Vec<HalfInt>,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.4")]
    pub r: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,0.95,0.9,0.85,0.8,0.75,0.7,0.65,0.6,0.55,0.5,0.45,0.4")]
    pub eta: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ConventionChoice::Conditioned)]
    pub conventions: ConventionChoice,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub s: Vec<HalfInt>,
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub eta: Vec<f64>,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Read Bob's counts with the opposite sign (mutation check; must fail).
    #[arg(long)]
    pub mutate_bob_sign: bool,
    /// Also emit theta curves under these conventions.
    #[arg(long, value_enum)]
    pub conventions: Option<ConventionChoice>,
    /// Where the convention curves go; stdout when absent.
    #[arg(long)]
    pub curves_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FockWeightsArgs {
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    /// Stop once the remaining probability drops to this.
    #[arg(long, default_value_t = 1e-12)]
    pub tail: f64,
    #[arg(long, default_value_t = 200)]
    pub n_max: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}
