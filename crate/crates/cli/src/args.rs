use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "pretest-coverage",
    version,
    about = "Coverage of the two-stage confidence interval for ABAB/BABA crossover trials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coverage probability on an even grid of scaled carryover values.
    CoverageCurve(CurveArgs),
    /// Minimum coverage over γ for each (α₁, α) pair.
    MinCoverage(MinCoverageArgs),
    /// Simulate trials and compare empirical with analytic coverage.
    Simulate(SimulateArgs),
    /// Variance of Θ̂ against a completely randomised trial.
    Efficiency(EfficiencyArgs),
    /// Run the cross-check suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Pretest significance level α₁.
    #[arg(long, default_value_t = 0.1)]
    pub alpha1: f64,
    /// One minus the nominal coverage.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 801)]
    pub steps: usize,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MinCoverageArgs {
    #[arg(long = "alpha1", value_delimiter = ',', default_values_t = [0.01, 0.05, 0.1, 0.2])]
    pub alpha1_list: Vec<f64>,
    #[arg(long = "alpha", value_delimiter = ',', default_values_t = [0.01, 0.05, 0.1])]
    pub alpha_list: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 10)]
    pub n1: usize,
    #[arg(long, default_value_t = 10)]
    pub n2: usize,
    /// Treatment difference θ.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
    /// Differential carryover ψ.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub psi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_s2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_e2: f64,
    #[arg(long, default_value_t = 0.1)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub reps: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EfficiencyArgs {
    #[arg(long)]
    pub sigma_s2: f64,
    #[arg(long)]
    pub sigma_e2: f64,
    /// Subjects per group.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub reps: u64,
}
