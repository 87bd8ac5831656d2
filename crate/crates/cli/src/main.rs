mod args;
mod output;

use std::fmt::Write as _;
use std::io;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use thiserror::Error;

use pretest_coverage::coverage::coverage_curve;
use pretest_coverage::validation::{self, ValidationOptions};
use pretest_coverage::{
    coverage_probability, efficiency_comparison, empirical_coverage, min_coverage_table,
    scaled_carryover, CoverageQuery, ModelParams, SimConfig, TrialDesign,
};

use args::{Cli, Command, CurveArgs, EfficiencyArgs, MinCoverageArgs, SimulateArgs, ValidateArgs};
use output::{emit, Manifest};

/// |z| above which a simulation is reported as inconsistent.
const SIMULATE_Z_GATE: f64 = 3.5;

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Domain(#[from] pretest_coverage::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Domain(_) | CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::CoverageCurve(a) => coverage_curve_cmd(a),
        Command::MinCoverage(a) => min_coverage_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Efficiency(a) => efficiency_cmd(a),
        Command::Validate(a) => validate_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Serialize)]
struct CurveParams {
    alpha1: f64,
    alpha: f64,
    gamma_min: f64,
    gamma_max: f64,
    steps: usize,
}

fn coverage_curve_cmd(a: CurveArgs) -> CliResult {
    let points = coverage_curve(a.alpha1, a.alpha, a.gamma_min, a.gamma_max, a.steps)?;
    let mut csv = String::from("gamma,coverage\n");
    for p in &points {
        writeln!(csv, "{},{}", p.gamma, p.coverage).expect("write to String");
    }
    let params = CurveParams {
        alpha1: a.alpha1,
        alpha: a.alpha,
        gamma_min: a.gamma_min,
        gamma_max: a.gamma_max,
        steps: a.steps,
    };
    emit(
        &csv,
        a.out.as_deref(),
        &Manifest::new("coverage-curve", params, None),
    )?;
    Ok(())
}

/// Drops repeated values, keeping first occurrences in order.
fn dedup(name: &str, values: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if out.contains(&v) {
            eprintln!("warning: duplicate {name} value {v} ignored");
        } else {
            out.push(v);
        }
    }
    out
}

#[derive(Serialize)]
struct MinCoverageParams {
    alpha1: Vec<f64>,
    alpha: Vec<f64>,
}

fn min_coverage_cmd(a: MinCoverageArgs) -> CliResult {
    let alpha1 = dedup("alpha1", &a.alpha1_list);
    let alpha = dedup("alpha", &a.alpha_list);
    if alpha1.is_empty() || alpha.is_empty() {
        return Err(CliError::Usage("empty level list".into()));
    }
    let table = min_coverage_table(&alpha1, &alpha)?;
    let mut csv = String::from("alpha1,alpha,gamma_star,min_coverage,nominal,deficit\n");
    for r in &table {
        writeln!(
            csv,
            "{},{},{:.4},{:.4},{},{:.4}",
            r.alpha1,
            r.alpha,
            r.gamma_star,
            r.min_coverage.value(),
            r.nominal(),
            r.deficit()
        )
        .expect("write to String");
    }
    emit(
        &csv,
        a.out.as_deref(),
        &Manifest::new("min-coverage", MinCoverageParams { alpha1, alpha }, None),
    )?;
    Ok(())
}

fn simulate_cmd(a: SimulateArgs) -> CliResult {
    let design = TrialDesign::new(a.n1, a.n2)?;
    let params = ModelParams::from_contrasts(a.theta, a.psi, a.sigma_s2, a.sigma_e2);
    let config = SimConfig::new(design, params, a.alpha1, a.alpha, a.reps, a.seed)?;
    let gamma = scaled_carryover(a.psi, &design, config.two_stage().sigma_e())?;
    let analytic = coverage_probability(&CoverageQuery::new(gamma, a.alpha1, a.alpha)?)?
        .value
        .value();
    let emp = empirical_coverage(&config);
    let z = emp.z_score(analytic);

    println!("gamma            {gamma}");
    println!("analytic         {analytic:.6}");
    println!("empirical        {:.6} ± {:.6}", emp.estimate, emp.std_err);
    println!("hits             {} / {}", emp.hits, emp.total);
    println!("accept rate      {:.6}", emp.accept_rate);
    println!("z                {z:.3}");
    if z.abs() > SIMULATE_Z_GATE {
        return Err(CliError::Failed(format!(
            "empirical coverage differs from analytic value (|z| = {:.3} > {SIMULATE_Z_GATE})",
            z.abs()
        )));
    }
    Ok(())
}

fn efficiency_cmd(a: EfficiencyArgs) -> CliResult {
    let e = efficiency_comparison(a.sigma_s2, a.sigma_e2, a.n)?;
    println!("var(theta_hat)   {}", e.var_theta_hat);
    println!("var(theta_tilde) {}", e.var_tilde);
    println!("ratio            {:.6}", e.ratio());
    let verdict = if e.var_theta_hat == e.var_tilde {
        "equal: sigma_s2 = 4.5 sigma_e2, crossover preferred"
    } else if e.crossover_preferred {
        "crossover preferred: sigma_s2 > 4.5 sigma_e2"
    } else {
        "parallel design preferred: sigma_s2 < 4.5 sigma_e2"
    };
    println!("{verdict}");
    Ok(())
}

fn validate_cmd(a: ValidateArgs) -> CliResult {
    let report = validation::run(&ValidationOptions::new(a.seed, a.reps))?;
    for c in &report.checks {
        println!("{c}");
    }
    let failed = report.failures().count();
    println!("{} checks, {} failed", report.checks.len(), failed);
    if failed > 0 {
        return Err(CliError::Failed(format!(
            "{failed} validation checks failed"
        )));
    }
    Ok(())
}
