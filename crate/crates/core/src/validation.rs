//! Self-consistency suite: the two joint-tail routes against each other, the
//! analytic coverage against simulation, and simulated estimator moments
//! against their closed forms.

use std::fmt;

use crate::coverage::{
    coverage_probability, gh_joint_prob_bivariate, gh_joint_prob_quadrature, CoverageQuery,
    GH_CORRELATION, ROUTE_TOLERANCE,
};
use crate::error::Result;
use crate::simulation::{empirical_coverage_with, estimator_moments_with, SimConfig, Statistic};
use crate::trial::{carryover_for_gamma, estimators, EstimatorFn, ModelParams, TrialDesign};

/// |z| gate for simulated-versus-analytic comparisons.
pub const Z_GATE: f64 = 3.5;
/// Standard errors allowed between a sample mean and its expectation.
pub const MEAN_SE_GATE: f64 = 4.0;
/// Relative tolerance on second moments at the reference sample size.
pub const VARIANCE_REL_TOL: f64 = 0.05;

pub const ROUTE_GAMMAS: [f64; 8] = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0];
pub const ROUTE_ALPHA1S: [f64; 3] = [0.05, 0.1, 0.2];
pub const ROUTE_ALPHAS: [f64; 3] = [0.01, 0.05, 0.1];
pub const COVERAGE_GAMMAS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    pub seed: u64,
    pub reps: u64,
    pub alpha1: f64,
    pub alpha: f64,
    pub estimator: EstimatorFn,
}

impl ValidationOptions {
    pub fn new(seed: u64, reps: u64) -> Self {
        Self {
            seed,
            reps,
            alpha1: 0.1,
            alpha: 0.05,
            estimator: estimators,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    /// Largest permitted |observed − expected|.
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, observed: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            expected,
            tolerance,
            passed: (observed - expected).abs() <= tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: observed {:.10} expected {:.10} tolerance {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.observed,
            self.expected,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Design used for the simulation checks: unbalanced groups, non-trivial
/// subject variance.
pub fn reference_design() -> TrialDesign {
    TrialDesign::new(2, 3).expect("valid design")
}

pub const REFERENCE_THETA: f64 = 1.0;
pub const REFERENCE_SIGMA_S2: f64 = 4.0;
pub const REFERENCE_SIGMA_E2: f64 = 1.0;

/// Simulation config whose scaled carryover is `gamma`.
pub fn reference_config(gamma: f64, opts: &ValidationOptions) -> Result<SimConfig> {
    let design = reference_design();
    let psi = carryover_for_gamma(gamma, &design, REFERENCE_SIGMA_E2.sqrt())?;
    let params =
        ModelParams::from_contrasts(REFERENCE_THETA, psi, REFERENCE_SIGMA_S2, REFERENCE_SIGMA_E2);
    SimConfig::new(
        design,
        params,
        opts.alpha1,
        opts.alpha,
        opts.reps,
        opts.seed,
    )
}

pub fn route_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &g in &ROUTE_GAMMAS {
        for &a1 in &ROUTE_ALPHA1S {
            for &a in &ROUTE_ALPHAS {
                let quad = gh_joint_prob_quadrature(g, a1, a)?.value;
                let bvn = gh_joint_prob_bivariate(g, a1, a)?;
                out.push(Check::new(
                    format!("joint tail routes γ={g} α₁={a1} α={a}"),
                    quad,
                    bvn,
                    ROUTE_TOLERANCE,
                ));
            }
        }
    }
    Ok(out)
}

pub fn coverage_checks(opts: &ValidationOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, &g) in COVERAGE_GAMMAS.iter().enumerate() {
        let cfg = reference_config(g, opts)?.with_seed(opts.seed.wrapping_add(i as u64));
        let analytic = coverage_probability(&CoverageQuery::new(g, opts.alpha1, opts.alpha)?)?
            .value
            .value();
        let emp = empirical_coverage_with(&cfg, opts.estimator);
        let se = emp.null_std_err(analytic);
        out.push(Check::new(
            format!("coverage γ={g}"),
            emp.estimate,
            analytic,
            Z_GATE * se,
        ));
        if g == 0.0 {
            let p = 1.0 - opts.alpha1;
            out.push(Check::new(
                "pretest accept rate at γ=0",
                emp.accept_rate,
                p,
                MEAN_SE_GATE * (p * (1.0 - p) / emp.total as f64).sqrt(),
            ));
        }
    }
    Ok(out)
}

/// Relative tolerance for a second moment estimated from `n` draws: the
/// reference 5%, widened to four standard errors when `n` is small.
/// `rel_se_unit` is the standard error of the estimate relative to its
/// value, times √n.
pub fn second_moment_tolerance(n: u64, rel_se_unit: f64) -> f64 {
    let n = n.max(2) as f64;
    VARIANCE_REL_TOL.max(MEAN_SE_GATE * rel_se_unit / (n - 1.0).sqrt())
}

pub fn moment_checks(opts: &ValidationOptions) -> Result<Vec<Check>> {
    let gamma = 1.0;
    let cfg = reference_config(gamma, opts)?.with_seed(opts.seed.wrapping_add(1000));
    let mom = estimator_moments_with(&cfg, opts.estimator);
    let m = cfg.design().m();
    let se2 = cfg.params().sigma_e2;
    let (theta, psi) = (cfg.params().theta(), cfg.params().psi());
    let n = mom.count;
    let var_tol = second_moment_tolerance(n, 2f64.sqrt());
    let rho = GH_CORRELATION;
    let cov_tol = second_moment_tolerance(n, (1.0 + 1.0 / (rho * rho)).sqrt());

    let mut out = Vec::new();
    for (s, name, mean, var) in [
        (Statistic::A, "A", theta - psi, m * se2 / 4.0),
        (Statistic::ThetaHat, "Θ̂", theta, 11.0 * m * se2 / 8.0),
        (Statistic::PsiHat, "Ψ̂", psi, 9.0 * m * se2 / 8.0),
    ] {
        out.push(Check::new(
            format!("mean of {name}"),
            mom.mean_of(s),
            mean,
            MEAN_SE_GATE * (var / n as f64).sqrt(),
        ));
        out.push(Check::new(
            format!("variance of {name}"),
            mom.variance(s),
            var,
            var_tol * var,
        ));
    }
    out.push(Check::new(
        "cov(A, Ψ̂)",
        mom.covariance(Statistic::A, Statistic::PsiHat),
        0.0,
        MEAN_SE_GATE * mom.null_cov_std_err(Statistic::A, Statistic::PsiHat),
    ));
    let cov_tp = 9.0 * m * se2 / 8.0;
    out.push(Check::new(
        "cov(Θ̂, Ψ̂)",
        mom.covariance(Statistic::ThetaHat, Statistic::PsiHat),
        cov_tp,
        cov_tol * cov_tp,
    ));
    Ok(out)
}

/// Runs every check. Numerical errors abort the run; failed checks do not.
pub fn run(opts: &ValidationOptions) -> Result<ValidationReport> {
    let mut checks = route_checks()?;
    checks.extend(coverage_checks(opts)?);
    checks.extend(moment_checks(opts)?);
    Ok(ValidationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_config_hits_requested_gamma() {
        let opts = ValidationOptions::new(1, 10);
        let cfg = reference_config(2.0, &opts).unwrap();
        let g = crate::trial::scaled_carryover(
            cfg.params().psi(),
            cfg.design(),
            cfg.two_stage().sigma_e(),
        )
        .unwrap();
        assert!((g - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tolerance_widens_for_small_samples() {
        assert_eq!(
            second_moment_tolerance(1_000_000, 2f64.sqrt()),
            VARIANCE_REL_TOL
        );
        assert!(second_moment_tolerance(1_000, 2f64.sqrt()) > 0.15);
    }

    #[test]
    fn check_formatting() {
        let c = Check::new("x", 1.0, 1.5, 0.1);
        assert!(!c.passed);
        assert!(c.to_string().starts_with("[FAIL] x"));
    }
}
