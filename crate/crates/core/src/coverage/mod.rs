//! Exact coverage probability of the two-stage interval as a function of the
//! scaled differential carryover γ.
//!
//! With `H ~ N(γ, 1)` the standardised pretest statistic, `G` the
//! standardised Θ̂ error (corr(G, H) = 3/√11) and `X ~ N(−3γ/√2, 1)` the
//! standardised error of A, the coverage is
//!
//! ```text
//! P(θ ∈ J) = P(|H| < c_α₁) P(|X| ≤ c_α) + P(|G| ≤ c_α, |H| ≥ c_α₁).
//! ```
//!
//! The joint term is evaluated twice: as a rectangle probability of the
//! bivariate normal, and as a one-dimensional integral over `G` of the
//! conditional law `H | G = g ~ N(γ + 3g/√11, 2/11)`. The integral is the
//! value returned; the rectangle is a cross-check.

pub mod bivariate;
pub mod quadrature;
pub mod search;

use rayon::prelude::*;

use crate::error::{ensure_finite, ensure_level, ensure_positive, Error, Result};
use crate::normal::{cdf, interval_prob, pdf, std_normal_quantile, Probability};

/// corr(G, H) = 3/√11
pub const GH_CORRELATION: f64 = 0.904_534_033_733_290_9;
/// Var(H | G) = 1 − 9/11
pub const CONDITIONAL_VARIANCE: f64 = 2.0 / 11.0;
/// Absolute tolerance of the conditional quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;
/// Largest permitted gap between the two joint-tail evaluations.
pub const ROUTE_TOLERANCE: f64 = 1e-8;
/// Upper end of the γ range searched for the minimum coverage.
pub const GAMMA_MAX: f64 = 20.0;
pub const MIN_SEARCH_GRID_STEP: f64 = 0.01;
pub const MIN_SEARCH_GAMMA_TOL: f64 = 1e-6;

// Rounding slack charged per Φ evaluation in reported error bounds.
const ULP_SLACK_PER_CDF: f64 = 4.0 * f64::EPSILON;

/// Mean of `X` per unit γ: −3/√2.
const X_SHIFT_PER_GAMMA: f64 = -2.121_320_343_559_642_4;

/// The joint law of (G, H) for a given γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhJointSpec {
    pub mean_g: f64,
    pub mean_h: f64,
    pub var_g: f64,
    pub var_h: f64,
    pub corr: f64,
}

impl GhJointSpec {
    pub fn new(gamma: f64) -> Self {
        Self {
            mean_g: 0.0,
            mean_h: gamma,
            var_g: 1.0,
            var_h: 1.0,
            corr: GH_CORRELATION,
        }
    }

    /// Mean of H given G = g.
    pub fn conditional_mean(&self, g: f64) -> f64 {
        self.mean_h + self.corr * (g - self.mean_g)
    }

    pub fn conditional_variance(&self) -> f64 {
        self.var_h * (1.0 - self.corr * self.corr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageQuery {
    gamma: f64,
    alpha1: f64,
    alpha: f64,
}

impl CoverageQuery {
    pub fn new(gamma: f64, alpha1: f64, alpha: f64) -> Result<Self> {
        Ok(Self {
            gamma: ensure_finite("gamma", gamma)?,
            alpha1: ensure_level("alpha1", alpha1)?,
            alpha: ensure_level("alpha", alpha)?,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageMethod {
    BivariateCdf,
    ConditionalQuadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub value: Probability,
    pub method: CoverageMethod,
    /// Heuristic absolute error bound, not a rigorous one.
    pub err_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinCoverageReport {
    pub alpha1: f64,
    pub alpha: f64,
    pub gamma_star: f64,
    pub min_coverage: Probability,
}

impl MinCoverageReport {
    pub fn nominal(&self) -> f64 {
        1.0 - self.alpha
    }

    /// Nominal minus minimum coverage.
    pub fn deficit(&self) -> f64 {
        self.nominal() - self.min_coverage.value()
    }
}

fn critical(name: &'static str, level: f64) -> Result<f64> {
    Ok(std_normal_quantile(ensure_level(name, level)?)?.value())
}

fn gamma_checked(gamma: f64) -> Result<f64> {
    ensure_finite("gamma", gamma)
}

/// P(|X| ≤ c_α) with X ~ N(−3γ/√2, 1).
pub fn x_tail_prob(gamma: f64, alpha: f64) -> Result<Probability> {
    let gamma = gamma_checked(gamma)?;
    let c = critical("alpha", alpha)?;
    let shift = X_SHIFT_PER_GAMMA * gamma;
    Probability::saturating(interval_prob(-c - shift, c - shift))
}

/// P(|H| < c_α₁) with H ~ N(γ, 1).
pub fn h_accept_prob(gamma: f64, alpha1: f64) -> Result<Probability> {
    let gamma = gamma_checked(gamma)?;
    let c1 = critical("alpha1", alpha1)?;
    Probability::saturating(interval_prob(-c1 - gamma, c1 - gamma))
}

/// P(|H| ≥ c_α₁), the complement of [`h_accept_prob`].
pub fn h_reject_prob(gamma: f64, alpha1: f64) -> Result<Probability> {
    let gamma = gamma_checked(gamma)?;
    let c1 = critical("alpha1", alpha1)?;
    Probability::saturating(cdf(-c1 - gamma) + cdf(-c1 + gamma))
}

/// P(|G| ≤ c_α, |H| ≥ c_α₁) from bivariate normal rectangle probabilities.
pub fn gh_joint_prob_bivariate(gamma: f64, alpha1: f64, alpha: f64) -> Result<f64> {
    let gamma = gamma_checked(gamma)?;
    let c = critical("alpha", alpha)?;
    let c1 = critical("alpha1", alpha1)?;
    let g_inside = interval_prob(-c, c);
    let both_inside = bivariate::rectangle(-c, c, -c1 - gamma, c1 - gamma, GH_CORRELATION);
    Ok(g_inside - both_inside)
}

/// P(|G| ≤ c_α, |H| ≥ c_α₁) as `1 − α − ∫ P(|H| < c_α₁ | G = g) φ(g) dg`
/// over `|g| ≤ c_α`, returned with the quadrature's error estimate.
pub fn gh_joint_prob_quadrature(
    gamma: f64,
    alpha1: f64,
    alpha: f64,
) -> Result<quadrature::QuadratureResult> {
    let gamma = gamma_checked(gamma)?;
    let alpha = ensure_level("alpha", alpha)?;
    let c = critical("alpha", alpha)?;
    let c1 = critical("alpha1", alpha1)?;
    let spec = GhJointSpec::new(gamma);
    let sd = spec.conditional_variance().sqrt();
    let accept_given = |g: f64| {
        let mu = spec.conditional_mean(g);
        interval_prob((-c1 - mu) / sd, (c1 - mu) / sd) * pdf(g)
    };
    // Fold [−c, c] onto [0, c]; this makes the result exactly even in γ.
    let folded = |g: f64| accept_given(g) + accept_given(-g);
    let inner = quadrature::integrate(
        folded,
        0.0,
        c,
        QUADRATURE_TOLERANCE,
        quadrature::DEFAULT_MAX_SUBDIVISIONS,
    )?;
    Ok(quadrature::QuadratureResult {
        value: 1.0 - alpha - inner.value,
        error_estimate: inner.error_estimate + ULP_SLACK_PER_CDF * 2.0 * inner.evaluations as f64,
        evaluations: inner.evaluations,
    })
}

/// P(|G| ≤ c_α, |H| ≥ c_α₁) by conditional quadrature, checked against the
/// bivariate-cdf evaluation.
pub fn gh_joint_prob(gamma: f64, alpha1: f64, alpha: f64) -> Result<CoverageResult> {
    let quad = gh_joint_prob_quadrature(gamma, alpha1, alpha)?;
    let bvn = gh_joint_prob_bivariate(gamma, alpha1, alpha)?;
    if (quad.value - bvn).abs() > ROUTE_TOLERANCE {
        return Err(Error::RouteDisagreement {
            quadrature: quad.value,
            bivariate: bvn,
            tolerance: ROUTE_TOLERANCE,
        });
    }
    Ok(CoverageResult {
        value: Probability::saturating(quad.value)?,
        method: CoverageMethod::ConditionalQuadrature,
        err_bound: quad.error_estimate,
    })
}

pub fn coverage_probability(query: &CoverageQuery) -> Result<CoverageResult> {
    let accept = h_accept_prob(query.gamma, query.alpha1)?.value();
    let x_inside = x_tail_prob(query.gamma, query.alpha)?.value();
    let joint = gh_joint_prob(query.gamma, query.alpha1, query.alpha)?;
    Ok(CoverageResult {
        value: Probability::saturating(accept * x_inside + joint.value.value())?,
        method: CoverageMethod::ConditionalQuadrature,
        err_bound: joint.err_bound + 4.0 * ULP_SLACK_PER_CDF,
    })
}

/// Coverage computed entirely from bivariate-cdf evaluations.
pub fn coverage_probability_bivariate(query: &CoverageQuery) -> Result<CoverageResult> {
    let accept = h_accept_prob(query.gamma, query.alpha1)?.value();
    let x_inside = x_tail_prob(query.gamma, query.alpha)?.value();
    let joint = gh_joint_prob_bivariate(query.gamma, query.alpha1, query.alpha)?;
    Ok(CoverageResult {
        value: Probability::saturating(accept * x_inside + joint)?,
        method: CoverageMethod::BivariateCdf,
        err_bound: 12.0 * ULP_SLACK_PER_CDF,
    })
}

fn coverage_value(gamma: f64, alpha1: f64, alpha: f64) -> Result<f64> {
    Ok(
        coverage_probability(&CoverageQuery::new(gamma, alpha1, alpha)?)?
            .value
            .value(),
    )
}

/// Minimum coverage over γ ≥ 0 (the coverage is even in γ).
pub fn min_coverage(alpha1: f64, alpha: f64) -> Result<MinCoverageReport> {
    let alpha1 = ensure_level("alpha1", alpha1)?;
    let alpha = ensure_level("alpha", alpha)?;
    let found = search::grid_then_golden(
        |g| coverage_value(g, alpha1, alpha),
        0.0,
        GAMMA_MAX,
        MIN_SEARCH_GRID_STEP,
        MIN_SEARCH_GAMMA_TOL,
    )?;
    Ok(MinCoverageReport {
        alpha1,
        alpha,
        gamma_star: found.x,
        min_coverage: Probability::saturating(found.value)?,
    })
}

/// [`min_coverage`] for every (α₁, α) pair, α₁ varying slowest.
pub fn min_coverage_table(
    alpha1_list: &[f64],
    alpha_list: &[f64],
) -> Result<Vec<MinCoverageReport>> {
    let cells: Vec<(f64, f64)> = alpha1_list
        .iter()
        .flat_map(|&a1| alpha_list.iter().map(move |&a| (a1, a)))
        .collect();
    cells
        .par_iter()
        .map(|&(a1, a)| min_coverage(a1, a))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub gamma: f64,
    pub coverage: f64,
}

/// Coverage on `steps` evenly spaced γ values from `gamma_min` to `gamma_max`.
/// The grid is built about its centre, so a range symmetric about zero
/// yields exactly negated γ pairs.
pub fn coverage_curve(
    alpha1: f64,
    alpha: f64,
    gamma_min: f64,
    gamma_max: f64,
    steps: usize,
) -> Result<Vec<CurvePoint>> {
    ensure_finite("gamma_min", gamma_min)?;
    ensure_finite("gamma_max", gamma_max)?;
    if gamma_min >= gamma_max {
        return Err(Error::Domain {
            name: "gamma_max",
            value: gamma_max,
            expected: "greater than gamma_min",
        });
    }
    if steps < 2 {
        return Err(Error::Domain {
            name: "steps",
            value: steps as f64,
            expected: "at least 2",
        });
    }
    let centre = 0.5 * (gamma_min + gamma_max);
    let half = 0.5 * (gamma_max - gamma_min);
    let last = (steps - 1) as f64;
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let t = (2.0 * i as f64 - last) / last;
            let gamma = match i {
                0 => gamma_min,
                i if i == steps - 1 => gamma_max,
                _ => centre + half * t,
            };
            Ok(CurvePoint {
                gamma,
                coverage: coverage_value(gamma, alpha1, alpha)?,
            })
        })
        .collect()
}

/// Variances of Θ̂ and of the completely randomised comparator Θ̃ when
/// n₁ = n₂ = n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Efficiency {
    pub var_theta_hat: f64,
    pub var_tilde: f64,
    pub crossover_preferred: bool,
}

impl Efficiency {
    /// Var(Θ̂) / Var(Θ̃)
    pub fn ratio(&self) -> f64 {
        self.var_theta_hat / self.var_tilde
    }
}

pub fn efficiency_comparison(sigma_s2: f64, sigma_e2: f64, n: usize) -> Result<Efficiency> {
    let sigma_e2 = ensure_positive("sigma_e2", sigma_e2)?;
    if !(sigma_s2 >= 0.0 && sigma_s2.is_finite()) {
        return Err(Error::Domain {
            name: "sigma_s2",
            value: sigma_s2,
            expected: "finite and >= 0",
        });
    }
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            expected: "at least 1",
        });
    }
    let two_n = 2.0 * n as f64;
    // 11σε²/(4n) written as (σε² + 4.5σε²)/(2n): the two variances then
    // round identically at σs² = 4.5σε².
    let var_theta_hat = (sigma_e2 + 4.5 * sigma_e2) / two_n;
    let var_tilde = (sigma_e2 + sigma_s2) / two_n;
    Ok(Efficiency {
        var_theta_hat,
        var_tilde,
        crossover_preferred: var_theta_hat <= var_tilde,
    })
}
