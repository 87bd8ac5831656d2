//! The ABAB/BABA crossover model, its reduction to group-mean differences,
//! the three linear estimators and the pretest-then-estimate procedure.
//!
//! Group 1 receives treatments in the order A, B, A, B and group 2 in the
//! order B, A, B, A. A response in periods 2-4 carries the residual effect of
//! the treatment given in the previous period: λ₁ after A, λ₂ after B.

use crate::error::{ensure_finite, ensure_level, ensure_positive, Error, Result};
use crate::normal::std_normal_quantile;

pub const PERIODS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Treatment {
    A,
    B,
}

/// Treatment and carried-over treatment for each (group, period).
pub const SCHEDULE: [[(Treatment, Option<Treatment>); PERIODS]; 2] = {
    use Treatment::{A, B};
    [
        [(A, None), (B, Some(A)), (A, Some(B)), (B, Some(A))],
        [(B, None), (A, Some(B)), (B, Some(A)), (A, Some(B))],
    ]
};

/// Group sizes of a two-group crossover trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialDesign {
    n1: usize,
    n2: usize,
}

impl TrialDesign {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        for (name, n) in [("n1", n1), ("n2", n2)] {
            if n == 0 {
                return Err(Error::Domain {
                    name,
                    value: 0.0,
                    expected: "at least one subject per group",
                });
            }
        }
        Ok(Self { n1, n2 })
    }

    /// Balanced design with `n` subjects per group.
    pub fn balanced(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// m = 1/n₁ + 1/n₂
    pub fn m(&self) -> f64 {
        1.0 / self.n1 as f64 + 1.0 / self.n2 as f64
    }

    pub(crate) fn size(&self, group: usize) -> usize {
        if group == 0 {
            self.n1
        } else {
            self.n2
        }
    }
}

/// Fixed effects and variance components of the response model
/// `Y = μ + ξ + π_k + φ_treatment + λ_carried + ε`.
///
/// `sigma_s2 = 0` is accepted by [`ModelParams::validate`] so that the
/// simulator can be exercised without subject noise. A zero `sigma_e2` is
/// only meaningful as direct input to the simulator and fails validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub mu: f64,
    pub pi: [f64; PERIODS],
    pub phi1: f64,
    pub phi2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub sigma_s2: f64,
    pub sigma_e2: f64,
}

impl ModelParams {
    /// Parameters with zero nuisance effects, `φ₂ = λ₂ = 0`, and the given
    /// treatment difference θ and differential carryover ψ.
    pub fn from_contrasts(theta: f64, psi: f64, sigma_s2: f64, sigma_e2: f64) -> Self {
        Self {
            mu: 0.0,
            pi: [0.0; PERIODS],
            phi1: theta,
            phi2: 0.0,
            lambda1: 4.0 * psi / 3.0,
            lambda2: 0.0,
            sigma_s2,
            sigma_e2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("mu", self.mu)?;
        for &p in &self.pi {
            ensure_finite("pi", p)?;
        }
        ensure_finite("phi1", self.phi1)?;
        ensure_finite("phi2", self.phi2)?;
        ensure_finite("lambda1", self.lambda1)?;
        ensure_finite("lambda2", self.lambda2)?;
        if !(self.sigma_s2 >= 0.0 && self.sigma_s2.is_finite()) {
            return Err(Error::Domain {
                name: "sigma_s2",
                value: self.sigma_s2,
                expected: "finite and >= 0",
            });
        }
        ensure_positive("sigma_e2", self.sigma_e2)?;
        Ok(())
    }

    /// θ = φ₁ − φ₂
    pub fn theta(&self) -> f64 {
        self.phi1 - self.phi2
    }

    /// ψ = 3(λ₁ − λ₂)/4
    pub fn psi(&self) -> f64 {
        0.75 * (self.lambda1 - self.lambda2)
    }

    pub(crate) fn treatment_effect(&self, t: Treatment) -> f64 {
        match t {
            Treatment::A => self.phi1,
            Treatment::B => self.phi2,
        }
    }

    pub(crate) fn carryover_effect(&self, t: Option<Treatment>) -> f64 {
        match t {
            None => 0.0,
            Some(Treatment::A) => self.lambda1,
            Some(Treatment::B) => self.lambda2,
        }
    }

    /// μ + π_k, the part of a response shared by every subject in a period.
    pub fn location(&self, period: usize) -> f64 {
        self.mu + self.pi[period]
    }

    /// Treatment plus carried-over effect for (group, period).
    pub fn contrast_effect(&self, group: usize, period: usize) -> f64 {
        let (treatment, carried) = SCHEDULE[group][period];
        self.treatment_effect(treatment) + self.carryover_effect(carried)
    }

    /// Deterministic part of the response for (group, period).
    pub fn fixed_effect(&self, group: usize, period: usize) -> f64 {
        self.location(period) + self.contrast_effect(group, period)
    }
}

/// Per-subject responses over the four periods, one row per subject.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectResponses {
    pub group1: Vec<[f64; PERIODS]>,
    pub group2: Vec<[f64; PERIODS]>,
}

impl SubjectResponses {
    pub fn group(&self, i: usize) -> &[[f64; PERIODS]] {
        if i == 0 {
            &self.group1
        } else {
            &self.group2
        }
    }
}

/// Group-1 minus group-2 period means, D₁…D₄.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedData {
    pub d: [f64; PERIODS],
}

impl ReducedData {
    pub fn new(d1: f64, d2: f64, d3: f64, d4: f64) -> Self {
        Self {
            d: [d1, d2, d3, d4],
        }
    }
}

/// Computes D_k = Ȳ₁·ₖ − Ȳ₂·ₖ as (n₂ΣY₁ − n₁ΣY₂)/(n₁n₂), with the numerator
/// summed exactly and rounded once. Terms common to every response in a
/// period (μ, π_k) therefore cancel exactly whenever the responses
/// themselves are exact sums, as the simulator's are.
pub fn reduce_data(design: &TrialDesign, responses: &SubjectResponses) -> Result<ReducedData> {
    for (group, what) in [(0, "group 1 subjects"), (1, "group 2 subjects")] {
        let found = responses.group(group).len();
        let expected = design.size(group);
        if found != expected {
            return Err(Error::Dimension {
                what,
                expected,
                found,
            });
        }
    }
    let (n1, n2) = (design.n1() as f64, design.n2() as f64);
    let mut d = [0.0; PERIODS];
    let mut terms = Vec::with_capacity(2 * (design.n1() + design.n2()));
    for (k, dk) in d.iter_mut().enumerate() {
        terms.clear();
        for (weight, group) in [(n2, 0), (-n1, 1)] {
            for row in responses.group(group) {
                let y = ensure_finite("response", row[k])?;
                let (p, e) = two_product(weight, y);
                terms.push(p);
                terms.push(e);
            }
        }
        *dk = exact_sum(&terms) / (n1 * n2);
    }
    Ok(ReducedData { d })
}

/// `a * b` as an unevaluated sum `p + e` with `p = fl(a * b)`.
#[inline]
fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Correctly rounded sum of finite floats (Shewchuk's partials with
/// round-half-even on the final expansion).
fn exact_sum(values: &[f64]) -> f64 {
    let mut partials: Vec<f64> = Vec::with_capacity(8);
    for &v in values {
        let mut x = v;
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }

    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        lo = y - (hi - x);
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

/// The pooled estimator A, the carryover-robust Θ̂ and the carryover
/// estimator Ψ̂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimates {
    pub a: f64,
    pub theta_hat: f64,
    pub psi_hat: f64,
}

/// Coefficient vectors applied to (D₁, D₂, D₃, D₄). Each sums to zero, which
/// removes the common between-subject offset ξ̄₁· − ξ̄₂·.
pub const A_COEFFS: [f64; PERIODS] = [0.25, -0.25, 0.25, -0.25];
pub const THETA_COEFFS: [f64; PERIODS] = [1.0, -0.25, -0.5, -0.25];
pub const PSI_COEFFS: [f64; PERIODS] = [0.75, 0.0, -0.75, 0.0];

fn dot(c: &[f64; PERIODS], d: &[f64; PERIODS]) -> f64 {
    c.iter().zip(d).map(|(c, d)| c * d).sum()
}

pub fn estimators(reduced: &ReducedData) -> Estimates {
    Estimates {
        a: dot(&A_COEFFS, &reduced.d),
        theta_hat: dot(&THETA_COEFFS, &reduced.d),
        psi_hat: dot(&PSI_COEFFS, &reduced.d),
    }
}

/// Signature shared by [`estimators`] and any substitute used to probe the
/// validation suite.
pub type EstimatorFn = fn(&ReducedData) -> Estimates;

/// Levels of the two-stage procedure, with the error s.d. σε taken as known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStageConfig {
    alpha1: f64,
    alpha: f64,
    sigma_e: f64,
    c_alpha1: f64,
    c_alpha: f64,
}

impl TwoStageConfig {
    pub fn new(alpha1: f64, alpha: f64, sigma_e: f64) -> Result<Self> {
        let alpha1 = ensure_level("alpha1", alpha1)?;
        let alpha = ensure_level("alpha", alpha)?;
        let sigma_e = ensure_positive("sigma_e", sigma_e)?;
        Ok(Self {
            alpha1,
            alpha,
            sigma_e,
            c_alpha1: std_normal_quantile(alpha1)?.value(),
            c_alpha: std_normal_quantile(alpha)?.value(),
        })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma_e(&self) -> f64 {
        self.sigma_e
    }

    /// Pretest critical value c_{α₁}.
    pub fn c_alpha1(&self) -> f64 {
        self.c_alpha1
    }

    /// Interval critical value c_α.
    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// No-carryover hypothesis accepted; interval centred on A.
    PooledA,
    /// Hypothesis rejected; interval centred on Θ̂.
    RobustTheta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStageOutcome {
    pub pretest_stat: f64,
    pub h0_accepted: bool,
    pub interval_lo: f64,
    pub interval_hi: f64,
    pub branch: Branch,
}

impl TwoStageOutcome {
    pub fn contains(&self, value: f64) -> bool {
        self.interval_lo <= value && value <= self.interval_hi
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.interval_hi - self.interval_lo)
    }
}

/// Pretest statistic √(8/(9m))·Ψ̂/σε.
fn pretest_statistic(psi_hat: f64, design: &TrialDesign, sigma_e: f64) -> f64 {
    (8.0 / (9.0 * design.m())).sqrt() * psi_hat / sigma_e
}

pub fn two_stage(
    reduced: &ReducedData,
    design: &TrialDesign,
    config: &TwoStageConfig,
) -> TwoStageOutcome {
    two_stage_with(reduced, design, config, estimators)
}

pub fn two_stage_with(
    reduced: &ReducedData,
    design: &TrialDesign,
    config: &TwoStageConfig,
    estimator: EstimatorFn,
) -> TwoStageOutcome {
    let est = estimator(reduced);
    let m = design.m();
    let pretest_stat = pretest_statistic(est.psi_hat, design, config.sigma_e);
    // Equality belongs to the rejection region.
    let h0_accepted = pretest_stat.abs() < config.c_alpha1;
    let (centre, half_width, branch) = if h0_accepted {
        (
            est.a,
            config.c_alpha * (m / 4.0).sqrt() * config.sigma_e,
            Branch::PooledA,
        )
    } else {
        (
            est.theta_hat,
            config.c_alpha * (11.0 * m / 8.0).sqrt() * config.sigma_e,
            Branch::RobustTheta,
        )
    };
    TwoStageOutcome {
        pretest_stat,
        h0_accepted,
        interval_lo: centre - half_width,
        interval_hi: centre + half_width,
        branch,
    }
}

/// γ = √(8/(9m))·ψ/σε, the only quantity the coverage depends on.
pub fn scaled_carryover(psi: f64, design: &TrialDesign, sigma_e: f64) -> Result<f64> {
    let sigma_e = ensure_positive("sigma_e", sigma_e)?;
    ensure_finite("psi", psi)?;
    Ok(pretest_statistic(psi, design, sigma_e))
}

/// Inverse of [`scaled_carryover`]: the ψ giving scaled carryover `gamma`.
pub fn carryover_for_gamma(gamma: f64, design: &TrialDesign, sigma_e: f64) -> Result<f64> {
    let sigma_e = ensure_positive("sigma_e", sigma_e)?;
    ensure_finite("gamma", gamma)?;
    Ok(gamma * sigma_e * (9.0 * design.m() / 8.0).sqrt())
}
