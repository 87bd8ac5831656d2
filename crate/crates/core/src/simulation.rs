//! Subject-level Monte Carlo simulation of the crossover model.
//!
//! Replication `r` draws from its own ChaCha8 stream, selected by
//! `(seed, r)`, so results do not depend on how replications are scheduled
//! across threads. Aggregation runs over fixed-size chunks merged in index
//! order, which keeps floating-point summaries bit-reproducible as well.
//!
//! Normal variates come from the inverse-cdf transform of open-interval
//! uniforms.
//!
//! Each simulated response is `(μ + π_k) + s`, where the subject-specific
//! part `s = ξ + φ + λ + ε` is rounded to a multiple of [`RESPONSE_GRID`].
//! When μ and π_k lie on the same grid the addition is exact, and
//! [`reduce_data`] then removes them exactly.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::normal::inverse_cdf_unchecked;
use crate::trial::{
    estimators, reduce_data, two_stage_with, Estimates, EstimatorFn, ModelParams, SubjectResponses,
    TrialDesign, TwoStageConfig, PERIODS,
};

/// Spacing of the lattice simulated subject-specific responses are rounded to.
pub const RESPONSE_GRID: f64 = 1.0 / 4_294_967_296.0; // 2^-32

const CHUNK: u64 = 4096;

#[inline]
fn snap(x: f64) -> f64 {
    (x / RESPONSE_GRID).round() * RESPONSE_GRID
}

/// Random stream for replication `replication` under `seed`.
pub fn replication_stream(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

/// Uniform on the open interval (0, 1) with 53-bit resolution.
#[inline]
pub fn open_uniform<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

#[inline]
pub fn standard_normal<R: RngCore>(rng: &mut R) -> f64 {
    inverse_cdf_unchecked(open_uniform(rng))
}

/// Draws one trial. Per subject, ξ is drawn first and then ε for periods
/// 1 to 4; group 1 precedes group 2. Zero variances give noise-free rows.
pub fn simulate_trial<R: RngCore>(
    design: &TrialDesign,
    params: &ModelParams,
    rng: &mut R,
) -> SubjectResponses {
    let sd_s = params.sigma_s2.max(0.0).sqrt();
    let sd_e = params.sigma_e2.max(0.0).sqrt();
    let mut draw_group = |group: usize, size: usize| -> Vec<[f64; PERIODS]> {
        (0..size)
            .map(|_| {
                let xi = sd_s * standard_normal(rng);
                let mut row = [0.0; PERIODS];
                for (k, y) in row.iter_mut().enumerate() {
                    let eps = sd_e * standard_normal(rng);
                    let subject_part = snap(xi + params.contrast_effect(group, k) + eps);
                    *y = params.location(k) + subject_part;
                }
                row
            })
            .collect()
    };
    let group1 = draw_group(0, design.n1());
    let group2 = draw_group(1, design.n2());
    SubjectResponses { group1, group2 }
}

/// Everything needed to run the two-stage procedure on simulated trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    design: TrialDesign,
    params: ModelParams,
    two_stage: TwoStageConfig,
    replications: u64,
    seed: u64,
}

impl SimConfig {
    /// The procedure uses the true σε = √σε².
    pub fn new(
        design: TrialDesign,
        params: ModelParams,
        alpha1: f64,
        alpha: f64,
        replications: u64,
        seed: u64,
    ) -> Result<Self> {
        params.validate()?;
        if replications == 0 {
            return Err(Error::Domain {
                name: "replications",
                value: 0.0,
                expected: "at least 1",
            });
        }
        let two_stage = TwoStageConfig::new(alpha1, alpha, params.sigma_e2.sqrt())?;
        Ok(Self {
            design,
            params,
            two_stage,
            replications,
            seed,
        })
    }

    pub fn design(&self) -> &TrialDesign {
        &self.design
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn two_stage(&self) -> &TwoStageConfig {
        &self.two_stage
    }

    pub fn replications(&self) -> u64 {
        self.replications
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_replications(self, replications: u64) -> Result<Self> {
        Self::new(
            self.design,
            self.params,
            self.two_stage.alpha1(),
            self.two_stage.alpha(),
            replications,
            self.seed,
        )
    }

    fn estimates(&self, replication: u64, estimator: EstimatorFn) -> (Estimates, SubjectResponses) {
        let mut rng = replication_stream(self.seed, replication);
        let responses = simulate_trial(&self.design, &self.params, &mut rng);
        let reduced =
            reduce_data(&self.design, &responses).expect("simulated table matches design");
        (estimator(&reduced), responses)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalCoverage {
    pub hits: u64,
    pub accepted: u64,
    pub total: u64,
    pub estimate: f64,
    /// √(p̂(1 − p̂)/total)
    pub std_err: f64,
    pub accept_rate: f64,
}

impl EmpiricalCoverage {
    fn from_counts(hits: u64, accepted: u64, total: u64) -> Self {
        let estimate = hits as f64 / total as f64;
        Self {
            hits,
            accepted,
            total,
            estimate,
            std_err: (estimate * (1.0 - estimate) / total as f64).sqrt(),
            accept_rate: accepted as f64 / total as f64,
        }
    }

    /// Standard error of a binomial proportion with true value `p`.
    pub fn null_std_err(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.total as f64).sqrt()
    }

    /// (p̂ − p) / √(p(1 − p)/total)
    pub fn z_score(&self, p: f64) -> f64 {
        let se = self.null_std_err(p);
        if se == 0.0 {
            if self.estimate == p {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.estimate - p) / se
        }
    }

    /// Standardised distance of the accept rate from `p`.
    pub fn accept_z_score(&self, p: f64) -> f64 {
        (self.accept_rate - p) / (p * (1.0 - p) / self.total as f64).sqrt()
    }
}

fn chunk_ranges(total: u64) -> Vec<(u64, u64)> {
    (0..total.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(total)))
        .collect()
}

pub fn empirical_coverage(config: &SimConfig) -> EmpiricalCoverage {
    empirical_coverage_with(config, estimators)
}

/// [`empirical_coverage`] with a caller-supplied estimator.
pub fn empirical_coverage_with(config: &SimConfig, estimator: EstimatorFn) -> EmpiricalCoverage {
    let theta = config.params.theta();
    let (hits, accepted) = chunk_ranges(config.replications)
        .into_par_iter()
        .map(|(start, end)| {
            let mut hits = 0u64;
            let mut accepted = 0u64;
            for r in start..end {
                let mut rng = replication_stream(config.seed, r);
                let responses = simulate_trial(&config.design, &config.params, &mut rng);
                let reduced = reduce_data(&config.design, &responses)
                    .expect("simulated table matches design");
                let out = two_stage_with(&reduced, &config.design, &config.two_stage, estimator);
                hits += u64::from(out.contains(theta));
                accepted += u64::from(out.h0_accepted);
            }
            (hits, accepted)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    EmpiricalCoverage::from_counts(hits, accepted, config.replications)
}

/// Index of a statistic in [`EstimatorMoments`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    A = 0,
    ThetaHat = 1,
    PsiHat = 2,
}

/// Sample means and (n − 1)-normalised covariances of (A, Θ̂, Ψ̂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorMoments {
    pub count: u64,
    pub mean: [f64; 3],
    pub cov: [[f64; 3]; 3],
}

impl EstimatorMoments {
    pub fn mean_of(&self, s: Statistic) -> f64 {
        self.mean[s as usize]
    }

    pub fn variance(&self, s: Statistic) -> f64 {
        self.cov[s as usize][s as usize]
    }

    pub fn covariance(&self, a: Statistic, b: Statistic) -> f64 {
        self.cov[a as usize][b as usize]
    }

    pub fn correlation(&self, a: Statistic, b: Statistic) -> f64 {
        self.covariance(a, b) / (self.variance(a) * self.variance(b)).sqrt()
    }

    /// Standard error of the sample mean.
    pub fn mean_std_err(&self, s: Statistic) -> f64 {
        (self.variance(s) / self.count as f64).sqrt()
    }

    /// Standard error of the sample covariance of two uncorrelated normals.
    pub fn null_cov_std_err(&self, a: Statistic, b: Statistic) -> f64 {
        (self.variance(a) * self.variance(b) / self.count as f64).sqrt()
    }
}

/// Streaming mean/co-moment accumulator with Chan et al.'s pairwise merge.
#[derive(Debug, Clone, Copy, Default)]
struct MomentAccumulator {
    n: u64,
    mean: [f64; 3],
    comoment: [[f64; 3]; 3],
}

#[allow(clippy::needless_range_loop)]
impl MomentAccumulator {
    fn push(&mut self, x: [f64; 3]) {
        self.n += 1;
        let n = self.n as f64;
        let mut delta = [0.0; 3];
        for i in 0..3 {
            delta[i] = x[i] - self.mean[i];
            self.mean[i] += delta[i] / n;
        }
        for i in 0..3 {
            for j in 0..3 {
                self.comoment[i][j] += delta[i] * (x[j] - self.mean[j]);
            }
        }
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let (na, nb, nf) = (self.n as f64, other.n as f64, n as f64);
        let mut out = Self {
            n,
            ..Self::default()
        };
        let mut delta = [0.0; 3];
        for i in 0..3 {
            delta[i] = other.mean[i] - self.mean[i];
            out.mean[i] = self.mean[i] + delta[i] * nb / nf;
        }
        for i in 0..3 {
            for j in 0..3 {
                out.comoment[i][j] =
                    self.comoment[i][j] + other.comoment[i][j] + delta[i] * delta[j] * na * nb / nf;
            }
        }
        out
    }

    fn finish(self) -> EstimatorMoments {
        let denom = (self.n.max(2) - 1) as f64;
        let mut cov = self.comoment;
        for row in cov.iter_mut() {
            for v in row.iter_mut() {
                *v /= denom;
            }
        }
        EstimatorMoments {
            count: self.n,
            mean: self.mean,
            cov,
        }
    }
}

pub fn estimator_moments(config: &SimConfig) -> EstimatorMoments {
    estimator_moments_with(config, estimators)
}

pub fn estimator_moments_with(config: &SimConfig, estimator: EstimatorFn) -> EstimatorMoments {
    let parts: Vec<MomentAccumulator> = chunk_ranges(config.replications)
        .into_par_iter()
        .map(|(start, end)| {
            let mut acc = MomentAccumulator::default();
            for r in start..end {
                let (e, _) = config.estimates(r, estimator);
                acc.push([e.a, e.theta_hat, e.psi_hat]);
            }
            acc
        })
        .collect();
    parts
        .into_iter()
        .fold(MomentAccumulator::default(), MomentAccumulator::merge)
        .finish()
}
