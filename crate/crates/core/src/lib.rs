//! Coverage of the pretest-then-estimate confidence interval for the
//! treatment difference in ABAB/BABA crossover trials.
//!
//! The two-stage procedure first tests for zero differential carryover. On
//! acceptance the interval is centred on the efficient estimator A, which
//! assumes no carryover; on rejection it is centred on the carryover-robust
//! estimator Θ̂. The resulting interval's coverage depends only on the scaled
//! carryover γ and drops far below nominal for moderate γ.
//!
//! - [`normal`]: standard normal kernels.
//! - [`trial`]: model, data reduction, estimators and the procedure itself.
//! - [`coverage`]: exact coverage, minimum-coverage search, efficiency.
//! - [`simulation`]: subject-level Monte Carlo.
//! - [`validation`]: cross-checks between the above.

// Coefficient tables are kept at their published precision.
#![allow(clippy::excessive_precision)]
pub mod coverage;
pub mod error;
pub mod normal;
pub mod simulation;
pub mod trial;
pub mod validation;

pub use coverage::{
    coverage_curve, coverage_probability, efficiency_comparison, gh_joint_prob, min_coverage,
    min_coverage_table, CoverageMethod, CoverageQuery, CoverageResult, MinCoverageReport,
};
pub use error::{Error, Result};
pub use normal::{Probability, Quantile};
pub use simulation::{empirical_coverage, estimator_moments, EmpiricalCoverage, SimConfig};
pub use trial::{
    carryover_for_gamma, estimators, reduce_data, scaled_carryover, two_stage, ModelParams,
    ReducedData, TrialDesign, TwoStageConfig, TwoStageOutcome,
};
