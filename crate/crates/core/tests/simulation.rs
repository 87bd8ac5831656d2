use pretest_coverage::simulation::{estimator_moments, Statistic};
use pretest_coverage::trial::Estimates;
use pretest_coverage::validation::{self, ValidationOptions};
use pretest_coverage::{
    carryover_for_gamma, coverage_probability, empirical_coverage, estimators, CoverageQuery,
    ModelParams, ReducedData, SimConfig, TrialDesign,
};

fn analytic(gamma: f64) -> f64 {
    coverage_probability(&CoverageQuery::new(gamma, 0.1, 0.05).unwrap())
        .unwrap()
        .value
        .value()
}

#[test]
fn subject_variance_does_not_move_coverage() {
    let design = TrialDesign::new(3, 4).unwrap();
    let gamma = 1.5;
    let psi = carryover_for_gamma(gamma, &design, 1.0).unwrap();
    let p = analytic(gamma);
    for ss2 in [0.0, 1.0, 100.0] {
        let params = ModelParams::from_contrasts(2.0, psi, ss2, 1.0);
        let cfg = SimConfig::new(design, params, 0.1, 0.05, 100_000, 5).unwrap();
        let emp = empirical_coverage(&cfg);
        assert!(emp.z_score(p).abs() <= 3.5, "σs²={ss2}: {emp:?} vs {p}");

        let mom = estimator_moments(&cfg);
        let var = 11.0 * design.m() / 8.0;
        assert!((mom.variance(Statistic::ThetaHat) / var - 1.0).abs() < 0.05);
    }
}

fn corrupted(r: &ReducedData) -> Estimates {
    // Θ̂ with its D₁ coefficient changed from 1 to 0.9.
    let e = estimators(r);
    Estimates {
        theta_hat: e.theta_hat - 0.1 * r.d[0],
        ..e
    }
}

#[test]
fn validation_passes_the_real_estimators() {
    let report = validation::run(&ValidationOptions::new(11, 20_000)).unwrap();
    let failures: Vec<_> = report.failures().map(|c| c.to_string()).collect();
    assert!(report.passed(), "{failures:#?}");
}

#[test]
fn validation_catches_a_corrupted_estimator() {
    let opts = ValidationOptions {
        estimator: corrupted,
        ..ValidationOptions::new(11, 20_000)
    };
    let report = validation::run(&opts).unwrap();
    assert!(!report.passed());
    assert!(report.failures().any(|c| c.name == "mean of Θ̂"));
}

#[test]
fn branch_rates_follow_pretest_power() {
    // P(accept) = Φ(c₁ − γ) − Φ(−c₁ − γ).
    let design = TrialDesign::balanced(6).unwrap();
    for gamma in [0.0, 1.0, 2.5] {
        let psi = carryover_for_gamma(gamma, &design, 1.0).unwrap();
        let cfg = SimConfig::new(
            design,
            ModelParams::from_contrasts(0.0, psi, 1.0, 1.0),
            0.1,
            0.05,
            100_000,
            9,
        )
        .unwrap();
        let emp = empirical_coverage(&cfg);
        let p = pretest_coverage::coverage::h_accept_prob(gamma, 0.1)
            .unwrap()
            .value();
        assert!(
            emp.accept_z_score(p).abs() <= 4.0,
            "γ={gamma}: {} vs {p}",
            emp.accept_rate
        );
    }
}
