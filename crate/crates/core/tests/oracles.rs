//! Library values against oracles that share no code path with them.

use pretest_coverage::coverage::{coverage_probability_bivariate, gh_joint_prob};
use pretest_coverage::normal::std_normal_quantile;
use pretest_coverage::simulation::{replication_stream, standard_normal};
use pretest_coverage::{min_coverage, min_coverage_table, CoverageQuery};

#[test]
fn joint_tail_at_zero_matches_direct_sampling() {
    // G, H standard normal with correlation 3/√11; count |G| ≤ c, |H| ≥ c₁.
    let n = 10_000_000u64;
    let rho = 3.0 / 11f64.sqrt();
    let s = (1.0 - rho * rho).sqrt();
    let c = std_normal_quantile(0.05).unwrap().value();
    let c1 = std_normal_quantile(0.1).unwrap().value();
    let mut rng = replication_stream(77, 0);
    let mut hits = 0u64;
    for _ in 0..n {
        let g = standard_normal(&mut rng);
        let h = rho * g + s * standard_normal(&mut rng);
        if g.abs() <= c && h.abs() >= c1 {
            hits += 1;
        }
    }
    let p_hat = hits as f64 / n as f64;
    let exact = gh_joint_prob(0.0, 0.1, 0.05).unwrap().value.value();
    let se = (exact * (1.0 - exact) / n as f64).sqrt();
    assert!((exact - 0.059_172_496_099_063_72).abs() < 1e-12, "{exact}");
    assert!(
        (p_hat - exact).abs() < 4.0 * se,
        "{p_hat} vs {exact} (se {se})"
    );
}

#[test]
fn minimiser_matches_dense_grid() {
    // Brute-force scan with the bivariate route, step 1e-4.
    let coverage = |g: f64| {
        coverage_probability_bivariate(&CoverageQuery::new(g, 0.1, 0.05).unwrap())
            .unwrap()
            .value
            .value()
    };
    let (mut gx, mut gv) = (0.0, f64::INFINITY);
    for i in 0..=40_000 {
        let g = i as f64 * 1e-4;
        let v = coverage(g);
        if v < gv {
            gx = g;
            gv = v;
        }
    }
    let r = min_coverage(0.1, 0.05).unwrap();
    assert!(
        (r.gamma_star - gx).abs() <= 2e-4,
        "{} vs {gx}",
        r.gamma_star
    );
    assert!((r.gamma_star - 1.378_39).abs() < 1e-4);
    assert!(r.min_coverage.value() <= gv + 1e-12);
    assert!((r.min_coverage.value() - gv).abs() < 1e-8);
    assert!((r.min_coverage.value() - 0.471_104_507_8).abs() < 1e-9);
}

#[test]
fn default_table_against_reference_values() {
    // (α₁, α, grid minimiser, grid minimum) from an independent scan with
    // step 0.02, values rounded to 5 places. Refinement can only go lower.
    let reference = [
        (0.01, 0.01, 1.84, 0.29682),
        (0.01, 0.05, 1.62, 0.20284),
        (0.01, 0.1, 1.52, 0.14715),
        (0.05, 0.01, 1.68, 0.48334),
        (0.05, 0.05, 1.46, 0.37184),
        (0.05, 0.1, 1.36, 0.30246),
        (0.1, 0.01, 1.6, 0.58405),
        (0.1, 0.05, 1.38, 0.47111),
        (0.1, 0.1, 1.26, 0.39871),
        (0.2, 0.01, 1.5, 0.69422),
        (0.2, 0.05, 1.28, 0.58635),
        (0.2, 0.1, 1.18, 0.51402),
    ];
    let table = min_coverage_table(&[0.01, 0.05, 0.1, 0.2], &[0.01, 0.05, 0.1]).unwrap();
    assert_eq!(table.len(), reference.len());
    for (r, &(a1, a, g, v)) in table.iter().zip(&reference) {
        assert_eq!((r.alpha1, r.alpha), (a1, a));
        assert!((r.gamma_star - g).abs() <= 0.02, "{r:?}");
        let refined = r.min_coverage.value();
        assert!(refined <= v + 5e-6 && refined > v - 2e-4, "{r:?}");
        assert!(r.deficit() > 0.0);
        let single = min_coverage(a1, a).unwrap();
        assert_eq!(single, *r);
    }
}
