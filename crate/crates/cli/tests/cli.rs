use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pretest-coverage"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn binary")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn two_step_curve_has_endpoints_only() {
    let o = run(&["coverage-curve", "--steps", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let lines: Vec<_> = s.lines().collect();
    assert_eq!(lines, ["gamma,coverage", "-8,0.95", "8,0.95"]);
    assert!(!s.contains('\r'));
}

#[test]
fn curve_file_is_reproducible_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = run(&[
            "coverage-curve",
            "--steps",
            "41",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (g, c) = l.split_once(',').unwrap();
            (g.parse().unwrap(), c.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 41);
    for (g, c) in &rows {
        let lib = pretest_coverage::coverage_probability(
            &pretest_coverage::CoverageQuery::new(*g, 0.1, 0.05).unwrap(),
        )
        .unwrap()
        .value
        .value();
        assert!((lib - c).abs() <= 1e-12, "γ={g}: {lib} vs {c}");
    }
    // Symmetric grid gives a symmetric column.
    for i in 0..rows.len() {
        let j = rows.len() - 1 - i;
        assert_eq!(rows[i].0, -rows[j].0);
        assert_eq!(rows[i].1, rows[j].1);
    }

    let manifest = dir.path().join("a.csv.manifest.json");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(manifest).unwrap()).unwrap();
    assert_eq!(json["command"], "coverage-curve");
    assert_eq!(json["params"]["steps"], 41);
    assert_eq!(json["version"], env!("CARGO_PKG_VERSION"));
    assert!(json["timestamp"].as_u64().unwrap() > 0);
}

#[test]
fn domain_errors_exit_2() {
    for args in [
        &["coverage-curve", "--steps", "1"][..],
        &["coverage-curve", "--alpha", "1.5"],
        &["coverage-curve", "--gamma-min", "3", "--gamma-max", "1"],
        &["min-coverage", "--alpha1", "0"],
        &["efficiency", "--sigma-s2", "1", "--sigma-e2", "0"],
        &["simulate", "--n1", "0", "--reps", "10"],
        &["no-such-command"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("x.csv");
    let o = run(&[
        "coverage-curve",
        "--steps",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn min_coverage_dedups_with_warning() {
    let o = run(&["min-coverage", "--alpha1", "0.1,0.1", "--alpha", "0.05"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let lines: Vec<_> = s.lines().collect();
    assert_eq!(
        lines[0],
        "alpha1,alpha,gamma_star,min_coverage,nominal,deficit"
    );
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0.1,0.05,1.378"));
    assert!(lines[1].contains(",0.4711,"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("duplicate"));
}

#[test]
fn default_min_coverage_table() {
    let o = run(&["min-coverage"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 13);
    for line in s.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[2] > 0.0);
        assert!(f[3] < f[4]);
    }
}

#[test]
fn efficiency_reports_threshold() {
    let eq = stdout(&run(&[
        "efficiency",
        "--sigma-s2",
        "4.5",
        "--sigma-e2",
        "1",
    ]));
    assert!(eq.contains("equal"));
    assert!(eq.contains("ratio            1.000000"));
    let lo = stdout(&run(&["efficiency", "--sigma-s2", "1", "--sigma-e2", "1"]));
    assert!(lo.contains("parallel design preferred"));
    let hi = stdout(&run(&[
        "efficiency",
        "--sigma-s2",
        "9",
        "--sigma-e2",
        "1",
        "--n",
        "4",
    ]));
    assert!(hi.contains("crossover preferred: sigma_s2 > 4.5"));
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate", "--n1", "2", "--n2", "3", "--psi", "0.8", "--reps", "20000", "--seed", "9",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("hits"));
}

#[test]
fn validate_smoke() {
    let o = run(&["validate", "--reps", "1000", "--seed", "3"]);
    let s = stdout(&o);
    assert!(s.contains("[PASS] joint tail routes"));
    assert!(s.lines().last().unwrap().ends_with("failed"));
    // A small run may legitimately fail a statistical check; only the
    // exit code contract is asserted.
    let failed = s.contains("[FAIL]");
    assert_eq!(o.status.code(), Some(if failed { 1 } else { 0 }));
}
