//! End-to-end runs of the `agn` command line, in process through
//! `cli::run_with` and once through the built binary.

use std::path::Path;
use std::process::Command;

use affine_gn::cli::run_with;
use affine_gn::constants::SharpConstantSet;
use affine_gn::energy::EnergyComparison;
use affine_gn::inequality::InequalityReport;
use affine_gn::minimize::MinimizeSummary;
use affine_gn::rearrange::RearrangementProfile;
use affine_gn::selftest::SelftestSummary;
use affine_gn::{GridFunction, GridSpec};
use serde_json::Value;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn agn(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(args.iter().copied(), &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn error_code(o: &Outcome) -> String {
    let v: Value = serde_json::from_str(o.stderr.trim()).expect("error object on stderr");
    v["error"]["code"].as_str().unwrap().to_string()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn constants_reports_the_closed_form_values() {
    let o = agn(&["constants", "--n", "2", "--p", "1.5", "--q", "2", "--s", "3"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let set: SharpConstantSet = serde_json::from_str(&o.stdout).unwrap();
    assert!((set.theta.unwrap() - 0.5).abs() < 1e-15);
    assert!((set.c2.unwrap() - 0.576_625_115_422_831).abs() < 1e-12);
    let again: Value = serde_json::to_value(&set).unwrap();
    assert_eq!(again, serde_json::from_str::<Value>(&o.stdout).unwrap());
}

#[test]
fn constants_outside_the_regime_exit_with_a_parameter_error() {
    let o = agn(&["constants", "--n", "2", "--p", "1.5", "--q", "2", "--s", "7"]);
    assert_eq!(o.code, 1);
    assert_eq!(error_code(&o), "parameter_error");
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let o = agn(&["frobnicate"]);
    assert_eq!(o.code, 1);
    assert_eq!(error_code(&o), "usage_error");
}

#[test]
fn help_goes_to_stdout_and_succeeds() {
    let o = agn(&["sweep", "--help"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("inequality_id"));
}

#[test]
fn energy_of_the_builtin_gaussian_is_near_root_pi() {
    let o = agn(&["energy", "--input", "builtin:gaussian", "--n", "2", "--p", "2", "--grid", "256,6"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let e: EnergyComparison = serde_json::from_str(&o.stdout).unwrap();
    assert!((e.affine_energy - std::f64::consts::PI.sqrt()).abs() < 1e-3);
    assert!(e.ratio <= 1.0 + 1e-3);
}

#[test]
fn rearranging_a_grid_file_keeps_norms_and_lowers_energy() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    let output = dir.path().join("r.json");
    let profile = dir.path().join("profile.json");
    let f = GridFunction::sample(GridSpec::new(2, 4.0, 96).unwrap(), |x| {
        (-(x[0] - 0.7).powi(2) - 3.0 * (x[1] + 0.4).powi(2)).exp()
            + 0.5 * (-(x[0] + 1.0).powi(2) - (x[1] - 1.0).powi(2)).exp()
    })
    .unwrap();
    f.write_json(&input).unwrap();
    let o = agn(&[
        "rearrange",
        "--input",
        path_str(&input),
        "--out",
        path_str(&output),
        "--profile-out",
        path_str(&profile),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let r = GridFunction::read_json(&output).unwrap();
    assert_eq!(r.spec(), f.spec());
    for p in [1.0, 2.0, 4.0] {
        let (a, b) = (f.lp_norm(p).unwrap(), r.lp_norm(p).unwrap());
        assert!((a - b).abs() <= 1e-12 * a);
    }
    assert_eq!(r.max_abs(), f.max_abs());
    let prof: RearrangementProfile =
        serde_json::from_str(&std::fs::read_to_string(&profile).unwrap()).unwrap();
    assert_eq!(prof.value_at(0.0), f.max_abs());

    let energy = |path: &Path| -> EnergyComparison {
        let o = agn(&["energy", "--input", path_str(path), "--p", "2"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        serde_json::from_str(&o.stdout).unwrap()
    };
    let (ef, er) = (energy(&input), energy(&output));
    assert!(er.affine_energy <= ef.affine_energy * 1.01);
    assert!(er.gradient_norm <= ef.gradient_norm * 1.01);
}

#[test]
fn malformed_grid_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim":2,"half_width":1.0,"points_per_axis":4,"values":[1.0]}"#).unwrap();
    let o = agn(&["energy", "--input", path_str(&bad), "--p", "2"]);
    assert_eq!(o.code, 1);
    assert_eq!(error_code(&o), "malformed_grid");

    let missing = dir.path().join("missing.json");
    let o = agn(&["energy", "--input", path_str(&missing), "--p", "2"]);
    assert_eq!(o.code, 1);
    assert_eq!(error_code(&o), "io_error");
}

#[test]
fn dimension_mismatch_with_a_grid_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    GridFunction::sample(GridSpec::new(2, 3.0, 32).unwrap(), |x| (-x[0] * x[0] - x[1] * x[1]).exp())
        .unwrap()
        .write_json(&input)
        .unwrap();
    let o = agn(&["energy", "--input", path_str(&input), "--n", "3", "--p", "2"]);
    assert_eq!(o.code, 1);
}

#[test]
fn sampled_extremal_round_trips_and_checks_sharp() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("ext.json");
    let o = agn(&[
        "sample-extremal",
        "--family",
        "gn_superquadratic",
        "--params",
        "n=2,p=1.5,q=2",
        "--grid",
        "256,10",
        "--matrix",
        "1,0.5,0,1",
        "--out",
        path_str(&grid),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let f = GridFunction::read_json(&grid).unwrap();
    assert_eq!(GridFunction::from_json(&f.to_json().unwrap()).unwrap(), f);

    let o = agn(&["check", "affine_gn", "--input", path_str(&grid), "--p", "1.5", "--q", "2", "--s", "3"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rep: InequalityReport = serde_json::from_str(&o.stdout).unwrap();
    assert!((rep.ratio - 1.0).abs() < 0.04, "ratio {}", rep.ratio);
    assert!(rep.passed);
    let again: InequalityReport = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
    assert_eq!(again, rep);
}

#[test]
fn euclidean_check_sees_the_shear() {
    let base = ["check", "affine_gn", "--input", "builtin:gn_extremal", "--n", "2", "--p", "1.5"];
    let args = |affine: &'static str| {
        let mut v = base.to_vec();
        v.extend(["--q", "2", "--s", "3", "--grid", "256,16", "--matrix", "1,1,0,1", "--affine", affine]);
        v
    };
    let affine: InequalityReport = serde_json::from_str(&agn(&args("true")).stdout).unwrap();
    let euclid: InequalityReport = serde_json::from_str(&agn(&args("false")).stdout).unwrap();
    assert!(affine.ratio > 0.96);
    assert!(euclid.ratio < 0.98);
    assert!(affine.slack <= euclid.slack);
}

#[test]
fn minimize_reports_and_flags_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("u.json");
    let common = ["minimize", "--n", "2", "--p", "1.5", "--q", "2", "--s", "3", "--grid", "64,10"];

    let mut args = common.to_vec();
    args.extend(["--max-iters", "5", "--out", path_str(&grid)]);
    let o = agn(&args);
    assert_eq!(o.code, 2);
    assert_eq!(error_code(&o), "solver_error");
    let summary: MinimizeSummary = serde_json::from_str(&o.stdout).unwrap();
    assert!(!summary.converged);
    assert_eq!(summary.iterations, 5);
    let u = GridFunction::read_json(&grid).unwrap();
    assert!((u.lp_norm(3.0).unwrap() - 1.0).abs() < 1e-10);

    let o = agn(&common);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let summary: MinimizeSummary = serde_json::from_str(&o.stdout).unwrap();
    assert!(summary.converged);
    assert!((summary.k_opt - 0.5766).abs() < 0.02);
}

#[test]
fn sweep_emits_sorted_csv() {
    let o = agn(&[
        "sweep",
        "--family",
        "affine_gn",
        "--param-grid",
        "p=1.5;q=2.5,2;s=3.5,3",
        "--grid",
        "128,10",
        "--directions",
        "128",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let mut lines = o.stdout.lines();
    assert_eq!(lines.next(), Some("inequality_id,p,q,s,lhs,rhs,ratio,slack"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 4);
    let keys: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[2].parse().unwrap(), r[3].parse().unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
    for r in &rows {
        assert_eq!(r[0], "affine_gn");
        let ratio: f64 = r[6].parse().unwrap();
        assert!(ratio > 0.0 && ratio <= 1.02);
    }
}

#[test]
fn sweep_rejects_unknown_keys() {
    let o = agn(&["sweep", "--family", "affine_gn", "--param-grid", "zeta=1"]);
    assert_eq!(o.code, 1);
}

#[test]
fn every_inequality_runs_on_its_default_builtin() {
    let cases: [&[&str]; 7] = [
        &["check", "affine_sobolev", "--input", "builtin:gn_extremal", "--n", "3", "--p", "2", "--grid", "48"],
        &["check", "affine_nash", "--input", "builtin:bump", "--n", "2", "--p", "1.5", "--grid", "96", "--k-opt", "0.6"],
        &["check", "log_sobolev", "--input", "builtin:log_sobolev", "--n", "3", "--p", "2", "--grid", "48"],
        &["check", "affine_moser_trudinger", "--input", "builtin:moser", "--n", "2", "--grid", "128", "--m-n", "5"],
        &["check", "euclidean_moser_trudinger", "--input", "builtin:moser", "--n", "2", "--grid", "128", "--m-n", "5"],
        &["check", "affine_morrey_sobolev", "--input", "builtin:morrey", "--n", "2", "--p", "3", "--grid", "128"],
        &["check", "euclidean_gn", "--input", "builtin:gaussian", "--n", "2", "--p", "1.5", "--q", "2", "--s", "3", "--grid", "128"],
    ];
    for args in cases {
        let o = agn(args);
        assert_eq!(o.code, 0, "{args:?}: {}", o.stderr);
        let rep: InequalityReport = serde_json::from_str(&o.stdout).unwrap();
        assert!(rep.ratio.is_finite() && rep.ratio > 0.0, "{args:?}");
    }
}

#[test]
fn binary_selftest_quick_writes_a_passing_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.json");
    let status = Command::new(env!("CARGO_BIN_EXE_agn"))
        .args(["selftest", "--quick", "--out", path_str(&path)])
        .env("AGN_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let summary: SelftestSummary = serde_json::from_str(&text).unwrap();
    assert!(summary.quick && summary.passed);
    assert_eq!(summary.criteria.len(), 12);
    let again: Value = serde_json::to_value(&summary).unwrap();
    assert_eq!(again, serde_json::from_str::<Value>(&text).unwrap());
    let progress = String::from_utf8_lossy(&status.stderr);
    assert_eq!(progress.lines().filter(|l| l.contains("PASS")).count(), 12);
}

#[test]
fn binary_rejects_a_bad_thread_count() {
    let o = Command::new(env!("CARGO_BIN_EXE_agn"))
        .args(["constants", "--n", "2", "--p", "1.5"])
        .env("AGN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
