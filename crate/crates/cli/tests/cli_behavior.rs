//! Behavior of the `proxgrad` binary: flags, config files, exit codes,
//! instance save/replay, and manifest consistency.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use proxgrad::linalg::DenseMatrix;
use proxgrad::problems::{ProblemInstance, SimplexQpInstance};
use proxgrad::solver::{run, BetaSchedule, TerminationRule};

fn proxgrad_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_proxgrad"))
}

fn read_manifest(dir: &Path) -> BTreeMap<String, String> {
    fs::read_to_string(dir.join("manifest.txt"))
        .unwrap()
        .lines()
        .filter_map(|l| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

#[test]
fn run_writes_all_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let status = proxgrad_bin()
        .args([
            "run",
            "--family",
            "lasso",
            "-m",
            "20",
            "-n",
            "60",
            "--sparsity",
            "3",
            "--schedule",
            "fista-both",
            "--K",
            "500",
            "--seed",
            "5",
            "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    for file in ["trace.csv", "manifest.txt", "rate.txt"] {
        assert!(dir.path().join(file).exists(), "{file} missing");
    }
    let header = fs::read_to_string(dir.path().join("trace.csv"))
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(
        header,
        "k,F,H,step_norm,residual,gap,feas_violation,beta,restart_flag"
    );
}

#[test]
fn manifest_threshold_equals_beta_threshold_of_moduli() {
    let dir = tempfile::tempdir().unwrap();
    let status = proxgrad_bin()
        .args([
            "run",
            "--family",
            "qp",
            "-n",
            "40",
            "--schedule",
            "constant-frac",
            "0.98",
            "--seed",
            "3",
            "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let manifest = read_manifest(dir.path());
    let lip: f64 = manifest["modulus_lipschitz"].parse().unwrap();
    let con: f64 = manifest["modulus_concavity"].parse().unwrap();
    let thr: f64 = manifest["beta_threshold"].parse().unwrap();
    assert_eq!(thr, (lip / (lip + con)).sqrt());
    assert_eq!(manifest["fista_heuristic_on_nonconvex"], "false");
}

#[test]
fn plain_schedule_runs_proximal_gradient() {
    let dir = tempfile::tempdir().unwrap();
    let status = proxgrad_bin()
        .args([
            "run",
            "--family",
            "lasso",
            "-m",
            "15",
            "-n",
            "40",
            "--sparsity",
            "2",
            "--schedule",
            "none",
            "--seed",
            "8",
            "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    // Every recorded beta is zero.
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    for line in trace.lines().skip(1) {
        let beta = line.split(',').nth(7).unwrap();
        assert_eq!(beta.parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn emitted_h_column_is_nonincreasing_for_admissible_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let status = proxgrad_bin()
        .args([
            "run",
            "--family",
            "lasso",
            "-m",
            "20",
            "-n",
            "60",
            "--sparsity",
            "3",
            "--schedule",
            "fista-both",
            "--seed",
            "21",
            "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let h: Vec<f64> = trace
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    let report = proxgrad::diagnostics::audit_monotone(&h, 1e-10).unwrap();
    assert!(report.ok, "first violation at {:?}", report.first_violation);
}

#[test]
fn usage_errors_exit_with_code_two() {
    let code = proxgrad_bin()
        .args(["run", "--family", "warp"])
        .output()
        .unwrap()
        .status
        .code();
    assert_eq!(code, Some(2));

    let code = proxgrad_bin()
        .args(["run", "--bogus-flag"])
        .output()
        .unwrap()
        .status
        .code();
    assert_eq!(code, Some(2));
}

#[test]
fn cap_reached_without_convergence_exits_with_code_four() {
    let dir = tempfile::tempdir().unwrap();
    let code = proxgrad_bin()
        .args([
            "run",
            "--family",
            "lasso",
            "-m",
            "15",
            "-n",
            "40",
            "--sparsity",
            "2",
            "--schedule",
            "none",
            "--max-iter",
            "3",
            "--seed",
            "8",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap()
        .status
        .code();
    assert_eq!(code, Some(4));
    let manifest = read_manifest(dir.path());
    assert_eq!(manifest["termination"], "max_iter");
    assert_eq!(manifest["hit_cap"], "true");
}

#[test]
fn saved_instance_replays_bit_exactly() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let status = proxgrad_bin()
        .args([
            "run",
            "--family",
            "logistic",
            "-m",
            "15",
            "-n",
            "30",
            "--sparsity",
            "2",
            "--schedule",
            "fista-both",
            "--seed",
            "77",
            "--save-instance",
            "--out",
        ])
        .arg(dir_a.path())
        .status()
        .unwrap();
    assert!(status.success());

    // Replay from the saved file (different seed must not matter).
    let status = proxgrad_bin()
        .args([
            "run",
            "--schedule",
            "fista-both",
            "--seed",
            "123456",
            "--instance",
        ])
        .arg(dir_a.path().join("instance.txt"))
        .arg("--out")
        .arg(dir_b.path())
        .status()
        .unwrap();
    assert!(status.success());

    let a = fs::read(dir_a.path().join("trace.csv")).unwrap();
    let b = fs::read(dir_b.path().join("trace.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_file_sets_flags_and_cli_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("experiment.cfg");
    fs::write(
        &config_path,
        "family = lasso\nm = 15\nn = 40\nsparsity = 2\nschedule = constant-frac 0.5\nseed = 11\n",
    )
    .unwrap();

    let out = dir.path().join("out");
    let status = proxgrad_bin()
        .args(["run", "--config"])
        .arg(&config_path)
        .args(["--seed", "12", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let manifest = read_manifest(&out);
    assert_eq!(manifest["family"], "lasso");
    assert_eq!(manifest["schedule"], "constant-frac 0.5");
    // The command line wins over the config file.
    assert_eq!(manifest["seed"], "12");
}

#[test]
fn table_on_trivial_convex_instance_agrees_across_algorithms() {
    // With a positive semidefinite matrix the QP is convex, so all three
    // algorithms must land on the same objective value.
    let a = DenseMatrix::new(2, 2, vec![1.0, 0.2, 0.2, 2.0]).unwrap();
    let inst =
        ProblemInstance::SimplexQp(SimplexQpInstance::new(a, vec![0.5, -0.3], 1.0, 0).unwrap());
    let obj = inst.objective().unwrap();
    let thr = obj.moduli().beta_threshold();
    let rule = TerminationRule::AnyOf(vec![
        TerminationRule::SuccessiveChange(1e-10),
        TerminationRule::MaxIter(5000),
    ]);
    let mut fvals = Vec::new();
    for schedule in [
        BetaSchedule::constant(0.98 * thr),
        BetaSchedule::fista(),
        BetaSchedule::none(),
    ] {
        let result = run(&obj, &inst.default_start(), schedule, &rule, None, None).unwrap();
        fvals.push(result.trace.last().unwrap().f_value);
    }
    for pair in fvals.windows(2) {
        assert!(
            (pair[0] - pair[1]).abs() <= 1e-6,
            "objectives diverged: {fvals:?}"
        );
    }
}

#[test]
fn table_command_writes_batch_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let status = proxgrad_bin()
        .args([
            "table1",
            "-n",
            "40",
            "--instances",
            "3",
            "--seed",
            "2026",
            "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 3);
    assert!(dir.path().join("summary.txt").exists());
}
