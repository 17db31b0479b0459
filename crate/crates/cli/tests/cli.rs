//! End-to-end tests driving the compiled binary.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};

fn run(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_resonet"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

fn write_scenario(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn parse(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("stdout is a JSON report")
}

#[test]
fn topology_reports_the_cube() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "cube.json",
        &json!({"network": {"family": "hypercube", "theta": 1, "g": 3, "kappa": 1.0}}),
    );
    let (code, stdout, _) = run(&["topology", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = parse(&stdout);
    assert_eq!(report["n_nodes"], 8);
    assert_eq!(report["n_edges"], 12);
    assert_eq!(report["eigenvalues"].as_array().unwrap().len(), 8);
    for entry in report["antipode_map"].as_array().unwrap() {
        let u = entry[0].as_u64().unwrap();
        let v = entry[1].as_u64().unwrap();
        assert_eq!(u + v, 7);
    }
}

#[test]
fn topology_reports_path3_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "p3.json",
        &json!({"network": {"family": "path3", "kappa": 1.0}}),
    );
    let (code, stdout, _) = run(&["topology", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = parse(&stdout);
    let eigs: Vec<f64> = report["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let root2 = 2f64.sqrt();
    for (got, want) in eigs.iter().zip([-root2, 0.0, root2]) {
        assert!((got - want).abs() < 1e-10, "{eigs:?}");
    }
}

#[test]
fn topology_reports_chain_couplings() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "chain5.json",
        &json!({"network": {"family": "engineered_chain", "n": 5, "lambda": 2.0}}),
    );
    let (code, stdout, _) = run(&["topology", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = parse(&stdout);
    let bonds: Vec<f64> = report["bond_couplings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let root6 = 6f64.sqrt();
    for (got, want) in bonds.iter().zip([2.0, root6, root6, 2.0]) {
        assert!((got - want).abs() < 1e-10, "{bonds:?}");
    }
}

#[test]
fn verify_certifies_a_path_power() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "h22.json",
        &json!({"network": {"family": "hypercube", "theta": 2, "g": 2, "kappa": 1.0}}),
    );
    let (code, stdout, _) = run(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = parse(&stdout);
    assert_eq!(report["is_perfect"], true);
    // Four quarter-turns: the analytic phase is back to +1.
    assert!((report["analytic_phase"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(report["analytic_phase"][1].as_f64().unwrap().abs() < 1e-12);
    // 9 nodes at cutoff 3 overflow the oracle limit, which must be reported
    // as a skip rather than a failure.
    assert!(report["oracle"]["skipped"].is_string());
}

#[test]
fn verify_runs_the_fock_oracle_on_a_chain() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "chain7.json",
        &json!({"network": {"family": "engineered_chain", "n": 7, "lambda": 1.0}}),
    );
    let (code, stdout, _) = run(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = parse(&stdout);
    // Six quarter-turns land on -1.
    assert!((report["analytic_phase"][0].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(report["oracle"]["input"], "random-fock");
    assert!(report["oracle"]["overlap"].as_f64().unwrap() >= 1.0 - 1e-8);
    assert_eq!(report["oracle"]["passed"], true);
}

#[test]
fn verify_flags_an_off_time_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "chain5.json",
        &json!({"network": {"family": "engineered_chain", "n": 5, "lambda": 1.0}}),
    );
    let tau = std::f64::consts::PI;
    let off = format!("{}", 0.9 * tau);
    let (code, stdout, _) = run(&[
        "verify",
        "--scenario",
        path.to_str().unwrap(),
        "--time",
        &off,
    ]);
    assert_eq!(code, 1);
    let report = parse(&stdout);
    assert_eq!(report["is_perfect"], false);
    assert!(report["max_deviation"].as_f64().unwrap() > 1e-2);
}

#[test]
fn verify_accepts_a_coherent_scenario_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "coherent.json",
        &json!({
            "network": {"family": "path2", "kappa": 1.0, "omega": 0.4},
            "state": [
                {"kind": "coherent", "alpha": [0.9, 0.3]},
                {"kind": "vacuum"}
            ]
        }),
    );
    let (code, stdout, _) = run(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = parse(&stdout);
    assert_eq!(report["oracle"]["input"], "scenario-state");
    assert!(report["oracle"]["overlap"].as_f64().unwrap() >= 1.0 - 1e-6);
}

#[test]
fn verify_treats_entangled_tags_as_bookkeeping() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "tagged.json",
        &json!({
            "network": {"family": "path3", "kappa": 1.0},
            "state": [
                {"kind": "ghz", "m": 2},
                {"kind": "vacuum"},
                {"kind": "vacuum"}
            ]
        }),
    );
    let (code, stdout, _) = run(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = parse(&stdout);
    assert!(report["oracle"]["skipped"]
        .as_str()
        .unwrap()
        .contains("bookkeeping"));
}

#[test]
fn verify_finds_the_transfer_time_of_a_custom_chain() {
    // The 4-node engineered couplings handed over as a raw matrix: the
    // search must rediscover tau = pi and certify the swap.
    let root3 = 3f64.sqrt() / 2.0;
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "custom.json",
        &json!({
            "network": {
                "family": "custom",
                "adjacency": [
                    [0.0, root3, 0.0, 0.0],
                    [root3, 0.0, 1.0, 0.0],
                    [0.0, 1.0, 0.0, root3],
                    [0.0, 0.0, root3, 0.0]
                ],
                "kappa": 1.0
            }
        }),
    );
    let (code, stdout, _) = run(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0, "stdout: {stdout}");
    let report = parse(&stdout);
    assert!(report["analytic_phase"].is_null());
    let time = report["evaluated_time"].as_f64().unwrap();
    assert!((time - std::f64::consts::PI).abs() < 1e-9, "time {time}");
    // Three quarter-turns: the measured corner phase is -i.
    assert!((report["measured_phase"][1].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(report["oracle"]["passed"], true);
}

#[test]
fn sweep_writes_grid_and_vacuum_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let path = write_scenario(
        dir.path(),
        "sweep.json",
        &json!({
            "bath": {"kind": "ohmic", "gamma": 1.0, "cutoff": 1.0, "r": 0.4},
            "run": {
                "m": 2,
                "lambda_grid": [1.0, 4.0],
                "temperature_grid": [0.0, 2.0],
                "out": out.to_str().unwrap()
            }
        }),
    );
    let (code, stdout, _) = run(&[
        "fig2",
        "--scenario",
        path.to_str().unwrap(),
        "--check-monotone",
    ]);
    assert_eq!(code, 0, "stdout: {stdout}");
    let report = parse(&stdout);
    assert_eq!(report["rows"], 4);
    assert_eq!(report["monotonicity_violations"].as_array().unwrap().len(), 0);

    let grid = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = grid.lines().collect();
    assert_eq!(lines[0], "lambda,temperature,fidelity,method,std_error");
    assert_eq!(lines.len(), 5);

    let vacuum = std::fs::read_to_string(dir.path().join("sweep_vacuum.csv")).unwrap();
    assert_eq!(vacuum.lines().count(), 3);
    for line in vacuum.lines().skip(1) {
        assert_eq!(line.split(',').nth(1), Some("0"));
    }
}

#[test]
fn decoupled_sweep_cell_is_unit_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("unit.csv");
    let path = write_scenario(
        dir.path(),
        "unit.json",
        &json!({
            "bath": {"kind": "ohmic", "gamma": 1.0, "cutoff": 1.0, "r": 0.0},
            "run": {
                "m": 3,
                "lambda_grid": [1.0],
                "temperature_grid": [0.0],
                "out": out.to_str().unwrap()
            }
        }),
    );
    let (code, _, _) = run(&["fig2", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let grid = std::fs::read_to_string(&out).unwrap();
    assert_eq!(grid.lines().nth(1), Some("1,0,1,haar,"));
}

#[test]
fn dephasing_table_matches_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "deph.json",
        &json!({
            "bath": {"kind": "ohmic", "gamma": 1.0, "cutoff": 1.0, "r": 1.0},
            "run": {"m": 2, "tau": 1.0, "temperature": 0.0}
        }),
    );
    let (code, stdout, _) = run(&["dephasing", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "n,n_prime,d0,dT,d_total");
    assert_eq!(lines[1], "0,0,1,1,1");
    // Unit-gap factor at gamma = r = cutoff*tau = 1: (1 + 1)^(-1/2).
    assert_eq!(lines[2], "0,1,0.707106781187,1,0.707106781187");
    // The table is symmetric in (n, n').
    assert_eq!(
        lines[3].split(',').skip(2).collect::<Vec<_>>(),
        lines[2].split(',').skip(2).collect::<Vec<_>>()
    );
}

#[test]
fn single_level_dephasing_table_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "deph1.json",
        &json!({
            "bath": {"kind": "ohmic", "gamma": 1.0, "cutoff": 1.0, "r": 1.0},
            "run": {"m": 1, "tau": 1.0}
        }),
    );
    let (code, stdout, _) = run(&["dephasing", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "n,n_prime,d0,dT,d_total\n0,0,1,1,1\n");
}

#[test]
fn discrete_csv_bath_resolves_next_to_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("modes.csv"), "omega,xi_sq\n0.7,0.3\n2.1,0.05\n").unwrap();
    let path = write_scenario(
        dir.path(),
        "discrete.json",
        &json!({
            "bath": {"kind": "discrete", "csv": "modes.csv", "r": 0.6},
            "run": {"m": 2, "tau": 1.4, "temperature": 0.5}
        }),
    );
    let (code, stdout, _) = run(&["dephasing", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 5);
    let d_total: f64 = stdout
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .nth(4)
        .unwrap()
        .parse()
        .unwrap();
    assert!(d_total > 0.0 && d_total < 1.0);
}

#[test]
fn fidelity_reports_are_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "fid.json",
        &json!({
            "bath": {"kind": "ohmic", "gamma": 0.8, "cutoff": 1.5, "r": 0.6},
            "run": {"m": 2, "tau": 1.2, "temperature": 0.7, "samples": 2000, "seed": 5}
        }),
    );
    let (code1, out1, _) = run(&["fidelity", "--scenario", path.to_str().unwrap()]);
    let (code2, out2, _) = run(&["fidelity", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code1, 0);
    assert_eq!(code2, 0);
    assert_eq!(out1, out2, "same seed must give byte-identical output");

    let (_, out3, _) = run(&[
        "fidelity",
        "--scenario",
        path.to_str().unwrap(),
        "--seed",
        "6",
    ]);
    let a = parse(&out1);
    let b = parse(&out3);
    assert_ne!(
        a["monte_carlo"]["value"], b["monte_carlo"]["value"],
        "a fresh seed must resample"
    );
    assert!(a["gap_sigmas"].as_f64().unwrap() < 6.0);
}

#[test]
fn reports_embed_a_reusable_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "chain6.json",
        &json!({"network": {"family": "engineered_chain", "n": 6, "lambda": 1.4}}),
    );
    let (code, stdout, _) = run(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = parse(&stdout);

    // The embedded scenario must itself be a valid scenario file.
    let extracted = dir.path().join("extracted.json");
    std::fs::write(&extracted, serde_json::to_string(&report["scenario"]).unwrap()).unwrap();
    let (code2, stdout2, stderr2) = run(&["verify", "--scenario", extracted.to_str().unwrap()]);
    assert_eq!(code2, 0, "stderr: {stderr2}");
    let report2 = parse(&stdout2);
    assert_eq!(report["max_deviation"], report2["max_deviation"]);
    assert_eq!(report["scenario"], report2["scenario"]);
}

#[test]
fn malformed_scenarios_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let typo = dir.path().join("typo.json");
    std::fs::write(&typo, r#"{"netwrok": {}}"#).unwrap();
    let (code, _, stderr) = run(&["topology", "--scenario", typo.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("netwrok"), "stderr: {stderr}");

    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"network": {"family": "warp", "kappa": 1.0}}"#).unwrap();
    let (code, _, _) = run(&["topology", "--scenario", unknown.to_str().unwrap()]);
    assert_eq!(code, 2);

    let missing = dir.path().join("missing.json");
    let (code, _, _) = run(&["verify", "--scenario", missing.to_str().unwrap()]);
    assert_eq!(code, 2);

    let (code, _, stderr) = run(&["verify"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("--scenario"), "stderr: {stderr}");
}
