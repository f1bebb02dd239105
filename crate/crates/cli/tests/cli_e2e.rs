//! End-to-end runs through the config layer, the scenario driver, and the
//! binary itself.

use std::process::Command;

use phaseflow_cli::config::parse_config;
use phaseflow_cli::error::CliError;
use phaseflow_cli::scenario::{execute, run_scenario};
use phaseflow_cli::sweep::{parse_values, run_sweep};

fn csv_column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let headers: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = headers
        .iter()
        .position(|h| *h == name)
        .unwrap_or_else(|| panic!("no column {name} in {headers:?}"));
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

const BATEMAN_REDUCE: &str = r#"
[scenario]
id = "bateman-reduce"
kind = "reduce"
t_end = 1.2
n_samples = 13

[model.bateman]
omega0 = 1.0
gamma = 0.5

[reservoir]
f = [[0.8, 0.1], [0.1, 0.9]]
"#;

#[test]
fn bateman_reduce_writes_effective_drift() {
    let cfg = parse_config(BATEMAN_REDUCE).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_scenario(&cfg, dir.path()).unwrap();
    assert!(report.passed);

    let csv = std::fs::read_to_string(dir.path().join("bateman-reduce.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 13);
    let t = csv_column(&csv, "t");
    let a11 = csv_column(&csv, "A_p1_p1");
    let a22 = csv_column(&csv, "A_x1_x1");
    for k in 0..t.len() {
        let tn = (t[k]).tan();
        assert!((a11[k] - (0.5 - tn)).abs() < 1e-8, "A11 at t = {}", t[k]);
        assert!((a22[k] - (-0.5 - tn)).abs() < 1e-8, "A22 at t = {}", t[k]);
    }
    assert!(dir.path().join("bateman-reduce.report.json").exists());
}

#[test]
fn identical_config_gives_byte_identical_csv() {
    let cfg = parse_config(BATEMAN_REDUCE).unwrap();
    let a = execute(&cfg).unwrap();
    let b = execute(&cfg).unwrap();
    assert_eq!(
        phaseflow_cli::output::render_csv(&a.headers, &a.rows),
        phaseflow_cli::output::render_csv(&b.headers, &b.rows)
    );
}

#[test]
fn zero_coupling_reduce_has_zero_diffusion_columns() {
    let text = r#"
[scenario]
id = "uncoupled"
kind = "reduce"
t_end = 2.0
n_samples = 9

[model.coupled_pair]
omega1 = 1.1
omega2 = 0.7

[reservoir]
f = [[0.5, 0.0], [0.0, 0.5]]
"#;
    let cfg = parse_config(text).unwrap();
    let outcome = execute(&cfg).unwrap();
    let csv = phaseflow_cli::output::render_csv(&outcome.headers, &outcome.rows);
    for col in ["D_p1_p1", "D_p1_x1", "D_x1_x1", "K_p1", "K_x1"] {
        for v in csv_column(&csv, col) {
            assert!(v.abs() < 1e-12, "{col} should vanish, got {v}");
        }
    }
}

#[test]
fn config_errors_are_rejected() {
    for (text, needle) in [
        (
            "[scenario]\nid = \"x\"\nkind = \"closed\"\nt_end = 1.0\nn_samples = 5\n[model]\n",
            "exactly one model",
        ),
        (
            "[scenario]\nid = \"x\"\nkind = \"closed\"\nt_end = 1.0\nn_samples = 5\n\
             [model.bateman]\nomega0 = 1.0\ngamma = 0.1\ntypo_key = 2.0\n",
            "unknown field",
        ),
        (
            "[scenario]\nid = \"x\"\nkind = \"closed\"\nt_end = -1.0\nn_samples = 5\n\
             [model.bateman]\nomega0 = 1.0\ngamma = 0.1\n",
            "t_end",
        ),
        (
            "[scenario]\nid = \"x\"\nkind = \"steady-state\"\n\
             [model.bateman]\nomega0 = 1.0\ngamma = 0.1\n",
            "steady-state",
        ),
    ] {
        match parse_config(text) {
            Err(CliError::Config(msg)) => {
                assert!(msg.contains(needle), "message {msg:?} should mention {needle:?}")
            }
            other => panic!("expected config error for {text:?}, got {other:?}"),
        }
    }
}

#[test]
fn magnetic_steady_state_matches_equilibrium_covariance() {
    let text = r#"
[scenario]
id = "magnetic-eq"
kind = "steady-state"

[model.magnetic]
omega0 = 1.0
omega_c = 0.8
gamma_plus = 0.15
gamma_minus = 0.05
beta = 2.0
"#;
    let cfg = parse_config(text).unwrap();
    let outcome = execute(&cfg).unwrap();
    let spec = phaseflow_cli::config::magnetic_spec(cfg.model.magnetic.as_ref().unwrap(), 1.0);
    let model = phaseflow::models::magnetic_model(&spec).unwrap();
    let m_eq = model.m_eq.unwrap();
    let got = outcome.report.outputs["steady_cov_pi_x_pi_x"];
    assert!((got - m_eq[(0, 0)]).abs() < 1e-9 * m_eq[(0, 0)].abs());
    assert!(outcome.report.outputs["steady_mean_x"].abs() < 1e-12);
}

#[test]
fn sweep_crosses_the_instability_threshold() {
    let text = r#"
[scenario]
id = "pair-sweep"
kind = "closed"
t_end = 0.5
n_samples = 3

[model.coupled_pair]
omega1 = 1.0
omega2 = 1.0
g_xx = 0.5
"#;
    let dir = tempfile::tempdir().unwrap();
    let values = parse_values("0.5:1.5:5").unwrap();
    let (headers, rows) =
        run_sweep(text, "model.coupled_pair.g_xx", &values, dir.path()).unwrap();
    let col = headers.iter().position(|h| h == "max_abs_im_omega").unwrap();
    // threshold g_xx² = ω₁²ω₂² = 1: below it both normal frequencies are real
    assert!(rows[0][col].abs() < 1e-12); // g_xx = 0.5
    assert!(rows[1][col].abs() < 1e-12); // g_xx = 0.75
    assert!(rows[4][col] > 0.1); // g_xx = 1.5, one mode grows
    assert!(dir.path().join("pair-sweep.sweep.csv").exists());
}

#[test]
fn binary_runs_a_scenario_and_reports_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("closed.toml");
    std::fs::write(
        &cfg_path,
        "[scenario]\nid = \"osc\"\nkind = \"closed\"\nt_end = 6.28\nn_samples = 5\n\
         [model.coupled_pair]\nomega1 = 1.0\nomega2 = 1.0\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_phaseflow"))
        .args(["run", cfg_path.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("osc.csv").exists());

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[scenario]\nid = \"b\"\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_phaseflow"))
        .args(["run", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn small_rwa_bath_relaxes_at_the_predicted_rate() {
    let text = r#"
[scenario]
id = "relax-small"
kind = "bath-relax"
t_end = 400.0
n_samples = 60

[model.bath]
omega0 = 1.0

[model.bath.rwa]
gamma = 0.01
n_modes = 81
half_width_rates = 8.0
"#;
    let cfg = parse_config(text).unwrap();
    let outcome = execute(&cfg).unwrap();
    let rate = outcome.report.outputs["fit_rate"];
    let predicted = outcome.report.outputs["predicted_rate"];
    assert!(
        (rate - predicted).abs() < 0.15 * predicted,
        "fit {rate} vs predicted {predicted}"
    );
}
