//! Scenario execution: build the model, drive the requested computation,
//! collect the time series and the report.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use phaseflow::closed::{evolve_gaussian, propagate};
use phaseflow::fokker_planck::{admissibility, evolve_moments, steady_state, FPGenerator};
use phaseflow::models::continuum::continuum_fp;
use phaseflow::models::{
    bath_relax_trajectory, magnetic_model, normal_frequencies, reservoir_covariance, rwa_gate,
};
use phaseflow::ode::OdeOptions;
use phaseflow::phase_space::{purity, GaussianState, SymplecticForm};
use phaseflow::reduction::{effective_fp, effective_generator, reduce, split_blocks};
use phaseflow::Error;

use crate::config::{self, Kind, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::fit::fit_decay;
use crate::output;
use crate::report::{CheckVerdict, RunReport};

pub struct ScenarioOutcome {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub report: RunReport,
}

pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunReport> {
    let outcome = execute(cfg)?;
    write_outcome(&outcome, cfg, out_dir)?;
    Ok(outcome.report)
}

pub fn write_outcome(outcome: &ScenarioOutcome, cfg: &ScenarioConfig, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let id = &cfg.scenario.id;
    std::fs::write(
        out_dir.join(format!("{id}.csv")),
        output::render_csv(&outcome.headers, &outcome.rows),
    )?;
    let json = serde_json::to_string_pretty(&outcome.report)
        .map_err(|e| CliError::Config(format!("report serialization: {e}")))?;
    std::fs::write(out_dir.join(format!("{id}.report.json")), json)?;
    Ok(())
}

pub fn execute(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let start = Instant::now();
    let mut outcome = match cfg.scenario.kind {
        Kind::Closed => run_closed(cfg),
        Kind::Reduce => run_reduce(cfg),
        Kind::FpEvolve => run_fp_evolve(cfg),
        Kind::SteadyState => run_steady_state(cfg),
        Kind::Check => run_check(cfg),
        Kind::BathRelax => run_bath_relax(cfg),
    }?;
    add_model_outputs(cfg, &mut outcome.report.outputs);
    outcome.report.wall_time_s = start.elapsed().as_secs_f64();
    outcome.report.finish();
    Ok(outcome)
}

/// Scalars derivable from the model alone, useful as sweep columns.
fn add_model_outputs(cfg: &ScenarioConfig, out: &mut BTreeMap<String, f64>) {
    if let Some(c) = &cfg.model.coupled_pair {
        let spec = phaseflow::models::CoupledPairSpec {
            m1: c.m1,
            m2: c.m2,
            omega1: c.omega1,
            omega2: c.omega2,
            g_pp: c.g_pp,
            g_px: c.g_px,
            g_xp: c.g_xp,
            g_xx: c.g_xx,
            hbar: cfg.scenario.hbar,
        };
        let freqs = normal_frequencies(&spec);
        out.insert("omega_plus_re".into(), freqs[0].re);
        out.insert("omega_plus_im".into(), freqs[0].im);
        out.insert("omega_minus_re".into(), freqs[2].re);
        out.insert("omega_minus_im".into(), freqs[2].im);
        // nonzero only past the instability threshold
        out.insert(
            "max_abs_im_omega".into(),
            freqs[0].im.abs().max(freqs[2].im.abs()),
        );
    }
    if let Some(m) = &cfg.model.magnetic {
        let spec = config::magnetic_spec(m, cfg.scenario.hbar);
        if let Ok(model) = magnetic_model(&spec) {
            out.insert("d_pi".into(), model.d_pi);
            out.insert("d_a".into(), model.d_a);
            out.insert("d_rho".into(), model.d_rho);
            out.insert("alpha".into(), spec.alpha());
            out.insert("eta".into(), spec.eta());
            out.insert("epsilon".into(), spec.epsilon());
        }
    }
}

fn moment_row(t: f64, state: &GaussianState, warnings: &mut Vec<String>) -> Vec<f64> {
    let mut row = vec![t];
    output::push_moments(&mut row, state.mean(), state.cov());
    match purity(state) {
        Ok(p) => row.push(p),
        Err(_) => {
            if !warnings.iter().any(|w| w.starts_with("purity undefined")) {
                warnings.push(format!("purity undefined from t = {t:.6} (sub-vacuum covariance)"));
            }
            row.push(f64::NAN);
        }
    }
    row.push(state.admissibility().min_eigenvalue);
    row
}

fn state_check(report: &mut RunReport, cfg: &ScenarioConfig, name: &str, state: &GaussianState) {
    if cfg.checks.admissibility {
        report.checks.push(CheckVerdict::from_report(
            name,
            cfg.checks.required,
            state.admissibility(),
        ));
    }
}

fn run_closed(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let model = config::build_quadratic(cfg)?;
    let (n_sub, n_dof) = (model.n_sub(), model.n_dof());
    let labels = output::coord_labels(n_sub, n_dof - n_sub);
    let headers = output::moment_headers(&labels);
    let state0 = config::initial_state(&cfg.initial, model.dim(), cfg.scenario.hbar, model.sigma())?;

    let mut report = RunReport::new(&cfg.scenario.id, cfg.scenario.kind.as_str());
    let mut rows = Vec::new();
    let mut last = state0.clone();
    for &t in &config::time_grid(cfg) {
        let prop = propagate(&model, t, cfg.scenario.tol)?;
        last = evolve_gaussian(&prop, &state0)?;
        rows.push(moment_row(t, &last, &mut report.warnings));
    }
    state_check(&mut report, cfg, "final_state_admissibility", &last);
    report.outputs.insert("final_purity".into(), *rows.last().unwrap().iter().nth_back(1).unwrap());
    report
        .outputs
        .insert("final_min_eig_phi".into(), last.admissibility().min_eigenvalue);
    Ok(ScenarioOutcome { headers, rows, report })
}

fn reservoir_for(
    cfg: &ScenarioConfig,
    dim_res: usize,
) -> Result<(DMatrix<f64>, Option<DVector<f64>>)> {
    let (f_opt, mean) = config::reservoir_matrices(&cfg.reservoir, dim_res)?;
    let f = match f_opt {
        Some(f) => f,
        None => match &cfg.model.bath {
            Some(b) => reservoir_covariance(&config::bath_spec(b, cfg.scenario.hbar)?),
            None => {
                return Err(CliError::Config(
                    "reservoir.f: required unless the model is a bath (which carries \
                     its own equilibrium covariance)"
                        .into(),
                ))
            }
        },
    };
    Ok((f, mean))
}

fn run_reduce(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let model = config::build_quadratic(cfg)?;
    let (n_sub, n_dof) = (model.n_sub(), model.n_dof());
    if n_sub >= n_dof {
        return Err(CliError::Config(
            "model: reduce needs a reservoir (n_sub < total degrees of freedom)".into(),
        ));
    }
    let dim_sub = 2 * n_sub;
    let (f, gamma) = reservoir_for(cfg, model.dim() - dim_sub)?;
    let sigma_sub = model.sigma().top_left(n_sub);
    let sub0 = config::initial_state(&cfg.initial, dim_sub, cfg.scenario.hbar, &sigma_sub)?;

    let labels = output::coord_labels(n_sub, 0);
    let mut headers = output::moment_headers(&labels);
    headers.extend(output::coefficient_headers(&labels));

    let mut report = RunReport::new(&cfg.scenario.id, cfg.scenario.kind.as_str());
    let mut rows = Vec::new();
    let mut singular_times = Vec::new();
    let mut last = sub0.clone();
    for &t in &config::time_grid(cfg) {
        let blocks = split_blocks(&propagate(&model, t, cfg.scenario.tol)?, n_sub)?;
        last = reduce(&blocks, &f, gamma.as_ref())?.apply(&sub0)?;
        let mut row = moment_row(t, &last, &mut report.warnings);
        match effective_fp(&blocks, &f, gamma.as_ref()) {
            Ok(fp) => output::push_coefficients(&mut row, &fp.a, &fp.k, &fp.d),
            Err(Error::SingularR11 { .. }) => {
                singular_times.push(t);
                output::nan_coefficients(&mut row, dim_sub);
            }
            Err(e) => return Err(e.into()),
        }
        rows.push(row);
    }
    if !singular_times.is_empty() {
        report.warnings.push(format!(
            "effective drift singular (reduced propagator not invertible) at t = {singular_times:.4?}"
        ));
    }
    state_check(&mut report, cfg, "final_state_admissibility", &last);
    report
        .outputs
        .insert("final_min_eig_phi".into(), last.admissibility().min_eigenvalue);
    Ok(ScenarioOutcome { headers, rows, report })
}

/// The generator and coordinate labels for coefficient-based kinds.
fn build_generator(
    cfg: &ScenarioConfig,
    report: &mut RunReport,
) -> Result<(FPGenerator, Vec<String>, Option<GaussianState>)> {
    if let Some(m) = &cfg.model.magnetic {
        let spec = config::magnetic_spec(m, cfg.scenario.hbar);
        let model = magnetic_model(&spec)?;
        let default_state = model.m_eq.clone().map(|cov| {
            GaussianState::new(DVector::zeros(4), cov, cfg.scenario.hbar, model.generator.sigma())
                .expect("equilibrium covariance is a valid Gaussian state")
        });
        return Ok((model.generator, output::magnetic_labels(), default_state));
    }
    if let Some(c) = &cfg.model.continuum {
        let bath = config::continuum_bath(c);
        let (mu, d, gamma) = continuum_fp(&bath, c.omega0)?;
        report.outputs.insert("gamma".into(), gamma);
        for (name, v) in [
            ("mu_1_1", mu[(0, 0)]),
            ("mu_1_2", mu[(0, 1)]),
            ("mu_2_1", mu[(1, 0)]),
            ("mu_2_2", mu[(1, 1)]),
            ("d_1_1", d[(0, 0)]),
            ("d_1_2", d[(0, 1)]),
            ("d_2_2", d[(1, 1)]),
        ] {
            report.outputs.insert(name.into(), v);
        }
        let w2 = c.omega0 * c.omega0;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -w2, 1.0, 0.0]) + mu;
        let gen = FPGenerator::constant(
            a,
            DVector::zeros(2),
            d,
            SymplecticForm::standard(1),
            cfg.scenario.hbar,
        )?;
        return Ok((gen, output::coord_labels(1, 0), None));
    }
    let model = config::build_quadratic(cfg)?;
    let n_sub = model.n_sub();
    if n_sub >= model.n_dof() {
        return Err(CliError::Config(
            "model: the effective generator needs a reservoir to average over".into(),
        ));
    }
    let (f, gamma) = reservoir_for(cfg, model.dim() - 2 * n_sub)?;
    let gen = effective_generator(&model, &f, gamma.as_ref(), cfg.scenario.tol)?;
    Ok((gen, output::coord_labels(n_sub, 0), None))
}

fn run_fp_evolve(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let mut report = RunReport::new(&cfg.scenario.id, cfg.scenario.kind.as_str());
    let (gen, labels, default_state) = build_generator(cfg, &mut report)?;
    let state0 = match (&cfg.initial.mean, &cfg.initial.cov, default_state) {
        (None, None, Some(st)) => st,
        _ => config::initial_state(&cfg.initial, gen.dim(), cfg.scenario.hbar, gen.sigma())?,
    };

    let mut headers = output::moment_headers(&labels);
    headers.extend(output::coefficient_headers(&labels));

    if cfg.checks.admissibility {
        let verdict = admissibility(&gen, cfg.scenario.t_start)?;
        report.checks.push(CheckVerdict::from_report(
            "generator_admissibility",
            cfg.checks.required,
            &verdict,
        ));
    }

    let grid = config::time_grid(cfg);
    let opts = OdeOptions {
        rtol: cfg.scenario.tol.max(1e-13),
        atol: cfg.scenario.tol.max(1e-13) * 1e-2,
        ..OdeOptions::default()
    };
    let states = evolve_moments(&gen, &state0, &grid, &opts)?;
    let mut rows = Vec::new();
    for (k, &t) in grid.iter().enumerate() {
        let mut row = moment_row(t, &states[k], &mut report.warnings);
        let (a, kv, d) = gen.at(t)?;
        output::push_coefficients(&mut row, &a, &kv, &d);
        rows.push(row);
    }
    let last = states.last().unwrap();
    state_check(&mut report, cfg, "final_state_admissibility", last);
    report
        .outputs
        .insert("final_min_eig_phi".into(), last.admissibility().min_eigenvalue);
    Ok(ScenarioOutcome { headers, rows, report })
}

fn run_steady_state(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let mut report = RunReport::new(&cfg.scenario.id, cfg.scenario.kind.as_str());
    let (gen, labels, _) = build_generator(cfg, &mut report)?;
    let st = steady_state(&gen)?;
    let headers = output::moment_headers(&labels);
    let rows = vec![moment_row(f64::INFINITY, &st, &mut report.warnings)];
    state_check(&mut report, cfg, "steady_state_admissibility", &st);
    for (i, l) in labels.iter().enumerate() {
        report.outputs.insert(format!("steady_mean_{l}"), st.mean()[i]);
        report.outputs.insert(format!("steady_cov_{l}_{l}"), st.cov()[(i, i)]);
    }
    report
        .outputs
        .insert("steady_min_eig_phi".into(), st.admissibility().min_eigenvalue);
    Ok(ScenarioOutcome { headers, rows, report })
}

fn run_check(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let mut report = RunReport::new(&cfg.scenario.id, cfg.scenario.kind.as_str());
    let (gen, _, _) = build_generator(cfg, &mut report)?;
    let verdict = admissibility(&gen, cfg.scenario.t_start)?;
    report.checks.push(CheckVerdict::from_report(
        "generator_admissibility",
        cfg.checks.required,
        &verdict,
    ));
    if gen.dim() == 2 {
        let (det_d, bound, passed) = phaseflow::min_diffusion_bound_1d(&gen)?;
        report.outputs.insert("det_d".into(), det_d);
        report.outputs.insert("diffusion_bound".into(), bound);
        report.outputs.insert("diffusion_bound_passed".into(), passed as u8 as f64);
    }
    if let Some(c) = &cfg.model.continuum {
        let bath = config::continuum_bath(c);
        let gate = rwa_gate(
            (bath.z)(c.omega0),
            (bath.v)(c.omega0),
            (bath.u)(c.omega0),
            (bath.g)(c.omega0),
            (bath.f)(c.omega0),
            (bath.nu)(c.omega0),
            c.omega0,
            cfg.scenario.hbar,
        );
        report.outputs.insert("gate_lhs".into(), gate.lhs);
        report.outputs.insert("gate_rhs".into(), gate.rhs);
        report.outputs.insert("gate_zero_t_defect".into(), gate.zero_t_defect);
        let scale = gate.lhs.abs().max(gate.rhs.abs()).max(1e-30);
        report.checks.push(CheckVerdict {
            name: "rwa_gate".into(),
            passed: gate.passed,
            required: cfg.checks.required,
            min_eigenvalue: gate.lhs - gate.rhs,
            scale,
            tolerance: 1e-10 * scale,
            boundary: (gate.lhs - gate.rhs).abs() <= 1e-10 * scale,
        });
    }
    // single-row CSV of the scalar outputs keeps every scenario file-shaped
    let headers: Vec<String> = report.outputs.keys().cloned().collect();
    let rows = vec![report.outputs.values().cloned().collect::<Vec<f64>>()];
    Ok(ScenarioOutcome { headers, rows, report })
}

fn run_bath_relax(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let bath = cfg.model.bath.as_ref().expect("validated");
    let spec = config::bath_spec(bath, cfg.scenario.hbar)?;
    let sigma_sub = SymplecticForm::standard(1);
    let mut init = cfg.initial.clone();
    if init.mean.is_none() {
        // a displaced oscillator; zero mean would leave nothing to decay
        init.mean = Some(vec![0.0, 1.0]);
    }
    let sub0 = config::initial_state(&init, 2, cfg.scenario.hbar, &sigma_sub)?;

    let grid = config::time_grid(cfg);
    let n = grid.len();
    let dt = grid[1] - grid[0];
    let traj = bath_relax_trajectory(bath.omega0, &spec, &sub0, dt, n - 1)?;

    let labels = output::coord_labels(1, 0);
    let mut headers = output::moment_headers(&labels);
    headers.push("amplitude".into());

    let mut report = RunReport::new(&cfg.scenario.id, cfg.scenario.kind.as_str());
    let mut rows = Vec::new();
    let mut amps = Vec::new();
    let mut last = sub0.clone();
    for (t, mean, cov) in traj {
        last = GaussianState::new(mean, cov, cfg.scenario.hbar, &sigma_sub)?;
        let amp =
            (last.mean()[0].powi(2) + (bath.omega0 * last.mean()[1]).powi(2)).sqrt();
        let mut row = moment_row(t, &last, &mut report.warnings);
        row.push(amp);
        amps.push(amp);
        rows.push(row);
    }
    state_check(&mut report, cfg, "final_state_admissibility", &last);

    match fit_decay(&grid, &amps) {
        Ok(fit) => {
            report.outputs.insert("fit_rate".into(), fit.rate);
            report.fits.insert("amplitude".into(), fit);
        }
        Err(e) => report.warnings.push(format!("amplitude fit skipped: {e}")),
    }
    if let Some(rwa) = &bath.rwa {
        report.outputs.insert("predicted_rate".into(), rwa.gamma);
    }
    Ok(ScenarioOutcome { headers, rows, report })
}
