//! Scenario configuration: TOML sections mirroring the model constructors.
//! Unknown keys are hard errors; a typo in a coupling constant should never
//! silently produce physics.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use phaseflow::models::continuum::ContinuumBath;
use phaseflow::models::{BathMode, BathSpec, BatemanSpec, CoupledPairSpec, MagneticSpec};
use phaseflow::phase_space::{GaussianState, QuadraticModel, SymplecticForm};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    pub model: ModelSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub reservoir: ReservoirSection,
    #[serde(default)]
    pub checks: ChecksSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub id: String,
    pub kind: Kind,
    #[serde(default)]
    pub t_start: f64,
    pub t_end: Option<f64>,
    pub n_samples: Option<usize>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_hbar() -> f64 {
    1.0
}

fn default_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Closed,
    Reduce,
    FpEvolve,
    SteadyState,
    Check,
    BathRelax,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Closed => "closed",
            Kind::Reduce => "reduce",
            Kind::FpEvolve => "fp-evolve",
            Kind::SteadyState => "steady-state",
            Kind::Check => "check",
            Kind::BathRelax => "bath-relax",
        }
    }

    pub fn needs_time_grid(&self) -> bool {
        !matches!(self, Kind::SteadyState | Kind::Check)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub bateman: Option<BatemanConfig>,
    pub coupled_pair: Option<CoupledPairConfig>,
    pub bath: Option<BathConfig>,
    pub continuum: Option<ContinuumConfig>,
    pub magnetic: Option<MagneticConfig>,
    pub raw: Option<RawConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatemanConfig {
    pub omega0: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupledPairConfig {
    #[serde(default = "one")]
    pub m1: f64,
    #[serde(default = "one")]
    pub m2: f64,
    pub omega1: f64,
    pub omega2: f64,
    #[serde(default)]
    pub g_pp: f64,
    #[serde(default)]
    pub g_px: f64,
    #[serde(default)]
    pub g_xp: f64,
    #[serde(default)]
    pub g_xx: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub omega0: f64,
    /// Explicit mode table; may be empty when `rwa` generates the bath.
    #[serde(default)]
    pub modes: Vec<ModeConfig>,
    pub rwa: Option<RwaWindowConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub omega: f64,
    #[serde(default)]
    pub z: f64,
    #[serde(default)]
    pub v: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub g: f64,
    /// Symmetrized variance; defaults to the ground state ħ/2ω.
    pub f: Option<f64>,
    /// Temperature shortcut, mutually exclusive with `f`.
    pub k_t: Option<f64>,
}

/// Evenly spaced excitation-exchange bath around the oscillator frequency:
/// `n_modes` modes across `±half_width_rates·gamma`, couplings chosen so the
/// predicted weak-coupling decay rate is `gamma`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RwaWindowConfig {
    pub gamma: f64,
    pub n_modes: usize,
    #[serde(default = "default_half_width")]
    pub half_width_rates: f64,
    pub k_t: Option<f64>,
}

fn default_half_width() -> f64 {
    20.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumConfig {
    pub omega0: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub nu: f64,
    pub f: f64,
    pub profile: ContinuumProfile,
    #[serde(default)]
    pub z: f64,
    #[serde(default)]
    pub v: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContinuumProfile {
    /// All four couplings constant across the window.
    Flat,
    /// Excitation-exchange balance at every frequency: `v = −u`, `z = g/ω²`.
    Balanced,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagneticConfig {
    #[serde(default = "one")]
    pub m: f64,
    pub omega0: f64,
    pub omega_c: f64,
    pub gamma_plus: f64,
    #[serde(default)]
    pub gamma_minus: f64,
    /// Inverse temperature; `inf` is valid TOML and selects zero temperature.
    pub beta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub b: Vec<Vec<f64>>,
    pub c: Option<Vec<f64>>,
    pub n_sub: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub mean: Option<Vec<f64>>,
    pub cov: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirSection {
    pub f: Option<Vec<Vec<f64>>>,
    pub mean: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    #[serde(default = "default_true")]
    pub admissibility: bool,
    #[serde(default)]
    pub required: bool,
}

fn default_true() -> bool {
    true
}

impl Default for ChecksSection {
    fn default() -> Self {
        ChecksSection { admissibility: true, required: false }
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig =
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ScenarioConfig) -> Result<()> {
    let m = &cfg.model;
    let present = [
        m.bateman.is_some(),
        m.coupled_pair.is_some(),
        m.bath.is_some(),
        m.continuum.is_some(),
        m.magnetic.is_some(),
        m.raw.is_some(),
    ]
    .iter()
    .filter(|&&p| p)
    .count();
    if present != 1 {
        return Err(CliError::Config(format!(
            "model: exactly one model must be specified, found {present}"
        )));
    }
    if cfg.scenario.id.is_empty() {
        return Err(CliError::Config("scenario.id: must be nonempty".into()));
    }
    if !(cfg.scenario.hbar > 0.0) {
        return Err(CliError::Config("scenario.hbar: must be positive".into()));
    }
    if cfg.scenario.kind.needs_time_grid() {
        let t_end = cfg
            .scenario
            .t_end
            .ok_or_else(|| CliError::Config("scenario.t_end: required for this kind".into()))?;
        if !(t_end > cfg.scenario.t_start) {
            return Err(CliError::Config("scenario.t_end: must exceed t_start".into()));
        }
        let n = cfg
            .scenario
            .n_samples
            .ok_or_else(|| CliError::Config("scenario.n_samples: required for this kind".into()))?;
        if n < 2 {
            return Err(CliError::Config("scenario.n_samples: must be at least 2".into()));
        }
    }
    if let Some(bath) = &m.bath {
        if bath.modes.is_empty() && bath.rwa.is_none() {
            return Err(CliError::Config(
                "model.bath: needs explicit modes or an rwa window".into(),
            ));
        }
        for (i, mode) in bath.modes.iter().enumerate() {
            if mode.f.is_some() && mode.k_t.is_some() {
                return Err(CliError::Config(format!(
                    "model.bath.modes[{i}]: f and k_t are mutually exclusive"
                )));
            }
        }
    }
    match cfg.scenario.kind {
        Kind::Closed | Kind::Reduce => {
            if m.continuum.is_some() || m.magnetic.is_some() {
                return Err(CliError::Config(format!(
                    "scenario.kind: {} needs a closed-system model",
                    cfg.scenario.kind.as_str()
                )));
            }
        }
        Kind::SteadyState => {
            if m.continuum.is_none() && m.magnetic.is_none() {
                return Err(CliError::Config(
                    "scenario.kind: steady-state needs a constant-coefficient model \
                     (continuum or magnetic)"
                        .into(),
                ));
            }
        }
        Kind::BathRelax => {
            if m.bath.is_none() {
                return Err(CliError::Config(
                    "scenario.kind: bath-relax needs model.bath".into(),
                ));
            }
            if cfg.scenario.t_start != 0.0 {
                return Err(CliError::Config(
                    "scenario.t_start: bath-relax trajectories start at t = 0".into(),
                ));
            }
        }
        _ => {}
    }
    Ok(())
}

pub fn time_grid(cfg: &ScenarioConfig) -> Vec<f64> {
    let n = cfg.scenario.n_samples.unwrap_or(2);
    let (a, b) = (cfg.scenario.t_start, cfg.scenario.t_end.unwrap_or(cfg.scenario.t_start));
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

pub fn bath_spec(bath: &BathConfig, hbar: f64) -> Result<BathSpec> {
    let mut modes = Vec::new();
    for mode in &bath.modes {
        let f = match (mode.f, mode.k_t) {
            (Some(f), _) => f,
            (None, Some(kt)) => phaseflow::models::thermal_f(mode.omega, kt, hbar),
            (None, None) => hbar / (2.0 * mode.omega),
        };
        modes.push(BathMode {
            omega: mode.omega,
            z: mode.z,
            v: mode.v,
            u: mode.u,
            g: mode.g,
            f,
        });
    }
    if let Some(rwa) = &bath.rwa {
        if rwa.n_modes < 2 {
            return Err(CliError::Config("model.bath.rwa.n_modes: need at least 2".into()));
        }
        let half = rwa.half_width_rates * rwa.gamma;
        let d_omega = 2.0 * half / (rwa.n_modes - 1) as f64;
        // γ = πν₀Δ₀ with ν₀ = 1/δω fixes the coupling amplitude
        let delta0 = rwa.gamma * d_omega / std::f64::consts::PI;
        let u = delta0.sqrt();
        for k in 0..rwa.n_modes {
            let omega = bath.omega0 - half + d_omega * k as f64;
            if !(omega > 0.0) {
                return Err(CliError::Config(
                    "model.bath.rwa: window reaches non-positive frequencies".into(),
                ));
            }
            let f = match rwa.k_t {
                Some(kt) => phaseflow::models::thermal_f(omega, kt, hbar),
                None => hbar / (2.0 * omega),
            };
            modes.push(BathMode { omega, z: 0.0, v: -u, u, g: 0.0, f });
        }
    }
    let spec = BathSpec { modes, hbar };
    spec.validate().map_err(CliError::Numerical)?;
    Ok(spec)
}

/// Build the closed-system model for kinds that evolve the full flow.
pub fn build_quadratic(cfg: &ScenarioConfig) -> Result<QuadraticModel> {
    let hbar = cfg.scenario.hbar;
    let m = &cfg.model;
    if let Some(b) = &m.bateman {
        let spec = BatemanSpec { omega0: b.omega0, gamma: b.gamma, hbar };
        return Ok(phaseflow::models::bateman_model(&spec)?);
    }
    if let Some(c) = &m.coupled_pair {
        let spec = CoupledPairSpec {
            m1: c.m1,
            m2: c.m2,
            omega1: c.omega1,
            omega2: c.omega2,
            g_pp: c.g_pp,
            g_px: c.g_px,
            g_xp: c.g_xp,
            g_xx: c.g_xx,
            hbar,
        };
        return Ok(phaseflow::models::coupled_pair(&spec)?);
    }
    if let Some(b) = &m.bath {
        let spec = bath_spec(b, hbar)?;
        return Ok(phaseflow::models::bath_model(b.omega0, &spec)?);
    }
    if let Some(r) = &m.raw {
        let n = r.b.len();
        if n == 0 || r.b.iter().any(|row| row.len() != n) || n % 2 != 0 {
            return Err(CliError::Config("model.raw.b: must be square with even size".into()));
        }
        let b = DMatrix::from_fn(n, n, |i, j| r.b[i][j]);
        let c = match &r.c {
            Some(c) if c.len() == n => DVector::from_column_slice(c),
            Some(_) => return Err(CliError::Config("model.raw.c: wrong length".into())),
            None => DVector::zeros(n),
        };
        let n_dof = n / 2;
        if r.n_sub == 0 || r.n_sub > n_dof {
            return Err(CliError::Config("model.raw.n_sub: out of range".into()));
        }
        let sigma = SymplecticForm::standard_split(r.n_sub, n_dof - r.n_sub);
        return Ok(QuadraticModel::new(b, c, sigma, r.n_sub, hbar)?);
    }
    Err(CliError::Config(format!(
        "scenario.kind: {} needs a closed-system model",
        cfg.scenario.kind.as_str()
    )))
}

pub fn continuum_bath(c: &ContinuumConfig) -> ContinuumBath {
    let (z0, v0, u0, g0, nu0, f0) = (c.z, c.v, c.u, c.g, c.nu, c.f);
    let (z, v): (Arc<dyn Fn(f64) -> f64 + Send + Sync>, Arc<dyn Fn(f64) -> f64 + Send + Sync>) =
        match c.profile {
            ContinuumProfile::Flat => (Arc::new(move |_| z0), Arc::new(move |_| v0)),
            ContinuumProfile::Balanced => {
                (Arc::new(move |w| g0 / (w * w)), Arc::new(move |_| -u0))
            }
        };
    ContinuumBath {
        nu: Arc::new(move |_| nu0),
        z,
        v,
        u: Arc::new(move |_| u0),
        g: Arc::new(move |_| g0),
        f: Arc::new(move |_| f0),
        omega_min: c.omega_min,
        omega_max: c.omega_max,
    }
}

pub fn magnetic_spec(m: &MagneticConfig, hbar: f64) -> MagneticSpec {
    MagneticSpec {
        m: m.m,
        omega0: m.omega0,
        omega_c: m.omega_c,
        gamma_plus: m.gamma_plus,
        gamma_minus: m.gamma_minus,
        beta: m.beta,
        hbar,
    }
}

/// Initial Gaussian state of dimension `dim`: explicit moments when given,
/// otherwise zero mean with the isotropic ħ/2 covariance.
pub fn initial_state(
    init: &InitialSection,
    dim: usize,
    hbar: f64,
    sigma: &SymplecticForm,
) -> Result<GaussianState> {
    let mean = match &init.mean {
        Some(m) if m.len() == dim => DVector::from_column_slice(m),
        Some(m) => {
            return Err(CliError::Config(format!(
                "initial.mean: has {} components, model needs {dim}",
                m.len()
            )))
        }
        None => DVector::zeros(dim),
    };
    let cov = match &init.cov {
        Some(c) => {
            if c.len() != dim || c.iter().any(|row| row.len() != dim) {
                return Err(CliError::Config(format!("initial.cov: must be {dim}x{dim}")));
            }
            DMatrix::from_fn(dim, dim, |i, j| c[i][j])
        }
        None => DMatrix::identity(dim, dim) * (hbar / 2.0),
    };
    Ok(GaussianState::new(mean, cov, hbar, sigma)?)
}

pub fn reservoir_matrices(
    res: &ReservoirSection,
    dim_res: usize,
) -> Result<(Option<DMatrix<f64>>, Option<DVector<f64>>)> {
    let f = match &res.f {
        Some(rows) => {
            if rows.len() != dim_res || rows.iter().any(|r| r.len() != dim_res) {
                return Err(CliError::Config(format!(
                    "reservoir.f: must be {dim_res}x{dim_res}"
                )));
            }
            Some(DMatrix::from_fn(dim_res, dim_res, |i, j| rows[i][j]))
        }
        None => None,
    };
    let mean = match &res.mean {
        Some(m) if m.len() == dim_res => Some(DVector::from_column_slice(m)),
        Some(m) => {
            return Err(CliError::Config(format!(
                "reservoir.mean: has {} components, reservoir needs {dim_res}",
                m.len()
            )))
        }
        None => None,
    };
    Ok((f, mean))
}
