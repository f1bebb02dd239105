//! Oscillator of frequency ω₀ coupled to a discrete reservoir of unit-mass
//! oscillators through the general bilinear interaction
//! `Σᵢ (zᵢ pᵢp₀ + vᵢ pᵢx₀ + uᵢ xᵢp₀ + gᵢ xᵢx₀)`, plus the first-order
//! (weak-coupling) drift and diffusion corrections as explicit finite sums.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::phase_space::{GaussianState, QuadraticModel, SymplecticForm};

/// Relative detuning below which the resonant-kernel limits are used.
const RESONANCE_EPS: f64 = 1e-9;

/// One reservoir mode: frequency, the four coupling constants, and the
/// thermal variance `f = ⟨x²⟩` of the mode.
#[derive(Debug, Clone, Copy)]
pub struct BathMode {
    pub omega: f64,
    pub z: f64,
    pub v: f64,
    pub u: f64,
    pub g: f64,
    pub f: f64,
}

impl BathMode {
    /// `Δᵢ = gᵢzᵢ − uᵢvᵢ`.
    pub fn delta(&self) -> f64 {
        self.g * self.z - self.u * self.v
    }

    /// `κᵢ = ωᵢzᵢvᵢ + gᵢuᵢ/ωᵢ`.
    pub fn kappa(&self) -> f64 {
        self.omega * self.z * self.v + self.g * self.u / self.omega
    }

    /// `Gᵢ = ωᵢvᵢ² + gᵢ²/ωᵢ`.
    pub fn big_g(&self) -> f64 {
        self.omega * self.v * self.v + self.g * self.g / self.omega
    }

    /// `Zᵢ = ωᵢzᵢ² + uᵢ²/ωᵢ`.
    pub fn big_z(&self) -> f64 {
        self.omega * self.z * self.z + self.u * self.u / self.omega
    }
}

#[derive(Debug, Clone)]
pub struct BathSpec {
    pub modes: Vec<BathMode>,
    pub hbar: f64,
}

impl BathSpec {
    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::InvalidModel("reservoir needs at least one mode".into()));
        }
        for m in &self.modes {
            if !(m.omega > 0.0) {
                return Err(Error::InvalidModel(format!(
                    "mode frequency {} must be positive",
                    m.omega
                )));
            }
            if m.f < self.hbar / (2.0 * m.omega) * (1.0 - 1e-12) {
                return Err(Error::InadmissibleState(format!(
                    "mode variance f = {} below the vacuum value ħ/2ω = {}",
                    m.f,
                    self.hbar / (2.0 * m.omega)
                )));
            }
        }
        Ok(())
    }
}

/// Equilibrium mode variance `f = (ħ/2ω) coth(ħω/2kT)`.
pub fn thermal_f(omega: f64, k_t: f64, hbar: f64) -> f64 {
    let u = hbar * omega / (2.0 * k_t);
    hbar / (2.0 * omega) / u.tanh()
}

/// Quasi-equilibrium mixture of independent sub-thermostats:
/// `f = (ħ/2ω) Σ αᵢ coth(ħω/2kTᵢ)` with weights summing to one.
pub fn mixture_f(omega: f64, components: &[(f64, f64)], hbar: f64) -> Result<f64> {
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    if components.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidModel(format!(
            "mixture weights must be nonnegative and sum to 1 (sum = {total})"
        )));
    }
    Ok(components
        .iter()
        .map(|(w, k_t)| w * thermal_f(omega, *k_t, hbar))
        .sum())
}

/// Build the `(2 + 2M)`-dimensional closed model, subsystem first, reservoir
/// block ordered as `(p₁..p_M, x₁..x_M)`.
pub fn bath_model(omega0: f64, spec: &BathSpec) -> Result<QuadraticModel> {
    spec.validate()?;
    if !(omega0 > 0.0) {
        return Err(Error::InvalidModel("ω₀ must be positive".into()));
    }
    let m = spec.modes.len();
    let dim = 2 + 2 * m;
    let mut b = DMatrix::<f64>::zeros(dim, dim);
    b[(0, 0)] = 1.0;
    b[(1, 1)] = omega0 * omega0;
    for (i, mode) in spec.modes.iter().enumerate() {
        let (pi, xi) = (2 + i, 2 + m + i);
        b[(pi, pi)] = 1.0;
        b[(xi, xi)] = mode.omega * mode.omega;
        b[(0, pi)] = mode.z;
        b[(pi, 0)] = mode.z;
        b[(1, pi)] = mode.v;
        b[(pi, 1)] = mode.v;
        b[(0, xi)] = mode.u;
        b[(xi, 0)] = mode.u;
        b[(1, xi)] = mode.g;
        b[(xi, 1)] = mode.g;
    }
    let sigma = SymplecticForm::standard_split(1, m);
    QuadraticModel::new(b, DVector::zeros(dim), sigma, 1, spec.hbar)
}

/// Stationary reservoir covariance `F = diag(ωᵢ²fᵢ) ⊕ diag(fᵢ)`.
pub fn reservoir_covariance(spec: &BathSpec) -> DMatrix<f64> {
    let m = spec.modes.len();
    let mut f = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for (i, mode) in spec.modes.iter().enumerate() {
        f[(i, i)] = mode.omega * mode.omega * mode.f;
        f[(m + i, m + i)] = mode.f;
    }
    f
}

/// The oscillatory kernels of the first-order sums:
/// `S± = sin((ωᵢ−ω₀)t)/(ωᵢ−ω₀) ± sin((ωᵢ+ω₀)t)/(ωᵢ+ω₀)` and
/// `C± = (1−cos((ωᵢ−ω₀)t))/(ωᵢ−ω₀) ± (1−cos((ωᵢ+ω₀)t))/(ωᵢ+ω₀)`,
/// with the removable-singularity limits `t` and `0` on resonance.
fn kernels(omega_i: f64, omega0: f64, t: f64) -> (f64, f64, f64, f64) {
    let (dm, dp) = (omega_i - omega0, omega_i + omega0);
    let (s_minus, c_minus) = if dm.abs() < RESONANCE_EPS * omega0 {
        (t, 0.0)
    } else {
        ((dm * t).sin() / dm, (1.0 - (dm * t).cos()) / dm)
    };
    let s_sum = (dp * t).sin() / dp;
    let c_sum = (1.0 - (dp * t).cos()) / dp;
    (
        s_minus + s_sum, // S⁺
        s_minus - s_sum, // S⁻
        c_minus + c_sum, // C⁺
        c_minus - c_sum, // C⁻
    )
}

/// First-order drift correction `μ = A − 𝒜₁₁` and diffusion matrix `D` of
/// the reduced oscillator dynamics, as explicit finite sums over the modes.
/// Valid for weak couplings; no smallness check is performed.
pub fn perturbative_mu_d(omega0: f64, spec: &BathSpec, t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut mu = DMatrix::<f64>::zeros(2, 2);
    let mut d = DMatrix::<f64>::zeros(2, 2);
    for mode in &spec.modes {
        let (sp, sm, cp, cm) = kernels(mode.omega, omega0, t);
        let (dl, ka, gg, zz) = (mode.delta(), mode.kappa(), mode.big_g(), mode.big_z());
        mu[(0, 0)] += 0.5 * (-dl * sp - gg / omega0 * sm + ka * cp);
        mu[(0, 1)] += 0.5 * (omega0 * ka * sm + omega0 * dl * cm + gg * cp);
        mu[(1, 0)] += 0.5 * (ka / omega0 * sm - dl / omega0 * cm - zz * cp);
        mu[(1, 1)] += 0.5 * (-dl * sp - omega0 * zz * sm - ka * cp);

        let wf = mode.omega * mode.f;
        d[(0, 0)] += 0.5 * wf * (gg * sp + omega0 * dl * sm - omega0 * ka * cm);
        d[(1, 1)] += 0.5 * wf * (zz * sp + dl / omega0 * sm + ka / omega0 * cm);
        d[(0, 1)] += 0.5 * wf * (-ka * sp + 0.5 / omega0 * (omega0 * omega0 * zz - gg) * cm);
    }
    d[(1, 0)] = d[(0, 1)];
    (mu, d)
}

/// Exact relaxation trajectory of the subsystem moments over a uniform time
/// grid `t_k = k·dt`, for a reservoir in its stationary state with zero mean.
/// Returns `(t, subsystem mean, subsystem covariance)` per step.
///
/// One matrix exponential of the full drift is computed for the step `dt`;
/// the subsystem marginal then needs only the top two rows of `R(t_k)`,
/// which are advanced by row-times-matrix products. This keeps the cost at
/// `O(steps · (2M)²)` and handles reservoirs with hundreds of modes.
pub fn bath_relax_trajectory(
    omega0: f64,
    spec: &BathSpec,
    sub0: &GaussianState,
    dt: f64,
    steps: usize,
) -> Result<Vec<(f64, DVector<f64>, DMatrix<f64>)>> {
    if sub0.dim() != 2 {
        return Err(Error::WrongDimension { expected: 1, got: sub0.dim() / 2 });
    }
    let model = bath_model(omega0, spec)?;
    let (a, _) = crate::closed::drift_from_hamiltonian(&model);
    let dim = model.dim();
    let r_step = linalg::matrix_exp(&(&a * dt));

    // full initial covariance blkdiag(cov_Q, F) and mean (mean_Q, 0)
    let f = reservoir_covariance(spec);
    let mut cov_full = DMatrix::<f64>::zeros(dim, dim);
    cov_full.view_mut((0, 0), (2, 2)).copy_from(sub0.cov());
    cov_full.view_mut((2, 2), (dim - 2, dim - 2)).copy_from(&f);
    let mut mean = DVector::<f64>::zeros(dim);
    mean.rows_mut(0, 2).copy_from(sub0.mean());

    // top two rows of R(t_k)
    let mut rows = DMatrix::<f64>::zeros(2, dim);
    rows[(0, 0)] = 1.0;
    rows[(1, 1)] = 1.0;

    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let cov_sub = &rows * &cov_full * rows.transpose();
        out.push((k as f64 * dt, mean.rows(0, 2).into_owned(), linalg::sym(&cov_sub)));
        if k < steps {
            mean = &r_step * mean;
            rows = &rows * &r_step;
        }
    }
    Ok(out)
}
