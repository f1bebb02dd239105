//! Charged oscillator in a uniform magnetic field coupled to two rotating
//! reservoirs, one per circular polarization. The reduced dynamics of the
//! kinetic momenta and coordinates `(π_x, π_y, x, y)` is a constant-coefficient
//! Fokker-Planck equation whose drift and diffusion are given in closed form
//! for any inverse temperature, including `β = ∞`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fokker_planck::FPGenerator;
use crate::phase_space::SymplecticForm;

#[derive(Debug, Clone, Copy)]
pub struct MagneticSpec {
    pub m: f64,
    pub omega0: f64,
    /// Cyclotron frequency `eB/mc`.
    pub omega_c: f64,
    /// Damping rate fed by the co-rotating reservoir.
    pub gamma_plus: f64,
    /// Damping rate fed by the counter-rotating reservoir.
    pub gamma_minus: f64,
    /// Inverse temperature; `f64::INFINITY` selects the ground-state reservoir.
    pub beta: f64,
    pub hbar: f64,
}

impl MagneticSpec {
    /// Hybrid frequency `Ω = √(ω_c² + 4ω₀²)`.
    pub fn big_omega(&self) -> f64 {
        (self.omega_c * self.omega_c + 4.0 * self.omega0 * self.omega0).sqrt()
    }

    /// Circular eigenfrequencies `ω± = ½(Ω ± ω_c)`.
    pub fn omega_pm(&self) -> (f64, f64) {
        let om = self.big_omega();
        (0.5 * (om + self.omega_c), 0.5 * (om - self.omega_c))
    }

    /// Momentum friction coefficient `α = (γ₊ω₊ + γ₋ω₋)/Ω`.
    pub fn alpha(&self) -> f64 {
        let (wp, wm) = self.omega_pm();
        (self.gamma_plus * wp + self.gamma_minus * wm) / self.big_omega()
    }

    /// Coordinate friction coefficient `η = (γ₊ω₋ + γ₋ω₊)/Ω`.
    pub fn eta(&self) -> f64 {
        let (wp, wm) = self.omega_pm();
        (self.gamma_plus * wm + self.gamma_minus * wp) / self.big_omega()
    }

    /// Cross-coupling `ε = (γ₋ − γ₊)/Ω`.
    pub fn epsilon(&self) -> f64 {
        (self.gamma_minus - self.gamma_plus) / self.big_omega()
    }

    /// Build a spec from reservoir data at the two circular resonances:
    /// densities of states `ν±` and coupling amplitudes `δ±`, giving
    /// `γ± = πν±|δ±|²`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_bath_data(
        m: f64,
        omega0: f64,
        omega_c: f64,
        nu_plus: f64,
        delta_plus: f64,
        nu_minus: f64,
        delta_minus: f64,
        beta: f64,
        hbar: f64,
    ) -> MagneticSpec {
        let pi = std::f64::consts::PI;
        MagneticSpec {
            m,
            omega0,
            omega_c,
            gamma_plus: pi * nu_plus * delta_plus * delta_plus,
            gamma_minus: pi * nu_minus * delta_minus * delta_minus,
            beta,
            hbar,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.hbar > 0.0) {
            return Err(Error::InvalidModel("mass and ħ must be positive".into()));
        }
        if !(self.omega0 >= 0.0 && self.omega_c > 0.0) {
            return Err(Error::InvalidModel(
                "need ω₀ ≥ 0 and a positive cyclotron frequency".into(),
            ));
        }
        if !(self.gamma_plus >= 0.0 && self.gamma_minus >= 0.0) {
            return Err(Error::InvalidModel("damping rates must be nonnegative".into()));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidModel("inverse temperature must be positive".into()));
        }
        if self.omega0 == 0.0 && self.gamma_minus != 0.0 {
            return Err(Error::InvalidModel(
                "without confinement the counter-rotating mode has zero frequency and \
                 cannot carry damping"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Symplectic form of the kinetic-momentum variables: `{π_x, π_y} = mω_c`
/// on top of the canonical pairs.
pub fn magnetic_symplectic(m: f64, omega_c: f64) -> Result<SymplecticForm> {
    let mo = m * omega_c;
    SymplecticForm::new(DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, -mo, 1.0, 0.0, //
            mo, 0.0, 0.0, 1.0, //
            -1.0, 0.0, 0.0, 0.0, //
            0.0, -1.0, 0.0, 0.0,
        ],
    ))
}

#[derive(Debug, Clone)]
pub struct MagneticModel {
    pub generator: FPGenerator,
    pub a: DMatrix<f64>,
    pub d: DMatrix<f64>,
    /// Momentum diffusion `D_π`.
    pub d_pi: f64,
    /// Momentum-coordinate cross diffusion `D_a`.
    pub d_a: f64,
    /// Coordinate diffusion `D_ρ`.
    pub d_rho: f64,
    /// Equilibrium covariance, `None` when it diverges (free particle).
    pub m_eq: Option<DMatrix<f64>>,
}

/// `sinh(½βħΩ)/Q` and `sinh(½βħω_c)/Q` with `Q = cosh(½βħΩ) − cosh(½βħω_c)`,
/// handling `β = ∞` by its limit `(1, 0)`.
fn thermal_ratios(spec: &MagneticSpec) -> (f64, f64) {
    if spec.beta.is_infinite() {
        return (1.0, 0.0);
    }
    let big = 0.5 * spec.beta * spec.hbar * spec.big_omega();
    let small = 0.5 * spec.beta * spec.hbar * spec.omega_c;
    // Q = 2 sinh(½βħω₊) sinh(½βħω₋) avoids the cosh-cosh cancellation
    let (a, b) = (0.5 * (big + small), 0.5 * (big - small));
    let q = 2.0 * a.sinh() * b.sinh();
    (big.sinh() / q, small.sinh() / q)
}

fn drift_matrix(spec: &MagneticSpec) -> DMatrix<f64> {
    let (m, wc) = (spec.m, spec.omega_c);
    let mw2 = m * spec.omega0 * spec.omega0;
    let (al, et, ep) = (spec.alpha(), spec.eta(), spec.epsilon());
    DMatrix::from_row_slice(
        4,
        4,
        &[
            -al, wc, -mw2, mw2 * ep, //
            -wc, -al, -mw2 * ep, -mw2, //
            1.0 / m, -ep / m, -et, 0.0, //
            ep / m, 1.0 / m, 0.0, -et,
        ],
    )
}

fn paired_matrix(diag_pi: f64, cross: f64, diag_rho: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            diag_pi, 0.0, 0.0, cross, //
            0.0, diag_pi, -cross, 0.0, //
            0.0, -cross, diag_rho, 0.0, //
            cross, 0.0, 0.0, diag_rho,
        ],
    )
}

/// Assemble the reduced Fokker-Planck generator, its closed-form diffusion
/// coefficients, and (when finite) the equilibrium covariance.
pub fn magnetic_model(spec: &MagneticSpec) -> Result<MagneticModel> {
    spec.validate()?;
    let a = drift_matrix(spec);
    let (m, hbar, om) = (spec.m, spec.hbar, spec.big_omega());
    let (gp, gm) = (spec.gamma_plus, spec.gamma_minus);
    let (wp, wm) = spec.omega_pm();

    let free_particle = spec.omega0 == 0.0;
    let (d_pi, d_a, d_rho, m_eq) = if free_particle {
        // Ω = ω_c makes the generic ratios 0/0; the direct forms survive
        let coth = if spec.beta.is_infinite() {
            1.0
        } else {
            1.0 / (0.5 * spec.beta * hbar * spec.omega_c).tanh()
        };
        let d_pi = 0.5 * gp * m * hbar * spec.omega_c * coth;
        let d_a = 0.5 * gp * hbar * coth;
        let d_rho = 0.5 * gp * hbar / (m * spec.omega_c) * coth;
        (d_pi, d_a, d_rho, None)
    } else {
        let (rb, rs) = thermal_ratios(spec);
        let d_pi = m * hbar / (2.0 * om)
            * ((gp * wp * wp + gm * wm * wm) * rb - (gp * wp * wp - gm * wm * wm) * rs);
        let d_a = hbar / (2.0 * om) * ((gp * wp - gm * wm) * rb - (gp * wp + gm * wm) * rs);
        let d_rho = hbar / (2.0 * m * om) * ((gp + gm) * rb - (gp - gm) * rs);

        let wc2 = spec.omega_c * spec.omega_c;
        let m_pi = m * hbar * om / 4.0 * ((1.0 + wc2 / (om * om)) * rb - 2.0 * spec.omega_c / om * rs);
        let m_rho = hbar * rb / (m * om);
        let m_a = 0.5 * hbar * (spec.omega_c / om * rb - rs);
        (d_pi, d_a, d_rho, Some(paired_matrix(m_pi, m_a, m_rho)))
    };

    let d = paired_matrix(d_pi, d_a, d_rho);
    let generator = FPGenerator::constant(
        a.clone(),
        DVector::zeros(4),
        d.clone(),
        magnetic_symplectic(m, spec.omega_c)?,
        hbar,
    )?;
    Ok(MagneticModel { generator, a, d, d_pi, d_a, d_rho, m_eq })
}
