//! Dual-oscillator model with balanced gain and loss:
//! `H = p₁p₂ + ω₀²x₁x₂ + γ(x₂p₂ − x₁p₁)`. Classically the two particles
//! decouple into a damped and an amplified mode; quantum mechanically the
//! variables stay entangled and the reduced drift diverges periodically.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::phase_space::{QuadraticModel, SymplecticForm};

#[derive(Debug, Clone, Copy)]
pub struct BatemanSpec {
    pub omega0: f64,
    pub gamma: f64,
    pub hbar: f64,
}

/// Build the 4-dimensional model in the ordering `(p₁, x₁, p₂, x₂)` with the
/// first particle as the subsystem.
pub fn bateman_model(spec: &BatemanSpec) -> Result<QuadraticModel> {
    if !(spec.omega0 > 0.0) {
        return Err(Error::InvalidModel("ω₀ must be positive".into()));
    }
    let (w2, g) = (spec.omega0 * spec.omega0, spec.gamma);
    let mut b = DMatrix::<f64>::zeros(4, 4);
    b[(0, 2)] = 1.0;
    b[(2, 0)] = 1.0;
    b[(1, 3)] = w2;
    b[(3, 1)] = w2;
    b[(2, 3)] = g;
    b[(3, 2)] = g;
    b[(0, 1)] = -g;
    b[(1, 0)] = -g;
    let model = QuadraticModel::new(
        b,
        DVector::zeros(4),
        SymplecticForm::standard_split(1, 1),
        1,
        spec.hbar,
    )?;
    Ok(model.with_energy_indefinite(true))
}

/// Closed-form subsystem block `R11 = cos ω₀t · diag(e^{γt}, e^{−γt})`.
pub fn r11_closed(spec: &BatemanSpec, t: f64) -> DMatrix<f64> {
    let c = (spec.omega0 * t).cos();
    DMatrix::from_diagonal(&DVector::from_column_slice(&[
        c * (spec.gamma * t).exp(),
        c * (-spec.gamma * t).exp(),
    ]))
}

/// Closed-form cross block
/// `R12 = sin ω₀t · [[0, −ω₀e^{γt}], [ω₀⁻¹e^{−γt}, 0]]`.
pub fn r12_closed(spec: &BatemanSpec, t: f64) -> DMatrix<f64> {
    let s = (spec.omega0 * t).sin();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            0.0,
            -s * spec.omega0 * (spec.gamma * t).exp(),
            s / spec.omega0 * (-spec.gamma * t).exp(),
            0.0,
        ],
    )
}

/// Effective drift `A = Ṙ11 R11⁻¹ = diag(γ − ω₀tan ω₀t, −γ − ω₀tan ω₀t)`,
/// diverging at `ω₀t = π/2 + kπ`.
pub fn a_closed(spec: &BatemanSpec, t: f64) -> DMatrix<f64> {
    let tn = spec.omega0 * (spec.omega0 * t).tan();
    DMatrix::from_diagonal(&DVector::from_column_slice(&[
        spec.gamma - tn,
        -spec.gamma - tn,
    ]))
}
