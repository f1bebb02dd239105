//! Two harmonic oscillators with the general bilinear interaction
//! `g_pp p₁p₂ + g_px p₁x₂ + g_xp x₁p₂ + g_xx x₁x₂`, including closed-form
//! normal frequencies and subsystem propagator blocks for the strong-coupling
//! (unstable) regimes.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::phase_space::{QuadraticModel, SymplecticForm};

#[derive(Debug, Clone, Copy)]
pub struct CoupledPairSpec {
    pub m1: f64,
    pub m2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub g_pp: f64,
    pub g_px: f64,
    pub g_xp: f64,
    pub g_xx: f64,
    pub hbar: f64,
}

impl CoupledPairSpec {
    /// Coupling determinant `Δ = g_pp g_xx − g_px g_xp`.
    pub fn delta(&self) -> f64 {
        self.g_pp * self.g_xx - self.g_px * self.g_xp
    }

    /// Coupling strength
    /// `g = g_xx²/(m1m2) + (m1/m2)ω1²g_px² + (m2/m1)ω2²g_xp² + m1m2ω1²ω2²g_pp²`.
    pub fn g(&self) -> f64 {
        let (w1, w2) = (self.omega1 * self.omega1, self.omega2 * self.omega2);
        self.g_xx * self.g_xx / (self.m1 * self.m2)
            + self.m1 / self.m2 * w1 * self.g_px * self.g_px
            + self.m2 / self.m1 * w2 * self.g_xp * self.g_xp
            + self.m1 * self.m2 * w1 * w2 * self.g_pp * self.g_pp
    }
}

/// Build the 4-dimensional model in the ordering `(p₁, x₁, p₂, x₂)` with the
/// first oscillator as the subsystem. Negative masses are allowed (they make
/// the energy form indefinite) and flagged loudly on the model.
pub fn coupled_pair(spec: &CoupledPairSpec) -> Result<QuadraticModel> {
    if spec.m1 * spec.m2 == 0.0 {
        return Err(Error::InvalidModel("masses must be nonzero".into()));
    }
    let mut b = DMatrix::<f64>::zeros(4, 4);
    b[(0, 0)] = 1.0 / spec.m1;
    b[(1, 1)] = spec.m1 * spec.omega1 * spec.omega1;
    b[(2, 2)] = 1.0 / spec.m2;
    b[(3, 3)] = spec.m2 * spec.omega2 * spec.omega2;
    b[(0, 2)] = spec.g_pp;
    b[(2, 0)] = spec.g_pp;
    b[(0, 3)] = spec.g_px;
    b[(3, 0)] = spec.g_px;
    b[(1, 2)] = spec.g_xp;
    b[(2, 1)] = spec.g_xp;
    b[(1, 3)] = spec.g_xx;
    b[(3, 1)] = spec.g_xx;
    let model = QuadraticModel::new(
        b,
        DVector::zeros(4),
        SymplecticForm::standard_split(1, 1),
        1,
        spec.hbar,
    )?;
    Ok(model.with_energy_indefinite(spec.m1 < 0.0 || spec.m2 < 0.0))
}

/// The four normal frequencies, roots of the biquadratic
/// `ω⁴ − (ω1² + ω2² + 2Δ)ω² + ω1²ω2² + Δ² − g = 0`,
/// returned as `(ω₊, −ω₊, ω₋, −ω₋)`.
pub fn normal_frequencies(spec: &CoupledPairSpec) -> [Complex<f64>; 4] {
    let (w1, w2) = (spec.omega1 * spec.omega1, spec.omega2 * spec.omega2);
    let delta = spec.delta();
    let s = Complex::new(w1 * w2 + delta * delta - spec.g(), 0.0).sqrt();
    let half_sum = Complex::new(0.5 * (w1 + w2) + delta, 0.0);
    let b_plus = (half_sum + s).sqrt();
    let b_minus = (half_sum - s).sqrt();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let omega_plus = (b_plus + b_minus) * inv_sqrt2;
    let omega_minus = (b_plus - b_minus) * inv_sqrt2;
    [omega_plus, -omega_plus, omega_minus, -omega_minus]
}

fn strong_coupling_params(spec: &CoupledPairSpec) -> Result<(f64, f64, f64, f64)> {
    let (w1, w2) = (spec.omega1 * spec.omega1, spec.omega2 * spec.omega2);
    let g = spec.g();
    if !(g > w1 * w2) {
        return Err(Error::UnsupportedCouplingPattern(format!(
            "closed form needs g > ω1²ω2² (got g = {g}, ω1²ω2² = {})",
            w1 * w2
        )));
    }
    let root = (g + 0.25 * (w1 - w2).powi(2)).sqrt();
    let omega = (root + 0.5 * (w1 + w2)).sqrt();
    let lambda = (root - 0.5 * (w1 + w2)).sqrt();
    let rho_plus = 0.5 + 0.25 * (w1 - w2) / root;
    let rho_minus = 0.5 - 0.25 * (w1 - w2) / root;
    Ok((omega, lambda, rho_plus, rho_minus))
}

/// Closed-form subsystem block `R11(t)` for the strong-coupling regime
/// `g > ω1²ω2²` with `Δ = 0`. Two coupling patterns are covered:
/// coordinate-type (`g_xx`, optionally `g_xp`) and momentum-type
/// (`g_pp` with `g_px`); anything else is refused.
pub fn coupled_pair_r11_closed_form(spec: &CoupledPairSpec, t: f64) -> Result<DMatrix<f64>> {
    let coordinate_type = spec.g_pp == 0.0 && spec.g_px == 0.0;
    let momentum_type = spec.g_xx == 0.0 && spec.g_xp == 0.0;
    if !coordinate_type && !momentum_type {
        return Err(Error::UnsupportedCouplingPattern(
            "closed form covers g_xx/g_xp or g_pp/g_px couplings only".into(),
        ));
    }
    let (omega, lambda, rp, rm) = strong_coupling_params(spec)?;
    let cc = rp * (omega * t).cos() + rm * (lambda * t).cosh();
    let s_over = rp / omega * (omega * t).sin() + rm / lambda * (lambda * t).sinh();
    let s_times = -omega * rp * (omega * t).sin() + lambda * rm * (lambda * t).sinh();
    let m = if coordinate_type {
        DMatrix::from_row_slice(2, 2, &[cc, spec.m1 * s_times, s_over / spec.m1, cc])
    } else {
        let mw = spec.m1 * spec.omega1 * spec.omega1;
        DMatrix::from_row_slice(2, 2, &[cc, -mw * s_over, -s_times / mw, cc])
    };
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed::{drift_from_hamiltonian, propagate};
    use crate::reduction::split_blocks;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn free_spec() -> CoupledPairSpec {
        CoupledPairSpec {
            m1: 1.0,
            m2: 1.0,
            omega1: 1.0,
            omega2: 1.0,
            g_pp: 0.0,
            g_px: 0.0,
            g_xp: 0.0,
            g_xx: 0.0,
            hbar: 1.0,
        }
    }

    #[test]
    fn zero_couplings_decouple() {
        let spec = CoupledPairSpec { omega1: 1.1, omega2: 0.7, ..free_spec() };
        let model = coupled_pair(&spec).unwrap();
        let (a, _) = drift_from_hamiltonian(&model);
        assert_eq!(a.view((0, 2), (2, 2)).norm(), 0.0);
        assert_eq!(a.view((2, 0), (2, 2)).norm(), 0.0);
        let freqs = normal_frequencies(&spec);
        let mut moduli: Vec<f64> = freqs.iter().map(|w| w.re.abs().max(w.im.abs())).collect();
        moduli.sort_by(f64::total_cmp);
        assert_relative_eq!(moduli[0], 0.7, epsilon = 1e-12);
        assert_relative_eq!(moduli[2], 1.1, epsilon = 1e-12);
    }

    #[test]
    fn coordinate_only_coupling_strength() {
        let spec = CoupledPairSpec { m1: 2.0, m2: 0.5, g_xx: 0.3, ..free_spec() };
        assert_eq!(spec.delta(), 0.0);
        assert_relative_eq!(spec.g(), 0.09, epsilon = 1e-14);
    }

    #[test]
    fn opposite_mass_resonant_delta() {
        // g_xp = g_px, g_xx = −ω₀²g_pp with m1 = 1, m2 = −1 gives the
        // complex pair ω± = ω₀ ± iγ, γ = (g_px² + ω₀²g_pp²)^{1/2}
        let omega0 = 1.2;
        let (g_pp, g_px) = (0.15, 0.2);
        let spec = CoupledPairSpec {
            m1: 1.0,
            m2: -1.0,
            omega1: omega0,
            omega2: omega0,
            g_pp,
            g_px,
            g_xp: g_px,
            g_xx: -omega0 * omega0 * g_pp,
            hbar: 1.0,
        };
        let gamma = (g_px * g_px + omega0 * omega0 * g_pp * g_pp).sqrt();
        assert_relative_eq!(spec.delta(), -gamma * gamma, epsilon = 1e-14);
        assert!(coupled_pair(&spec).unwrap().energy_indefinite());
        let freqs = normal_frequencies(&spec);
        let found = freqs.iter().any(|w| {
            (w.re - omega0).abs() < 1e-10 && (w.im - gamma).abs() < 1e-10
        });
        assert!(found, "expected ω₀ + iγ among {freqs:?}");
    }

    #[test]
    fn frequencies_match_drift_eigenvalues() {
        // closed-form roots versus i·eig(𝒜), including negative masses
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for k in 0..60 {
            let spec = CoupledPairSpec {
                m1: if k % 3 == 0 { -rng.gen_range(0.5..2.0) } else { rng.gen_range(0.5..2.0) },
                m2: rng.gen_range(0.5..2.0),
                omega1: rng.gen_range(0.5..2.0),
                omega2: rng.gen_range(0.5..2.0),
                g_pp: rng.gen_range(-0.3..0.3),
                g_px: rng.gen_range(-0.3..0.3),
                g_xp: rng.gen_range(-0.3..0.3),
                g_xx: rng.gen_range(-0.3..0.3),
                hbar: 1.0,
            };
            let model = coupled_pair(&spec).unwrap();
            let (a, _) = drift_from_hamiltonian(&model);
            // λ = −iω, so the normal frequencies are i·λ
            let mut eig_freqs: Vec<Complex<f64>> = a
                .complex_eigenvalues()
                .iter()
                .map(|l| Complex::new(0.0, 1.0) * l)
                .collect();
            let closed = normal_frequencies(&spec);
            for w in closed.iter() {
                let (idx, dist) = eig_freqs
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (i, (e - w).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                assert!(dist < 1e-10, "root {w} unmatched (nearest {dist:.2e})");
                eig_freqs.swap_remove(idx);
            }
        }
    }

    #[test]
    fn strong_coordinate_coupling_splits_real_and_imaginary() {
        let spec = CoupledPairSpec {
            omega1: 1.0,
            omega2: 0.8,
            g_xx: 1.5,
            ..free_spec()
        };
        assert!(spec.g() > (spec.omega1 * spec.omega2).powi(2));
        let freqs = normal_frequencies(&spec);
        assert!(freqs[0].im.abs() < 1e-12 && freqs[0].re > 0.0);
        assert!(freqs[2].re.abs() < 1e-12 && freqs[2].im.abs() > 0.0);
    }

    #[test]
    fn closed_form_r11_identity_at_zero() {
        let spec = CoupledPairSpec { g_xx: 1.4, ..free_spec() };
        let r = coupled_pair_r11_closed_form(&spec, 0.0).unwrap();
        assert_relative_eq!(r, DMatrix::identity(2, 2), epsilon = 1e-14);
    }

    #[test]
    fn equal_frequencies_give_half_weights() {
        let spec = CoupledPairSpec { g_xx: 1.4, ..free_spec() };
        let (_, _, rp, rm) = strong_coupling_params(&spec).unwrap();
        assert_relative_eq!(rp, 0.5, epsilon = 1e-14);
        assert_relative_eq!(rm, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn closed_form_matches_propagator_block() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for k in 0..20 {
            let coordinate = k % 2 == 0;
            let mut spec = CoupledPairSpec {
                m1: rng.gen_range(0.5..2.0),
                m2: rng.gen_range(0.5..2.0),
                omega1: rng.gen_range(0.6..1.4),
                omega2: rng.gen_range(0.6..1.4),
                ..free_spec()
            };
            if coordinate {
                spec.g_xx = rng.gen_range(1.5..3.0);
                spec.g_xp = rng.gen_range(-0.5..0.5);
            } else {
                spec.g_pp = rng.gen_range(1.5..3.0);
                spec.g_px = rng.gen_range(-0.5..0.5);
            }
            if !(spec.g() > (spec.omega1 * spec.omega2).powi(2)) {
                continue;
            }
            let model = coupled_pair(&spec).unwrap();
            for &t in &[0.3, 0.9, 1.6] {
                let blocks = split_blocks(&propagate(&model, t, 1e-12).unwrap(), 1).unwrap();
                let closed = coupled_pair_r11_closed_form(&spec, t).unwrap();
                assert_relative_eq!(blocks.r11, closed, epsilon = 1e-9, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn mixed_pattern_is_refused() {
        let spec = CoupledPairSpec { g_xx: 1.5, g_pp: 0.4, ..free_spec() };
        assert!(matches!(
            coupled_pair_r11_closed_form(&spec, 0.5),
            Err(Error::UnsupportedCouplingPattern(_))
        ));
    }
}
