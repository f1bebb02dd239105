//! Exact evolution of the full closed system: the linear propagator of the
//! first moments and its action on Gaussian states.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::phase_space::{GaussianState, QuadraticModel};

/// Drift matrix and drift vector of the moment equations
/// `⟨q̇⟩ = 𝒜⟨q⟩ + k` for `H = ½ q·B·q + C·q`: `𝒜 = −ΣB`, `k = −ΣC`.
pub fn drift_from_hamiltonian(model: &QuadraticModel) -> (DMatrix<f64>, DVector<f64>) {
    let sigma = model.sigma().matrix();
    (-(sigma * model.b()), -(sigma * model.c()))
}

/// Propagator of the closed system at a fixed time: `R(t) = exp(𝒜t)` and the
/// inhomogeneous shift `Δ(t)` such that means transport as
/// `⟨q⟩(t) = R(t)(⟨q⟩(0) − Δ(t))`.
#[derive(Debug, Clone)]
pub struct Propagator {
    r: DMatrix<f64>,
    r_dot: DMatrix<f64>,
    delta: DVector<f64>,
    delta_dot: DVector<f64>,
    t: f64,
    drift: DMatrix<f64>,
    drift_vec: DVector<f64>,
    model: QuadraticModel,
}

impl Propagator {
    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// `Ṙ(t) = 𝒜 R(t)`.
    pub fn r_dot(&self) -> &DMatrix<f64> {
        &self.r_dot
    }

    pub fn delta(&self) -> &DVector<f64> {
        &self.delta
    }

    pub fn delta_dot(&self) -> &DVector<f64> {
        &self.delta_dot
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `𝒜 = −ΣB`.
    pub fn drift(&self) -> &DMatrix<f64> {
        &self.drift
    }

    /// `k = −ΣC`.
    pub fn drift_vec(&self) -> &DVector<f64> {
        &self.drift_vec
    }

    pub fn model(&self) -> &QuadraticModel {
        &self.model
    }
}

/// Build the closed-system propagator at time `t`. The shift `Δ(t)` is
/// obtained by adaptive quadrature of `Σ exp(𝒜ᵀs) C` to absolute tolerance
/// `tol` (skipped exactly when `C = 0`).
pub fn propagate(model: &QuadraticModel, t: f64, tol: f64) -> Result<Propagator> {
    let (a, k) = drift_from_hamiltonian(model);
    let r = linalg::matrix_exp(&(&a * t));
    let r_dot = &a * &r;
    let sigma = model.sigma().matrix();
    let c = model.c();
    let dim = model.dim();

    let (delta, delta_dot) = if c.iter().all(|&x| x == 0.0) {
        (DVector::zeros(dim), DVector::zeros(dim))
    } else {
        let at = a.transpose();
        let integrand = |s: f64| sigma * linalg::matrix_exp(&(&at * s)) * c;
        let delta = if t == 0.0 {
            DVector::zeros(dim)
        } else {
            linalg::adaptive_simpson_vec(&integrand, 0.0, t, tol, 40)?
        };
        (delta, sigma * r.transpose() * c)
    };

    Ok(Propagator {
        r,
        r_dot,
        delta,
        delta_dot,
        t,
        drift: a,
        drift_vec: k,
        model: model.clone(),
    })
}

/// Transport a Gaussian state of the full system through the propagator:
/// `mean′ = R(mean − Δ)`, `cov′ = R cov Rᵀ`.
pub fn evolve_gaussian(prop: &Propagator, state: &GaussianState) -> Result<GaussianState> {
    if state.dim() != prop.model.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has dimension {}, model has {}",
            state.dim(),
            prop.model.dim()
        )));
    }
    let mean = &prop.r * (state.mean() - &prop.delta);
    let cov = &prop.r * state.cov() * prop.r.transpose();
    GaussianState::new(mean, cov, state.hbar(), prop.model.sigma())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{purity, standard_symplectic};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn oscillator(omega0: f64, force: f64) -> QuadraticModel {
        // H = ½(p² + ω₀²x²) − F x in the ordering (p, x)
        let b = DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, omega0 * omega0]));
        let c = DVector::from_column_slice(&[0.0, -force]);
        QuadraticModel::new(b, c, standard_symplectic(1), 1, 1.0).unwrap()
    }

    #[test]
    fn oscillator_propagator_is_rotationlike() {
        let omega0 = 1.3;
        let t = 0.8;
        let prop = propagate(&oscillator(omega0, 0.0), t, 1e-12).unwrap();
        let (c, s) = ((omega0 * t).cos(), (omega0 * t).sin());
        let expect = DMatrix::from_row_slice(
            2,
            2,
            &[c, -omega0 * s, s / omega0, c],
        );
        assert_relative_eq!(prop.r(), &expect, epsilon = 1e-13);
        assert!(prop.delta().norm() < 1e-15);
    }

    #[test]
    fn drift_antisymmetry_identity() {
        // closed-system drift satisfies 𝒜Σ + Σ𝒜ᵀ = 0 for any symmetric B
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = 2 * rng.gen_range(1..=3usize);
            let raw = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let b = linalg::sym(&raw);
            let sigma = standard_symplectic(n / 2);
            let model = QuadraticModel::new(b, DVector::zeros(n), sigma.clone(), 1, 1.0).unwrap();
            let (a, _) = drift_from_hamiltonian(&model);
            let res = &a * sigma.matrix() + sigma.matrix() * a.transpose();
            assert!(res.norm() < 1e-13);
        }
    }

    #[test]
    fn propagator_is_symplectic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = 2 * rng.gen_range(1..=3usize);
            let raw = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let b = linalg::sym(&raw);
            let sigma = standard_symplectic(n / 2);
            let model = QuadraticModel::new(b, DVector::zeros(n), sigma.clone(), 1, 1.0).unwrap();
            let prop = propagate(&model, rng.gen_range(0.1..2.0), 1e-12).unwrap();
            let res = prop.r() * sigma.matrix() * prop.r().transpose() - sigma.matrix();
            assert!(res.norm() < 1e-11, "RΣRᵀ ≠ Σ, defect {}", res.norm());
        }
    }

    #[test]
    fn semigroup_composition() {
        let model = oscillator(0.9, 0.4);
        let (t1, t2) = (0.37, 0.81);
        let p1 = propagate(&model, t1, 1e-12).unwrap();
        let p2 = propagate(&model, t2, 1e-12).unwrap();
        let p12 = propagate(&model, t1 + t2, 1e-12).unwrap();
        assert_relative_eq!(&(p2.r() * p1.r()), p12.r(), epsilon = 1e-12);

        // composing the state transport must match the one-shot transport
        let sigma = standard_symplectic(1);
        let st = GaussianState::new(
            DVector::from_column_slice(&[0.5, -0.2]),
            DMatrix::from_row_slice(2, 2, &[0.8, 0.1, 0.1, 0.9]),
            1.0,
            &sigma,
        )
        .unwrap();
        let two_step = evolve_gaussian(&p2, &evolve_gaussian(&p1, &st).unwrap()).unwrap();
        let one_shot = evolve_gaussian(&p12, &st).unwrap();
        assert_relative_eq!(two_step.mean(), one_shot.mean(), epsilon = 1e-11);
        assert_relative_eq!(two_step.cov(), one_shot.cov(), epsilon = 1e-11);
    }

    #[test]
    fn purity_is_conserved() {
        let model = oscillator(1.1, 0.0);
        let sigma = standard_symplectic(1);
        let f = 0.9;
        let st = GaussianState::new(
            DVector::from_column_slice(&[0.3, 0.1]),
            DMatrix::from_diagonal(&DVector::from_column_slice(&[1.21 * f, f])),
            1.0,
            &sigma,
        )
        .unwrap();
        let mu0 = purity(&st).unwrap();
        for &t in &[0.5, 2.0, 7.3] {
            let prop = propagate(&model, t, 1e-12).unwrap();
            let evolved = evolve_gaussian(&prop, &st).unwrap();
            assert_relative_eq!(purity(&evolved).unwrap(), mu0, epsilon = 1e-10);
            assert!(evolved.is_admissible());
        }
    }

    #[test]
    fn vacuum_is_invariant() {
        let omega0 = 0.6;
        let model = oscillator(omega0, 0.0);
        let sigma = standard_symplectic(1);
        let st = GaussianState::new(
            DVector::zeros(2),
            DMatrix::from_diagonal(&DVector::from_column_slice(&[
                omega0 / 2.0,
                1.0 / (2.0 * omega0),
            ])),
            1.0,
            &sigma,
        )
        .unwrap();
        let prop = propagate(&model, 1.7, 1e-12).unwrap();
        let evolved = evolve_gaussian(&prop, &st).unwrap();
        assert_relative_eq!(evolved.cov(), st.cov(), epsilon = 1e-12);
    }

    #[test]
    fn mean_matches_ode_oracle() {
        // forced oscillator: transport vs direct integration of ⟨q̇⟩ = 𝒜⟨q⟩ + k
        let model = oscillator(1.4, 0.7);
        let (a, k) = drift_from_hamiltonian(&model);
        let mean0 = DVector::from_column_slice(&[0.2, -0.5]);
        let t = 1.9;
        let mut rhs = |_t: f64, y: &DVector<f64>| Ok(&a * y + &k);
        let oracle =
            crate::ode::integrate(&mut rhs, 0.0, &mean0, t, &crate::ode::OdeOptions::default())
                .unwrap();
        let prop = propagate(&model, t, 1e-13).unwrap();
        let mean_t = prop.r() * (&mean0 - prop.delta());
        assert_relative_eq!(mean_t, oracle, epsilon = 1e-9);
    }

    #[test]
    fn delta_matches_closed_form() {
        // for invertible 𝒜: Δ(t) = −R⁻¹ 𝒜⁻¹ (R − I) k
        let model = oscillator(1.4, 0.7);
        let t = 1.1;
        let prop = propagate(&model, t, 1e-13).unwrap();
        let (a, k) = drift_from_hamiltonian(&model);
        let a_inv = a.try_inverse().unwrap();
        let r_inv = prop.r().clone().try_inverse().unwrap();
        let id = DMatrix::identity(2, 2);
        let expect = -(&r_inv * a_inv * (prop.r() - id) * k);
        assert_relative_eq!(prop.delta(), &expect, epsilon = 1e-10);
    }
}
