//! End-to-end invariant: evolving the full closed system and taking the
//! subsystem marginal must agree with integrating the effective
//! Fokker-Planck moment equations built from the reduced coefficients.

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use phaseflow::closed::{evolve_gaussian, propagate};
use phaseflow::fokker_planck::evolve_moments;
use phaseflow::models::{bath_model, reservoir_covariance, thermal_f, BathMode, BathSpec};
use phaseflow::ode::OdeOptions;
use phaseflow::phase_space::{GaussianState, SymplecticForm};
use phaseflow::reduction::effective_generator;

fn squeezed_subsystem(hbar: f64) -> GaussianState {
    let sigma = SymplecticForm::standard(1);
    let r: f64 = 0.6;
    let cov = DMatrix::from_row_slice(
        2,
        2,
        &[
            hbar / 2.0 * (2.0 * r).exp(),
            0.1 * hbar,
            0.1 * hbar,
            (hbar / 2.0) * ((2.0 * r).exp() * 0.04 + 1.0) / (2.0 * r).exp(),
        ],
    );
    GaussianState::new(DVector::from_column_slice(&[0.4, -0.7]), cov, hbar, &sigma).unwrap()
}

fn embed_full(
    sub: &GaussianState,
    f: &DMatrix<f64>,
    gamma: &DVector<f64>,
    sigma: &SymplecticForm,
) -> GaussianState {
    let r = f.nrows();
    let n = 2 + r;
    let mut mean = DVector::zeros(n);
    mean.rows_mut(0, 2).copy_from(sub.mean());
    mean.rows_mut(2, r).copy_from(gamma);
    let mut cov = DMatrix::zeros(n, n);
    cov.view_mut((0, 0), (2, 2)).copy_from(sub.cov());
    cov.view_mut((2, 2), (r, r)).copy_from(f);
    GaussianState::new(mean, cov, sub.hbar(), sigma).unwrap()
}

#[test]
fn moment_equations_reproduce_the_exact_marginal() {
    let hbar = 1.0;
    let omega0 = 1.0;
    let k_t = 0.8;
    let modes: Vec<BathMode> = [0.55, 0.8, 1.0, 1.25, 1.6]
        .iter()
        .map(|&w| BathMode {
            omega: w,
            z: 0.04,
            v: -0.05,
            u: 0.05,
            g: 0.03,
            f: thermal_f(w, k_t, hbar),
        })
        .collect();
    let spec = BathSpec { modes, hbar };
    let model = bath_model(omega0, &spec).unwrap();
    let f = reservoir_covariance(&spec);
    // displaced reservoir so the inhomogeneous coefficient K is exercised
    let gamma = DVector::from_fn(10, |i, _| 0.3 - 0.05 * i as f64);

    let sub0 = squeezed_subsystem(hbar);
    let full0 = embed_full(&sub0, &f, &gamma, model.sigma());

    let gen = effective_generator(&model, &f, Some(&gamma), 1e-12).unwrap();
    let t_grid: Vec<f64> = (0..=8).map(|k| 0.35 * k as f64).collect();
    let opts = OdeOptions { rtol: 1e-11, atol: 1e-13, ..OdeOptions::default() };
    let reduced = evolve_moments(&gen, &sub0, &t_grid, &opts).unwrap();

    for (k, &t) in t_grid.iter().enumerate() {
        let prop = propagate(&model, t, 1e-12).unwrap();
        let full = evolve_gaussian(&prop, &full0).unwrap();
        let marg_mean = full.mean().rows(0, 2).into_owned();
        let marg_cov = full.cov().view((0, 0), (2, 2)).into_owned();
        assert_relative_eq!(reduced[k].mean(), &marg_mean, epsilon = 1e-7, max_relative = 1e-7);
        assert_relative_eq!(reduced[k].cov(), &marg_cov, epsilon = 1e-7, max_relative = 1e-7);
    }
}
