//! Moment evolution under a Fokker-Planck generator, quantum admissibility
//! of `(A, D)` drift/diffusion pairs, and steady-state covariance solving.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::ode::{self, OdeOptions};
use crate::phase_space::{AdmissibilityReport, GaussianState, SymplecticForm};

/// Coefficient family of a linear Fokker-Planck generator.
#[derive(Clone)]
pub enum Coefficients {
    Constant {
        a: DMatrix<f64>,
        k: DVector<f64>,
        d: DMatrix<f64>,
    },
    /// Function-valued family `t ↦ (A(t), K(t), D(t))`, sampled by the
    /// integrator with no interpolation of its own.
    TimeDependent(CoefficientFn),
}

pub type CoefficientFn =
    Arc<dyn Fn(f64) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> + Send + Sync>;

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Constant { a, .. } => f
                .debug_struct("Constant")
                .field("dim", &a.nrows())
                .finish_non_exhaustive(),
            Coefficients::TimeDependent(_) => f.write_str("TimeDependent(..)"),
        }
    }
}

/// Linear Fokker-Planck generator `∂W/∂t = −∂·[(Aq + K)W] + D:∂∂W` acting on
/// Gaussian moments.
#[derive(Debug, Clone)]
pub struct FPGenerator {
    coeffs: Coefficients,
    sigma: SymplecticForm,
    hbar: f64,
}

impl FPGenerator {
    pub fn new(coeffs: Coefficients, sigma: SymplecticForm, hbar: f64) -> Result<FPGenerator> {
        if !(hbar > 0.0) {
            return Err(Error::InvalidModel("ħ must be positive".into()));
        }
        if let Coefficients::Constant { a, k, d } = &coeffs {
            let n = sigma.dim();
            if a.nrows() != n || a.ncols() != n || k.len() != n || d.nrows() != n || d.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "generator dimensions disagree with the {n}-dimensional phase space"
                )));
            }
            if (d - d.transpose()).norm() > 1e-12 * d.norm().max(1.0) {
                return Err(Error::NotSymmetric("diffusion matrix".into()));
            }
        }
        Ok(FPGenerator {
            coeffs,
            sigma,
            hbar,
        })
    }

    pub fn constant(
        a: DMatrix<f64>,
        k: DVector<f64>,
        d: DMatrix<f64>,
        sigma: SymplecticForm,
        hbar: f64,
    ) -> Result<FPGenerator> {
        FPGenerator::new(Coefficients::Constant { a, k, d }, sigma, hbar)
    }

    /// Coefficients at time `t` (symmetrized diffusion).
    pub fn at(&self, t: f64) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
        match &self.coeffs {
            Coefficients::Constant { a, k, d } => Ok((a.clone(), k.clone(), linalg::sym(d))),
            Coefficients::TimeDependent(f) => {
                let (a, k, d) = f(t)?;
                Ok((a, k, linalg::sym(&d)))
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.coeffs, Coefficients::Constant { .. })
    }

    pub fn sigma(&self) -> &SymplecticForm {
        &self.sigma
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }
}

fn unpack(y: &DVector<f64>, n: usize) -> (DVector<f64>, DMatrix<f64>) {
    let mean = y.rows(0, n).into_owned();
    let cov = DMatrix::from_column_slice(n, n, y.rows(n, n * n).as_slice());
    (mean, cov)
}

fn pack(mean: &DVector<f64>, cov: &DMatrix<f64>) -> DVector<f64> {
    let n = mean.len();
    let mut y = DVector::zeros(n + n * n);
    y.rows_mut(0, n).copy_from(mean);
    y.rows_mut(n, n * n)
        .copy_from(&DVector::from_column_slice(cov.as_slice()));
    y
}

/// Integrate the coupled moment equations `⟨q̇⟩ = A⟨q⟩ + K` and
/// `𝓜̇ = A𝓜 + 𝓜Ã + 2D` over a monotone time grid starting at `t_grid[0]`,
/// returning the Gaussian state at every node (the first is the initial
/// state itself).
pub fn evolve_moments(
    gen: &FPGenerator,
    state: &GaussianState,
    t_grid: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<GaussianState>> {
    let n = gen.dim();
    if state.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "state has dimension {}, generator has {}",
            state.dim(),
            n
        )));
    }
    if t_grid.is_empty() {
        return Ok(vec![]);
    }
    let mut rhs = |t: f64, y: &DVector<f64>| -> Result<DVector<f64>> {
        let (mean, cov) = unpack(y, n);
        let cov = linalg::sym(&cov);
        let (a, k, d) = gen.at(t)?;
        let dmean = &a * &mean + &k;
        let dcov = &a * &cov + &cov * a.transpose() + 2.0 * &d;
        Ok(pack(&dmean, &dcov))
    };
    let y0 = pack(state.mean(), state.cov());
    let ys = ode::integrate_grid(&mut rhs, t_grid, &y0, opts)?;
    ys.iter()
        .map(|y| {
            let (mean, cov) = unpack(y, n);
            GaussianState::new(mean, linalg::sym(&cov), gen.hbar(), gen.sigma())
        })
        .collect()
}

/// Quantum admissibility of the generator at time `t`: Hermitian
/// min-eigenvalue report for `D* = D + (iħ/4)(AΣ + ΣÃ)`. Nonnegativity is
/// necessary and sufficient for the flow to preserve admissible states.
pub fn admissibility(gen: &FPGenerator, t: f64) -> Result<AdmissibilityReport> {
    let (a, _, d) = gen.at(t)?;
    let sigma = gen.sigma().matrix();
    let im = (&a * sigma + sigma * a.transpose()) * (gen.hbar() / 4.0);
    let (min, max) = linalg::hermitian_eig_bounds(&d, &linalg::antisym(&im));
    Ok(AdmissibilityReport::from_bounds(
        min,
        max.abs().max(min.abs()),
        gen.hbar(),
    ))
}

/// One-degree-of-freedom determinant bound `det D ≥ ħ²(Tr A)²/16`, evaluated
/// at `t = 0`. Returns `(det D, bound, passed)`.
pub fn min_diffusion_bound_1d(gen: &FPGenerator) -> Result<(f64, f64, bool)> {
    if gen.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 1,
            got: gen.dim() / 2,
        });
    }
    let (a, _, d) = gen.at(0.0)?;
    let det_d = d.determinant();
    let bound = gen.hbar().powi(2) * a.trace().powi(2) / 16.0;
    let floor = 1e-10 * det_d.abs().max(bound.abs()).max(gen.hbar().powi(2));
    Ok((det_d, bound, det_d - bound >= -floor))
}

/// Stationary Gaussian state of a constant generator with Hurwitz drift:
/// covariance from `A F₀ + F₀ Ã + 2D = 0`, mean from `−A⁻¹K`.
pub fn steady_state(gen: &FPGenerator) -> Result<GaussianState> {
    let (a, k, d) = match &gen.coeffs {
        Coefficients::Constant { a, k, d } => (a, k, linalg::sym(d)),
        Coefficients::TimeDependent(_) => {
            return Err(Error::InvalidModel(
                "steady state requires constant coefficients".into(),
            ))
        }
    };
    let max_re = a
        .complex_eigenvalues()
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(max_re < 0.0) {
        return Err(Error::NotHurwitz { max_re });
    }
    let f0 = linalg::solve_lyapunov(a, &(-2.0 * &d))?;
    let f0 = linalg::sym(&f0);
    let mean = -(a.clone().lu().solve(k).ok_or(Error::SingularLyapunov)?);
    GaussianState::new(mean, f0, gen.hbar(), gen.sigma())
}
