//! Value types and algebra for phase-space vectors: symplectic forms,
//! quadratic models, Gaussian states, purity, and quantum admissibility.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Relative tolerance for admissibility verdicts: a covariance matrix passes
/// when the minimum eigenvalue of `Φ = cov − (iħ/2)Σ` is above
/// `−ADMISSIBILITY_TOL · max(scale, ħ)`. Boundary states (vacuum) sit exactly
/// at zero and must pass under roundoff.
pub const ADMISSIBILITY_TOL: f64 = 1e-10;

/// Condition-number limit beyond which a frame transform is rejected.
const SINGULAR_COND_LIMIT: f64 = 1e12;

/// Real antisymmetric matrix `Σ` encoding the canonical commutators
/// `[q_α, q_β] = −iħ Σ_αβ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    /// The standard block form `[[0, I], [−I, 0]]` for `n_dof` degrees of
    /// freedom in the ordering `(p₁..p_N, x₁..x_N)`.
    pub fn standard(n_dof: usize) -> SymplecticForm {
        assert!(n_dof >= 1, "need at least one degree of freedom");
        let n = n_dof;
        let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(i, n + i)] = 1.0;
            m[(n + i, i)] = -1.0;
        }
        SymplecticForm { matrix: m }
    }

    /// Block-diagonal form for the subsystem-major ordering `q = (Q, ξ)`:
    /// a standard block for the subsystem followed by a standard block for
    /// the reservoir.
    pub fn standard_split(n_sub: usize, n_res: usize) -> SymplecticForm {
        if n_res == 0 {
            return SymplecticForm::standard(n_sub);
        }
        if n_sub == 0 {
            return SymplecticForm::standard(n_res);
        }
        SymplecticForm::standard(n_sub).direct_sum(&SymplecticForm::standard(n_res))
    }

    /// Construct from an explicit matrix; must be antisymmetric and
    /// nondegenerate. Tiny asymmetry from roundoff is projected out so the
    /// stored matrix satisfies `Σᵀ = −Σ` exactly.
    pub fn new(matrix: DMatrix<f64>) -> Result<SymplecticForm> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 || n % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "symplectic form must be square with even dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = linalg::antisym(&matrix);
        let defect = (&matrix - &asym).norm();
        if defect > 1e-12 * matrix.norm().max(1.0) {
            return Err(Error::NotSymmetric(
                "symplectic form must be antisymmetric".into(),
            ));
        }
        let det = asym.determinant();
        if det.abs() <= 0.0 {
            return Err(Error::InvalidModel("degenerate symplectic form".into()));
        }
        Ok(SymplecticForm { matrix: asym })
    }

    /// Block-diagonal composition with another form.
    pub fn direct_sum(&self, other: &SymplecticForm) -> SymplecticForm {
        let a = self.dim();
        let b = other.dim();
        let mut m = DMatrix::<f64>::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.matrix);
        m.view_mut((a, a), (b, b)).copy_from(&other.matrix);
        SymplecticForm { matrix: m }
    }

    /// Leading `2k × 2k` block (the subsystem form under subsystem-major
    /// ordering, valid when the form is block-diagonal over the split).
    pub fn top_left(&self, dofs: usize) -> SymplecticForm {
        let k = 2 * dofs;
        SymplecticForm {
            matrix: self.matrix.view((0, 0), (k, k)).into_owned(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Phase-space dimension `2N`.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of degrees of freedom `N`.
    pub fn n_dof(&self) -> usize {
        self.matrix.nrows() / 2
    }
}

/// The standard symplectic form `[[0, I], [−I, 0]]` for `n_dof` degrees of
/// freedom.
pub fn standard_symplectic(n_dof: usize) -> SymplecticForm {
    SymplecticForm::standard(n_dof)
}

/// Closed quadratic system `H = ½ q·B·q + C·q` with a subsystem split.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    b: DMatrix<f64>,
    c: DVector<f64>,
    sigma: SymplecticForm,
    n_sub: usize,
    hbar: f64,
    energy_indefinite: bool,
}

impl QuadraticModel {
    pub fn new(
        b: DMatrix<f64>,
        c: DVector<f64>,
        sigma: SymplecticForm,
        n_sub: usize,
        hbar: f64,
    ) -> Result<QuadraticModel> {
        let dim = sigma.dim();
        if b.nrows() != dim || b.ncols() != dim || c.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "model dimensions disagree: B is {}x{}, C has {}, Σ is {}x{}",
                b.nrows(),
                b.ncols(),
                c.len(),
                dim,
                dim
            )));
        }
        let defect = (&b - b.transpose()).norm();
        if defect > 1e-12 * b.norm().max(1.0) {
            return Err(Error::NotSymmetric("Hamiltonian matrix B".into()));
        }
        if n_sub > dim / 2 {
            return Err(Error::BadSplit(format!(
                "n_sub = {} exceeds {} degrees of freedom",
                n_sub,
                dim / 2
            )));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidModel("ħ must be positive".into()));
        }
        Ok(QuadraticModel {
            b: linalg::sym(&b),
            c,
            sigma,
            n_sub,
            hbar,
            energy_indefinite: false,
        })
    }

    /// Mark the model as having an indefinite energy form (e.g. negative
    /// masses); carried as a diagnostic, never changes the dynamics.
    pub fn with_energy_indefinite(mut self, flag: bool) -> QuadraticModel {
        self.energy_indefinite = flag;
        self
    }

    pub fn energy_indefinite(&self) -> bool {
        self.energy_indefinite
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn sigma(&self) -> &SymplecticForm {
        &self.sigma
    }

    pub fn n_sub(&self) -> usize {
        self.n_sub
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Phase-space dimension `2N`.
    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn n_dof(&self) -> usize {
        self.sigma.n_dof()
    }
}

/// Verdict of a Hermitian nonnegativity test (`Φ ⪰ 0` or `D* ⪰ 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityReport {
    pub min_eigenvalue: f64,
    /// Largest absolute eigenvalue of the tested Hermitian matrix.
    pub scale: f64,
    pub passed: bool,
    pub tolerance_used: f64,
    /// The minimum eigenvalue sits within tolerance of zero; physically
    /// meaningful cases (vacuum, RWA equality) live here.
    pub boundary: bool,
}

impl AdmissibilityReport {
    /// Build a report from the extreme eigenvalues of the tested matrix,
    /// using the crate-wide relative tolerance floor `max(scale, ħ)`.
    pub fn from_bounds(min_eig: f64, max_abs: f64, hbar: f64) -> AdmissibilityReport {
        let tol = ADMISSIBILITY_TOL;
        let floor = tol * max_abs.max(hbar);
        AdmissibilityReport {
            min_eigenvalue: min_eig,
            scale: max_abs,
            passed: min_eig >= -floor,
            tolerance_used: tol,
            boundary: min_eig.abs() <= floor,
        }
    }
}

/// Gaussian state given by its mean vector and symmetrized covariance
/// matrix; the admissibility verdict w.r.t. the construction-time symplectic
/// form is carried along.
#[derive(Debug, Clone)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    hbar: f64,
    admissibility: AdmissibilityReport,
}

impl GaussianState {
    pub fn new(
        mean: DVector<f64>,
        cov: DMatrix<f64>,
        hbar: f64,
        sigma: &SymplecticForm,
    ) -> Result<GaussianState> {
        let dim = mean.len();
        if cov.nrows() != dim || cov.ncols() != dim || sigma.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "state dimensions disagree: mean has {}, cov is {}x{}, Σ is {}x{}",
                dim,
                cov.nrows(),
                cov.ncols(),
                sigma.dim(),
                sigma.dim()
            )));
        }
        let defect = (&cov - cov.transpose()).norm();
        if defect > 1e-10 * cov.norm().max(1.0) {
            return Err(Error::NotSymmetric("covariance matrix".into()));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidModel("ħ must be positive".into()));
        }
        let cov = linalg::sym(&cov);
        let report = admissibility_of(&cov, hbar, sigma);
        Ok(GaussianState {
            mean,
            cov,
            hbar,
            admissibility: report,
        })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn n_dof(&self) -> usize {
        self.mean.len() / 2
    }

    /// Admissibility verdict computed at construction.
    pub fn admissibility(&self) -> &AdmissibilityReport {
        &self.admissibility
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility.passed
    }
}

fn admissibility_of(cov: &DMatrix<f64>, hbar: f64, sigma: &SymplecticForm) -> AdmissibilityReport {
    // Φ = cov − (iħ/2)Σ: real part cov, imaginary part −(ħ/2)Σ
    let im = sigma.matrix() * (-hbar / 2.0);
    let (min, max) = linalg::hermitian_eig_bounds(cov, &im);
    AdmissibilityReport::from_bounds(min, max.abs().max(min.abs()), hbar)
}

/// Test the generalized uncertainty relation `Φ = cov − (iħ/2)Σ ⪰ 0`.
pub fn check_state_admissible(
    state: &GaussianState,
    sigma: &SymplecticForm,
) -> Result<AdmissibilityReport> {
    if sigma.dim() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs symplectic form dimension {}",
            state.dim(),
            sigma.dim()
        )));
    }
    Ok(admissibility_of(&state.cov, state.hbar, sigma))
}

/// Change of phase-space frame `q′ = T q`: `Σ′ = TΣTᵀ`, and optionally
/// `A′ = TAT⁻¹`, `D′ = TDTᵀ` for drift and diffusion matrices.
pub fn transform_frame(
    t: &DMatrix<f64>,
    sigma: &SymplecticForm,
    a: Option<&DMatrix<f64>>,
    d: Option<&DMatrix<f64>>,
) -> Result<(SymplecticForm, Option<DMatrix<f64>>, Option<DMatrix<f64>>)> {
    let n = sigma.dim();
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "transform is {}x{}, expected {}x{}",
            t.nrows(),
            t.ncols(),
            n,
            n
        )));
    }
    let cond = linalg::condition_2(t);
    if !cond.is_finite() || cond > SINGULAR_COND_LIMIT {
        return Err(Error::SingularTransform { cond });
    }
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or(Error::SingularTransform { cond })?;
    let sigma_new = SymplecticForm::new(t * sigma.matrix() * t.transpose())?;
    let a_new = a.map(|a| t * a * &t_inv);
    let d_new = d.map(|d| t * d * t.transpose());
    Ok((sigma_new, a_new, d_new))
}

/// Purity `μ = Tr ρ² = (ħ/2)^M (det cov)^(−1/2)` of a Gaussian state.
pub fn purity(state: &GaussianState) -> Result<f64> {
    let m = state.n_dof() as i32;
    let det = state.cov.determinant();
    let bound = (state.hbar / 2.0).powi(2 * m);
    if det < bound * (1.0 - 1e-10) {
        return Err(Error::InadmissibleState(format!(
            "det cov = {det:.6e} below the purity bound {bound:.6e}"
        )));
    }
    Ok((state.hbar / 2.0).powi(m) / det.max(bound).sqrt())
}

/// Evaluate the Gaussian Wigner density at a phase-space point, normalized
/// so that `∫ W dq/(2πħ)^N = 1`.
pub fn evaluate_wigner(state: &GaussianState, point: &DVector<f64>) -> Result<f64> {
    if point.len() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} components, state has {}",
            point.len(),
            state.dim()
        )));
    }
    let chol = state
        .cov
        .clone()
        .cholesky()
        .ok_or(Error::SingularCovariance)?;
    let det = chol.l().diagonal().iter().map(|d| d * d).product::<f64>();
    let delta = point - &state.mean;
    let solved = chol.solve(&delta);
    let quad = delta.dot(&solved);
    let m = state.n_dof() as i32;
    Ok(state.hbar.powi(m) / det.sqrt() * (-0.5 * quad).exp())
}
