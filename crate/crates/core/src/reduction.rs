//! Exact reduction of the closed Gaussian flow over reservoir variables:
//! block decomposition of the propagator, the averaged (reduced) propagator,
//! and the effective Fokker-Planck coefficients of the subsystem.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::closed::{propagate, Propagator};
use crate::error::{Error, Result};
use crate::fokker_planck::{Coefficients, FPGenerator};
use crate::linalg;
use crate::phase_space::{GaussianState, QuadraticModel, SymplecticForm};

/// Condition limit on `R11` beyond which the effective drift is refused; the
/// divergence is physical (focusing caustics of the reduced flow), so no
/// regularization is attempted.
const R11_COND_LIMIT: f64 = 1e12;

/// Rectangular blocks of the closed-system propagator under the
/// subsystem-major split `q = (Q, ξ)`, with analytic time derivatives.
#[derive(Debug, Clone)]
pub struct PropagatorBlocks {
    pub r11: DMatrix<f64>,
    pub r12: DMatrix<f64>,
    pub r21: DMatrix<f64>,
    pub r22: DMatrix<f64>,
    pub delta_q: DVector<f64>,
    pub delta_xi: DVector<f64>,
    pub r11_dot: DMatrix<f64>,
    pub r12_dot: DMatrix<f64>,
    pub delta_q_dot: DVector<f64>,
    pub delta_xi_dot: DVector<f64>,
    pub t: f64,
    pub n_sub: usize,
    pub sigma_sub: SymplecticForm,
    pub hbar: f64,
}

/// Averaged propagator of the subsystem: transports a Gaussian subsystem
/// state as `mean′ = R11·mean + δ*`, `cov′ = R11·cov·R11ᵀ + 𝓜*`.
#[derive(Debug, Clone)]
pub struct ReducedPropagator {
    pub r11: DMatrix<f64>,
    /// `𝓜* = R12 F R12ᵀ`, the reservoir-induced covariance inflow.
    pub mstar: DMatrix<f64>,
    /// `δ* = R12 γ − R11 Δ_Q − R12 Δ_ξ`.
    pub delta_star: DVector<f64>,
    pub t: f64,
    sigma_sub: SymplecticForm,
    hbar: f64,
}

impl ReducedPropagator {
    /// Transport a factorized-initial-condition subsystem state.
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if state.dim() != self.r11.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "subsystem state has dimension {}, reduced propagator expects {}",
                state.dim(),
                self.r11.nrows()
            )));
        }
        let mean = &self.r11 * state.mean() + &self.delta_star;
        let cov = &self.r11 * state.cov() * self.r11.transpose() + &self.mstar;
        GaussianState::new(mean, cov, self.hbar, &self.sigma_sub)
    }
}

/// Effective Fokker-Planck coefficients of the reduced subsystem dynamics at
/// a fixed time: `⟨Q̇⟩ = A⟨Q⟩ + K`, `𝓜̇ = A𝓜 + 𝓜Ã + 2D`.
#[derive(Debug, Clone)]
pub struct FPCoefficients {
    pub a: DMatrix<f64>,
    pub k: DVector<f64>,
    pub d: DMatrix<f64>,
    pub t: f64,
}

/// Slice the propagator into subsystem/reservoir blocks. Requires
/// `1 ≤ n_sub < N` degrees of freedom on the subsystem side.
pub fn split_blocks(prop: &Propagator, n_sub: usize) -> Result<PropagatorBlocks> {
    let n_dof = prop.model().n_dof();
    if n_sub < 1 || n_sub >= n_dof {
        return Err(Error::BadSplit(format!(
            "n_sub = {n_sub} must satisfy 1 ≤ n_sub < {n_dof}"
        )));
    }
    let s = 2 * n_sub;
    let r = 2 * (n_dof - n_sub);
    let blk = |m: &DMatrix<f64>, i: usize, j: usize, h: usize, w: usize| {
        m.view((i, j), (h, w)).into_owned()
    };
    Ok(PropagatorBlocks {
        r11: blk(prop.r(), 0, 0, s, s),
        r12: blk(prop.r(), 0, s, s, r),
        r21: blk(prop.r(), s, 0, r, s),
        r22: blk(prop.r(), s, s, r, r),
        delta_q: prop.delta().rows(0, s).into_owned(),
        delta_xi: prop.delta().rows(s, r).into_owned(),
        r11_dot: blk(prop.r_dot(), 0, 0, s, s),
        r12_dot: blk(prop.r_dot(), 0, s, s, r),
        delta_q_dot: prop.delta_dot().rows(0, s).into_owned(),
        delta_xi_dot: prop.delta_dot().rows(s, r).into_owned(),
        t: prop.t(),
        n_sub,
        sigma_sub: prop.model().sigma().top_left(n_sub),
        hbar: prop.model().hbar(),
    })
}

fn check_reservoir(blocks: &PropagatorBlocks, f: &DMatrix<f64>, gamma_res: Option<&DVector<f64>>) -> Result<()> {
    let r = blocks.r12.ncols();
    if f.nrows() != r || f.ncols() != r {
        return Err(Error::DimensionMismatch(format!(
            "reservoir covariance is {}x{}, expected {}x{}",
            f.nrows(),
            f.ncols(),
            r,
            r
        )));
    }
    if let Some(g) = gamma_res {
        if g.len() != r {
            return Err(Error::DimensionMismatch(format!(
                "reservoir mean has {} components, expected {}",
                g.len(),
                r
            )));
        }
    }
    if (f - f.transpose()).norm() > 1e-12 * f.norm().max(1.0) {
        return Err(Error::NotSymmetric("reservoir covariance".into()));
    }
    if f.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(())
}

fn delta_star_of(blocks: &PropagatorBlocks, gamma_res: Option<&DVector<f64>>) -> DVector<f64> {
    let mut d = -(&blocks.r11 * &blocks.delta_q) - &blocks.r12 * &blocks.delta_xi;
    if let Some(g) = gamma_res {
        d += &blocks.r12 * g;
    }
    d
}

fn delta_star_dot_of(blocks: &PropagatorBlocks, gamma_res: Option<&DVector<f64>>) -> DVector<f64> {
    let mut d = -(&blocks.r11_dot * &blocks.delta_q)
        - &blocks.r11 * &blocks.delta_q_dot
        - &blocks.r12_dot * &blocks.delta_xi
        - &blocks.r12 * &blocks.delta_xi_dot;
    if let Some(g) = gamma_res {
        d += &blocks.r12_dot * g;
    }
    d
}

/// Average the propagator over a Gaussian reservoir with covariance `F` and
/// mean `γ_res` (zero when `None`). The initial total state must factorize
/// as subsystem ⊗ reservoir.
pub fn reduce(
    blocks: &PropagatorBlocks,
    f: &DMatrix<f64>,
    gamma_res: Option<&DVector<f64>>,
) -> Result<ReducedPropagator> {
    check_reservoir(blocks, f, gamma_res)?;
    let mstar = linalg::sym(&(&blocks.r12 * f * blocks.r12.transpose()));
    Ok(ReducedPropagator {
        r11: blocks.r11.clone(),
        mstar,
        delta_star: delta_star_of(blocks, gamma_res),
        t: blocks.t,
        sigma_sub: blocks.sigma_sub.clone(),
        hbar: blocks.hbar,
    })
}

/// Effective Fokker-Planck coefficients at the block time:
/// `A = Ṙ11 R11⁻¹`, `K = δ̇* − Aδ*`, `D = sym[(Ṙ12 − AR12) F R12ᵀ]`.
/// All derivatives are analytic slices of `𝒜R`; no finite differences.
pub fn effective_fp(
    blocks: &PropagatorBlocks,
    f: &DMatrix<f64>,
    gamma_res: Option<&DVector<f64>>,
) -> Result<FPCoefficients> {
    check_reservoir(blocks, f, gamma_res)?;
    let cond = linalg::condition_2(&blocks.r11);
    if !cond.is_finite() || cond > R11_COND_LIMIT {
        return Err(Error::SingularR11 { t: blocks.t, cond });
    }
    let r11_inv = blocks
        .r11
        .clone()
        .try_inverse()
        .ok_or(Error::SingularR11 { t: blocks.t, cond })?;
    let a = &blocks.r11_dot * &r11_inv;
    let delta_star = delta_star_of(blocks, gamma_res);
    let k = delta_star_dot_of(blocks, gamma_res) - &a * &delta_star;
    let d = linalg::sym(&((&blocks.r12_dot - &a * &blocks.r12) * f * blocks.r12.transpose()));
    Ok(FPCoefficients { a, k, d, t: blocks.t })
}

/// Package the reduced dynamics of a model as a time-dependent
/// Fokker-Planck generator. `tol` controls the propagator quadrature.
pub fn effective_generator(
    model: &QuadraticModel,
    f_res: &DMatrix<f64>,
    gamma_res: Option<&DVector<f64>>,
    tol: f64,
) -> Result<FPGenerator> {
    let n_sub = model.n_sub();
    if n_sub < 1 || n_sub >= model.n_dof() {
        return Err(Error::BadSplit(format!(
            "n_sub = {} must satisfy 1 ≤ n_sub < {}",
            n_sub,
            model.n_dof()
        )));
    }
    // validate the reservoir once, at t = 1 where blocks are generic
    {
        let probe = split_blocks(&propagate(model, 0.0, tol)?, n_sub)?;
        check_reservoir(&probe, f_res, gamma_res)?;
    }
    let sigma_sub = model.sigma().top_left(n_sub);
    let hbar = model.hbar();
    let model = model.clone();
    let f_res = f_res.clone();
    let gamma_res = gamma_res.cloned();
    let family = move |t: f64| -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
        let prop = propagate(&model, t, tol)?;
        let blocks = split_blocks(&prop, n_sub)?;
        let fp = effective_fp(&blocks, &f_res, gamma_res.as_ref())?;
        Ok((fp.a, fp.k, fp.d))
    };
    FPGenerator::new(Coefficients::TimeDependent(Arc::new(family)), sigma_sub, hbar)
}
