//! Gaussian phase-space dynamics of quadratic quantum systems.
//!
//! The crate evolves Gaussian Wigner functions of closed systems with
//! Hamiltonians of the form `H = ½ q·B·q + C·q`, reduces the evolution
//! exactly over a Gaussian reservoir, extracts the effective Fokker-Planck
//! drift and diffusion coefficients of the subsystem, and verifies quantum
//! admissibility of covariance matrices and of `(A, D)` generator pairs.
//!
//! Coordinate ordering is subsystem-major throughout: the phase-space
//! vector is `q = (Q, ξ)` with the subsystem block first, and each block is
//! internally ordered as (momenta, coordinates).

pub mod closed;
pub mod error;
pub mod fokker_planck;
pub mod linalg;
pub mod models;
pub mod ode;
pub mod phase_space;
pub mod reduction;

pub use closed::{drift_from_hamiltonian, evolve_gaussian, propagate, Propagator};
pub use error::{Error, Result};
pub use fokker_planck::{
    admissibility, evolve_moments, min_diffusion_bound_1d, steady_state, FPGenerator,
};
pub use phase_space::{
    check_state_admissible, evaluate_wigner, purity, standard_symplectic, transform_frame,
    AdmissibilityReport, GaussianState, QuadraticModel, SymplecticForm,
};
pub use reduction::{
    effective_fp, effective_generator, reduce, split_blocks, FPCoefficients, PropagatorBlocks,
    ReducedPropagator,
};
