//! Constructors and closed-form reference results for the concrete systems
//! studied by the crate: coupled oscillator pairs, the dual (gain/loss)
//! oscillator, an oscillator in a discrete or continuum thermostat, and a
//! charged oscillator in a magnetic field.

pub mod bateman;
pub mod bath;
pub mod continuum;
pub mod coupled_pair;
pub mod magnetic;

pub use bateman::{bateman_model, BatemanSpec};
pub use bath::{
    bath_model, bath_relax_trajectory, mixture_f, perturbative_mu_d, reservoir_covariance,
    thermal_f, BathMode, BathSpec,
};
pub use continuum::{continuum_fp, rwa_gate, ContinuumBath, RwaGate};
pub use coupled_pair::{
    coupled_pair, coupled_pair_r11_closed_form, normal_frequencies, CoupledPairSpec,
};
pub use magnetic::{magnetic_model, MagneticModel, MagneticSpec};
