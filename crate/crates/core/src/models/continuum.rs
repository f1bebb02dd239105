//! Continuum (dense-reservoir) limit of the thermostat model: the
//! time-independent drift correction and diffusion matrix at `t ≫ 1/ω₀`,
//! with principal-value integrals over the off-resonant couplings, and the
//! admissibility gate restricting which microscopic couplings yield a valid
//! constant-coefficient Fokker-Planck equation.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type FreqFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Reservoir described by smooth functions of frequency: density of states
/// `ν`, the four coupling functions, and the thermal variance `f`.
#[derive(Clone)]
pub struct ContinuumBath {
    pub nu: FreqFn,
    pub z: FreqFn,
    pub v: FreqFn,
    pub u: FreqFn,
    pub g: FreqFn,
    pub f: FreqFn,
    pub omega_min: f64,
    pub omega_max: f64,
}

impl ContinuumBath {
    pub fn delta(&self, w: f64) -> f64 {
        (self.g)(w) * (self.z)(w) - (self.u)(w) * (self.v)(w)
    }

    pub fn kappa(&self, w: f64) -> f64 {
        w * (self.z)(w) * (self.v)(w) + (self.g)(w) * (self.u)(w) / w
    }

    pub fn big_g(&self, w: f64) -> f64 {
        w * (self.v)(w).powi(2) + (self.g)(w).powi(2) / w
    }

    pub fn big_z(&self, w: f64) -> f64 {
        w * (self.z)(w).powi(2) + (self.u)(w).powi(2) / w
    }
}

fn composite_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

fn refine_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut n = 64;
    let mut prev = composite_simpson(f, a, b, n);
    while n <= 1 << 20 {
        n *= 2;
        let cur = composite_simpson(f, a, b, n);
        let change = (cur - prev).abs();
        if change <= 1e-6 * cur.abs().max(1e-9) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::PVNotConverged {
        last_change: (prev - composite_simpson(f, a, b, n)).abs(),
    })
}

/// Principal value of `∫ ψ(x)/(x − x0) dx` over `[a, b]` with `a < x0 < b`,
/// via the symmetric (odd-part) construction about `x0` plus the regular
/// leftover piece.
fn pv_integral(psi: &dyn Fn(f64) -> f64, a: f64, b: f64, x0: f64) -> Result<f64> {
    debug_assert!(a < x0 && x0 < b);
    let l = (x0 - a).min(b - x0);
    let h0 = l * 1e-7;
    let odd = |s: f64| {
        if s < h0 {
            (psi(x0 + h0) - psi(x0 - h0)) / h0
        } else {
            (psi(x0 + s) - psi(x0 - s)) / s
        }
    };
    let symmetric = refine_simpson(&odd, 0.0, l)?;
    let regular = |x: f64| psi(x) / (x - x0);
    let rest = if (x0 - a) < (b - x0) {
        refine_simpson(&regular, x0 + l, b)?
    } else {
        refine_simpson(&regular, a, x0 - l)?
    };
    Ok(symmetric + rest)
}

/// `PV ∫ φ(ω)/(ω² − ω₀²) dω` over the bath window, computed in the variable
/// `x = ω²` where the reflection-cancellation structure lives.
fn pv_freq(bath: &ContinuumBath, omega0: f64, phi: &dyn Fn(f64) -> f64) -> Result<f64> {
    let (a, b) = (bath.omega_min.powi(2), bath.omega_max.powi(2));
    let x0 = omega0 * omega0;
    let psi = |x: f64| {
        let w = x.sqrt();
        phi(w) / (2.0 * w)
    };
    pv_integral(&psi, a, b, x0)
}

/// Long-time drift correction `μ`, diffusion matrix `D`, and damping rate
/// `γ = −½Tr μ` of the reduced oscillator in the continuum limit.
pub fn continuum_fp(bath: &ContinuumBath, omega0: f64) -> Result<(DMatrix<f64>, DMatrix<f64>, f64)> {
    if !(bath.omega_min < omega0 && omega0 < bath.omega_max) {
        return Err(Error::WindowExcludesResonance {
            lo: bath.omega_min,
            hi: bath.omega_max,
            omega0,
        });
    }
    let pi = std::f64::consts::PI;
    let nu0 = (bath.nu)(omega0);
    let f0 = (bath.f)(omega0);
    let d0 = bath.delta(omega0);
    let k0 = bath.kappa(omega0);
    let g0 = bath.big_g(omega0);
    let z0 = bath.big_z(omega0);

    let i_kappa = pv_freq(bath, omega0, &|w| w * bath.kappa(w) * (bath.nu)(w))?;
    let i_dg = pv_freq(bath, omega0, &|w| {
        (bath.nu)(w) * (omega0 * omega0 * bath.delta(w) + w * bath.big_g(w))
    })?;
    let i_dz = pv_freq(bath, omega0, &|w| {
        (bath.nu)(w) * (bath.delta(w) + w * bath.big_z(w))
    })?;
    let i_fkappa = pv_freq(bath, omega0, &|w| {
        w * (bath.f)(w) * bath.kappa(w) * (bath.nu)(w)
    })?;
    let i_fzg = pv_freq(bath, omega0, &|w| {
        w * (bath.f)(w) * (bath.nu)(w) * (omega0 * omega0 * bath.big_z(w) - bath.big_g(w))
    })?;

    let mut mu = DMatrix::<f64>::zeros(2, 2);
    mu[(0, 0)] = -0.5 * pi * nu0 * (d0 + g0 / omega0) + i_kappa;
    mu[(0, 1)] = 0.5 * pi * nu0 * omega0 * k0 + i_dg;
    mu[(1, 0)] = 0.5 * pi * nu0 * k0 / omega0 - i_dz;
    mu[(1, 1)] = -0.5 * pi * nu0 * (d0 + omega0 * z0) - i_kappa;

    let mut d = DMatrix::<f64>::zeros(2, 2);
    d[(0, 0)] = 0.5 * pi * nu0 * f0 * omega0 * (omega0 * d0 + g0) - omega0 * omega0 * i_fkappa;
    d[(1, 1)] = 0.5 * pi * nu0 * f0 * (d0 + omega0 * z0) + i_fkappa;
    d[(0, 1)] = -0.5 * pi * nu0 * omega0 * f0 * k0 + i_fzg;
    d[(1, 0)] = d[(0, 1)];

    let gamma = 0.25 * pi * nu0 * (2.0 * d0 + omega0 * z0 + g0 / omega0);
    Ok((mu, d, gamma))
}

/// Verdict of the self-consistency gate for constant-coefficient reduced
/// dynamics built from couplings at the resonance frequency.
#[derive(Debug, Clone, Copy)]
pub struct RwaGate {
    pub passed: bool,
    /// `(4f₀ω₀/ħ)² [2Δ² + Δ(ω₀Z + G/ω₀)]`.
    pub lhs: f64,
    /// `[2Δ + (ω₀Z + G/ω₀)]²`.
    pub rhs: f64,
    /// Zero-temperature equivalent `(u+v)² + (ω₀z − g/ω₀)²`; the gate holds
    /// at `f₀ = ħ/2ω₀` exactly when this vanishes.
    pub zero_t_defect: f64,
    /// Damping rate `¼πν₀[2Δ + ω₀Z + G/ω₀]` implied by these couplings.
    pub gamma: f64,
}

/// Evaluate the admissibility gate for couplings `(z, v, u, g)` at `ω₀` with
/// thermal variance `f0` and density of states `nu0`.
#[allow(clippy::too_many_arguments)]
pub fn rwa_gate(
    z: f64,
    v: f64,
    u: f64,
    g: f64,
    f0: f64,
    nu0: f64,
    omega0: f64,
    hbar: f64,
) -> RwaGate {
    let delta = g * z - u * v;
    let zg = omega0 * (omega0 * z * z + u * u / omega0)
        + (omega0 * v * v + g * g / omega0) / omega0;
    let lhs = (4.0 * f0 * omega0 / hbar).powi(2) * (2.0 * delta * delta + delta * zg);
    let rhs = (2.0 * delta + zg).powi(2);
    let scale = lhs.abs().max(rhs.abs()).max(1e-30);
    RwaGate {
        passed: lhs - rhs >= -1e-10 * scale,
        lhs,
        rhs,
        zero_t_defect: (u + v).powi(2) + (omega0 * z - g / omega0).powi(2),
        gamma: 0.25 * std::f64::consts::PI * nu0 * (2.0 * delta + zg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn constant(c: f64) -> FreqFn {
        Arc::new(move |_| c)
    }

    #[test]
    fn pv_of_even_function_vanishes_on_symmetric_window() {
        let psi = |x: f64| (x - 2.0).powi(2);
        let v = pv_integral(&psi, 1.0, 3.0, 2.0).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn pv_matches_closed_form() {
        // PV ∫₀³ 1/(x−1) dx = ln 2
        let psi = |_x: f64| 1.0;
        let v = pv_integral(&psi, 0.0, 3.0, 1.0).unwrap();
        assert_relative_eq!(v, 2f64.ln(), epsilon = 1e-8);
        // PV ∫₀³ x/(x−1) dx = 3 + ln 2
        let psi = |x: f64| x;
        let v = pv_integral(&psi, 0.0, 3.0, 1.0).unwrap();
        assert_relative_eq!(v, 3.0 + 2f64.ln(), epsilon = 1e-7);
    }

    #[test]
    fn window_must_contain_resonance() {
        let bath = ContinuumBath {
            nu: constant(1.0),
            z: constant(0.0),
            v: constant(0.0),
            u: constant(0.0),
            g: constant(0.1),
            f: constant(0.5),
            omega_min: 2.0,
            omega_max: 3.0,
        };
        assert!(matches!(
            continuum_fp(&bath, 1.0),
            Err(Error::WindowExcludesResonance { .. })
        ));
    }

    #[test]
    fn zero_couplings_give_zero_coefficients() {
        let bath = ContinuumBath {
            nu: constant(2.0),
            z: constant(0.0),
            v: constant(0.0),
            u: constant(0.0),
            g: constant(0.0),
            f: constant(0.5),
            omega_min: 0.5,
            omega_max: 2.0,
        };
        let (mu, d, gamma) = continuum_fp(&bath, 1.0).unwrap();
        assert_eq!(mu.norm(), 0.0);
        assert_eq!(d.norm(), 0.0);
        assert_eq!(gamma, 0.0);
    }

    /// Couplings engineered so that κ, G, Z are a common even profile of
    /// x = ω² about x₀ = ω₀² and Δ ≡ 0 over a symmetric window: every
    /// principal-value integrand is odd and the integrals vanish.
    fn cancellation_bath(omega0: f64, width: f64) -> ContinuumBath {
        let x0 = omega0 * omega0;
        let h = move |x: f64| (-(x - x0).powi(2) / (width * width)).exp();
        let (gh, zh, uh, vh) = (0.2, 0.3, 0.15, 0.4); // gh·zh = uh·vh
        ContinuumBath {
            nu: constant(1.3),
            z: Arc::new(move |w| zh * (h(w * w) / w).sqrt()),
            v: Arc::new(move |w| vh * (h(w * w) / w).sqrt()),
            u: Arc::new(move |w| uh * (w * h(w * w)).sqrt()),
            g: Arc::new(move |w| gh * (w * h(w * w)).sqrt()),
            f: constant(0.8),
            omega_min: (x0 - 1.0).sqrt(),
            omega_max: (x0 + 1.0).sqrt(),
        }
    }

    #[test]
    fn cancellation_hypothesis_yields_proportional_diffusion() {
        let omega0 = 1.3;
        let bath = cancellation_bath(omega0, 0.4);
        assert!(bath.delta(1.1).abs() < 1e-15);
        let f0 = 0.8;
        let (mu, d, _) = continuum_fp(&bath, omega0).unwrap();
        let w2 = omega0 * omega0;
        assert!(mu[(0, 0)] < 0.0 && mu[(1, 1)] < 0.0);
        assert!(mu[(0, 1)].abs() > 1e-3, "κ₀ term should be active");
        assert_relative_eq!(d[(0, 0)], -w2 * f0 * mu[(0, 0)], max_relative = 1e-9);
        assert_relative_eq!(d[(1, 1)], -f0 * mu[(1, 1)], max_relative = 1e-9);
        assert_relative_eq!(d[(0, 1)], -f0 * mu[(0, 1)], max_relative = 1e-9);
        assert_relative_eq!(d[(0, 1)], -w2 * f0 * mu[(1, 0)], max_relative = 1e-9);
    }

    /// Balanced couplings `u = −v`, `z = g/ω²` at every frequency: the
    /// drift is diagonal −γ up to off-diagonal renormalization integrals,
    /// and the diffusion obeys D₁₁ = ω₀²D₂₂, D₂₂ = γf₀,
    /// D₁₂ = −(1/π)∫ f(ω)γ(ω)dω.
    fn balanced_bath(omega0: f64) -> (ContinuumBath, f64, f64) {
        let (u0, g0, nu0, f0) = (0.06, 0.05, 1.5, 0.7);
        let g_fn = move |w: f64| g0 * (1.0 + 0.3 * (w - omega0));
        (
            ContinuumBath {
                nu: constant(nu0),
                z: Arc::new(move |w| g_fn(w) / (w * w)),
                v: constant(-u0),
                u: constant(u0),
                g: Arc::new(g_fn),
                f: constant(f0),
                omega_min: 0.4,
                omega_max: 2.2,
            },
            nu0,
            f0,
        )
    }

    #[test]
    fn balanced_couplings_reproduce_exponential_relaxation() {
        let omega0 = 1.1;
        let (bath, nu0, f0) = balanced_bath(omega0);
        assert!(bath.kappa(0.7).abs() < 1e-15);
        let (mu, d, gamma) = continuum_fp(&bath, omega0).unwrap();
        let delta0 = bath.delta(omega0);
        assert_relative_eq!(gamma, std::f64::consts::PI * nu0 * delta0, max_relative = 1e-12);
        assert_relative_eq!(mu[(0, 0)], -gamma, max_relative = 1e-10);
        assert_relative_eq!(mu[(1, 1)], -gamma, max_relative = 1e-10);
        assert_relative_eq!(d[(1, 1)], gamma * f0, max_relative = 1e-10);
        assert_relative_eq!(d[(0, 0)], omega0 * omega0 * d[(1, 1)], max_relative = 1e-10);

        // D₁₂ against a direct quadrature of −(1/π)∫ f γ(ω) dω
        let integrand = |w: f64| f0 * std::f64::consts::PI * nu0 * bath.delta(w);
        let direct = -refine_simpson(&integrand, bath.omega_min, bath.omega_max).unwrap()
            / std::f64::consts::PI;
        assert_relative_eq!(d[(0, 1)], direct, max_relative = 1e-4);
        assert!(d[(0, 1)] < 0.0);
    }

    #[test]
    fn gate_passes_balanced_couplings_with_equality_at_zero_t() {
        let omega0 = 1.2;
        let (g, u) = (0.04, 0.07);
        let hbar = 1.0;
        let gate = rwa_gate(g / (omega0 * omega0), -u, u, g, hbar / (2.0 * omega0), 1.0, omega0, hbar);
        assert!(gate.passed);
        assert!(gate.zero_t_defect < 1e-15);
        assert_relative_eq!(gate.lhs, gate.rhs, max_relative = 1e-12);
    }

    #[test]
    fn gate_fails_single_coupling_channels() {
        let omega0 = 1.0;
        let hbar = 1.0;
        let f0 = hbar / (2.0 * omega0);
        for (z, v, u, g) in [
            (0.0, 0.0, 0.0, 0.1),
            (0.1, 0.0, 0.0, 0.0),
            (0.0, 0.1, 0.0, 0.0),
            (0.0, 0.0, 0.1, 0.0),
        ] {
            let gate = rwa_gate(z, v, u, g, f0, 1.0, omega0, hbar);
            assert!(!gate.passed, "({z},{v},{u},{g}) should fail");
            assert!(gate.zero_t_defect > 0.0);
        }
    }

    #[test]
    fn gate_passes_any_positive_delta_at_high_temperature() {
        // f₀ → ∞ scales the left side as f₀² while the right side is fixed
        let gate = rwa_gate(0.2, 0.1, 0.05, 0.3, 1e6, 1.0, 1.0, 1.0);
        assert!(rwa_gate(0.2, 0.1, 0.05, 0.3, 1e6, 1.0, 1.0, 1.0).gamma > 0.0);
        assert!(gate.passed);
    }
}
