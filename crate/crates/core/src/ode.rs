//! Adaptive Dormand-Prince 5(4) integrator for the small linear ODE systems
//! used by the moment-evolution and oracle code.

use nalgebra::DVector;

use crate::error::{Error, Result};

pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `y' = f(t, y)` from `t0` to `t1`, returning `y(t1)`.
pub fn integrate<F>(f: &mut F, t0: f64, y0: &DVector<f64>, t1: f64, opts: &OdeOptions) -> Result<DVector<f64>>
where
    F: FnMut(f64, &DVector<f64>) -> Result<DVector<f64>>,
{
    if t1 == t0 {
        return Ok(y0.clone());
    }
    let span = t1 - t0;
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0.clone();
    let mut k1 = f(t, &y)?;
    let mut h = 0.01 * span;
    let h_min = span.abs() * 1e-14;

    for _ in 0..opts.max_steps {
        if (t - t1).abs() <= span.abs() * 1e-15 {
            return Ok(y);
        }
        if (h.abs() > (t1 - t).abs()) || ((t + h - t1) * dir > 0.0) {
            h = t1 - t;
        }

        let k2 = f(t + A21 * h, &(&y + h * A21 * &k1))?;
        let k3 = f(t + 0.3 * h, &(&y + h * (A31 * &k1 + A32 * &k2)))?;
        let k4 = f(t + 0.8 * h, &(&y + h * (A41 * &k1 + A42 * &k2 + A43 * &k3)))?;
        let k5 = f(
            t + (8.0 / 9.0) * h,
            &(&y + h * (A51 * &k1 + A52 * &k2 + A53 * &k3 + A54 * &k4)),
        )?;
        let k6 = f(
            t + h,
            &(&y + h * (A61 * &k1 + A62 * &k2 + A63 * &k3 + A64 * &k4 + A65 * &k5)),
        )?;
        let y_new = &y + h * (B1 * &k1 + B3 * &k3 + B4 * &k4 + B5 * &k5 + B6 * &k6);
        let k7 = f(t + h, &y_new)?;
        let err_vec = h * (E1 * &k1 + E3 * &k3 + E4 * &k4 + E5 * &k5 + E6 * &k6 + E7 * &k7);

        let mut err: f64 = 0.0;
        for i in 0..y.len() {
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (err_vec[i] / sc).powi(2);
        }
        err = (err / y.len().max(1) as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7;
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h.abs() < h_min {
            return Err(Error::ToleranceNotMet { tol: opts.rtol, t });
        }
    }
    Err(Error::ToleranceNotMet { tol: opts.rtol, t })
}

/// Integrate over a monotone time grid, returning the solution at each node
/// (including the first, which is `y0` itself).
pub fn integrate_grid<F>(
    f: &mut F,
    t_grid: &[f64],
    y0: &DVector<f64>,
    opts: &OdeOptions,
) -> Result<Vec<DVector<f64>>>
where
    F: FnMut(f64, &DVector<f64>) -> Result<DVector<f64>>,
{
    let mut out = Vec::with_capacity(t_grid.len());
    let mut y = y0.clone();
    out.push(y.clone());
    for w in t_grid.windows(2) {
        y = integrate(f, w[0], &y, w[1], opts)?;
        out.push(y.clone());
    }
    Ok(out)
}
