//! Least-squares exponential fits over trajectory samples.

use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitResult {
    /// Sign convention: `value ∝ e^{−rate·t}`.
    pub rate: f64,
    pub amplitude: f64,
    pub rms_residual: f64,
}

/// Fit `log(value)` to a linear model over at least 10 strictly positive
/// samples.
pub fn fit_decay(t: &[f64], value: &[f64]) -> Result<FitResult> {
    if t.len() != value.len() {
        return Err(CliError::Config("fit series: mismatched lengths".into()));
    }
    if t.len() < 10 {
        return Err(CliError::Config(format!(
            "fit series: need at least 10 samples, got {}",
            t.len()
        )));
    }
    if value.iter().any(|&v| !(v > 0.0)) {
        return Err(CliError::NonPositiveSeries);
    }
    let n = t.len() as f64;
    let logs: Vec<f64> = value.iter().map(|v| v.ln()).collect();
    let st: f64 = t.iter().sum();
    let sl: f64 = logs.iter().sum();
    let stt: f64 = t.iter().map(|x| x * x).sum();
    let stl: f64 = t.iter().zip(&logs).map(|(x, l)| x * l).sum();
    let denom = n * stt - st * st;
    let slope = if denom.abs() > 0.0 { (n * stl - st * sl) / denom } else { 0.0 };
    let intercept = (sl - slope * st) / n;
    let rms = (t
        .iter()
        .zip(&logs)
        .map(|(x, l)| (l - (intercept + slope * x)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(FitResult { rate: -slope, amplitude: intercept.exp(), rms_residual: rms })
}
