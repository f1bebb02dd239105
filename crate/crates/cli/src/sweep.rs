//! Parameter sweeps: patch one numeric leaf of the config per value and run
//! the scenarios in parallel, collecting the scalar outputs into one table.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;

use crate::config::{parse_config, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::output;
use crate::scenario;

/// `"0.1,0.2,0.5"` or a linear range `"0.1:1.0:10"` (inclusive endpoints).
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Config(format!("sweep values: cannot parse {s:?}")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let (a, b) = (parse(parts[0])?, parse(parts[1])?);
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("sweep values: bad count {:?}", parts[2])))?;
        if n < 2 {
            return Err(CliError::Config("sweep values: range needs at least 2 points".into()));
        }
        return Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect());
    }
    let vals: Result<Vec<f64>> = text.split(',').map(parse).collect();
    let vals = vals?;
    if vals.is_empty() {
        return Err(CliError::Config("sweep values: empty list".into()));
    }
    Ok(vals)
}

fn patch_leaf(root: &mut toml::Value, path: &str, value: f64) -> Result<()> {
    let mut node = root;
    let keys: Vec<&str> = path.split('.').collect();
    let (last, walk) = keys.split_last().ok_or_else(|| {
        CliError::UnknownParameter(path.to_string())
    })?;
    for key in walk {
        node = node
            .get_mut(*key)
            .ok_or_else(|| CliError::UnknownParameter(path.to_string()))?;
    }
    let leaf = node
        .get_mut(*last)
        .ok_or_else(|| CliError::UnknownParameter(path.to_string()))?;
    match leaf {
        toml::Value::Float(_) | toml::Value::Integer(_) => {
            *leaf = toml::Value::Float(value);
            Ok(())
        }
        _ => Err(CliError::UnknownParameter(path.to_string())),
    }
}

pub fn configs_for_sweep(
    config_text: &str,
    param: &str,
    values: &[f64],
) -> Result<Vec<ScenarioConfig>> {
    let base: toml::Value = config_text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    values
        .iter()
        .map(|&v| {
            let mut patched = base.clone();
            patch_leaf(&mut patched, param, v)?;
            let text = toml::to_string(&patched)
                .map_err(|e| CliError::Config(format!("sweep re-serialization: {e}")))?;
            parse_config(&text)
        })
        .collect()
}

/// Run the sweep and write `<id>.sweep.csv` with one row per value, columns
/// being the union of scalar outputs in deterministic (sorted) order.
pub fn run_sweep(
    config_text: &str,
    param: &str,
    values: &[f64],
    out_dir: &Path,
) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let configs = configs_for_sweep(config_text, param, values)?;
    let outcomes: Vec<Result<scenario::ScenarioOutcome>> =
        configs.par_iter().map(scenario::execute).collect();

    let mut keys = BTreeSet::new();
    let mut reports = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let outcome = outcome?;
        keys.extend(outcome.report.outputs.keys().cloned());
        reports.push(outcome.report);
    }
    let mut headers = vec![param.to_string()];
    headers.extend(keys.iter().cloned());
    let rows: Vec<Vec<f64>> = values
        .iter()
        .zip(&reports)
        .map(|(&v, report)| {
            let mut row = vec![v];
            for key in &keys {
                row.push(report.outputs.get(key).copied().unwrap_or(f64::NAN));
            }
            row
        })
        .collect();

    std::fs::create_dir_all(out_dir)?;
    let id = &configs[0].scenario.id;
    std::fs::write(
        out_dir.join(format!("{id}.sweep.csv")),
        output::render_csv(&headers, &rows),
    )?;
    Ok((headers, rows))
}
