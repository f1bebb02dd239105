//! Machine-readable run summary written next to the CSV time series.

use std::collections::BTreeMap;

use phaseflow::AdmissibilityReport;
use serde::Serialize;

use crate::fit::FitResult;

#[derive(Debug, Clone, Serialize)]
pub struct CheckVerdict {
    pub name: String,
    pub passed: bool,
    pub required: bool,
    pub min_eigenvalue: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub boundary: bool,
}

impl CheckVerdict {
    pub fn from_report(name: &str, required: bool, r: &AdmissibilityReport) -> CheckVerdict {
        CheckVerdict {
            name: name.to_string(),
            passed: r.passed,
            required,
            min_eigenvalue: r.min_eigenvalue,
            scale: r.scale,
            tolerance: r.tolerance_used,
            boundary: r.boundary,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub kind: String,
    pub wall_time_s: f64,
    pub checks: Vec<CheckVerdict>,
    pub fits: BTreeMap<String, FitResult>,
    /// Scalar summary values; keys double as sweep table columns.
    pub outputs: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    /// False when any required check failed.
    pub passed: bool,
}

impl RunReport {
    pub fn new(scenario: &str, kind: &str) -> RunReport {
        RunReport {
            scenario: scenario.to_string(),
            kind: kind.to_string(),
            wall_time_s: 0.0,
            checks: Vec::new(),
            fits: BTreeMap::new(),
            outputs: BTreeMap::new(),
            warnings: Vec::new(),
            passed: true,
        }
    }

    pub fn finish(&mut self) {
        self.passed = self.checks.iter().all(|c| c.passed || !c.required);
    }
}
