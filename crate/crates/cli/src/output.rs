//! CSV layout: `t`, labeled mean components, covariance upper triangle
//! row-major, purity, min eig of the uncertainty matrix; coefficient
//! scenarios append flattened A, K, D columns. 17 significant digits
//! throughout so fixtures round-trip exactly.

use nalgebra::{DMatrix, DVector};

/// Phase-space coordinate names for the subsystem-major ordering.
pub fn coord_labels(n_sub: usize, n_res: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(2 * (n_sub + n_res));
    for i in 1..=n_sub {
        names.push(format!("p{i}"));
    }
    for i in 1..=n_sub {
        names.push(format!("x{i}"));
    }
    for i in n_sub + 1..=n_sub + n_res {
        names.push(format!("p{i}"));
    }
    for i in n_sub + 1..=n_sub + n_res {
        names.push(format!("x{i}"));
    }
    names
}

pub fn magnetic_labels() -> Vec<String> {
    ["pi_x", "pi_y", "x", "y"].iter().map(|s| s.to_string()).collect()
}

pub fn moment_headers(labels: &[String]) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for l in labels {
        h.push(format!("mean_{l}"));
    }
    for i in 0..labels.len() {
        for j in i..labels.len() {
            h.push(format!("cov_{}_{}", labels[i], labels[j]));
        }
    }
    h.push("purity".into());
    h.push("min_eig_phi".into());
    h
}

pub fn coefficient_headers(labels: &[String]) -> Vec<String> {
    let n = labels.len();
    let mut h = Vec::new();
    for i in 0..n {
        for j in 0..n {
            h.push(format!("A_{}_{}", labels[i], labels[j]));
        }
    }
    for l in labels {
        h.push(format!("K_{l}"));
    }
    for i in 0..n {
        for j in i..n {
            h.push(format!("D_{}_{}", labels[i], labels[j]));
        }
    }
    h
}

pub fn push_moments(row: &mut Vec<f64>, mean: &DVector<f64>, cov: &DMatrix<f64>) {
    for v in mean.iter() {
        row.push(*v);
    }
    for i in 0..cov.nrows() {
        for j in i..cov.ncols() {
            row.push(cov[(i, j)]);
        }
    }
}

pub fn push_coefficients(
    row: &mut Vec<f64>,
    a: &DMatrix<f64>,
    k: &DVector<f64>,
    d: &DMatrix<f64>,
) {
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            row.push(a[(i, j)]);
        }
    }
    for v in k.iter() {
        row.push(*v);
    }
    for i in 0..d.nrows() {
        for j in i..d.ncols() {
            row.push(d[(i, j)]);
        }
    }
}

pub fn nan_coefficients(row: &mut Vec<f64>, n: usize) {
    for _ in 0..n * n + n + n * (n + 1) / 2 {
        row.push(f64::NAN);
    }
}

pub fn render_csv(headers: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&headers.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), headers.len());
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
