use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{invalid, Result};

/// Column centring and scaling followed by projection onto the leading principal axes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Sample standard deviation per column; 1 for constant columns.
    pub scale: Vec<f64>,
    /// `k` orthonormal rows of length `dim`, by decreasing eigenvalue.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    /// Share of the total variance along each kept component.
    pub explained_variance_ratio: Vec<f64>,
}

/// How many components to keep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Components {
    Count(usize),
    /// Smallest count whose cumulative explained variance reaches the fraction.
    Variance(f64),
    All,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn scale_row(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).zip(&self.scale).map(|((v, m), s)| (v - m) / s).collect()
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        let z = self.scale_row(x);
        self.components.iter().map(|c| c.iter().zip(&z).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn transform_all(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }

    pub fn inverse_transform(&self, y: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|j| {
                let z: f64 = self.components.iter().zip(y).map(|(c, v)| c[j] * v).sum();
                z * self.scale[j] + self.mean[j]
            })
            .collect()
    }
}

pub fn fit_scaler_pca(rows: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    fit_scaler_pca_with(rows, Components::Count(k))
}

pub fn fit_scaler_pca_with(rows: &[Vec<f64>], keep: Components) -> Result<PcaModel> {
    let n = rows.len();
    if n < 2 {
        return Err(invalid(format!("PCA needs at least 2 rows, got {n}")));
    }
    let d = rows[0].len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(invalid("rows differ in length"));
    }
    if let Components::Count(k) = keep {
        if k > d {
            return Err(invalid(format!("{k} components requested from {d} features")));
        }
    }
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let scale: Vec<f64> = (0..d)
        .map(|j| {
            let var = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / (n - 1) as f64;
            let sd = var.sqrt();
            if sd > 1e-12 * (1.0 + mean[j].abs()) { sd } else { 1.0 }
        })
        .collect();
    let z = DMatrix::from_fn(n, d, |i, j| (rows[i][j] - mean[j]) / scale[j]);
    let cov = (z.transpose() * &z) / (n - 1) as f64;
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = values.iter().sum();
    let ratios: Vec<f64> = values.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect();

    let k = match keep {
        Components::Count(k) => k,
        Components::All => d,
        Components::Variance(f) => {
            let mut acc = 0.0;
            let mut k = 0;
            while k < d && (acc < f - 1e-12 || k == 0) {
                acc += ratios[k];
                k += 1;
            }
            k
        }
    };
    let components = order[..k]
        .iter()
        .map(|&i| {
            let mut c: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            // the first entry of (near) largest magnitude is made positive
            let max = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let lead = c.iter().copied().find(|v| v.abs() >= max - 1e-9).unwrap_or(0.0);
            if lead < 0.0 {
                c.iter_mut().for_each(|v| *v = -*v);
            }
            c
        })
        .collect();
    Ok(PcaModel {
        mean,
        scale,
        components,
        eigenvalues: values[..k].to_vec(),
        explained_variance_ratio: ratios[..k].to_vec(),
    })
}
