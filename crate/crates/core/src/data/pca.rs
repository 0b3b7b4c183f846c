use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::autodiff::{gemm, Tensor};
use crate::error::{GeomError, Result};

/// Fitted principal-component projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pca {
    pub mean: Vec<f64>,
    /// D × k, columns are unit eigenvectors by decreasing eigenvalue.
    pub components: Tensor,
    pub explained_variance: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
}

impl Pca {
    pub fn fit(x: &Tensor, dims: usize) -> Result<Self> {
        let (n, d) = x.shape();
        if dims == 0 || dims > d {
            return Err(GeomError::Config(format!("pca dims {dims} outside 1..={d}")));
        }
        if n < 2 {
            return Err(GeomError::Config("pca needs at least 2 rows".into()));
        }
        let mean = x.column_means();
        let mut centered = x.clone();
        for row in centered.data_mut().chunks_exact_mut(d) {
            for (v, m) in row.iter_mut().zip(&mean) {
                *v -= m;
            }
        }
        let cov = gemm(&centered, true, &centered, false).scale(1.0 / (n - 1) as f64);
        let eig = SymmetricEigen::new(DMatrix::from_row_slice(d, d, cov.data()));
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        let total: f64 = eig.eigenvalues.iter().map(|v| v.max(0.0)).sum();
        let mut components = Tensor::zeros(d, dims);
        let mut explained_variance = Vec::with_capacity(dims);
        for (k, &idx) in order.iter().take(dims).enumerate() {
            let col = eig.eigenvectors.column(idx);
            // Deterministic sign: largest-magnitude loading positive.
            let pivot = (0..d).max_by(|&a, &b| col[a].abs().total_cmp(&col[b].abs()).then(b.cmp(&a))).unwrap_or(0);
            let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
            for r in 0..d {
                components.set(r, k, sign * col[r]);
            }
            explained_variance.push(eig.eigenvalues[idx].max(0.0));
        }
        let explained_variance_ratio =
            explained_variance.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect();
        Ok(Self { mean, components, explained_variance, explained_variance_ratio })
    }

    pub fn dims(&self) -> usize {
        self.components.cols()
    }

    pub fn transform(&self, x: &Tensor) -> Result<Tensor> {
        let d = self.mean.len();
        if x.cols() != d {
            return Err(GeomError::Dimension { op: "pca transform", left: x.shape(), right: self.components.shape() });
        }
        let mut centered = x.clone();
        if d > 0 {
            for row in centered.data_mut().chunks_exact_mut(d) {
                for (v, m) in row.iter_mut().zip(&self.mean) {
                    *v -= m;
                }
            }
        }
        Ok(gemm(&centered, false, &self.components, false))
    }

    pub fn inverse_transform(&self, z: &Tensor) -> Result<Tensor> {
        if z.cols() != self.dims() {
            return Err(GeomError::Dimension { op: "pca inverse", left: z.shape(), right: self.components.shape() });
        }
        let mut out = gemm(z, false, &self.components, true);
        let d = self.mean.len();
        for row in out.data_mut().chunks_exact_mut(d) {
            for (v, m) in row.iter_mut().zip(&self.mean) {
                *v += m;
            }
        }
        Ok(out)
    }
}

/// Projects a dataset onto its top `dims` principal components.
pub fn pca_reduce(d: &Dataset, dims: usize) -> Result<(Dataset, Pca)> {
    let pca = Pca::fit(d.rows(), dims)?;
    let rows = pca.transform(d.rows())?;
    let names = (0..dims).map(|i| format!("pc{i}")).collect();
    let out = Dataset::new(rows, d.labels().map(<[i64]>::to_vec), Some(names), format!("{} | pca {dims}", d.provenance))?;
    Ok((out, pca))
}
