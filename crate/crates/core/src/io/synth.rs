//! Seeded synthetic datasets for the two experiment families.

use crate::data::{Dataset, DenseVector, SparseVector};
use crate::error::{Error, Result};
use crate::loss::LossModel;
use crate::rng::{stream_seed, SampleRng};

/// Stream id of the PCA linear term `b` under the data seed.
pub const PCA_B_STREAM: u64 = 1;

/// Ridge regression data: entries of `x_i` are `N(0, 1/d)`, a planted
/// `w_true ~ N(0, I)` gives `y_i = x_i^T w_true + noise * N(0, 1)`.
pub fn gen_synthetic_ridge(n: usize, d: usize, noise: f64, seed: u64) -> Result<(Dataset, LossModel)> {
    if n == 0 || d == 0 {
        return Err(Error::Config("synthetic ridge data needs n >= 1 and d >= 1".into()));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::Config("noise must be non-negative".into()));
    }
    let mut rng = SampleRng::new(seed);
    let scale = 1.0 / (d as f64).sqrt();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| scale * rng.normal()).collect())
        .collect();
    let w_true: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
    let labels = rows
        .iter()
        .map(|r| r.iter().zip(&w_true).map(|(a, b)| a * b).sum::<f64>() + noise * rng.normal())
        .collect();
    let samples = rows.iter().map(|r| SparseVector::from_dense(r)).collect();
    Ok((Dataset::new(samples, labels, d)?, LossModel::Quadratic))
}

/// Standard normal rows with each column's mean subtracted, before row
/// normalization.
pub(crate) fn centered_gaussian_rows(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = SampleRng::new(seed);
    let mut rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.normal()).collect()).collect();
    for j in 0..d {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        for r in rows.iter_mut() {
            r[j] -= mean;
        }
    }
    rows
}

/// Gaussian linear term of the PCA loss.
pub fn gen_pca_b(d: usize, b_seed: u64) -> DenseVector {
    let mut rng = SampleRng::new(b_seed);
    (0..d).map(|_| rng.normal()).collect::<Vec<_>>().into()
}

/// Unit-norm, column-centred Gaussian rows (no labels) and the shifted
/// covariance loss with `b` drawn from the stream [`PCA_B_STREAM`] of `seed`.
pub fn gen_synthetic_pca(n: usize, d: usize, mu: f64, lambda: f64, seed: u64) -> Result<(Dataset, LossModel)> {
    gen_synthetic_pca_with_b(n, d, mu, lambda, seed, stream_seed(seed, PCA_B_STREAM))
}

/// [`gen_synthetic_pca`] with an explicit seed for `b`.
pub fn gen_synthetic_pca_with_b(
    n: usize,
    d: usize,
    mu: f64,
    lambda: f64,
    seed: u64,
    b_seed: u64,
) -> Result<(Dataset, LossModel)> {
    if n < 2 || d == 0 {
        return Err(Error::Config("synthetic PCA data needs n >= 2 and d >= 1".into()));
    }
    let samples = centered_gaussian_rows(n, d, seed)
        .into_iter()
        .map(|mut r| {
            let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                r.iter_mut().for_each(|v| *v /= norm);
            }
            SparseVector::from_dense(&r)
        })
        .collect();
    let data = Dataset::new(samples, Vec::new(), d)?;
    Ok((data, LossModel::pca(mu, lambda, gen_pca_b(d, b_seed))))
}
