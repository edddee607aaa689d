//! Per-sample losses.
//!
//! Two families are supported:
//!
//! * [`LossModel::Quadratic`]: `phi_i(w) = 0.5 (x_i^T w - y_i)^2`. Its gradient
//!   is a scalar multiple of `x_i`, so the dual can be stored compactly.
//! * [`LossModel::PcaQuadratic`]: `phi_i(w) = 0.5 w^T((mu - lambda) I - x_i x_i^T) w - b^T w`.
//!   Individual terms are typically non-convex while their average is convex
//!   whenever `mu > lambda + sigma_max(C)`. Its gradient is a full vector.

use crate::data::{Dataset, DenseVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientForm {
    /// `grad phi_i(w) = phi_i'(x_i^T w) x_i`
    ScalarTimesX,
    FullVector,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LossModel {
    Quadratic,
    PcaQuadratic {
        mu: f64,
        lambda: f64,
        b: DenseVector,
    },
}

/// A per-sample gradient in whichever form the loss produces.
#[derive(Debug, Clone, PartialEq)]
pub enum Gradient {
    /// `coef * x_i`
    Scaled(f64),
    Dense(DenseVector),
}

impl LossModel {
    pub fn pca(mu: f64, lambda: f64, b: DenseVector) -> Self {
        LossModel::PcaQuadratic { mu, lambda, b }
    }

    pub fn gradient_form(&self) -> GradientForm {
        match self {
            LossModel::Quadratic => GradientForm::ScalarTimesX,
            LossModel::PcaQuadratic { .. } => GradientForm::FullVector,
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(self, LossModel::Quadratic)
    }

    pub fn name(&self) -> &'static str {
        match self {
            LossModel::Quadratic => "quadratic",
            LossModel::PcaQuadratic { .. } => "pca",
        }
    }

    /// Verifies that this model can be evaluated on `data`.
    pub fn check(&self, data: &Dataset) -> Result<()> {
        match self {
            LossModel::Quadratic if !data.has_labels() => {
                Err(Error::Config("quadratic loss requires labels".into()))
            }
            LossModel::PcaQuadratic { b, .. } if b.len() != data.dim() => {
                Err(Error::DimensionMismatch {
                    expected: data.dim(),
                    actual: b.len(),
                })
            }
            _ => Ok(()),
        }
    }

    fn check_point(data: &Dataset, i: usize, w: &[f64]) -> Result<()> {
        if i >= data.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                start: 0,
                end: data.n(),
            });
        }
        if w.len() != data.dim() {
            return Err(Error::DimensionMismatch {
                expected: data.dim(),
                actual: w.len(),
            });
        }
        Ok(())
    }

    pub fn value(&self, data: &Dataset, i: usize, w: &[f64]) -> Result<f64> {
        Self::check_point(data, i, w)?;
        Ok(self.value_unchecked(data, i, w))
    }

    pub(crate) fn value_unchecked(&self, data: &Dataset, i: usize, w: &[f64]) -> f64 {
        let x = data.sample(i);
        let xw = x.dot_unchecked(w);
        match self {
            LossModel::Quadratic => {
                let r = xw - data.label(i);
                0.5 * r * r
            }
            LossModel::PcaQuadratic { mu, lambda, b } => {
                let ww: f64 = w.iter().map(|v| v * v).sum();
                let bw: f64 = b.iter().zip(w).map(|(a, c)| a * c).sum();
                0.5 * ((mu - lambda) * ww - xw * xw) - bw
            }
        }
    }

    pub fn gradient(&self, data: &Dataset, i: usize, w: &[f64]) -> Result<Gradient> {
        Self::check_point(data, i, w)?;
        Ok(self.gradient_unchecked(data, i, w))
    }

    pub(crate) fn gradient_unchecked(&self, data: &Dataset, i: usize, w: &[f64]) -> Gradient {
        let x = data.sample(i);
        let xw = x.dot_unchecked(w);
        match self {
            LossModel::Quadratic => Gradient::Scaled(xw - data.label(i)),
            LossModel::PcaQuadratic { mu, lambda, b } => {
                let shift = mu - lambda;
                let mut g: DenseVector = w
                    .iter()
                    .zip(b.iter())
                    .map(|(wj, bj)| shift * wj - bj)
                    .collect::<Vec<_>>()
                    .into();
                for (j, v) in x.iter() {
                    g[j] -= xw * v;
                }
                Gradient::Dense(g)
            }
        }
    }

    /// The gradient materialized as a dense vector.
    pub fn gradient_dense(&self, data: &Dataset, i: usize, w: &[f64]) -> Result<DenseVector> {
        Ok(match self.gradient(data, i, w)? {
            Gradient::Scaled(c) => {
                let mut g = DenseVector::zeros(data.dim());
                for (j, v) in data.sample(i).iter() {
                    g[j] = c * v;
                }
                g
            }
            Gradient::Dense(g) => g,
        })
    }

    /// Convex conjugate of the scalar loss `a -> phi_i(a)`, evaluated at `u`.
    pub fn conjugate(&self, data: &Dataset, i: usize, u: f64) -> Result<f64> {
        match self {
            LossModel::Quadratic => Ok(0.5 * u * u + u * data.label(i)),
            LossModel::PcaQuadratic { .. } => Err(Error::Unsupported(
                "convex conjugate is undefined for the non-convex PCA loss",
            )),
        }
    }

    /// Lipschitz constant `L` of every `grad phi_i`.
    pub fn smoothness(&self, data: &Dataset) -> Result<f64> {
        if data.n() == 0 {
            return Err(Error::EmptyDataset);
        }
        let norms = data.samples().iter().map(|x| x.norm_sq());
        let l = match self {
            LossModel::Quadratic => norms.fold(0.0, f64::max),
            LossModel::PcaQuadratic { mu, lambda, .. } => {
                let shift = mu - lambda;
                norms.fold(0.0_f64, |m, r| m.max(shift.abs()).max((shift - r).abs()))
            }
        };
        Ok(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SparseVector;
    use crate::rng::SampleRng;

    fn ds(rows: &[&[f64]], labels: &[f64]) -> Dataset {
        let d = rows[0].len();
        Dataset::new(
            rows.iter().map(|r| SparseVector::from_dense(r)).collect(),
            labels.to_vec(),
            d,
        )
        .unwrap()
    }

    fn random_dataset(rng: &mut SampleRng, n: usize, d: usize) -> Dataset {
        let rows = (0..n)
            .map(|_| {
                let idx: Vec<usize> = (0..d).filter(|_| rng.bernoulli(0.7)).collect();
                let val = idx.iter().map(|_| rng.normal()).collect();
                SparseVector::new(idx, val, d).unwrap()
            })
            .collect();
        let labels = (0..n).map(|_| rng.normal()).collect();
        Dataset::new(rows, labels, d).unwrap()
    }

    #[test]
    fn value_examples() {
        let data = ds(&[&[1.0, 1.0]], &[1.0]);
        let q = LossModel::Quadratic;
        assert_eq!(q.value(&data, 0, &[0.0, 0.0]).unwrap(), 0.5);
        assert_eq!(q.value(&data, 0, &[1.0, 2.0]).unwrap(), 2.0);
        let p = LossModel::pca(100.0, 1e-4, vec![1.0, 1.0].into());
        assert_eq!(p.value(&data, 0, &[0.0, 0.0]).unwrap(), 0.0);
        assert!(q.value(&data, 1, &[0.0, 0.0]).is_err());
        assert!(q.value(&data, 0, &[0.0]).is_err());
    }

    #[test]
    fn gradient_examples() {
        let data = ds(&[&[2.0, -1.0]], &[3.0]);
        let g = LossModel::Quadratic.gradient_dense(&data, 0, &[0.0, 0.0]).unwrap();
        assert_eq!(&*g, &[-6.0, 3.0]);
        let p = LossModel::pca(100.0, 1e-4, vec![1.0, 1.0].into());
        let g = p.gradient_dense(&data, 0, &[0.0, 0.0]).unwrap();
        assert_eq!(&*g, &[-1.0, -1.0]);
    }

    #[test]
    fn conjugate_examples() {
        let data = ds(&[&[1.0]], &[1.0]);
        let q = LossModel::Quadratic;
        assert_eq!(q.conjugate(&data, 0, 0.0).unwrap(), 0.0);
        assert_eq!(q.conjugate(&data, 0, 1.0).unwrap(), 1.5);
        assert_eq!(q.conjugate(&data, 0, -1.0).unwrap(), -0.5);
        let p = LossModel::pca(1.0, 0.1, vec![0.0].into());
        assert!(matches!(p.conjugate(&data, 0, 1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn conjugate_matches_grid_maximization() {
        // sup_a { u a - 0.5 (a - y)^2 } by brute force over a fine grid
        let data = ds(&[&[1.0]], &[1.0]);
        for u in [1.0, -1.0, 0.3] {
            let best = (-40_000..=40_000)
                .map(|k| {
                    let a = k as f64 * 1e-4;
                    u * a - 0.5 * (a - 1.0) * (a - 1.0)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let got = LossModel::Quadratic.conjugate(&data, 0, u).unwrap();
            assert!((got - best).abs() < 1e-7, "u={u}: {got} vs {best}");
        }
    }

    #[test]
    fn smoothness_examples() {
        let unit = ds(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.0, 0.0]);
        assert_eq!(LossModel::Quadratic.smoothness(&unit).unwrap(), 1.0);
        let p = LossModel::pca(100.0, 1e-4, vec![0.0, 0.0].into());
        assert!((p.smoothness(&unit).unwrap() - 99.9999).abs() < 1e-12);
        let single = ds(&[&[3.0, 4.0]], &[0.0]);
        assert_eq!(LossModel::Quadratic.smoothness(&single).unwrap(), 25.0);
        let empty = Dataset::new(vec![], vec![], 2).unwrap();
        assert!(matches!(
            LossModel::Quadratic.smoothness(&empty),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = SampleRng::new(11);
        let mut checked = 0;
        for trial in 0..60 {
            let d = 1 + trial % 10;
            let data = random_dataset(&mut rng, 4, d);
            let b: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
            let models = [
                LossModel::Quadratic,
                LossModel::pca(3.0 + rng.uniform(), 0.1, b.into()),
            ];
            for model in &models {
                let i = rng.index(data.n());
                let w: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
                let g = model.gradient_dense(&data, i, &w).unwrap();
                let h = 1e-5;
                for j in 0..d {
                    let mut wp = w.clone();
                    let mut wm = w.clone();
                    wp[j] += h;
                    wm[j] -= h;
                    let fd = (model.value(&data, i, &wp).unwrap()
                        - model.value(&data, i, &wm).unwrap())
                        / (2.0 * h);
                    let scale = 1.0 + g.norm_inf();
                    assert!(
                        (fd - g[j]).abs() <= 1e-6 * scale,
                        "{} j={j}: fd {fd} vs {}",
                        model.name(),
                        g[j]
                    );
                }
                checked += 1;
            }
        }
        assert!(checked >= 100);
    }

    #[test]
    fn fenchel_young() {
        let mut rng = SampleRng::new(5);
        let data = random_dataset(&mut rng, 8, 3);
        let q = LossModel::Quadratic;
        for _ in 0..500 {
            let i = rng.index(8);
            let y = data.label(i);
            let a = 3.0 * rng.normal();
            let u = 3.0 * rng.normal();
            let phi = 0.5 * (a - y) * (a - y);
            assert!(phi + q.conjugate(&data, i, u).unwrap() >= u * a - 1e-12);
            // equality at u = phi'(a)
            let u_star = a - y;
            let gap = phi + q.conjugate(&data, i, u_star).unwrap() - u_star * a;
            assert!(gap.abs() <= 1e-10, "gap {gap}");
        }
    }

    #[test]
    fn pca_average_is_convex() {
        let mut rng = SampleRng::new(13);
        for trial in 0..20 {
            let d = 1 + trial % 20;
            let n = 5 + rng.index(40);
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.normal()).collect()).collect();
            let max_sq = rows.iter().map(|r| r.iter().map(|v| v * v).sum::<f64>()).fold(0.0, f64::max);
            let lambda = 0.1 * rng.uniform();
            let mu = lambda + max_sq + rng.uniform();
            let mut h = nalgebra::DMatrix::<f64>::identity(d, d) * (mu - lambda);
            for r in &rows {
                let x = nalgebra::DVector::from_column_slice(r);
                h -= &x * x.transpose() / n as f64;
            }
            let min_eig = h.symmetric_eigen().eigenvalues.min();
            assert!(min_eig >= -1e-10, "trial {trial}: {min_eig}");
        }
    }
}
