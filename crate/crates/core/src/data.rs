//! Vectors, datasets and the worker partition.

use std::ops::{Deref, DerefMut, Range};

use crate::error::{Error, Result};

/// A sparse feature row with strictly increasing 0-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    indices: Vec<usize>,
    values: Vec<f64>,
    dim: usize,
}

impl SparseVector {
    pub fn new(indices: Vec<usize>, values: Vec<f64>, dim: usize) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: indices.len(),
                actual: values.len(),
            });
        }
        if indices.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::Config("sparse indices must be strictly increasing".into()));
        }
        if let Some(&last) = indices.last() {
            if last >= dim {
                return Err(Error::IndexOutOfRange {
                    index: last,
                    start: 0,
                    end: dim,
                });
            }
        }
        Ok(Self {
            indices,
            values,
            dim,
        })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            indices: Vec::new(),
            values: Vec::new(),
            dim,
        }
    }

    /// Keeps every entry of `dense`, including zeros.
    pub fn from_dense(dense: &[f64]) -> Self {
        Self {
            indices: (0..dense.len()).collect(),
            values: dense.to_vec(),
            dim: dense.len(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn to_dense(&self) -> DenseVector {
        let mut out = DenseVector::zeros(self.dim);
        for (j, v) in self.iter() {
            out[j] = v;
        }
        out
    }

    /// `x^T w` without the dimension check.
    #[inline]
    pub(crate) fn dot_unchecked(&self, w: &[f64]) -> f64 {
        debug_assert_eq!(self.dim, w.len());
        self.iter().map(|(j, v)| v * w[j]).sum()
    }
}

/// A dense real vector, used for iterates and message payloads.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dist_sq(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl Deref for DenseVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for DenseVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

pub fn dot(a: &SparseVector, w: &[f64]) -> Result<f64> {
    if a.dim != w.len() {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            actual: w.len(),
        });
    }
    Ok(a.dot_unchecked(w))
}

/// Returns `w + alpha * x`.
pub fn axpy(alpha: f64, x: &SparseVector, w: &[f64]) -> Result<DenseVector> {
    if x.dim != w.len() {
        return Err(Error::DimensionMismatch {
            expected: x.dim,
            actual: w.len(),
        });
    }
    let mut out = DenseVector::from(w.to_vec());
    for (j, v) in x.iter() {
        out[j] += alpha * v;
    }
    Ok(out)
}

/// Samples with their labels. `labels` is empty for losses that do not use them.
#[derive(Debug, Clone)]
pub struct Dataset {
    samples: Vec<SparseVector>,
    labels: Vec<f64>,
    dim: usize,
}

impl Dataset {
    pub fn new(samples: Vec<SparseVector>, labels: Vec<f64>, dim: usize) -> Result<Self> {
        if !labels.is_empty() && labels.len() != samples.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.len(),
                actual: labels.len(),
            });
        }
        if let Some(bad) = samples.iter().find(|s| s.dim != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.dim,
            });
        }
        Ok(Self {
            samples,
            labels,
            dim,
        })
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sample(&self, i: usize) -> &SparseVector {
        &self.samples[i]
    }

    pub fn samples(&self) -> &[SparseVector] {
        &self.samples
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn has_labels(&self) -> bool {
        !self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn without_labels(mut self) -> Self {
        self.labels.clear();
        self
    }

    pub fn nnz(&self) -> usize {
        self.samples.iter().map(SparseVector::nnz).sum()
    }
}

/// Contiguous blocks of sample indices, one per worker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    ranges: Vec<Range<usize>>,
}

impl Partition {
    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    pub fn workers(&self) -> usize {
        self.ranges.len()
    }

    pub fn range(&self, worker: usize) -> Range<usize> {
        self.ranges[worker].clone()
    }

    pub fn min_size(&self) -> usize {
        self.ranges.iter().map(|r| r.len()).min().unwrap_or(0)
    }
}

/// Splits `n` samples over `workers` blocks; the first `n % workers` blocks
/// receive one extra sample.
pub fn partition(n: usize, workers: usize) -> Result<Partition> {
    if workers == 0 || workers > n {
        return Err(Error::InvalidPartition { n, workers });
    }
    let base = n / workers;
    let extra = n % workers;
    let mut start = 0;
    let ranges = (0..workers)
        .map(|k| {
            let len = base + usize::from(k < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect();
    Ok(Partition { ranges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(idx: &[usize], val: &[f64], dim: usize) -> SparseVector {
        SparseVector::new(idx.to_vec(), val.to_vec(), dim).unwrap()
    }

    #[test]
    fn dot_examples() {
        let x = sv(&[0, 2], &[1.0, 2.0], 3);
        assert_eq!(dot(&x, &[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(dot(&x, &[3.0, 9.0, 4.0]).unwrap(), 11.0);
        assert_eq!(dot(&SparseVector::empty(3), &[5.0, 6.0, 7.0]).unwrap(), 0.0);
        assert!(matches!(
            dot(&x, &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn axpy_examples() {
        let x = sv(&[1], &[5.0], 2);
        assert_eq!(&*axpy(0.0, &x, &[1.0, 1.0]).unwrap(), &[1.0, 1.0]);
        assert_eq!(&*axpy(1.0, &x, &[1.0, 1.0]).unwrap(), &[1.0, 6.0]);
        let y = sv(&[0], &[3.0], 2);
        assert_eq!(&*axpy(-2.0, &y, &[6.0, 0.0]).unwrap(), &[0.0, 0.0]);
        assert!(axpy(1.0, &x, &[1.0]).is_err());
    }

    #[test]
    fn sparse_vector_rejects_bad_indices() {
        assert!(SparseVector::new(vec![1, 1], vec![1.0, 2.0], 3).is_err());
        assert!(SparseVector::new(vec![2, 1], vec![1.0, 2.0], 3).is_err());
        assert!(SparseVector::new(vec![3], vec![1.0], 3).is_err());
        assert!(SparseVector::new(vec![0], vec![1.0, 2.0], 3).is_err());
    }

    #[test]
    fn partition_examples() {
        let p = partition(10, 3).unwrap();
        assert_eq!(p.ranges(), &[0..4, 4..7, 7..10]);
        let p = partition(6, 6).unwrap();
        assert_eq!(p.ranges(), &[0..1, 1..2, 2..3, 3..4, 4..5, 5..6]);
        assert_eq!(partition(5, 1).unwrap().range(0), 0..5);
        assert!(partition(5, 0).is_err());
        assert!(partition(5, 6).is_err());
    }

    #[test]
    fn dataset_checks_shapes() {
        let rows = vec![sv(&[0], &[1.0], 2), sv(&[1], &[1.0], 2)];
        assert!(Dataset::new(rows.clone(), vec![1.0], 2).is_err());
        assert!(Dataset::new(rows.clone(), vec![], 3).is_err());
        let ds = Dataset::new(rows, vec![], 2).unwrap();
        assert_eq!(ds.n(), 2);
        assert!(!ds.has_labels());
    }

    fn sparse_and_dense() -> impl Strategy<Value = (SparseVector, Vec<f64>)> {
        (1usize..=16).prop_flat_map(|dim| {
            (
                proptest::collection::vec(proptest::option::of(-10.0f64..10.0), dim),
                proptest::collection::vec(-10.0f64..10.0, dim),
            )
                .prop_map(move |(entries, w)| {
                    let (idx, val): (Vec<_>, Vec<_>) = entries
                        .iter()
                        .enumerate()
                        .filter_map(|(j, v)| v.map(|v| (j, v)))
                        .unzip();
                    (SparseVector::new(idx, val, dim).unwrap(), w)
                })
        })
    }

    proptest! {
        #[test]
        fn dot_matches_dense_oracle((x, w) in sparse_and_dense()) {
            let dense = x.to_dense();
            let oracle: f64 = dense.iter().zip(&w).map(|(a, b)| a * b).sum();
            let got = dot(&x, &w).unwrap();
            prop_assert!((got - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()));
        }

        #[test]
        fn partition_reassembles(n in 1usize..500, k in 1usize..64) {
            prop_assume!(k <= n);
            let p = partition(n, k).unwrap();
            let flat: Vec<usize> = p.ranges().iter().flat_map(|r| r.clone()).collect();
            prop_assert_eq!(flat, (0..n).collect::<Vec<_>>());
            let sizes: Vec<usize> = p.ranges().iter().map(|r| r.len()).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }
}
