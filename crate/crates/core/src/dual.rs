//! Dual variables and the dual residue.
//!
//! A [`DualState`] covers a contiguous block of samples (the whole dataset for
//! the sequential solvers, one partition block per worker in the distributed
//! runs). `lambda` and `n` are always the global values.

use std::borrow::Borrow;
use std::ops::Range;

use crate::data::{Dataset, DenseVector};
use crate::error::{Error, Result};
use crate::loss::{Gradient, GradientForm, LossModel};

#[derive(Debug, Clone, PartialEq)]
pub enum DualRepr {
    /// `alpha_i = alpha_hat_i * x_i`
    Compact(Vec<f64>),
    /// One d-vector per sample; `None` until first touched (implicitly zero).
    Full(Vec<Option<DenseVector>>),
}

/// The dual residue `kappa = grad phi_i(w) + alpha_i` of one sample.
#[derive(Debug, Clone, PartialEq)]
pub enum Residue {
    /// `coef * x_i`
    Scaled { sample: usize, coef: f64 },
    Dense { sample: usize, kappa: DenseVector },
}

impl Residue {
    pub fn sample(&self) -> usize {
        match self {
            Residue::Scaled { sample, .. } | Residue::Dense { sample, .. } => *sample,
        }
    }

    /// `acc += kappa`
    pub fn add_to(&self, data: &Dataset, acc: &mut [f64]) {
        match self {
            Residue::Scaled { sample, coef } => {
                for (j, v) in data.sample(*sample).iter() {
                    acc[j] += coef * v;
                }
            }
            Residue::Dense { kappa, .. } => {
                for (a, k) in acc.iter_mut().zip(kappa.iter()) {
                    *a += k;
                }
            }
        }
    }

    /// `w -= eta * kappa`, computed as `w_j - eta * kappa_j` for every
    /// coordinate so that the result is bitwise identical to applying a
    /// materialized message.
    pub fn apply_to_primal(&self, data: &Dataset, eta: f64, w: &mut [f64]) {
        match self {
            Residue::Scaled { sample, coef } => {
                for (j, v) in data.sample(*sample).iter() {
                    w[j] -= eta * (coef * v);
                }
            }
            Residue::Dense { kappa, .. } => {
                for (wj, k) in w.iter_mut().zip(kappa.iter()) {
                    *wj -= eta * k;
                }
            }
        }
    }

    pub fn to_dense(&self, data: &Dataset) -> DenseVector {
        let mut out = DenseVector::zeros(data.dim());
        self.add_to(data, &mut out);
        out
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Residue::Scaled { coef, .. } => *coef == 0.0,
            Residue::Dense { kappa, .. } => kappa.iter().all(|&k| k == 0.0),
        }
    }
}

/// Saved value of one dual block, used to roll back an unacknowledged round.
#[derive(Debug, Clone)]
pub(crate) enum SavedAlpha {
    Compact(f64),
    Full(Option<DenseVector>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    repr: DualRepr,
    lambda: f64,
    n: usize,
    offset: usize,
}

impl DualState {
    /// Zero dual over samples `range`, in the representation the loss allows.
    pub fn zeros(model: &LossModel, range: Range<usize>, lambda: f64, n: usize) -> Self {
        let repr = match model.gradient_form() {
            GradientForm::ScalarTimesX => DualRepr::Compact(vec![0.0; range.len()]),
            GradientForm::FullVector => DualRepr::Full(vec![None; range.len()]),
        };
        Self {
            repr,
            lambda,
            n,
            offset: range.start,
        }
    }

    /// Full-vector storage regardless of loss form.
    pub fn zeros_full(range: Range<usize>, lambda: f64, n: usize) -> Self {
        Self {
            repr: DualRepr::Full(vec![None; range.len()]),
            lambda,
            n,
            offset: range.start,
        }
    }

    pub fn from_compact(alpha_hat: Vec<f64>, offset: usize, lambda: f64, n: usize) -> Self {
        Self {
            repr: DualRepr::Compact(alpha_hat),
            lambda,
            n,
            offset,
        }
    }

    pub fn repr(&self) -> &DualRepr {
        &self.repr
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn range(&self) -> Range<usize> {
        let len = match &self.repr {
            DualRepr::Compact(a) => a.len(),
            DualRepr::Full(a) => a.len(),
        };
        self.offset..self.offset + len
    }

    pub fn is_compact(&self) -> bool {
        matches!(self.repr, DualRepr::Compact(_))
    }

    /// The compact coefficients, if stored compactly.
    pub fn alpha_hat(&self) -> Option<&[f64]> {
        match &self.repr {
            DualRepr::Compact(a) => Some(a),
            DualRepr::Full(_) => None,
        }
    }

    fn local(&self, i: usize) -> Result<usize> {
        let r = self.range();
        if r.contains(&i) {
            Ok(i - self.offset)
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                start: r.start,
                end: r.end,
            })
        }
    }

    /// `alpha_i` as a dense vector.
    pub fn alpha(&self, data: &Dataset, i: usize) -> Result<DenseVector> {
        let k = self.local(i)?;
        Ok(match &self.repr {
            DualRepr::Compact(a) => {
                let mut out = DenseVector::zeros(data.dim());
                for (j, v) in data.sample(i).iter() {
                    out[j] = a[k] * v;
                }
                out
            }
            DualRepr::Full(a) => a[k]
                .clone()
                .unwrap_or_else(|| DenseVector::zeros(data.dim())),
        })
    }

    pub fn residue(&self, model: &LossModel, data: &Dataset, i: usize, w: &[f64]) -> Result<Residue> {
        let k = self.local(i)?;
        if w.len() != data.dim() {
            return Err(Error::DimensionMismatch {
                expected: data.dim(),
                actual: w.len(),
            });
        }
        Ok(self.residue_at(model, data, i, k, w))
    }

    fn residue_at(&self, model: &LossModel, data: &Dataset, i: usize, k: usize, w: &[f64]) -> Residue {
        match (&self.repr, model.gradient_unchecked(data, i, w)) {
            (DualRepr::Compact(a), Gradient::Scaled(c)) => Residue::Scaled {
                sample: i,
                coef: c + a[k],
            },
            (DualRepr::Full(a), g) => {
                let mut kappa = match g {
                    Gradient::Dense(g) => g,
                    Gradient::Scaled(c) => {
                        let mut g = DenseVector::zeros(data.dim());
                        for (j, v) in data.sample(i).iter() {
                            g[j] = c * v;
                        }
                        g
                    }
                };
                if let Some(alpha) = &a[k] {
                    for (kj, aj) in kappa.iter_mut().zip(alpha.iter()) {
                        *kj += aj;
                    }
                }
                Residue::Dense { sample: i, kappa }
            }
            (DualRepr::Compact(_), Gradient::Dense(_)) => {
                unreachable!("compact storage is only built for scalar-times-x losses")
            }
        }
    }

    /// `alpha_i -= eta * lambda * n * kappa`, with `n` the global sample count.
    pub fn step(&mut self, residue: &Residue, eta: f64) -> Result<()> {
        let k = self.local(residue.sample())?;
        let scale = eta * self.lambda * self.n as f64;
        match (&mut self.repr, residue) {
            (DualRepr::Compact(a), Residue::Scaled { coef, .. }) => {
                a[k] -= scale * coef;
            }
            (DualRepr::Full(a), Residue::Dense { kappa, .. }) => {
                let alpha = a[k].get_or_insert_with(|| DenseVector::zeros(kappa.len()));
                for (aj, kj) in alpha.iter_mut().zip(kappa.iter()) {
                    *aj -= scale * kj;
                }
            }
            _ => {
                return Err(Error::Unsupported(
                    "residue form does not match dual storage",
                ))
            }
        }
        Ok(())
    }

    /// `alpha_hat_i += delta` (compact storage only).
    pub fn add_compact(&mut self, i: usize, delta: f64) -> Result<()> {
        let k = self.local(i)?;
        match &mut self.repr {
            DualRepr::Compact(a) => {
                a[k] += delta;
                Ok(())
            }
            DualRepr::Full(_) => Err(Error::Unsupported("compact update on full dual storage")),
        }
    }

    pub(crate) fn save(&self, i: usize) -> SavedAlpha {
        let k = i - self.offset;
        match &self.repr {
            DualRepr::Compact(a) => SavedAlpha::Compact(a[k]),
            DualRepr::Full(a) => SavedAlpha::Full(a[k].clone()),
        }
    }

    pub(crate) fn restore(&mut self, i: usize, saved: SavedAlpha) {
        let k = i - self.offset;
        match (&mut self.repr, saved) {
            (DualRepr::Compact(a), SavedAlpha::Compact(v)) => a[k] = v,
            (DualRepr::Full(a), SavedAlpha::Full(v)) => a[k] = v,
            _ => unreachable!("saved alpha comes from the same state"),
        }
    }

    /// `sum_i alpha_i` over this block (not yet scaled by `1 / (lambda n)`).
    pub fn accumulate_sum(&self, data: &Dataset, acc: &mut [f64]) {
        match &self.repr {
            DualRepr::Compact(a) => {
                for (k, &ah) in a.iter().enumerate() {
                    if ah != 0.0 {
                        for (j, v) in data.sample(self.offset + k).iter() {
                            acc[j] += ah * v;
                        }
                    }
                }
            }
            DualRepr::Full(a) => {
                for alpha in a.iter().flatten() {
                    for (s, v) in acc.iter_mut().zip(alpha.iter()) {
                        *s += v;
                    }
                }
            }
        }
    }

    /// `(1 / (lambda n)) sum_i alpha_i` restricted to this block.
    pub fn primal_from_dual(&self, data: &Dataset) -> DenseVector {
        primal_from_duals(std::slice::from_ref(self), data)
    }
}

/// Primal reconstruction over the union of several dual blocks.
pub fn primal_from_duals<B: Borrow<DualState>>(states: &[B], data: &Dataset) -> DenseVector {
    let mut w = DenseVector::zeros(data.dim());
    for s in states {
        s.borrow().accumulate_sum(data, &mut w);
    }
    if let Some(first) = states.first().map(Borrow::borrow) {
        let scale = 1.0 / (first.lambda * first.n as f64);
        for v in w.iter_mut() {
            *v *= scale;
        }
    }
    w
}
