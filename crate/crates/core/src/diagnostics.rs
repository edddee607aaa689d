//! Objective values, duality gap, convergence potentials, step-size bounds and
//! reference optima.

use std::borrow::Borrow;

use nalgebra::{DMatrix, DVector};

use crate::data::{Dataset, DenseVector};
use crate::dual::{primal_from_duals, DualRepr, DualState};
use crate::error::{Error, Result};
use crate::loss::{GradientForm, LossModel};

/// One diagnostic snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub epoch: usize,
    pub server_iter: usize,
    pub virtual_time: f64,
    /// Gradient evaluations divided by `n`.
    pub epochs_equiv: f64,
    pub duality_gap: Option<f64>,
    pub suboptimality: Option<f64>,
    pub potential_c: Option<f64>,
    pub max_delay: u64,
    /// `||w - w(alpha)|| / (1 + ||w||)`, when the dual was observable.
    pub relation_residual: Option<f64>,
    pub epoch_boundary: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLog {
    pub records: Vec<RunRecord>,
}

impl RunLog {
    pub fn push(&mut self, record: RunRecord) {
        self.records.push(record);
    }

    pub fn last(&self) -> Option<&RunRecord> {
        self.records.last()
    }

    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().filter_map(|r| r.duality_gap)
    }

    /// First snapshot time at which `metric` drops to `target` or below.
    pub fn time_to(&self, target: f64, metric: impl Fn(&RunRecord) -> Option<f64>) -> Option<f64> {
        self.records
            .iter()
            .find(|r| metric(r).is_some_and(|v| v <= target))
            .map(|r| r.virtual_time)
    }

    pub fn epochs_to(&self, target: f64, metric: impl Fn(&RunRecord) -> Option<f64>) -> Option<f64> {
        self.records
            .iter()
            .find(|r| metric(r).is_some_and(|v| v <= target))
            .map(|r| r.epochs_equiv)
    }
}

/// `w*` together with `P(w*)`. The optimal dual is `alpha_i* = -grad phi_i(w*)`.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub w_star: DenseVector,
    pub p_star: f64,
    pub grad_norm: f64,
}

impl ReferenceSolution {
    /// `alpha_i*` as a dense vector.
    pub fn alpha_star(&self, model: &LossModel, data: &Dataset, i: usize) -> Result<DenseVector> {
        let mut g = model.gradient_dense(data, i, &self.w_star)?;
        for v in g.iter_mut() {
            *v = -*v;
        }
        Ok(g)
    }

    /// Compact `alpha_hat_i* = -phi_i'(x_i^T w*)`; quadratic loss only.
    pub fn alpha_hat_star(&self, model: &LossModel, data: &Dataset) -> Result<Vec<f64>> {
        if model.gradient_form() != GradientForm::ScalarTimesX {
            return Err(Error::Unsupported("compact optimal dual needs a scalar-times-x loss"));
        }
        Ok((0..data.n())
            .map(|i| data.label(i) - data.sample(i).dot_unchecked(&self.w_star))
            .collect())
    }
}

fn check_w(data: &Dataset, w: &[f64]) -> Result<()> {
    if w.len() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            actual: w.len(),
        });
    }
    Ok(())
}

/// `P(w) = (1/n) sum_i phi_i(w) + (lambda/2) ||w||^2`
pub fn primal_value(data: &Dataset, model: &LossModel, lambda: f64, w: &[f64]) -> Result<f64> {
    check_w(data, w)?;
    if data.n() == 0 {
        return Err(Error::EmptyDataset);
    }
    let n = data.n() as f64;
    let loss = match model {
        // Sum the shared terms once instead of per sample.
        LossModel::PcaQuadratic { mu, lambda: l, b } => {
            let ww: f64 = w.iter().map(|v| v * v).sum();
            let bw: f64 = b.iter().zip(w).map(|(a, c)| a * c).sum();
            let xx: f64 = data
                .samples()
                .iter()
                .map(|x| {
                    let t = x.dot_unchecked(w);
                    t * t
                })
                .sum();
            0.5 * (mu - l) * ww - 0.5 * xx / n - bw
        }
        LossModel::Quadratic => {
            (0..data.n())
                .map(|i| model.value_unchecked(data, i, w))
                .sum::<f64>()
                / n
        }
    };
    let reg: f64 = w.iter().map(|v| v * v).sum();
    Ok(loss + 0.5 * lambda * reg)
}

/// `grad P(w)`
pub fn primal_gradient(data: &Dataset, model: &LossModel, lambda: f64, w: &[f64]) -> Result<DenseVector> {
    check_w(data, w)?;
    let n = data.n() as f64;
    let mut g = DenseVector::zeros(data.dim());
    match model {
        LossModel::Quadratic => {
            for (i, x) in data.samples().iter().enumerate() {
                let c = (x.dot_unchecked(w) - data.label(i)) / n;
                for (j, v) in x.iter() {
                    g[j] += c * v;
                }
            }
            for (gj, wj) in g.iter_mut().zip(w) {
                *gj += lambda * wj;
            }
        }
        LossModel::PcaQuadratic { mu, lambda: l, b } => {
            for x in data.samples() {
                let c = x.dot_unchecked(w) / n;
                for (j, v) in x.iter() {
                    g[j] -= c * v;
                }
            }
            for ((gj, wj), bj) in g.iter_mut().zip(w).zip(b.iter()) {
                *gj += (mu - l + lambda) * wj - bj;
            }
        }
    }
    Ok(g)
}

/// `D(alpha) = (1/n) sum_i -phi_i*(-alpha_i) - (lambda/2) ||w(alpha)||^2` for
/// compact duals.
pub fn dual_value(data: &Dataset, model: &LossModel, lambda: f64, alpha_hat: &[f64]) -> Result<f64> {
    if !model.is_convex() {
        return Err(Error::Unsupported("the dual needs convex losses"));
    }
    if alpha_hat.len() != data.n() {
        return Err(Error::DimensionMismatch {
            expected: data.n(),
            actual: alpha_hat.len(),
        });
    }
    let n = data.n() as f64;
    let mut conj = 0.0;
    for (i, &a) in alpha_hat.iter().enumerate() {
        conj -= model.conjugate(data, i, -a)?;
    }
    let w = primal_from_alpha_hat(data, lambda, alpha_hat);
    Ok(conj / n - 0.5 * lambda * w.norm_sq())
}

/// `(1/(lambda n)) sum_i alpha_hat_i x_i`
pub fn primal_from_alpha_hat(data: &Dataset, lambda: f64, alpha_hat: &[f64]) -> DenseVector {
    let st = DualState::from_compact(alpha_hat.to_vec(), 0, lambda, data.n());
    st.primal_from_dual(data)
}

/// `G(alpha) = P(w(alpha)) - D(alpha)`
pub fn duality_gap(data: &Dataset, model: &LossModel, lambda: f64, alpha_hat: &[f64]) -> Result<f64> {
    let d = dual_value(data, model, lambda, alpha_hat)?;
    let w = primal_from_alpha_hat(data, lambda, alpha_hat);
    Ok(primal_value(data, model, lambda, &w)? - d)
}

/// Duality gap over a set of compact dual blocks that tile `0..n`.
pub fn duality_gap_blocks<B: Borrow<DualState>>(
    data: &Dataset,
    model: &LossModel,
    lambda: f64,
    blocks: &[B],
) -> Result<f64> {
    let mut alpha_hat = Vec::with_capacity(data.n());
    let mut sorted: Vec<&DualState> = blocks.iter().map(Borrow::borrow).collect();
    sorted.sort_by_key(|b| b.range().start);
    for b in sorted {
        if b.range().start != alpha_hat.len() {
            return Err(Error::Config("dual blocks do not tile the dataset".into()));
        }
        match b.alpha_hat() {
            Some(a) => alpha_hat.extend_from_slice(a),
            None => return Err(Error::Unsupported("duality gap needs compact duals")),
        }
    }
    duality_gap(data, model, lambda, &alpha_hat)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Convex,
    NonConvex,
}

impl Regime {
    pub fn of(model: &LossModel) -> Self {
        if model.is_convex() {
            Regime::Convex
        } else {
            Regime::NonConvex
        }
    }
}

/// Returns `(A, B)` with `A = (1/n) sum_i ||alpha_i - alpha_i*||^2` and
/// `B = ||w - w*||^2`.
pub fn potential_terms<B: Borrow<DualState>>(
    data: &Dataset,
    model: &LossModel,
    blocks: &[B],
    w: &[f64],
    reference: &ReferenceSolution,
) -> Result<(f64, f64)> {
    check_w(data, w)?;
    let w_star = &reference.w_star;
    let mut a_sum = 0.0;
    let mut covered = 0;
    for b in blocks {
        let b = b.borrow();
        covered += b.range().len();
        match b.repr() {
            DualRepr::Compact(ah) => {
                for (k, i) in b.range().enumerate() {
                    let x = data.sample(i);
                    let ah_star = data.label(i) - x.dot_unchecked(w_star);
                    let diff = ah[k] - ah_star;
                    a_sum += diff * diff * x.norm_sq();
                }
            }
            DualRepr::Full(_) => {
                for i in b.range() {
                    let alpha = b.alpha(data, i)?;
                    let alpha_star = reference.alpha_star(model, data, i)?;
                    a_sum += alpha.dist_sq(&alpha_star);
                }
            }
        }
    }
    if covered != data.n() {
        return Err(Error::Config("dual blocks do not cover the dataset".into()));
    }
    let bterm = w_star.dist_sq(w);
    Ok((a_sum / data.n() as f64, bterm))
}

/// Lyapunov potential `C = c_A * A + B` with `c_A = 1/(2 lambda L)` (convex) or
/// `1/(4 L^2)` (non-convex).
#[allow(clippy::too_many_arguments)]
pub fn potential_c<B: Borrow<DualState>>(
    data: &Dataset,
    model: &LossModel,
    blocks: &[B],
    w: &[f64],
    reference: &ReferenceSolution,
    lambda: f64,
    smoothness: f64,
    regime: Regime,
) -> Result<f64> {
    let (a, b) = potential_terms(data, model, blocks, w, reference)?;
    Ok(potential_weight(lambda, smoothness, regime) * a + b)
}

pub fn potential_weight(lambda: f64, smoothness: f64, regime: Regime) -> f64 {
    match regime {
        Regime::Convex => 1.0 / (2.0 * lambda * smoothness),
        Regime::NonConvex => 1.0 / (4.0 * smoothness * smoothness),
    }
}

/// Largest step size covered by the convex-case linear convergence guarantee:
/// `1 / (4 H L tau^2 + lambda n + 2 L)`.
pub fn stepsize_convex(h: usize, l: f64, tau: f64, lambda: f64, n: usize) -> f64 {
    1.0 / (4.0 * h as f64 * l * tau * tau + lambda * n as f64 + 2.0 * l)
}

/// Largest step size covered by the sum-of-non-convex guarantee:
/// `lambda^2 / (2 H L tau^2 lambda^2 + 8 H L tau^2 (L + lambda)^2 + 4 lambda L^2 + n lambda^3)`.
pub fn stepsize_nonconvex(h: usize, l: f64, tau: f64, lambda: f64, n: usize) -> f64 {
    // numerator and denominator divided by lambda
    let h = h as f64;
    let t2 = tau * tau;
    lambda
        / (2.0 * h * l * t2 * lambda
            + 8.0 * h * l * t2 * (l + lambda) * (l + lambda) / lambda
            + 4.0 * l * l
            + n as f64 * lambda * lambda)
}

pub fn stepsize(regime: Regime, h: usize, l: f64, tau: f64, lambda: f64, n: usize) -> f64 {
    match regime {
        Regime::Convex => stepsize_convex(h, l, tau, lambda, n),
        Regime::NonConvex => stepsize_nonconvex(h, l, tau, lambda, n),
    }
}

/// Order-of-magnitude epoch count from the iteration bounds, with the hidden
/// constant set to 1. A heuristic, not a guarantee.
pub fn iteration_estimate(regime: Regime, h: usize, l: f64, tau: f64, lambda: f64, n: usize, epsilon: f64) -> u64 {
    let h = h as f64;
    let n = n as f64;
    let t2 = tau * tau;
    let factor = match regime {
        Regime::Convex => l / lambda * (t2 + 1.0 / h) + n / h,
        Regime::NonConvex => {
            (t2 + 1.0 / h) * l * l / (lambda * lambda) + t2 * l.powi(3) / lambda.powi(3) + n / h
        }
    };
    let est = factor * (1.0 / epsilon).ln();
    if est <= 0.0 {
        0
    } else {
        est.ceil() as u64
    }
}

/// `serial_time / parallel_time`
pub fn speedup(serial_time: f64, parallel_time: f64) -> Result<f64> {
    if serial_time <= 0.0 || parallel_time <= 0.0 {
        return Err(Error::Config("speedup needs positive running times".into()));
    }
    Ok(serial_time / parallel_time)
}

/// Largest `d` for which the reference optimum is found by a dense solve.
pub const DENSE_SOLVE_LIMIT: usize = 4096;

/// Squared Cholesky pivot ratio below which the dense system is singular.
const SINGULAR_PIVOT_RATIO: f64 = 1e-14;

/// Gradient-norm tolerance every reference solution must meet.
pub const REFERENCE_GRAD_TOL: f64 = 1e-8;

/// Exact minimizer of `P` by a dense linear solve.
///
/// * quadratic: `(X^T X / n + lambda I) w = X^T y / n`
/// * PCA: `(mu I - C) w = b` with `C = (1/n) sum_i x_i x_i^T`
///
/// Falls back to a long sequential dual-free run when `d` exceeds
/// [`DENSE_SOLVE_LIMIT`].
pub fn reference_solution(data: &Dataset, model: &LossModel, lambda: f64) -> Result<ReferenceSolution> {
    model.check(data)?;
    if data.n() == 0 {
        return Err(Error::EmptyDataset);
    }
    let w_star = if data.dim() <= DENSE_SOLVE_LIMIT {
        dense_optimum(data, model, lambda)?
    } else {
        iterative_optimum(data, model, lambda)?
    };
    let grad_norm = primal_gradient(data, model, lambda, &w_star)?.norm();
    if !(grad_norm <= REFERENCE_GRAD_TOL) {
        return Err(Error::Singular(format!(
            "reference optimum gradient norm {grad_norm:e} exceeds {REFERENCE_GRAD_TOL:e}"
        )));
    }
    let p_star = primal_value(data, model, lambda, &w_star)?;
    Ok(ReferenceSolution {
        w_star,
        p_star,
        grad_norm,
    })
}

fn dense_optimum(data: &Dataset, model: &LossModel, lambda: f64) -> Result<DenseVector> {
    let d = data.dim();
    let n = data.n() as f64;
    let mut gram = DMatrix::<f64>::zeros(d, d);
    for x in data.samples() {
        for (a, va) in x.iter() {
            for (b, vb) in x.iter() {
                gram[(a, b)] += va * vb;
            }
        }
    }
    gram /= n;
    let (system, rhs) = match model {
        LossModel::Quadratic => {
            let mut rhs = DVector::<f64>::zeros(d);
            for (i, x) in data.samples().iter().enumerate() {
                for (j, v) in x.iter() {
                    rhs[j] += v * data.label(i) / n;
                }
            }
            (gram + DMatrix::identity(d, d) * lambda, rhs)
        }
        LossModel::PcaQuadratic { mu, lambda: l, b } => {
            // loss shift (mu - l) plus the regularizer lambda
            let diag = mu - l + lambda;
            (
                DMatrix::identity(d, d) * diag - gram,
                DVector::from_column_slice(b),
            )
        }
    };
    // The system is symmetric; a usable optimum needs it positive definite.
    let ch = system
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("system matrix is not positive definite".into()))?;
    let pivots = ch.l_dirty().diagonal();
    let (lo, hi) = pivots
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &p| (lo.min(p.abs()), hi.max(p.abs())));
    if !(lo * lo > SINGULAR_PIVOT_RATIO * hi * hi) {
        return Err(Error::Singular(format!(
            "system matrix is numerically singular (pivot ratio {:e})",
            (lo / hi).powi(2)
        )));
    }
    let mut w = ch.solve(&rhs);
    if !w.iter().all(|v| v.is_finite()) {
        return Err(Error::Singular("non-finite solution".into()));
    }
    // One round of iterative refinement.
    let resid = &rhs - &system * &w;
    w += ch.solve(&resid);
    Ok(w.iter().copied().collect::<Vec<_>>().into())
}

fn iterative_optimum(data: &Dataset, model: &LossModel, lambda: f64) -> Result<DenseVector> {
    use crate::solver::{dfsdca_run, SolverConfig};
    let l = model.smoothness(data)?;
    let eta = stepsize_convex(1, l, 0.0, lambda, data.n());
    let mut cfg = SolverConfig::new(lambda, eta, 0, 0);
    cfg.record_every = 0;
    let mut w = DenseVector::zeros(data.dim());
    for chunk in 0..200 {
        cfg.epochs = 25;
        cfg.rng_seed = chunk;
        let out = dfsdca_run(data, model, &cfg)?;
        w = out.w;
        if primal_gradient(data, model, lambda, &w)?.norm() <= 1e-10 {
            return Ok(w);
        }
    }
    Ok(w)
}

/// `||w - w(alpha)|| / (1 + ||w||)` over a set of dual blocks.
pub fn relation_residual<B: Borrow<DualState>>(data: &Dataset, blocks: &[B], w: &[f64]) -> f64 {
    let rec = primal_from_duals(blocks, data);
    let wn: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    rec.dist_sq(w).sqrt() / (1.0 + wn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SparseVector;

    fn tiny() -> Dataset {
        Dataset::new(
            vec![SparseVector::from_dense(&[1.0]), SparseVector::from_dense(&[1.0])],
            vec![1.0, -1.0],
            1,
        )
        .unwrap()
    }

    #[test]
    fn primal_value_examples() {
        let data = tiny();
        assert_eq!(primal_value(&data, &LossModel::Quadratic, 0.1, &[0.0]).unwrap(), 0.5);
        let pca = LossModel::pca(100.0, 1e-4, vec![2.0].into());
        assert_eq!(primal_value(&data, &pca, 1e-4, &[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn dual_value_examples() {
        let data = tiny();
        let q = LossModel::Quadratic;
        assert_eq!(dual_value(&data, &q, 0.1, &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(duality_gap(&data, &q, 0.1, &[0.0, 0.0]).unwrap(), 0.5);
        let pca = LossModel::pca(100.0, 1e-4, vec![2.0].into());
        assert!(matches!(dual_value(&data, &pca, 0.1, &[0.0, 0.0]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn gap_is_zero_for_zero_labels() {
        let data = Dataset::new(
            vec![SparseVector::from_dense(&[1.0, 2.0]), SparseVector::from_dense(&[0.5, -1.0])],
            vec![0.0, 0.0],
            2,
        )
        .unwrap();
        assert_eq!(duality_gap(&data, &LossModel::Quadratic, 0.3, &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn stepsize_examples() {
        assert_eq!(stepsize_convex(1, 1.0, 0.0, 0.1, 10), 1.0 / 3.0);
        assert_eq!(stepsize_convex(10, 1.0, 3.0, 0.1, 100), 1.0 / 372.0);
        assert_eq!(stepsize_nonconvex(1, 1.0, 0.0, 0.1, 100), 0.02);
        // reduces to 1 / (lambda n + 2 L) without delay
        assert_eq!(stepsize_convex(7, 2.0, 0.0, 0.5, 40), 1.0 / (20.0 + 4.0));
    }

    #[test]
    fn nonconvex_bound_not_larger_when_lambda_below_l() {
        for &h in &[1usize, 4, 32] {
            for &l in &[0.5, 1.0, 10.0, 100.0] {
                for &tau in &[0.0, 1.0, 5.0, 50.0] {
                    for &lambda in &[1e-4, 1e-2, 0.1, 0.5] {
                        for &n in &[10usize, 1000, 100_000] {
                            if lambda <= l {
                                let c = stepsize_convex(h, l, tau, lambda, n);
                                let nc = stepsize_nonconvex(h, l, tau, lambda, n);
                                assert!(nc <= c, "h={h} l={l} tau={tau} lambda={lambda} n={n}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn iteration_estimate_examples() {
        assert_eq!(iteration_estimate(Regime::Convex, 1, 1.0, 0.0, 0.1, 100, 1.0), 0);
        // H = 1, tau = 0: (L / lambda + n) log(1 / eps)
        let e = iteration_estimate(Regime::Convex, 1, 1.0, 0.0, 0.1, 100, 1e-3);
        assert_eq!(e, (110.0 * 1e3f64.ln()).ceil() as u64);
        // doubling H halves the n/H term (L/lambda (tau^2 + 1/H) too when tau = 0)
        let a = iteration_estimate(Regime::Convex, 2, 1.0, 0.0, 0.1, 1000, 0.5) as f64;
        let b = iteration_estimate(Regime::Convex, 4, 1.0, 0.0, 0.1, 1000, 0.5) as f64;
        assert!((a / b - 2.0).abs() < 0.01);
        assert!(
            iteration_estimate(Regime::NonConvex, 1, 1.0, 1.0, 0.1, 100, 1e-3)
                > iteration_estimate(Regime::Convex, 1, 1.0, 1.0, 0.1, 100, 1e-3)
        );
    }

    #[test]
    fn speedup_examples() {
        assert_eq!(speedup(3.0, 3.0).unwrap(), 1.0);
        assert_eq!(speedup(100.0, 40.0).unwrap(), 2.5);
        assert!(speedup(0.0, 1.0).is_err());
    }

    #[test]
    fn reference_pca_scalar() {
        let data = Dataset::new(vec![SparseVector::from_dense(&[1.0]); 3], vec![], 1).unwrap();
        let m = LossModel::pca(100.0, 1e-4, vec![2.0].into());
        let r = reference_solution(&data, &m, 1e-4).unwrap();
        assert!((r.w_star[0] - 2.0 / 99.0).abs() < 1e-14);
        assert!(r.grad_norm <= 1e-8);
    }

    #[test]
    fn reference_ridge_vanishes_under_heavy_regularization() {
        let data = Dataset::new(
            vec![SparseVector::from_dense(&[1.0, 0.0]), SparseVector::from_dense(&[0.0, 1.0])],
            vec![3.0, -2.0],
            2,
        )
        .unwrap();
        let mut prev = f64::INFINITY;
        for lambda in [1.0, 1e2, 1e4, 1e6] {
            let r = reference_solution(&data, &LossModel::Quadratic, lambda).unwrap();
            assert!(r.w_star.norm() < prev);
            prev = r.w_star.norm();
        }
        assert!(prev < 1e-5);
    }

    #[test]
    fn reference_rejects_singular_ridge() {
        let data = Dataset::new(
            vec![SparseVector::from_dense(&[1.0, 1.0]), SparseVector::from_dense(&[2.0, 2.0])],
            vec![1.0, 2.0],
            2,
        )
        .unwrap();
        assert!(matches!(
            reference_solution(&data, &LossModel::Quadratic, 0.0),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn gap_vanishes_at_optimum_and_potential_is_zero() {
        let data = Dataset::new(
            vec![
                SparseVector::new(vec![0, 2], vec![1.0, 0.5], 3).unwrap(),
                SparseVector::new(vec![1], vec![-1.5], 3).unwrap(),
                SparseVector::new(vec![0, 1, 2], vec![0.2, 0.3, -0.4], 3).unwrap(),
            ],
            vec![1.0, 0.5, -2.0],
            3,
        )
        .unwrap();
        let q = LossModel::Quadratic;
        let lambda = 0.1;
        let r = reference_solution(&data, &q, lambda).unwrap();
        let ah = r.alpha_hat_star(&q, &data).unwrap();
        assert!(duality_gap(&data, &q, lambda, &ah).unwrap().abs() <= 1e-8);
        let block = DualState::from_compact(ah.clone(), 0, lambda, 3);
        let l = q.smoothness(&data).unwrap();
        let c = potential_c(&data, &q, std::slice::from_ref(&block), &r.w_star, &r, lambda, l, Regime::Convex).unwrap();
        assert!(c.abs() <= 1e-12);
        let mut shifted = r.w_star.clone();
        shifted[0] += 1.0;
        let c = potential_c(&data, &q, &[block], &shifted, &r, lambda, l, Regime::Convex).unwrap();
        assert!((c - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn gap_at_zero_matches_direct_evaluation() {
        // 100 sparse rows with +-1 labels, evaluated term by term
        let mut rng = crate::rng::SampleRng::new(17);
        let d = 22;
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..100 {
            let idx: Vec<usize> = (0..d).filter(|_| rng.bernoulli(0.3)).collect();
            let val = idx.iter().map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            rows.push(SparseVector::new(idx, val, d).unwrap());
            labels.push(if rng.bernoulli(0.5) { 1.0 } else { -1.0 });
        }
        let data = Dataset::new(rows, labels.clone(), d).unwrap();
        let lambda = 0.1;
        // P(0) = (1/n) sum 1/2 y^2; D(0) = (1/n) sum -phi*(0) - 0 = 0
        let p0: f64 = labels.iter().map(|y| 0.5 * y * y).sum::<f64>() / 100.0;
        let gap = duality_gap(&data, &LossModel::Quadratic, lambda, &[0.0; 100]).unwrap();
        assert_eq!(p0, 0.5);
        assert!((gap - p0).abs() <= 1e-15);
    }
}
