//! Sequential reference solvers: SDCA with the exact coordinate update for the
//! quadratic loss, and dual-free SDCA for any smooth loss.
//!
//! Both draw samples uniformly with replacement from
//! [`SampleRng::for_stream`]`(rng_seed, SEQUENTIAL_STREAM)`; one epoch is `n`
//! draws. The virtual clock advances by one unit per sample.

use crate::data::{Dataset, DenseVector};
use crate::diagnostics::{ReferenceSolution, RunLog};
use crate::dual::{DualState, Residue};
use crate::error::{Error, Result};
use crate::loss::LossModel;
use crate::monitor::Monitor;
use crate::rng::{SampleRng, SEQUENTIAL_STREAM};

/// Iterates with `|w|_inf` above this are treated as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub lambda: f64,
    /// Step size of the dual-free solver; ignored by SDCA.
    pub eta: f64,
    pub epochs: usize,
    pub rng_seed: u64,
    /// Iterations between snapshots; 0 records only at epoch boundaries.
    pub record_every: usize,
    /// Enables suboptimality and potential tracking.
    pub reference: Option<ReferenceSolution>,
}

impl SolverConfig {
    pub fn new(lambda: f64, eta: f64, epochs: usize, rng_seed: u64) -> Self {
        Self {
            lambda,
            eta,
            epochs,
            rng_seed,
            record_every: 0,
            reference: None,
        }
    }

    fn validate(&self, data: &Dataset) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::Config("lambda must be positive".into()));
        }
        if data.n() == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SdcaOutput {
    pub w: DenseVector,
    pub alpha_hat: Vec<f64>,
    pub log: RunLog,
}

#[derive(Debug, Clone)]
pub struct DfsdcaOutput {
    pub w: DenseVector,
    pub dual: DualState,
    pub log: RunLog,
}

/// Exact maximizer of the single-coordinate dual subproblem for the quadratic
/// loss: `(y_i - alpha_i - x_i^T w) / (1 + ||x_i||^2 / (lambda n))`.
pub fn sdca_delta(
    model: &LossModel,
    data: &Dataset,
    i: usize,
    w: &[f64],
    alpha_i: f64,
    lambda: f64,
    n: usize,
) -> Result<f64> {
    if !matches!(model, LossModel::Quadratic) {
        return Err(Error::Unsupported("closed-form SDCA step needs the quadratic loss"));
    }
    let x = data.sample(i);
    let xw = crate::data::dot(x, w)?;
    Ok((data.label(i) - alpha_i - xw) / (1.0 + x.norm_sq() / (lambda * n as f64)))
}

fn check_divergence(w: &[f64], touched: impl Iterator<Item = usize>, update: u64, log: &RunLog) -> Result<()> {
    for j in touched {
        if !(w[j].abs() <= DIVERGENCE_THRESHOLD) {
            return Err(Error::Diverged {
                update,
                threshold: DIVERGENCE_THRESHOLD,
                partial: Box::new(log.clone()),
            });
        }
    }
    Ok(())
}

struct Schedule {
    n: usize,
    record_every: usize,
}

impl Schedule {
    /// Whether a snapshot follows iteration `done` (1-based count).
    fn due(&self, done: u64) -> bool {
        let n = self.n as u64;
        done.is_multiple_of(n) || (self.record_every > 0 && done.is_multiple_of(self.record_every as u64))
    }

    fn position(&self, done: u64) -> (usize, usize) {
        let n = self.n as u64;
        ((done / n) as usize, (done % n) as usize)
    }
}

pub fn sdca_run(data: &Dataset, model: &LossModel, cfg: &SolverConfig) -> Result<SdcaOutput> {
    cfg.validate(data)?;
    model.check(data)?;
    if !matches!(model, LossModel::Quadratic) {
        return Err(Error::Unsupported("SDCA needs the quadratic loss"));
    }
    let n = data.n();
    let lambda = cfg.lambda;
    let monitor = Monitor::new(data, model, lambda, cfg.reference.as_ref())?;
    let sched = Schedule {
        n,
        record_every: cfg.record_every,
    };
    let mut rng = SampleRng::for_stream(cfg.rng_seed, SEQUENTIAL_STREAM);
    let mut dual = DualState::zeros(model, 0..n, lambda, n);
    let mut w = DenseVector::zeros(data.dim());
    let mut log = RunLog::default();
    log.push(monitor.snapshot(std::slice::from_ref(&dual), &w, (0, 0), 0.0, 0.0, 0, true)?);

    let total = (cfg.epochs * n) as u64;
    let inv = 1.0 / (lambda * n as f64);
    for done in 1..=total {
        let i = rng.index(n);
        let a_i = dual.alpha_hat().expect("compact")[i];
        let delta = sdca_delta(model, data, i, &w, a_i, lambda, n)?;
        dual.add_compact(i, delta)?;
        for (j, v) in data.sample(i).iter() {
            w[j] += inv * delta * v;
        }
        check_divergence(&w, data.sample(i).indices().iter().copied(), done, &log)?;
        if sched.due(done) {
            let pos = sched.position(done);
            log.push(monitor.snapshot(
                std::slice::from_ref(&dual),
                &w,
                pos,
                done as f64,
                done as f64 / n as f64,
                0,
                pos.1 == 0,
            )?);
        }
    }
    let alpha_hat = dual.alpha_hat().expect("compact").to_vec();
    Ok(SdcaOutput { w, alpha_hat, log })
}

pub fn dfsdca_run(data: &Dataset, model: &LossModel, cfg: &SolverConfig) -> Result<DfsdcaOutput> {
    dfsdca_run_observed(data, model, cfg, |_, _| {})
}

/// [`dfsdca_run`] with a callback invoked after every update with the update
/// count and the current iterate.
pub fn dfsdca_run_observed(
    data: &Dataset,
    model: &LossModel,
    cfg: &SolverConfig,
    mut observe: impl FnMut(u64, &[f64]),
) -> Result<DfsdcaOutput> {
    cfg.validate(data)?;
    model.check(data)?;
    if !(cfg.eta > 0.0) {
        return Err(Error::Config("eta must be positive".into()));
    }
    let n = data.n();
    let monitor = Monitor::new(data, model, cfg.lambda, cfg.reference.as_ref())?;
    let sched = Schedule {
        n,
        record_every: cfg.record_every,
    };
    let mut rng = SampleRng::for_stream(cfg.rng_seed, SEQUENTIAL_STREAM);
    let mut dual = DualState::zeros(model, 0..n, cfg.lambda, n);
    let mut w = DenseVector::zeros(data.dim());
    let mut log = RunLog::default();
    log.push(monitor.snapshot(std::slice::from_ref(&dual), &w, (0, 0), 0.0, 0.0, 0, true)?);

    let total = (cfg.epochs * n) as u64;
    for done in 1..=total {
        let i = rng.index(n);
        let kappa = dual.residue(model, data, i, &w)?;
        dual.step(&kappa, cfg.eta)?;
        kappa.apply_to_primal(data, cfg.eta, &mut w);
        match kappa {
            Residue::Scaled { .. } => {
                check_divergence(&w, data.sample(i).indices().iter().copied(), done, &log)?
            }
            Residue::Dense { .. } => check_divergence(&w, 0..w.len(), done, &log)?,
        }
        observe(done, &w);
        if sched.due(done) {
            let pos = sched.position(done);
            log.push(monitor.snapshot(
                std::slice::from_ref(&dual),
                &w,
                pos,
                done as f64,
                done as f64 / n as f64,
                0,
                pos.1 == 0,
            )?);
        }
    }
    Ok(DfsdcaOutput { w, dual, log })
}
