//! Runs a configured experiment end to end.

use crate::data::{Dataset, DenseVector};
use crate::diagnostics::{reference_solution, stepsize, ReferenceSolution, Regime, RunLog, DENSE_SOLVE_LIMIT};
use crate::dist::{run_distributed, ClusterConfig, DelayStats, StepSize, TraceEvent};
use crate::error::{Error, Result};
use crate::io::config::{DataSource, EtaSetting, ExperimentConfig, LossSetting, RunMode};
use crate::io::csv::{write_run_log, write_trace};
use crate::io::libsvm::read_libsvm;
use crate::io::synth::{gen_pca_b, gen_synthetic_pca_with_b, gen_synthetic_ridge};
use crate::loss::LossModel;
use crate::solver::{dfsdca_run, sdca_run, SolverConfig};

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub log: RunLog,
    pub w: DenseVector,
    /// Step size used by the dual-free solvers.
    pub eta: Option<f64>,
    pub tau: Option<u64>,
    pub delays: Option<DelayStats>,
    pub trace: Vec<TraceEvent>,
    pub reference: Option<ReferenceSolution>,
}

/// Loads or generates the dataset and builds the loss.
pub fn load_data(cfg: &ExperimentConfig) -> Result<(Dataset, LossModel)> {
    let pca = |data: Dataset, mu: f64, b_seed: u64| {
        let b = gen_pca_b(data.dim(), b_seed);
        (data.without_labels(), LossModel::pca(mu, cfg.lambda, b))
    };
    match (&cfg.data, cfg.loss) {
        (DataSource::Libsvm { path, dim }, loss) => {
            let data = read_libsvm(path, *dim)?;
            Ok(match loss {
                LossSetting::Quadratic => (data, LossModel::Quadratic),
                LossSetting::Pca { mu, b_seed } => pca(data, mu, b_seed),
            })
        }
        (&DataSource::SyntheticRidge { n, d, noise, seed }, loss) => {
            let (data, model) = gen_synthetic_ridge(n, d, noise, seed)?;
            Ok(match loss {
                LossSetting::Quadratic => (data, model),
                LossSetting::Pca { mu, b_seed } => pca(data, mu, b_seed),
            })
        }
        (&DataSource::SyntheticPca { n, d, seed }, LossSetting::Pca { mu, b_seed }) => {
            gen_synthetic_pca_with_b(n, d, mu, cfg.lambda, seed, b_seed)
        }
        (DataSource::SyntheticPca { .. }, LossSetting::Quadratic) => Err(Error::Config(
            "synthetic_pca data has no labels; use loss = pca".into(),
        )),
    }
}

/// Exact optimum when the dimension allows a dense solve.
pub fn reference_for(data: &Dataset, model: &LossModel, lambda: f64) -> Result<Option<ReferenceSolution>> {
    if data.dim() > DENSE_SOLVE_LIMIT {
        return Ok(None);
    }
    reference_solution(data, model, lambda).map(Some)
}

pub fn cluster_config(cfg: &ExperimentConfig, reference: Option<ReferenceSolution>) -> Result<ClusterConfig> {
    let mode = cfg
        .mode
        .cluster_mode()
        .ok_or_else(|| Error::Config(format!("mode {} is not distributed", cfg.mode)))?;
    let mut c = ClusterConfig::new(cfg.workers, cfg.local_samples, cfg.epoch_len, cfg.epochs, cfg.lambda);
    c.step = match cfg.eta {
        EtaSetting::Fixed(e) => StepSize::Fixed(e),
        EtaSetting::Auto { tau } => StepSize::Auto { tau },
    };
    c.straggler = cfg.straggler;
    c.network_latency = cfg.network_latency;
    c.mode = mode;
    c.engine = cfg.engine;
    c.rng_seed = cfg.seed;
    c.record_every = cfg.record_every;
    c.reference = reference;
    c.record_trace = cfg.trace_path.is_some();
    Ok(c)
}

/// Runs the experiment without writing any files.
pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let (data, model) = load_data(cfg)?;
    let reference = reference_for(&data, &model, cfg.lambda)?;
    let solver_cfg = |eta: f64| SolverConfig {
        lambda: cfg.lambda,
        eta,
        epochs: cfg.epochs,
        rng_seed: cfg.seed,
        record_every: cfg.record_every,
        reference: reference.clone(),
    };
    match cfg.mode {
        RunMode::SequentialSdca => {
            let out = sdca_run(&data, &model, &solver_cfg(0.0))?;
            Ok(ExperimentOutcome {
                log: out.log,
                w: out.w,
                eta: None,
                tau: None,
                delays: None,
                trace: Vec::new(),
                reference,
            })
        }
        RunMode::SequentialDfsdca => {
            let (eta, tau) = match cfg.eta {
                EtaSetting::Fixed(e) => (e, None),
                EtaSetting::Auto { tau } => {
                    let tau = tau.unwrap_or(0);
                    let l = model.smoothness(&data)?;
                    (stepsize(Regime::of(&model), 1, l, tau as f64, cfg.lambda, data.n()), Some(tau))
                }
            };
            let out = dfsdca_run(&data, &model, &solver_cfg(eta))?;
            Ok(ExperimentOutcome {
                log: out.log,
                w: out.w,
                eta: Some(eta),
                tau,
                delays: None,
                trace: Vec::new(),
                reference,
            })
        }
        RunMode::Async | RunMode::SyncBarrier => {
            let cluster = cluster_config(cfg, reference.clone())?;
            let out = run_distributed(&data, &model, &cluster)?;
            Ok(ExperimentOutcome {
                log: out.log,
                w: out.w,
                eta: Some(out.eta),
                tau: out.tau,
                delays: Some(out.delays),
                trace: out.trace,
                reference,
            })
        }
    }
}

/// Runs the experiment and writes the CSV log (and the trace, if
/// configured). A diverged run still writes the snapshots taken so far.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    match execute(cfg) {
        Ok(out) => {
            write_run_log(&cfg.output_path, &out.log)?;
            if let Some(p) = &cfg.trace_path {
                write_trace(p, &out.trace)?;
            }
            Ok(out)
        }
        Err(Error::Diverged {
            update,
            threshold,
            partial,
        }) => {
            write_run_log(&cfg.output_path, &partial)?;
            Err(Error::Diverged {
                update,
                threshold,
                partial,
            })
        }
        Err(e) => Err(e),
    }
}
