//! Distributed asynchronous dual-free stochastic dual coordinate ascent.
//!
//! The crate solves `min_w (1/n) sum_i phi_i(w) + (lambda/2) ||w||^2` with
//! sequential SDCA and dual-free SDCA ([`solver`]) and with a simulated
//! parameter server in which workers own blocks of dual variables and send
//! summed dual residues to a server that owns `w` ([`dist`]). Runs record the
//! duality gap, suboptimality and the convergence potential ([`diagnostics`]).

// `!(x > 0.0)` is used deliberately so that NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod diagnostics;
pub mod dist;
pub mod dual;
pub mod error;
pub mod experiment;
pub mod io;
pub mod loss;
mod monitor;
pub mod rng;
pub mod solver;

pub use data::{axpy, dot, partition, Dataset, DenseVector, Partition, SparseVector};
pub use diagnostics::{
    duality_gap, dual_value, potential_c, primal_value, reference_solution, stepsize_convex,
    stepsize_nonconvex, ReferenceSolution, Regime, RunLog, RunRecord,
};
pub use dist::{
    run_distributed, ClusterConfig, DelayStats, DistOutput, Engine, Mode, StepSize, StragglerModel,
};
pub use dual::{primal_from_duals, DualRepr, DualState, Residue};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentOutcome};
pub use io::config::ExperimentConfig;
pub use loss::LossModel;
pub use solver::{dfsdca_run, sdca_run, SolverConfig};
