//! Data files, synthetic data, experiment configuration and CSV output.

pub mod config;
pub mod csv;
pub mod libsvm;
pub mod synth;
