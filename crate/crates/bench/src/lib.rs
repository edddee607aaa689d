//! Fixtures shared by the solver benchmarks.

use dfsdca_core::io::synth::{gen_synthetic_pca, gen_synthetic_ridge};
use dfsdca_core::{ClusterConfig, Dataset, LossModel, StepSize, StragglerModel};

/// Seeded ridge instance.
pub fn ridge(n: usize, d: usize) -> (Dataset, LossModel) {
    gen_synthetic_ridge(n, d, 0.1, 7).expect("valid sizes")
}

/// Seeded PCA instance with `mu = 100`, `lambda = 1e-4`.
pub fn pca(n: usize, d: usize) -> (Dataset, LossModel) {
    gen_synthetic_pca(n, d, 100.0, 1e-4, 7).expect("valid sizes")
}

/// `K` workers, `H = 1`, one epoch of `n` updates, stragglers with p = 0.2.
pub fn cluster(workers: usize, n: usize, lambda: f64, eta: f64) -> ClusterConfig {
    let mut c = ClusterConfig::new(workers, 1, n, 1, lambda);
    c.step = StepSize::Fixed(eta);
    c.straggler = StragglerModel {
        p: 0.2,
        m_min: 0.0,
        m_max: 10.0,
        base_round_time: 1.0,
        rng_seed: 1,
    };
    c
}
