//! Seeded random streams.
//!
//! Every stream is a ChaCha8 generator (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`. Independent streams are derived from a base
//! seed with [`stream_seed`], a SplitMix64 mix of the seed and the stream id.
//!
//! Integer indices are drawn by [`SampleRng::index`]: take a raw `u64`, reject
//! it if it falls in the final partial block `[zone, 2^64)` where
//! `zone = 2^64 - (2^64 mod n)`, otherwise return `raw mod n`. This mapping
//! has no modulo bias and is straightforward to reproduce elsewhere.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Sampling stream used by the sequential solvers and by worker 0.
pub const SEQUENTIAL_STREAM: u64 = 0;

const TIMING_DOMAIN: u64 = 0x5354_5241_4747_4c45;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the `stream`-th independent stream under `seed`.
pub fn stream_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

/// Seed of worker `worker`'s straggler-timing stream.
pub fn timing_seed(seed: u64, worker: u64) -> u64 {
    stream_seed(seed ^ TIMING_DOMAIN, worker)
}

#[derive(Debug, Clone)]
pub struct SampleRng(ChaCha8Rng);

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn for_stream(seed: u64, stream: u64) -> Self {
        Self::new(stream_seed(seed, stream))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be non-empty");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let raw = self.0.next_u64();
            if raw <= zone {
                return (raw % n) as usize;
            }
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = {
            let mut r = SampleRng::for_stream(7, 0);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = SampleRng::for_stream(7, 0);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut r = SampleRng::for_stream(7, 1);
            (0..4).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(stream_seed(7, 3), timing_seed(7, 3));
    }

    #[test]
    fn index_stays_in_range_and_covers_it() {
        let mut r = SampleRng::new(1);
        let mut seen = [0usize; 7];
        for _ in 0..7000 {
            seen[r.index(7)] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800 && c < 1200), "{seen:?}");
        assert_eq!(r.index(1), 0);
    }

    #[test]
    fn rejection_zone_is_a_multiple_of_n() {
        for n in [1u64, 2, 3, 7, 1 << 20, u64::MAX / 3 + 1] {
            let zone = u64::MAX - (u64::MAX - n + 1) % n;
            // [0, zone] holds a whole number of blocks of size n
            assert_eq!(zone.wrapping_add(1) % n, 0, "n = {n}");
        }
    }
}
