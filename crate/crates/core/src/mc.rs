//! Monte Carlo plumbing shared by the constants and simulation modules.
//!
//! Every sample `i` draws from its own ChaCha8 stream `(seed, i)`, samples are
//! grouped into fixed-size chunks, and chunk sums are reduced in chunk order.
//! The result is therefore bit-identical for any number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples per chunk.
pub const CHUNK: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub method: String,
    pub seed: u64,
    /// Effective sample size `(sum w)^2 / sum w^2`, for weighted estimators.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ess: Option<f64>,
}

impl McEstimate {
    /// From `sum x` and `sum x^2` over `n` samples.
    pub fn from_sums(sum: f64, sum_sq: f64, n: usize, method: &str, seed: u64) -> McEstimate {
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        McEstimate {
            mean,
            stderr: (var / nf).sqrt(),
            n,
            method: method.to_string(),
            seed,
            ess: None,
        }
    }

    pub fn rel_stderr(&self) -> f64 {
        self.stderr / self.mean.abs()
    }

    /// `|self - other|` in units of the joint standard error.
    pub fn z_against(&self, other: &McEstimate) -> f64 {
        let joint = (self.stderr.powi(2) + other.stderr.powi(2)).sqrt();
        (self.mean - other.mean).abs() / joint
    }

    /// `|self - value|` in units of the standard error.
    pub fn z_value(&self, value: f64) -> f64 {
        (self.mean - value).abs() / self.stderr
    }
}

/// Random stream of sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}

/// Sum of `sample(i)` over `i in 0..n`, component-wise, with the
/// deterministic chunked reduction described in the module docs.
pub fn chunked_sums<const K: usize, F>(n: usize, workers: usize, sample: F) -> Result<[f64; K]>
where
    F: Fn(u64) -> [f64; K] + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<[f64; K]> = pool(workers)?.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = [0.0; K];
                for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                    let v = sample(i as u64);
                    for k in 0..K {
                        acc[k] += v[k];
                    }
                }
                acc
            })
            .collect()
    });
    let mut total = [0.0; K];
    for acc in partial {
        for k in 0..K {
            total[k] += acc[k];
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn reduction_is_worker_independent() {
        let f = |i: u64| {
            let x: f64 = sample_rng(11, i).random();
            [x, x * x]
        };
        let a = chunked_sums(5000, 1, f).unwrap();
        let b = chunked_sums(5000, 4, f).unwrap();
        assert_eq!(a, b);
        let e = McEstimate::from_sums(a[0], a[1], 5000, "uniform", 11);
        assert!(e.z_value(0.5) < 4.0);
    }

    #[test]
    fn streams_differ() {
        let x: u64 = sample_rng(3, 0).random();
        let y: u64 = sample_rng(3, 1).random();
        assert_ne!(x, y);
    }
}
