use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::sample_rng;
use crate::model::ModelParams;
use crate::simulation::PathConfig;

/// Driftless correlated path pairs on a common grid (`x[k][0] = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathBatch {
    pub dt: f64,
    pub x1: Vec<Vec<f64>>,
    pub x2: Vec<Vec<f64>>,
}

impl PathBatch {
    /// Sample correlation of the one-step increments over all paths.
    pub fn increment_correlation(&self) -> f64 {
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (a, b) in self.x1.iter().zip(&self.x2) {
            for k in 1..a.len() {
                let (dx, dy) = (a[k] - a[k - 1], b[k] - b[k - 1]);
                sxy += dx * dy;
                sxx += dx * dx;
                syy += dy * dy;
            }
        }
        sxy / (sxx * syy).sqrt()
    }
}

/// `n` pairs `(X1, X2)` with `E[X1(t) X2(s)] = rho min(t, s)` over
/// `[0, horizon]`, using increments `sqrt(dt) (Z1, rho Z1 + sqrt(1 - rho^2) Z2)`.
pub fn sample_paths(
    params: &ModelParams,
    config: &PathConfig,
    horizon: f64,
    n: usize,
) -> Result<PathBatch> {
    config.validate()?;
    if !(horizon > 0.0) {
        return Err(Error::InvalidInput(format!("horizon must be positive (got {horizon})")));
    }
    let steps = (horizon / config.dt).ceil() as usize;
    let rho = params.rho();
    let cross = (1.0 - rho * rho).max(0.0).sqrt();
    let sd = config.dt.sqrt();
    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = sample_rng(config.seed, i as u64);
        let mut a = Vec::with_capacity(steps + 1);
        let mut b = Vec::with_capacity(steps + 1);
        let (mut p, mut q) = (0.0, 0.0);
        a.push(p);
        b.push(q);
        for _ in 0..steps {
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            p += sd * z1;
            q += sd * (rho * z1 + cross * z2);
            a.push(p);
            b.push(q);
        }
        x1.push(a);
        x2.push(b);
    }
    Ok(PathBatch { dt: config.dt, x1, x2 })
}
