//! Monte Carlo for `P(u)`: correlated path sampling, crude and exponentially
//! tilted estimators, marginal checks and the log-slope regression.
//!
//! Paths live in original time on a grid of step `dt`. Crossings between grid
//! points are caught by the Brownian-bridge probability `exp(-2 a b / dt)`
//! (`a`, `b` the distances to the boundary at the two ends of the step).
//! A path stops once every required component has crossed, once some
//! uncrossed component sits so far below its boundary that it crosses later
//! with probability below `kill_eps` (`e^{-2 mu d} < kill_eps`), or at the
//! horizon.

mod engine;
pub mod estimators;
pub mod paths;
pub mod slope;
pub mod tilt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::normal::{exp_norm_sf, norm_sf};
use crate::variational::closed_form::{minimize_closed_form, wedge_point};

pub use estimators::{estimate_marginal, estimate_p_crude};
pub use paths::{sample_paths, PathBatch};
pub use slope::{slope_fit, SlopeFit, SlopePoint};
pub use tilt::{build_tilt, build_tilt_with, estimate_p_tilted, estimate_p_tilted_full, TiltSpec, TiltedEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub dt: f64,
    /// Horizon is at least `horizon_mult * u * max(minimiser coordinates)`.
    pub horizon_mult: f64,
    pub bridge_correction: bool,
    pub seed: u64,
    pub workers: usize,
    pub kill_eps: f64,
    /// The horizon is extended until the chance of a first crossing beyond
    /// it is below this.
    pub tail_tol: f64,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            dt: 1e-3,
            horizon_mult: 8.0,
            bridge_correction: true,
            seed: 0,
            workers: 1,
            kill_eps: 1e-6,
            tail_tol: 1e-7,
        }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.horizon_mult > 0.0 && self.workers > 0) {
            return Err(Error::InvalidInput(
                "dt, horizon_mult and workers must be positive".into(),
            ));
        }
        if !(self.kill_eps > 0.0 && self.kill_eps < 1.0 && self.tail_tol > 0.0) {
            return Err(Error::InvalidInput(
                "kill_eps must lie in (0, 1) and tail_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Characteristic times `(t0, s0)` of the joint event in scaled time:
/// the outer minimiser where it exists, otherwise its limit.
pub fn time_scales(params: &ModelParams) -> (f64, f64) {
    match minimize_closed_form(params) {
        Ok(sol) => sol.minimizers[0],
        Err(_) if params.rho() > 0.0 => (1.0 / params.mu2(), 1.0 / params.mu2()),
        Err(_) => wedge_point(params),
    }
}

/// Probability that `B(t) - mu t` first exceeds `u` after time `t`.
pub fn crossing_tail(mu: f64, u: f64, t: f64) -> f64 {
    let r = t.sqrt();
    norm_sf((u + mu * t) / r) + exp_norm_sf(-2.0 * mu * u, -(u - mu * t) / r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    pub time: f64,
    /// Bound on the probability neglected by stopping at `time`.
    pub tail_bound: f64,
}

/// Horizon for the components flagged in `required`, with `scale` the
/// largest characteristic time in scaled units.
pub(crate) fn horizon_for(
    params: &ModelParams,
    u: f64,
    scale: f64,
    required: [bool; 2],
    config: &PathConfig,
) -> Horizon {
    let mu = params.mu();
    let tail = |t: f64| -> f64 {
        (0..2)
            .filter(|&i| required[i])
            .map(|i| crossing_tail(mu[i], u, t))
            .sum()
    };
    let mut t = (config.horizon_mult * u * scale).max(config.dt);
    while tail(t) > config.tail_tol && t < 1e6 {
        t *= 1.25;
    }
    Horizon {
        time: t,
        tail_bound: tail(t),
    }
}

/// Horizon of the joint event.
pub fn horizon(params: &ModelParams, u: f64, config: &PathConfig) -> Horizon {
    let (t0, s0) = time_scales(params);
    horizon_for(params, u, t0.max(s0), [true, true], config)
}

/// `dt` must be below 1% of the smallest characteristic time `u * min(t0, s0)`.
pub(crate) fn check_resolution(dt: f64, u: f64, min_scale: f64) -> Result<()> {
    let limit = 0.01 * u * min_scale;
    if dt < limit {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "dt = {dt} does not resolve the event (need dt < {limit:e})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::canonicalize;
    use approx::assert_relative_eq;

    #[test]
    fn tail_limits() {
        // t -> 0: every crossing is still ahead
        assert_relative_eq!(crossing_tail(1.0, 0.5, 1e-12), (-1.0f64).exp(), max_relative = 1e-9);
        assert!(crossing_tail(1.0, 0.5, 50.0) < 1e-9);
    }

    #[test]
    fn horizon_meets_tolerance() {
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let cfg = PathConfig::default();
        let h = horizon(&p, 0.3, &cfg);
        assert!(h.tail_bound <= cfg.tail_tol);
        assert!(h.time >= 8.0 * 0.3);
    }

    #[test]
    fn scales_at_degenerate_correlations() {
        let p = canonicalize(1.0, 2.0, 1.0).unwrap();
        assert_eq!(time_scales(&p), (0.5, 0.5));
        let p = canonicalize(1.0, 2.0, -1.0).unwrap();
        assert_eq!(time_scales(&p), (3.0, 0.25));
    }
}
