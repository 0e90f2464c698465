//! Empirical logarithmic decay rate.

use serde::{Deserialize, Serialize};

use crate::asymptotics::log_rate;
use crate::error::{Error, Result};
use crate::mc::McEstimate;
use crate::model::ModelParams;
use crate::simulation::tilt::estimate_p_tilted;
use crate::simulation::PathConfig;

/// Largest acceptable relative standard error of a single estimate.
pub const MAX_REL_STDERR: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopePoint {
    pub u: f64,
    pub estimate: McEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    /// `-g(t0) / 2`.
    pub theory: f64,
    pub points: Vec<SlopePoint>,
}

impl SlopeFit {
    pub fn relative_deviation(&self) -> f64 {
        (self.slope - self.theory).abs() / self.theory.abs()
    }
}

fn check_signal(u: f64, estimate: &McEstimate) -> Result<()> {
    let rel = estimate.rel_stderr();
    if !(rel <= MAX_REL_STDERR) {
        return Err(Error::InsufficientSignal { u, rel_stderr: rel });
    }
    Ok(())
}

/// Weighted least squares of `ln P(u)` on `u` from tilted estimates, weights
/// `(p / se)^2`. All levels share the seed, so the estimates use common
/// random numbers.
pub fn slope_fit(
    params: &ModelParams,
    u_grid: &[f64],
    config: &PathConfig,
    n_per_u: usize,
) -> Result<SlopeFit> {
    if u_grid.len() < 4 || u_grid.windows(2).any(|w| !(w[1] > w[0])) || u_grid[0] <= 0.0 {
        return Err(Error::InvalidInput(
            "u grid must hold at least four increasing positive levels".into(),
        ));
    }
    let theory = -log_rate(params)?;
    let mut points = Vec::with_capacity(u_grid.len());
    for &u in u_grid {
        let estimate = estimate_p_tilted(params, u, config, n_per_u)?;
        check_signal(u, &estimate)?;
        points.push(SlopePoint { u, estimate });
    }
    // var(ln p) ~ (se / p)^2
    let w: Vec<f64> = points
        .iter()
        .map(|p| 1.0 / p.estimate.rel_stderr().powi(2).max(1e-300))
        .collect();
    let sw: f64 = w.iter().sum();
    let ubar = points.iter().zip(&w).map(|(p, w)| w * p.u).sum::<f64>() / sw;
    let lbar = points.iter().zip(&w).map(|(p, w)| w * p.estimate.mean.ln()).sum::<f64>() / sw;
    let sxx: f64 = points.iter().zip(&w).map(|(p, w)| w * (p.u - ubar).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .zip(&w)
        .map(|(p, w)| w * (p.u - ubar) * (p.estimate.mean.ln() - lbar))
        .sum();
    let slope = sxy / sxx;
    Ok(SlopeFit {
        slope,
        stderr: (1.0 / sxx).sqrt(),
        intercept: lbar - slope * ubar,
        theory,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::canonicalize;

    #[test]
    fn grid_validation() {
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let c = PathConfig::default();
        assert!(slope_fit(&p, &[0.5, 1.0, 1.5], &c, 10).is_err());
        assert!(slope_fit(&p, &[0.5, 1.0, 0.9, 1.5], &c, 10).is_err());
    }

    #[test]
    fn weak_estimates_flagged() {
        let e = |mean, stderr| McEstimate {
            mean,
            stderr,
            n: 10,
            method: "tilted".into(),
            seed: 0,
            ess: None,
        };
        assert!(check_signal(1.0, &e(1e-3, 1e-4)).is_ok());
        assert!(matches!(check_signal(1.0, &e(1e-3, 5e-4)), Err(Error::InsufficientSignal { .. })));
        assert!(check_signal(1.0, &e(0.0, 0.0)).is_err());
    }

    #[test]
    fn independent_case_slope() {
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let c = PathConfig { dt: 2e-3, seed: 3, ..PathConfig::default() };
        let f = slope_fit(&p, &[0.5, 0.75, 1.0, 1.25, 1.5], &c, 4000).unwrap();
        assert!((f.slope + 6.0).abs() < 4.0 * f.stderr.max(0.1), "{f:?}");
    }
}
