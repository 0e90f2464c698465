//! Crude (indicator) estimators.

use crate::error::{Error, Result};
use crate::mc::{chunked_sums, sample_rng, McEstimate};
use crate::model::ModelParams;
use crate::simulation::engine::Engine;
use crate::simulation::{check_resolution, horizon_for, time_scales, PathConfig};

fn certain(n: usize, seed: u64, method: &str) -> McEstimate {
    McEstimate {
        mean: 1.0,
        stderr: 0.0,
        n,
        method: method.to_string(),
        seed,
        ess: None,
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    Ok(())
}

fn indicator_mean(engine: &Engine, n: usize, config: &PathConfig, method: &str) -> Result<McEstimate> {
    let [hits] = chunked_sums(n, config.workers, |i| {
        let mut rng = sample_rng(config.seed, i);
        [if engine.run(&mut rng, None).hit { 1.0 } else { 0.0 }]
    })?;
    Ok(McEstimate::from_sums(hits, hits, n, method, config.seed))
}

/// `P(sup_t (X_j(t) - mu_j t) > u)`, `j in {1, 2}`.
pub fn estimate_marginal(
    params: &ModelParams,
    j: usize,
    u: f64,
    config: &PathConfig,
    n: usize,
) -> Result<McEstimate> {
    config.validate()?;
    check_n(n)?;
    if j != 1 && j != 2 {
        return Err(Error::InvalidInput(format!("component must be 1 or 2 (got {j})")));
    }
    if u <= 0.0 {
        return Ok(certain(n, config.seed, "marginal"));
    }
    let scale = 1.0 / params.mu()[j - 1];
    check_resolution(config.dt, u, scale)?;
    let required = [j == 1, j == 2];
    let h = horizon_for(params, u, scale, required, config);
    let engine = Engine::new(params, u, h.time, required, config);
    indicator_mean(&engine, n, config, "marginal")
}

/// Fraction of paths on which both components exceed `u`, each over its own
/// running time.
pub fn estimate_p_crude(
    params: &ModelParams,
    u: f64,
    config: &PathConfig,
    n: usize,
) -> Result<McEstimate> {
    config.validate()?;
    check_n(n)?;
    if u <= 0.0 {
        return Ok(certain(n, config.seed, "crude"));
    }
    let (t0, s0) = time_scales(params);
    check_resolution(config.dt, u, t0.min(s0))?;
    let h = horizon_for(params, u, t0.max(s0), [true, true], config);
    let engine = Engine::new(params, u, h.time, [true, true], config);
    indicator_mean(&engine, n, config, "crude")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::canonicalize;

    fn cfg(seed: u64) -> PathConfig {
        PathConfig { dt: 1e-3, seed, ..PathConfig::default() }
    }

    #[test]
    fn zero_level_is_certain() {
        let p = canonicalize(1.0, 2.0, 0.3).unwrap();
        assert_eq!(estimate_p_crude(&p, 0.0, &cfg(1), 10).unwrap().mean, 1.0);
        assert_eq!(estimate_marginal(&p, 2, 0.0, &cfg(1), 10).unwrap().mean, 1.0);
    }

    #[test]
    fn marginal_law() {
        let p = canonicalize(1.0, 2.0, 0.3).unwrap();
        let e = estimate_marginal(&p, 1, 0.5, &cfg(2), 20_000).unwrap();
        assert!(e.z_value((-1.0f64).exp()) < 3.5, "{e:?}");
    }

    #[test]
    fn independent_components() {
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let e = estimate_p_crude(&p, 0.5, &cfg(3), 40_000).unwrap();
        assert!(e.z_value((-3.0f64).exp()) < 3.5, "{e:?}");
    }

    #[test]
    fn coarse_grid_rejected() {
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let c = PathConfig { dt: 0.01, ..PathConfig::default() };
        assert!(matches!(estimate_p_crude(&p, 0.3, &c, 10), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn common_numbers_give_monotone_estimates() {
        let p = canonicalize(1.0, 2.0, 0.4).unwrap();
        let mut prev = 1.0;
        for u in [0.3, 0.4, 0.5, 0.6] {
            let e = estimate_p_crude(&p, u, &cfg(5), 4000).unwrap().mean;
            assert!(e <= prev);
            prev = e;
        }
    }
}
