//! Importance sampling by a drift change.
//!
//! The sampling law is the exponential tilt `exp(theta . X)` with `theta`
//! the multiplier of the optimal configuration, so the mean path is the most
//! likely path to the joint crossing: every active component reaches its
//! boundary `u + mu_i tau_i` at `tau_i = u t0_i`. The tilt does not depend on
//! `u`. With equal optimal times it is the constant drift
//! `delta_i = 1 / t0_i + mu_i`.
//!
//! Each coordinate's tilt `theta_i X_i` is frozen once that coordinate has
//! crossed (the drift becomes `Sigma theta` with the crossed entries of
//! `theta` zeroed). This is what bends the mean path at the first crossing
//! time, and it keeps the likelihood ratio from picking up noise after the
//! fact. The likelihood ratio is accumulated step by step and read at the
//! stopping time.
//!
//! Where two optimal configurations compete, the sampling law is an
//! equal-weight mixture and the likelihood ratio is the reciprocal of the
//! mixture density.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{chunked_sums, sample_rng, McEstimate};
use crate::model::{classify, CovMatrix2, ModelParams, RegimeTag};
use crate::simulation::engine::{Engine, Tilt, MAX_TILTS};
use crate::simulation::{check_resolution, horizon, time_scales, PathConfig};
use crate::variational::closed_form::minimize_closed_form;
use crate::variational::pieces::g_solve;
use crate::variational::qp::ActiveSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltComponent {
    pub delta: [f64; 2],
    pub active_set: ActiveSet,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltSpec {
    /// Drift of the first mixture component.
    pub delta: [f64; 2],
    /// Components tilted by at least one mixture component.
    pub active_set: ActiveSet,
    pub mixture: Vec<TiltComponent>,
    /// Per-unit-time increment covariance.
    pub sigma: [[f64; 2]; 2],
    pub horizon: f64,
}

fn union(a: ActiveSet, b: ActiveSet) -> ActiveSet {
    match (a.contains(0) || b.contains(0), a.contains(1) || b.contains(1)) {
        (true, true) => ActiveSet::Both,
        (true, false) => ActiveSet::First,
        (false, true) => ActiveSet::Second,
        (false, false) => ActiveSet::Empty,
    }
}

/// Tilt for one optimal configuration `(t, s)` with boundaries
/// `b = (1 + mu_1 t, 1 + mu_2 s)`. The exponential parameter is the optimizer
/// multiplier `theta = Cov(X_1(t), X_2(s))^{-1} b` restricted to the active
/// components; `delta = R theta` is the initial drift.
fn component(params: &ModelParams, point: (f64, f64), active: ActiveSet) -> TiltComponent {
    let mu = params.mu();
    let (t, s) = point;
    let rho = params.rho();
    let b = [1.0 + mu[0] * t, 1.0 + mu[1] * s];
    let theta = match active {
        ActiveSet::Both => {
            let c = rho * t.min(s);
            let det = t * s - c * c;
            [(s * b[0] - c * b[1]) / det, (t * b[1] - c * b[0]) / det]
        }
        ActiveSet::First => [b[0] / t, 0.0],
        ActiveSet::Second => [0.0, b[1] / s],
        ActiveSet::Empty => [0.0, 0.0],
    };
    TiltComponent {
        delta: [theta[0] + rho * theta[1], rho * theta[0] + theta[1]],
        active_set: active,
        weight: 1.0,
    }
}

pub fn build_tilt_with(params: &ModelParams, u: f64, config: &PathConfig) -> Result<TiltSpec> {
    let tag = classify(params).tag;
    if params.rho().abs() >= 1.0 {
        return Err(Error::UnsupportedRegime {
            op: "build_tilt",
            regime: tag.to_string(),
        });
    }
    let sol = minimize_closed_form(params)?;
    let mut mixture = Vec::new();
    if tag == RegimeTag::AtRhoHat2 {
        // single- and two-component optima tie here
        let pt = sol.minimizers[0];
        mixture.push(component(params, pt, ActiveSet::Second));
        mixture.push(component(params, pt, ActiveSet::Both));
    } else {
        for &pt in &sol.minimizers {
            let active = g_solve(params, pt.0, pt.1)?.active_set;
            mixture.push(component(params, pt, active));
        }
    }
    debug_assert!(mixture.len() <= MAX_TILTS);
    let w = 1.0 / mixture.len() as f64;
    for c in &mut mixture {
        c.weight = w;
    }
    let active_set = mixture
        .iter()
        .fold(ActiveSet::Empty, |acc, c| union(acc, c.active_set));
    let rho = params.rho();
    Ok(TiltSpec {
        delta: mixture[0].delta,
        active_set,
        mixture,
        sigma: [[1.0, rho], [rho, 1.0]],
        horizon: horizon(params, u, config).time,
    })
}

/// Tilt with the default path configuration.
pub fn build_tilt(params: &ModelParams, u: f64) -> Result<TiltSpec> {
    build_tilt_with(params, u, &PathConfig::default())
}

fn engine_tilt(spec: &TiltSpec) -> Result<Tilt> {
    let s = CovMatrix2::new(spec.sigma[0][0], spec.sigma[0][1], spec.sigma[1][1]);
    let inv = s.inverse()?;
    Ok(Tilt {
        theta: spec.mixture.iter().map(|c| inv.mul_vec(c.delta)).collect(),
    })
}

/// `dP/dQ = 1 / sum_k w_k dQ_k/dP`.
fn likelihood_ratio(spec: &TiltSpec, ln_q: &[f64]) -> f64 {
    let logs: Vec<f64> = spec
        .mixture
        .iter()
        .zip(ln_q)
        .map(|(c, l)| c.weight.ln() + l)
        .collect();
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ln_density = m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln();
    (-ln_density).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltedEstimate {
    pub estimate: McEstimate,
    /// Mean likelihood ratio at the stopping time; one in expectation.
    pub lr_mean: McEstimate,
    pub tilt: TiltSpec,
}

/// Importance-sampling estimate of `P(u)` together with its diagnostics.
pub fn estimate_p_tilted_full(
    params: &ModelParams,
    u: f64,
    config: &PathConfig,
    n: usize,
) -> Result<TiltedEstimate> {
    config.validate()?;
    if n < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    if !(u > 0.0) {
        return Err(Error::InvalidInput(format!("u must be positive (got {u})")));
    }
    let tilt = build_tilt_with(params, u, config)?;
    let (t0, s0) = time_scales(params);
    check_resolution(config.dt, u, t0.min(s0))?;
    let plan = engine_tilt(&tilt)?;
    let engine = Engine::new(params, u, tilt.horizon, [true, true], config);
    let k = tilt.mixture.len();
    let sums = chunked_sums(n, config.workers, |i| {
        let mut rng = sample_rng(config.seed, i);
        let pick = if k > 1 { rng.random_range(0..k) } else { 0 };
        let out = engine.run(&mut rng, Some((&plan, pick)));
        let l = likelihood_ratio(&tilt, &out.ln_q[..k]);
        let w = if out.hit { l } else { 0.0 };
        [w, w * w, l, l * l]
    })?;
    let mut estimate = McEstimate::from_sums(sums[0], sums[1], n, "tilted", config.seed);
    estimate.ess = Some(if sums[1] > 0.0 { sums[0] * sums[0] / sums[1] } else { 0.0 });
    let lr_mean = McEstimate::from_sums(sums[2], sums[3], n, "likelihood-ratio", config.seed);
    Ok(TiltedEstimate {
        estimate,
        lr_mean,
        tilt,
    })
}

pub fn estimate_p_tilted(
    params: &ModelParams,
    u: f64,
    config: &PathConfig,
    n: usize,
) -> Result<McEstimate> {
    estimate_p_tilted_full(params, u, config, n).map(|t| t.estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::canonicalize;
    use approx::assert_relative_eq;

    #[test]
    fn independent_equal_drifts() {
        let p = canonicalize(1.0, 1.0, 0.0).unwrap();
        let t = build_tilt(&p, 1.3).unwrap();
        assert_eq!(t.active_set, ActiveSet::Both);
        assert_relative_eq!(t.delta[0], 2.0, max_relative = 1e-14);
        assert_relative_eq!(t.delta[1], 2.0, max_relative = 1e-14);
    }

    #[test]
    fn single_component_regime() {
        let p = canonicalize(1.0, 2.0, 0.9).unwrap();
        let t = build_tilt(&p, 1.0).unwrap();
        assert_eq!(t.active_set, ActiveSet::Second);
        assert_relative_eq!(t.delta[1], 4.0);
        assert_relative_eq!(t.delta[0], 0.9 * 4.0);
        // the exponential tilt leaves the first coordinate alone
        let inv = CovMatrix2::new(1.0, 0.9, 1.0).inverse().unwrap();
        assert!(inv.mul_vec(t.delta)[0].abs() < 1e-12);
    }

    #[test]
    fn mirrored_mixture() {
        let p = canonicalize(1.0, 1.0, -0.5).unwrap();
        let t = build_tilt(&p, 1.0).unwrap();
        assert_eq!(t.mixture.len(), 2);
        assert_eq!(t.mixture[0].delta, [t.mixture[1].delta[1], t.mixture[1].delta[0]]);
    }

    #[test]
    fn tie_at_rho_hat2_uses_mixture() {
        let p = canonicalize(1.0, 2.0, 0.75).unwrap();
        let t = build_tilt(&p, 1.0).unwrap();
        assert_eq!(t.mixture.len(), 2);
        assert_eq!(t.active_set, ActiveSet::Both);
    }

    #[test]
    fn unit_correlation_rejected() {
        let p = canonicalize(1.0, 2.0, 1.0).unwrap();
        assert!(matches!(build_tilt(&p, 1.0), Err(Error::UnsupportedRegime { .. })));
    }

    #[test]
    fn exact_independent_case() {
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let cfg = PathConfig { dt: 1e-3, seed: 7, ..PathConfig::default() };
        let r = estimate_p_tilted_full(&p, 1.0, &cfg, 20_000).unwrap();
        assert!(r.estimate.z_value((-6.0f64).exp()) < 3.5, "{:?}", r.estimate);
        assert!(r.lr_mean.z_value(1.0) < 3.5, "{:?}", r.lr_mean);
        assert!(r.estimate.ess.unwrap() > 1000.0);
    }
}
