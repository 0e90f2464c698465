//! Numeric oracle for the outer layer: a logarithmic grid over `(t, s)`
//! followed by simplex refinement from the best cells.
//!
//! The oracle never looks at the closed-form branches; it only evaluates
//! `g(t, s)` through the inner QP. The bracketing scale is taken from the
//! natural time scales of the problem (`1/mu_i`, `t*` and the wedge point).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{star_point, ModelParams};
use crate::variational::closed_form::{wedge_point, OuterSolution, Region};
use crate::variational::nelder_mead::{nelder_mead, NelderMeadOptions};
use crate::variational::pieces::{g_eval, wedge, Wedge};

#[derive(Debug, Clone, Copy)]
pub struct NumericOptions {
    /// Grid points per axis.
    pub grid_n: usize,
    /// Grid bounds; derived from the parameters when `None`.
    pub bounds: Option<(f64, f64)>,
    /// Number of best grid cells used as refinement starts.
    pub top_k: usize,
    pub simplex_tol: f64,
    pub max_iter: usize,
    pub max_restarts: usize,
    /// Local minima within this relative distance of the best value are kept.
    pub cluster_tol: f64,
    /// Points closer than `merge_dist * scale` are merged.
    pub merge_dist: f64,
    pub workers: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions {
            grid_n: 400,
            bounds: None,
            top_k: 25,
            simplex_tol: 1e-10,
            max_iter: 10_000,
            max_restarts: 30,
            cluster_tol: 1e-8,
            merge_dist: 1e-3,
            workers: 1,
        }
    }
}

fn characteristic_times(params: &ModelParams) -> Vec<f64> {
    let mut v = vec![1.0 / params.mu1(), 1.0 / params.mu2()];
    let (t_a, s_a) = wedge_point(params);
    v.extend([t_a, s_a]);
    if let Ok(sp) = star_point(params) {
        v.push(sp.t_star);
    }
    v.retain(|x| x.is_finite() && *x > 0.0);
    v
}

/// Default grid bounds `[min_scale / 20, 20 max_scale]`.
pub fn default_bounds(params: &ModelParams) -> (f64, f64) {
    let times = characteristic_times(params);
    let lo = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = times.iter().cloned().fold(0.0, f64::max);
    (lo / 20.0, 20.0 * hi)
}

fn region_of(t: f64, s: f64, scale: f64) -> Region {
    if (t - s).abs() <= 1e-6 * scale {
        return Region::L;
    }
    match wedge(t, s) {
        Wedge::A => Region::A,
        Wedge::B => Region::B,
        Wedge::L => Region::L,
    }
}

pub fn minimize_numeric(params: &ModelParams, opts: &NumericOptions) -> Result<OuterSolution> {
    if params.rho().abs() >= 1.0 {
        return Err(Error::UnsupportedRegime {
            op: "minimize_numeric",
            regime: format!("rho = {}", params.rho()),
        });
    }
    let (lo, hi) = opts.bounds.unwrap_or_else(|| default_bounds(params));
    if !(lo > 0.0 && hi > lo) || opts.grid_n < 2 {
        return Err(Error::InvalidInput(format!("bad grid bounds ({lo}, {hi})")));
    }
    let n = opts.grid_n;
    let (llo, lhi) = (lo.ln(), hi.ln());
    let axis: Vec<f64> = (0..n)
        .map(|i| (llo + (lhi - llo) * (i as f64 + 0.5) / n as f64).exp())
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let grid: Vec<f64> = pool.install(|| {
        (0..n * n)
            .into_par_iter()
            .map(|k| g_eval(params, axis[k / n], axis[k % n]).unwrap_or(f64::INFINITY))
            .collect()
    });

    // index-ordered tie breaking keeps the selection independent of workers
    let mut order: Vec<usize> = (0..n * n).collect();
    order.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]).then(a.cmp(&b)));
    order.truncate(opts.top_k.max(1));

    // Rotated log coordinates: p = (ln t + ln s)/2, q = (ln t - ln s)/2, so
    // the diagonal, where g has a kink, is the axis q = 0.
    let to_ts = |x: &[f64]| ((x[0] + x[1]).exp(), (x[0] - x[1]).exp());
    let objective = |x: &[f64]| {
        let (t, s) = to_ts(x);
        g_eval(params, t, s).unwrap_or(f64::INFINITY)
    };
    let step = (lhi - llo) / n as f64;
    let nm = NelderMeadOptions {
        ftol: opts.simplex_tol,
        xtol: opts.simplex_tol.sqrt() * 1e-1,
        max_iter: opts.max_iter,
        ..NelderMeadOptions::default()
    };

    let refine = |k: usize| -> (f64, f64, f64, bool) {
        let (t0, s0) = (axis[k / n], axis[k % n]);
        let mut x = vec![0.5 * (t0.ln() + s0.ln()), 0.5 * (t0.ln() - s0.ln())];
        let mut best = f64::INFINITY;
        let mut converged = false;
        let mut h = step;
        for _ in 0..opts.max_restarts.max(1) {
            let r = nelder_mead(objective, &x, h, &nm);
            let improved = r.f < best - 1e-15 * best.abs();
            if r.f <= best {
                best = r.f;
                x = r.x;
            }
            converged = r.converged;
            if !improved && converged {
                break;
            }
            h = (h * 0.5).max(1e-6);
        }
        let (t, s) = to_ts(&x);
        (t, s, best, converged)
    };
    let refined: Vec<(f64, f64, f64, bool)> =
        pool.install(|| order.par_iter().map(|&k| refine(k)).collect());

    let best = refined
        .iter()
        .map(|r| r.2)
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::NoConvergence("objective not finite on the grid".into()));
    }
    let scale = characteristic_times(params)
        .into_iter()
        .fold(0.0, f64::max);
    let mut kept: Vec<(f64, f64, f64)> = Vec::new();
    let mut any_converged = false;
    let mut candidates: Vec<&(f64, f64, f64, bool)> = refined
        .iter()
        .filter(|r| r.2 <= best + opts.cluster_tol * best.abs())
        .collect();
    candidates.sort_by(|a, b| a.2.total_cmp(&b.2));
    for &&(t, s, v, conv) in &candidates {
        any_converged |= conv;
        let close = kept.iter().any(|&(kt, ks, _)| {
            ((kt - t).powi(2) + (ks - s).powi(2)).sqrt() <= opts.merge_dist * scale
        });
        if !close {
            kept.push((t, s, v));
        }
    }
    if !any_converged {
        return Err(Error::NoConvergence(format!(
            "simplex refinement exceeded {} iterations",
            opts.max_iter
        )));
    }
    kept.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
    let region = region_of(kept[0].0, kept[0].1, scale);
    Ok(OuterSolution {
        minimizers: kept.iter().map(|&(t, s, _)| (t, s)).collect(),
        value: best,
        region,
        curve_t_range: None,
    })
}
