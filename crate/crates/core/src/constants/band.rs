//! The band constant
//!
//! ```text
//! H(T, S) = int_{R^2} e^{c.x} P(exists (t, s) in D_{T,S}: Y1(t) > x1, Y2(s) > x2) dx,
//! ```
//!
//! with `c = Sigma*^{-1} b*`, `Y_i(t) = X_i(t) - mu_i t` and `D_{T,S}` the
//! band of half-width `S` around the diagonal over `[0, T]`, and its growth
//! rate `H~ = lim H(T, S) / T`.
//!
//! For a fixed path the `x`-integral is the `e^{c.x}`-measure of a union of
//! lower-left orthants, computed exactly from the staircase of the point set
//! `{(Y1(t), Y2(s))}`. Only two points per grid time can be maximal: `Y1(t)`
//! against the running maximum of `Y2` over `[t, t + S]`, and symmetrically.
//!
//! Under the original measure the per-path value is dominated by rare paths
//! climbing far along the diagonal (`e^{c.Y(t,t)}` is a mean-one martingale),
//! so the plain average is useless beyond very short bands. The default
//! estimator samples from the mixture over `tau in [0, T]` of the measures
//! with density `e^{c.Y(tau,tau)}` (drift `R c` on `[0, tau]`), and averages
//! `V / M` with `M` the mixture density.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::asymptotics::htilde_bounds;
use crate::error::{Error, Result};
use crate::mc::{chunked_sums, sample_rng, McEstimate};
use crate::model::{classify, star_point, ModelParams};

/// Points whose weight is below the largest by more than this (in log
/// units) are dropped from the staircase.
const PRUNE: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandRegion {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub grid_step: f64,
}

impl BandRegion {
    pub fn new(t: f64, s: f64, grid_step: f64) -> Result<BandRegion> {
        if !(t > 0.0 && s > 0.0 && grid_step > 0.0) {
            return Err(Error::InvalidInput(format!(
                "band needs T, S, grid_step > 0 (got {t}, {s}, {grid_step})"
            )));
        }
        Ok(BandRegion { t, s, grid_step })
    }

    fn steps(&self) -> (usize, usize) {
        (
            (self.t / self.grid_step).round().max(1.0) as usize,
            (self.s / self.grid_step).round().max(1.0) as usize,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandMethod {
    Mixture,
    Crude,
}

impl BandMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BandMethod::Mixture => "mixture",
            BandMethod::Crude => "crude",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BandOptions {
    pub method: BandMethod,
    pub workers: usize,
}

impl Default for BandOptions {
    fn default() -> Self {
        BandOptions {
            method: BandMethod::Mixture,
            workers: 1,
        }
    }
}

/// `int e^{c.x} 1{x <= p for some p}` over `R^2`.
pub fn staircase_measure(points: &[(f64, f64)], c: [f64; 2]) -> f64 {
    ln_staircase(&mut points.to_vec(), c).exp()
}

/// Log of [`staircase_measure`]; reorders `points`.
fn ln_staircase(points: &mut Vec<(f64, f64)>, c: [f64; 2]) -> f64 {
    if points.is_empty() {
        return f64::NEG_INFINITY;
    }
    let top = points
        .iter()
        .map(|p| c[0] * p.0 + c[1] * p.1)
        .fold(f64::NEG_INFINITY, f64::max);
    points.retain(|p| c[0] * p.0 + c[1] * p.1 >= top - PRUNE);
    points.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    let mut prev = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &(x1, x2) in points.iter() {
        if x2 <= prev {
            continue;
        }
        let strip = if prev == f64::NEG_INFINITY {
            1.0
        } else {
            -(c[1] * (prev - x2)).exp_m1()
        };
        sum += (c[0] * x1 + c[1] * x2 - top).exp() * strip;
        prev = x2;
    }
    top + sum.ln() - (c[0] * c[1]).ln()
}

/// Maximum of `y[i..=i + w]` for every `i` with `i + w < y.len()`.
fn window_max(y: &[f64], w: usize, out: &mut Vec<f64>) {
    out.clear();
    let mut dq: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    for j in 0..y.len() {
        while let Some(&b) = dq.back() {
            if y[b] <= y[j] {
                dq.pop_back();
            } else {
                break;
            }
        }
        dq.push_back(j);
        if j >= w {
            let start = j - w;
            while *dq.front().unwrap() < start {
                dq.pop_front();
            }
            out.push(y[*dq.front().unwrap()]);
        }
    }
}

fn log_sum_exp(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = v.clone().fold(f64::NEG_INFINITY, f64::max);
    m + v.map(|x| (x - m).exp()).sum::<f64>().ln()
}

struct BandSetup {
    mu: [f64; 2],
    rho: f64,
    c: [f64; 2],
    /// Mixture drift `R c`.
    push: [f64; 2],
    nt: usize,
    ns: usize,
    dt: f64,
}

fn setup(params: &ModelParams, band: &BandRegion) -> Result<BandSetup> {
    let regime = classify(params);
    if !regime.tag.has_pickands_constant() {
        return Err(Error::UnsupportedRegime {
            op: "estimate_h_band",
            regime: regime.tag.to_string(),
        });
    }
    let sp = star_point(params)?;
    if band.grid_step > 0.01 * sp.t_star * (1.0 + 1e-9) {
        return Err(Error::InvalidInput(format!(
            "grid_step {} does not resolve t* = {} (need <= 0.01 t*)",
            band.grid_step, sp.t_star
        )));
    }
    let c = sp.weights()?;
    if !(c[0] > 0.0 && c[1] > 0.0) {
        return Err(Error::DegenerateWeights(c[0], c[1]));
    }
    let rho = params.rho();
    let (nt, ns) = band.steps();
    Ok(BandSetup {
        mu: params.mu(),
        rho,
        c,
        push: [c[0] + rho * c[1], rho * c[0] + c[1]],
        nt,
        ns,
        dt: band.grid_step,
    })
}

/// One path's contribution: `V` (crude) or `V / M` (mixture).
fn band_sample(b: &BandSetup, method: BandMethod, seed: u64, index: u64) -> f64 {
    let mut rng = sample_rng(seed, index);
    let total = b.nt + b.ns;
    let sd = b.dt.sqrt();
    let cross = (1.0 - b.rho * b.rho).max(0.0).sqrt();
    let tilt_until = match method {
        BandMethod::Mixture => rng.random_range(0..=b.nt),
        BandMethod::Crude => 0,
    };
    let mut y1 = Vec::with_capacity(total + 1);
    let mut y2 = Vec::with_capacity(total + 1);
    let (mut x1, mut x2) = (0.0f64, 0.0f64);
    y1.push(0.0);
    y2.push(0.0);
    for j in 1..=total {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        x1 += sd * z1;
        x2 += sd * (b.rho * z1 + cross * z2);
        if j <= tilt_until {
            x1 += b.push[0] * b.dt;
            x2 += b.push[1] * b.dt;
        }
        let t = j as f64 * b.dt;
        y1.push(x1 - b.mu[0] * t);
        y2.push(x2 - b.mu[1] * t);
    }
    let (mut w1, mut w2) = (Vec::new(), Vec::new());
    window_max(&y1, b.ns, &mut w1);
    window_max(&y2, b.ns, &mut w2);
    let mut points = Vec::with_capacity(2 * (b.nt + 1));
    for i in 0..=b.nt {
        points.push((y1[i], w2[i]));
        points.push((w1[i], y2[i]));
    }
    let ln_v = ln_staircase(&mut points, b.c);
    match method {
        BandMethod::Crude => ln_v.exp(),
        BandMethod::Mixture => {
            let ln_m = log_sum_exp((0..=b.nt).map(|i| b.c[0] * y1[i] + b.c[1] * y2[i]))
                - ((b.nt + 1) as f64).ln();
            (ln_v - ln_m).exp()
        }
    }
}

pub fn estimate_h_band_with(
    params: &ModelParams,
    band: &BandRegion,
    n: usize,
    seed: u64,
    opts: &BandOptions,
) -> Result<McEstimate> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    let b = setup(params, band)?;
    let [s, s2] = chunked_sums(n, opts.workers, |i| {
        let v = band_sample(&b, opts.method, seed, i);
        [v, v * v]
    })?;
    Ok(McEstimate::from_sums(s, s2, n, opts.method.as_str(), seed))
}

/// `H(T, S)` with the default (mixture) estimator on one worker.
pub fn estimate_h_band(
    params: &ModelParams,
    band: &BandRegion,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    estimate_h_band_with(params, band, n, seed, &BandOptions::default())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPoint {
    #[serde(rename = "T")]
    pub t: f64,
    pub estimate: McEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HtildeEstimate {
    /// Secant slope of `H(T, S)` over the last two horizons.
    pub htilde: McEstimate,
    #[serde(rename = "S")]
    pub s: f64,
    pub per_t: Vec<BandPoint>,
    /// Lower bound from [`htilde_bounds`].
    pub lower_bound: f64,
}

/// Seed used for the `k`-th horizon so the estimates are independent.
pub fn horizon_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// `H~` from the secant slope of `H(T, S)` over the last two entries of
/// `t_list`; each horizon uses an independent seed.
pub fn estimate_htilde(
    params: &ModelParams,
    t_list: &[f64],
    s: f64,
    grid_step: f64,
    n: usize,
    seed: u64,
    opts: &BandOptions,
) -> Result<HtildeEstimate> {
    if t_list.len() < 2 || t_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "T list must hold at least two increasing horizons".into(),
        ));
    }
    let lower_bound = htilde_bounds(params)?.0;
    let mut per_t = Vec::with_capacity(t_list.len());
    for (k, &t) in t_list.iter().enumerate() {
        let band = BandRegion::new(t, s, grid_step)?;
        let estimate = estimate_h_band_with(params, &band, n, horizon_seed(seed, k), opts)?;
        per_t.push(BandPoint { t, estimate });
    }
    let (a, b) = (&per_t[per_t.len() - 2], &per_t[per_t.len() - 1]);
    let span = b.t - a.t;
    let htilde = McEstimate {
        mean: (b.estimate.mean - a.estimate.mean) / span,
        stderr: (a.estimate.stderr.powi(2) + b.estimate.stderr.powi(2)).sqrt() / span,
        n,
        method: format!("secant-{}", opts.method.as_str()),
        seed,
        ess: None,
    };
    Ok(HtildeEstimate {
        htilde,
        s,
        per_t,
        lower_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::canonicalize;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_point() {
        let v = staircase_measure(&[(0.3, -0.2)], [2.0, 0.5]);
        assert_relative_eq!(v, (0.6f64 - 0.1).exp() / 1.0, max_relative = 1e-14);
    }

    #[test]
    fn two_points() {
        let v = staircase_measure(&[(0.0, 1.0), (1.0, 0.0)], [1.0, 1.0]);
        assert_relative_eq!(v, 2.0 * std::f64::consts::E - 1.0, max_relative = 1e-14);
        // dominated points change nothing
        let w = staircase_measure(&[(0.0, 1.0), (1.0, 0.0), (-1.0, 0.5), (0.5, -3.0)], [1.0, 1.0]);
        assert_relative_eq!(v, w, max_relative = 1e-14);
    }

    fn brute_force(points: &[(f64, f64)], c: [f64; 2]) -> f64 {
        // midpoint Riemann sum on a grid whose cell edges include every point
        // coordinate, so the indicator is constant on each cell; the region
        // is cut 10 units below the lowest coordinate
        let axis = |coords: Vec<f64>| {
            let lo = coords.iter().cloned().fold(f64::INFINITY, f64::min) - 10.0;
            let mut b = coords;
            b.push(lo);
            b.sort_by(f64::total_cmp);
            b.dedup();
            let mut mids = Vec::new();
            for w in b.windows(2) {
                let k = ((w[1] - w[0]) / 2e-3).ceil() as usize;
                let h = (w[1] - w[0]) / k as f64;
                for i in 0..k {
                    mids.push((w[0] + (i as f64 + 0.5) * h, h));
                }
            }
            mids
        };
        let a1 = axis(points.iter().map(|p| p.0).collect());
        let a2 = axis(points.iter().map(|p| p.1).collect());
        let mut sum = 0.0;
        for &(x1, h1) in &a1 {
            let cap = points
                .iter()
                .filter(|p| x1 <= p.0)
                .map(|p| p.1)
                .fold(f64::NEG_INFINITY, f64::max);
            for &(x2, h2) in a2.iter().take_while(|a| a.0 <= cap) {
                sum += (c[0] * x1 + c[1] * x2).exp() * h1 * h2;
            }
        }
        sum
    }

    #[test]
    fn matches_riemann_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let k = rng.random_range(1..=10);
            let pts: Vec<(f64, f64)> = (0..k)
                .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let c = [rng.random_range(1.0..3.0), rng.random_range(1.0..3.0)];
            let exact = staircase_measure(&pts, c);
            let brute = brute_force(&pts, c);
            assert!((exact - brute).abs() <= 1e-3 * exact, "{exact} vs {brute}");
        }
    }

    #[test]
    fn window_maxima() {
        let y = [1.0, 3.0, 2.0, 0.0, -1.0, 4.0];
        let mut out = Vec::new();
        window_max(&y, 2, &mut out);
        assert_eq!(out, vec![3.0, 3.0, 2.0, 4.0]);
    }

    #[test]
    fn rejects_wrong_regime_and_coarse_grid() {
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let band = BandRegion::new(1.0, 1.0, 0.005).unwrap();
        assert!(matches!(estimate_h_band(&p, &band, 10, 1), Err(Error::UnsupportedRegime { .. })));
        let p = canonicalize(1.0, 1.0, 0.5).unwrap();
        let band = BandRegion::new(1.0, 1.0, 0.05).unwrap();
        assert!(matches!(estimate_h_band(&p, &band, 10, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn mixture_agrees_with_crude_on_short_band() {
        let p = canonicalize(1.0, 1.0, 0.5).unwrap();
        let band = BandRegion::new(0.5, 0.5, 0.01).unwrap();
        let mix = estimate_h_band(&p, &band, 4000, 3).unwrap();
        let opts = BandOptions { method: BandMethod::Crude, workers: 1 };
        let crude = estimate_h_band_with(&p, &band, 20000, 4, &opts).unwrap();
        assert!(mix.z_against(&crude) < 4.0, "{mix:?} {crude:?}");
    }

    #[test]
    fn worker_count_does_not_matter() {
        let p = canonicalize(1.0, 1.0, 0.5).unwrap();
        let band = BandRegion::new(1.0, 1.0, 0.01).unwrap();
        let a = estimate_h_band_with(&p, &band, 700, 9, &BandOptions { workers: 1, ..Default::default() }).unwrap();
        let b = estimate_h_band_with(&p, &band, 700, 9, &BandOptions { workers: 3, ..Default::default() }).unwrap();
        assert_eq!(a, b);
    }
}
