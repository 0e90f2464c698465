//! One-dimensional Pickands constant of a drifted Brownian motion,
//! `H(mu; T) = int e^{2 mu x} P(sup_{t <= T} (B(t) - mu t) > x) dx`.

use crate::error::{Error, Result};
use crate::normal::{exp_norm_sf, norm_sf};
use crate::quadrature::{integrate_breaks, integrate_to_infinity, QuadOptions, QuadResult};

fn check(mu: f64, t: f64) -> Result<()> {
    if !(mu > 0.0) {
        return Err(Error::InvalidInput(format!("mu must be positive (got {mu})")));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("T must be positive (got {t})")));
    }
    Ok(())
}

/// `P(exists t in [0, T]: B(t) - mu t > x)` by the reflection formula.
pub fn crossing_prob(mu: f64, t: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 1.0;
    }
    let r = t.sqrt();
    let p = norm_sf((x + mu * t) / r) + exp_norm_sf(-2.0 * mu * x, (x - mu * t) / r);
    p.min(1.0)
}

/// `H(mu; T)` by adaptive quadrature. The negative half-line contributes
/// exactly `1 / (2 mu)`; on `x >= 0` the integrand is split into
/// `e^{2 mu x} sf((x + mu T)/sqrt T) + sf((x - mu T)/sqrt T)`, both peaking
/// or dropping near `x = mu T`.
pub fn h_mu_t(mu: f64, t: f64, opts: &QuadOptions) -> Result<QuadResult> {
    check(mu, t)?;
    let r = t.sqrt();
    let f = |x: f64| exp_norm_sf(2.0 * mu * x, (x + mu * t) / r) + norm_sf((x - mu * t) / r);
    let centre = mu * t;
    let far = centre + 40.0 * r + 20.0 / mu;
    let mut breaks = vec![0.0];
    for b in [centre - 10.0 * r, centre, centre + 10.0 * r, far] {
        if b > *breaks.last().unwrap() {
            breaks.push(b);
        }
    }
    let body = integrate_breaks(f, &breaks, opts)?;
    let tail = integrate_to_infinity(f, far, opts)?;
    Ok(QuadResult {
        value: 0.5 / mu + body.value + tail.value,
        error: body.error + tail.error,
        evaluations: body.evaluations + tail.evaluations,
    })
}
