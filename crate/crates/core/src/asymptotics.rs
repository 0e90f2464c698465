//! Exact tail asymptotics `P(u) ~ C u^p e^{-r u}` for every correlation regime.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{classify, star_point, ModelParams, RegimeTag};
use crate::variational::closed_form::minimize_closed_form;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    /// `P(u)` equals the formula at every `u > 0`.
    ExactForAllU,
    /// Ratio tends to one as `u -> infinity`.
    AsymptoticEquivalence,
    /// `P(u)` eventually lies between the two bounds.
    TwoSidedBounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Constant {
    Value { value: f64 },
    Interval { lo: f64, hi: f64 },
    /// `C = htilde * factor` with `htilde` only known to lie in `[lo, hi]`.
    Htilde { factor: f64, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFormula {
    pub rate: f64,
    pub power: f64,
    pub constant: Constant,
    pub exactness: Exactness,
}

/// Value of a formula at a given `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Approx {
    Point { value: f64 },
    Interval { lo: f64, hi: f64 },
}

/// Bounds on the band constant; the upper end is always `+inf`.
pub fn htilde_bounds(params: &ModelParams) -> Result<(f64, f64)> {
    let tag = classify(params).tag;
    match tag {
        RegimeTag::EqualDriftPos => Ok(((1.0 + params.rho()) / 16.0, f64::INFINITY)),
        RegimeTag::Between => {
            let sp = star_point(params)?;
            let c = sp.weights()?;
            let mu_c = params.mu1() * c[0] + params.mu2() * c[1];
            Ok((sp.t_star * mu_c / (16.0 * c[0] * c[1]), f64::INFINITY))
        }
        _ => Err(Error::UnsupportedRegime {
            op: "htilde_bounds",
            regime: tag.to_string(),
        }),
    }
}

/// Asymptotic formula for `P(u)`. In the two `u^{-1/2}` regimes the constant
/// is symbolic in the band constant unless `htilde_estimate` is given.
pub fn asymptotic_formula(
    params: &ModelParams,
    htilde_estimate: Option<f64>,
) -> Result<AsymptoticFormula> {
    let tag = classify(params).tag;
    let (m1, m2, rho) = (params.mu1(), params.mu2(), params.rho());
    let value = |value: f64| Constant::Value { value };
    let formula = |rate, power, constant, exactness| AsymptoticFormula {
        rate,
        power,
        constant,
        exactness,
    };
    let with_htilde = |factor: f64| -> Result<Constant> {
        Ok(match htilde_estimate {
            Some(h) => Constant::Value { value: h * factor },
            None => {
                let (lo, hi) = htilde_bounds(params)?;
                Constant::Htilde { factor, lo, hi }
            }
        })
    };
    use Exactness::*;
    let f = match tag {
        RegimeTag::RhoOne => formula(2.0 * m2, 0.0, value(1.0), ExactForAllU),
        RegimeTag::RhoZero => formula(2.0 * (m1 + m2), 0.0, value(1.0), ExactForAllU),
        RegimeTag::RhoMinusOne => {
            let c = if params.equal_drifts() { 2.0 } else { 1.0 };
            formula(2.0 * m2 + 6.0 * m1, 0.0, value(c), AsymptoticEquivalence)
        }
        RegimeTag::BelowRhoHat1 => formula(
            2.0 * (m2 + (1.0 - 2.0 * rho) * m1),
            0.0,
            value(1.0),
            AsymptoticEquivalence,
        ),
        RegimeTag::AtRhoHat1 => formula(
            2.0 * (m2 + (1.0 - 2.0 * rho) * m1),
            0.0,
            value(0.5),
            AsymptoticEquivalence,
        ),
        RegimeTag::Between => {
            let t = star_point(params)?.t_star;
            let factor = t.sqrt() / (2.0 * (PI * (1.0 - rho)).sqrt());
            formula(
                (m1 + m2 + 2.0 / t) / (1.0 + rho),
                -0.5,
                with_htilde(factor)?,
                AsymptoticEquivalence,
            )
        }
        RegimeTag::AtRhoHat2 => formula(
            2.0 * m2,
            0.0,
            Constant::Interval { lo: 0.5, hi: 1.0 },
            TwoSidedBounds,
        ),
        RegimeTag::AboveRhoHat2 => formula(2.0 * m2, 0.0, value(1.0), AsymptoticEquivalence),
        RegimeTag::EqualDriftNeg => {
            formula(4.0 * (1.0 - rho) * m1, 0.0, value(2.0), AsymptoticEquivalence)
        }
        RegimeTag::EqualDriftZero => formula(4.0 * m1, 0.0, value(1.0), ExactForAllU),
        RegimeTag::EqualDriftPos => {
            let factor = 1.0 / (2.0 * (PI * m1 * (1.0 - rho)).sqrt());
            formula(
                4.0 * m1 / (1.0 + rho),
                -0.5,
                with_htilde(factor)?,
                AsymptoticEquivalence,
            )
        }
    };
    Ok(f)
}

/// `C u^p e^{-r u}`, or its image when `C` is only bracketed.
pub fn approx_p(formula: &AsymptoticFormula, u: f64) -> Result<Approx> {
    if !(u > 0.0) {
        return Err(Error::InvalidInput(format!("u must be positive (got {u})")));
    }
    let base = u.powf(formula.power) * (-formula.rate * u).exp();
    Ok(match formula.constant {
        Constant::Value { value } => Approx::Point {
            value: value * base,
        },
        Constant::Interval { lo, hi } => Approx::Interval {
            lo: lo * base,
            hi: hi * base,
        },
        Constant::Htilde { factor, lo, hi } => Approx::Interval {
            lo: factor * lo * base,
            hi: factor * hi * base,
        },
    })
}

/// Point value of the formula; fails when the constant is not pinned down.
pub fn approx_p_point(formula: &AsymptoticFormula, u: f64) -> Result<f64> {
    match (formula.constant, approx_p(formula, u)?) {
        (Constant::Htilde { .. }, _) => Err(Error::MissingConstant),
        (_, Approx::Point { value }) => Ok(value),
        (_, Approx::Interval { .. }) => Err(Error::InvalidInput(
            "formula only provides two-sided bounds".into(),
        )),
    }
}

/// Logarithmic decay rate `g(t0) / 2`.
pub fn log_rate(params: &ModelParams) -> Result<f64> {
    Ok(minimize_closed_form(params)?.value / 2.0)
}
