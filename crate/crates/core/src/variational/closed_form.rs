//! Closed-form solution of the outer layer `inf_{t,s > 0} g(t, s)`, one
//! branch per correlation regime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{classify, star_point, ModelParams, RegimeTag};

/// Where the global minimiser lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    A,
    L,
    B,
    #[serde(rename = "Curve-g2")]
    CurveG2,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::A => "A",
            Region::L => "L",
            Region::B => "B",
            Region::CurveG2 => "Curve-g2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterSolution {
    /// One entry, or two mirrored entries for equal drifts with `rho < 0`.
    /// For `Curve-g2` this is a representative point of the attainment set.
    pub minimizers: Vec<(f64, f64)>,
    pub value: f64,
    pub region: Region,
    /// For `Curve-g2`: the range of `t` over which `g(t, 1/mu2) = g2(1/mu2)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_t_range: Option<(f64, f64)>,
}

/// Minimiser of `g_A` away from the diagonal: `((1 - 2 rho)/mu1, 1/(mu2 - 2 mu1 rho))`.
pub fn wedge_point(params: &ModelParams) -> (f64, f64) {
    let (m1, m2, rho) = (params.mu1(), params.mu2(), params.rho());
    ((1.0 - 2.0 * rho) / m1, 1.0 / (m2 - 2.0 * m1 * rho))
}

pub fn minimize_closed_form(params: &ModelParams) -> Result<OuterSolution> {
    let regime = classify(params);
    let (m1, m2, rho) = (params.mu1(), params.mu2(), params.rho());
    let wedge_value = 4.0 * (m2 + (1.0 - 2.0 * rho) * m1);

    let single = |point: (f64, f64), value: f64, region: Region| OuterSolution {
        minimizers: vec![point],
        value,
        region,
        curve_t_range: None,
    };

    let sol = match regime.tag {
        RegimeTag::RhoOne | RegimeTag::RhoMinusOne => {
            return Err(Error::UnsupportedRegime {
                op: "minimize_closed_form",
                regime: regime.tag.to_string(),
            })
        }
        RegimeTag::BelowRhoHat1 | RegimeTag::RhoZero => {
            single(wedge_point(params), wedge_value, Region::A)
        }
        RegimeTag::EqualDriftNeg => {
            let (t_a, s_a) = wedge_point(params);
            OuterSolution {
                minimizers: vec![(t_a, s_a), (s_a, t_a)],
                value: 8.0 * (1.0 - rho) * m1,
                region: Region::A,
                curve_t_range: None,
            }
        }
        RegimeTag::AtRhoHat1 => {
            // The wedge point sits on the diagonal here; report it through t*
            // so both coordinates are bit-identical.
            let t = star_point(params)?.t_star;
            single((t, t), wedge_value, Region::L)
        }
        RegimeTag::Between | RegimeTag::EqualDriftZero | RegimeTag::EqualDriftPos => {
            let t = star_point(params)?.t_star;
            let value = 2.0 * (m1 + m2 + 2.0 / t) / (1.0 + rho);
            single((t, t), value, Region::L)
        }
        RegimeTag::AtRhoHat2 => single((1.0 / m2, 1.0 / m2), 4.0 * m2, Region::L),
        RegimeTag::AboveRhoHat2 => {
            // With s = 1/mu2 the first constraint is slack iff
            // t in [1/(2 rho mu2 - mu1), (2 rho - 1)/mu1].
            let lo = 1.0 / (2.0 * rho * m2 - m1);
            let hi = (2.0 * rho - 1.0) / m1;
            OuterSolution {
                minimizers: vec![(1.0 / m2, 1.0 / m2)],
                value: 4.0 * m2,
                region: Region::CurveG2,
                curve_t_range: Some((lo, hi)),
            }
        }
    };
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonicalize, thresholds};
    use crate::variational::pieces::{g_a, g_eval, g_l};
    use approx::assert_relative_eq;

    #[test]
    fn wedge_regime() {
        let p = canonicalize(1.0, 2.0, -0.5).unwrap();
        let sol = minimize_closed_form(&p).unwrap();
        assert_eq!(sol.region, Region::A);
        assert_relative_eq!(sol.value, 16.0);
        assert_relative_eq!(sol.minimizers[0].0, 2.0);
        assert_relative_eq!(sol.minimizers[0].1, 1.0 / 3.0);
        assert_relative_eq!(g_a(&p, 2.0, 1.0 / 3.0), 16.0, max_relative = 1e-13);
    }

    #[test]
    fn at_rho_hat2() {
        let p = canonicalize(1.0, 2.0, 0.75).unwrap();
        let sol = minimize_closed_form(&p).unwrap();
        assert_eq!(sol.minimizers, vec![(0.5, 0.5)]);
        assert_eq!(sol.value, 8.0);
        assert_eq!(sol.region, Region::L);
        assert_relative_eq!(g_l(&p, 0.5), 8.0, max_relative = 1e-14);
    }

    #[test]
    fn equal_drifts_positive() {
        let p = canonicalize(1.0, 1.0, 0.5).unwrap();
        let sol = minimize_closed_form(&p).unwrap();
        assert_relative_eq!(sol.minimizers[0].0, 1.0, max_relative = 1e-15);
        assert_relative_eq!(sol.value, 16.0 / 3.0, max_relative = 1e-15);
        assert_eq!(sol.region, Region::L);
    }

    #[test]
    fn equal_drifts_negative_two_minimizers() {
        let p = canonicalize(1.0, 1.0, -0.5).unwrap();
        let sol = minimize_closed_form(&p).unwrap();
        assert_eq!(sol.minimizers, vec![(2.0, 0.5), (0.5, 2.0)]);
        assert_relative_eq!(sol.value, 12.0);
        for &(t, s) in &sol.minimizers {
            assert_relative_eq!(g_eval(&p, t, s).unwrap(), 12.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn at_rho_hat1_on_diagonal() {
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let (r1, _) = thresholds(&p);
        let p = p.with_rho(r1).unwrap();
        let sol = minimize_closed_form(&p).unwrap();
        let (t_a, s_a) = wedge_point(&p);
        assert_relative_eq!(t_a, s_a, max_relative = 1e-13);
        assert_relative_eq!(sol.minimizers[0].0, t_a, max_relative = 1e-13);
        assert_relative_eq!(g_eval(&p, t_a, t_a).unwrap(), sol.value, max_relative = 1e-12);
    }

    #[test]
    fn curve_attainment_set() {
        let p = canonicalize(1.0, 2.0, 0.9).unwrap();
        let sol = minimize_closed_form(&p).unwrap();
        assert_eq!(sol.region, Region::CurveG2);
        assert_eq!(sol.value, 8.0);
        let (lo, hi) = sol.curve_t_range.unwrap();
        assert!(lo < 0.5 && 0.5 < hi);
        for k in 0..=10 {
            let t = lo + (hi - lo) * k as f64 / 10.0;
            assert_relative_eq!(g_eval(&p, t, 0.5).unwrap(), 8.0, max_relative = 1e-12);
        }
        assert!(g_eval(&p, hi * 1.05, 0.5).unwrap() > 8.0 + 1e-9);
        assert!(g_eval(&p, lo * 0.95, 0.5).unwrap() > 8.0 + 1e-9);
    }

    #[test]
    fn degenerate_correlations_rejected() {
        for rho in [-1.0, 1.0] {
            let p = canonicalize(1.0, 2.0, rho).unwrap();
            assert!(matches!(
                minimize_closed_form(&p),
                Err(Error::UnsupportedRegime { .. })
            ));
        }
    }
}
