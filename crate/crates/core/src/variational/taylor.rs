//! Local expansion of `g` at its minimiser (`mu1 < mu2`).
//!
//! * interior of `A` (`rho < rho_hat1`): `g = g0 + a1/2 t^2 - a2 t s + a3/2 s^2`
//! * on the diagonal (`rho_hat1 < rho < rho_hat2`): linear in the distance to
//!   the diagonal on each side (`b1`, `b2`), quadratic along it (`b0`), with
//!   the wedge curvatures `c1`, `c2`
//! * at `rho_hat1`: the `A` side is quadratic (`a*`), the `B` side linear.
//!
//! Besides the closed forms, [`finite_difference_coeffs`] measures the same
//! quantities from `g` itself so that the two can be compared.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{classify, star_point, ModelParams, RegimeTag};
use crate::variational::closed_form::minimize_closed_form;
use crate::variational::pieces::g_eval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaylorCase {
    #[serde(rename = "interior-A")]
    InteriorA,
    #[serde(rename = "wedge")]
    Wedge,
    #[serde(rename = "at-rho-hat1")]
    AtRhoHat1,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Coefficients {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
}

impl Coefficients {
    /// `(name, value)` for every populated coefficient.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        [
            ("a1", self.a1),
            ("a2", self.a2),
            ("a3", self.a3),
            ("b1", self.b1),
            ("b2", self.b2),
            ("c1", self.c1),
            ("c2", self.c2),
            ("b0", self.b0),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries().into_iter().find(|(k, _)| *k == name).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoeffs {
    pub case: TaylorCase,
    /// Expansion point.
    pub point: (f64, f64),
    /// `h(rho) = mu2 - 2 (mu1 + mu2) rho + 3 mu1 rho^2`, for the cases using `a*`.
    pub h_rho: Option<f64>,
    pub coeffs: Coefficients,
}

impl TaylorCoeffs {
    /// Names of coefficients that should be strictly positive but are not.
    /// `a2` carries no sign claim.
    pub fn sign_violations(&self) -> Vec<&'static str> {
        let mut bad: Vec<&'static str> = self
            .coeffs
            .entries()
            .into_iter()
            .filter(|(k, v)| *k != "a2" && !(*v > 0.0))
            .map(|(k, _)| k)
            .collect();
        if let Some(h) = self.h_rho {
            if !(h > 0.0) {
                bad.push("h_rho");
            }
        }
        bad
    }
}

fn case_for(params: &ModelParams) -> Result<TaylorCase> {
    let tag = classify(params).tag;
    match tag {
        RegimeTag::BelowRhoHat1 | RegimeTag::RhoZero => Ok(TaylorCase::InteriorA),
        RegimeTag::AtRhoHat1 => Ok(TaylorCase::AtRhoHat1),
        RegimeTag::Between => Ok(TaylorCase::Wedge),
        _ => Err(Error::UnsupportedRegime {
            op: "taylor_coefficients",
            regime: tag.to_string(),
        }),
    }
}

fn interior_a(params: &ModelParams) -> (f64, [f64; 3]) {
    let (m1, m2, r) = (params.mu1(), params.mu2(), params.rho());
    let h = m2 - 2.0 * (m1 + m2) * r + 3.0 * m1 * r * r;
    let k = m2 - 2.0 * m1 * r;
    let a1 = 2.0 * m1.powi(3) * k / h;
    let a2 = -2.0 * r * m1 * m1 * k * k / h;
    let a3 = 2.0 * k.powi(4) * (1.0 - 2.0 * r) / h;
    (h, [a1, a2, a3])
}

/// `(b, c)` on one side of the diagonal. `first` selects the `A` side
/// (`b1`, `c1`), otherwise the `B` side (`b2`, `c2`), which is the same
/// expression with the drifts exchanged.
fn wedge_side(params: &ModelParams, t_star: f64, first: bool) -> (f64, f64) {
    let r = params.rho();
    let (ma, mb) = if first {
        (params.mu1(), params.mu2())
    } else {
        (params.mu2(), params.mu1())
    };
    let x = t_star;
    let b = ((r - 1.0 - 2.0 * r * r) + 2.0 * r * (mb - ma * r) * x + (1.0 + r) * ma * ma * x * x)
        / ((1.0 - r) * (1.0 + r).powi(2) * x * x);
    let inner = r * (1.0 - r) - (mb - ma * r) * x;
    let c = 2.0 / x.powi(3) * (1.0 + r * r * inner * inner / (1.0 - r * r).powi(3));
    (b, c)
}

pub fn taylor_coefficients(params: &ModelParams) -> Result<TaylorCoeffs> {
    let case = case_for(params)?;
    let outer = minimize_closed_form(params)?;
    let point = outer.minimizers[0];
    let rho = params.rho();
    let mut coeffs = Coefficients::default();
    let mut h_rho = None;

    if matches!(case, TaylorCase::InteriorA | TaylorCase::AtRhoHat1) {
        let (h, [a1, a2, a3]) = interior_a(params);
        h_rho = Some(h);
        coeffs.a1 = Some(a1);
        coeffs.a2 = Some(a2);
        coeffs.a3 = Some(a3);
    }
    if matches!(case, TaylorCase::Wedge | TaylorCase::AtRhoHat1) {
        let t = star_point(params)?.t_star;
        let (b2, c2) = wedge_side(params, t, false);
        coeffs.b2 = Some(b2);
        coeffs.c2 = Some(c2);
        coeffs.b0 = Some(4.0 / ((1.0 + rho) * t.powi(3)));
        if case == TaylorCase::Wedge {
            let (b1, c1) = wedge_side(params, t, true);
            coeffs.b1 = Some(b1);
            coeffs.c1 = Some(c1);
        }
    }
    Ok(TaylorCoeffs {
        case,
        point,
        h_rho,
        coeffs,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct FdOptions {
    pub step: f64,
    pub richardson: bool,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            step: 1e-4,
            richardson: true,
        }
    }
}

/// Measure the expansion coefficients of `g` at the closed-form minimiser by
/// finite differences of `g` itself (evaluated through the inner QP).
///
/// One-sided stencils stay inside the wedge whose coefficient is being
/// measured; central stencils are used where `g` is smooth.
pub fn finite_difference_coeffs(params: &ModelParams, opts: FdOptions) -> Result<TaylorCoeffs> {
    let case = case_for(params)?;
    let point = minimize_closed_form(params)?.minimizers[0];
    let (t0, s0) = point;
    let g = |dt: f64, ds: f64| g_eval(params, t0 + dt, s0 + ds);

    // Order-h schemes are extrapolated as 2 D(h/2) - D(h), order-h^2 ones as
    // (4 D(h/2) - D(h)) / 3.
    let extrapolate = |d: &dyn Fn(f64) -> Result<f64>, order: i32| -> Result<f64> {
        let h = opts.step;
        let full = d(h)?;
        if !opts.richardson {
            return Ok(full);
        }
        let half = d(h / 2.0)?;
        let k = 2f64.powi(order);
        Ok((k * half - full) / (k - 1.0))
    };
    let g0 = g(0.0, 0.0)?;
    // second directional derivative along (u, v), one-sided
    let one_sided2 = |u: f64, v: f64| {
        move |h: f64| -> Result<f64> {
            Ok((g(2.0 * h * u, 2.0 * h * v)? - 2.0 * g(h * u, h * v)? + g0) / (h * h))
        }
    };
    let one_sided1 = |u: f64, v: f64| move |h: f64| -> Result<f64> { Ok((g(h * u, h * v)? - g0) / h) };
    let central2 = |u: f64, v: f64| {
        move |h: f64| -> Result<f64> { Ok((g(h * u, h * v)? - 2.0 * g0 + g(-h * u, -h * v)?) / (h * h)) }
    };

    let mut coeffs = Coefficients::default();
    match case {
        TaylorCase::InteriorA => {
            let h11 = extrapolate(&central2(1.0, 0.0), 2)?;
            let h22 = extrapolate(&central2(0.0, 1.0), 2)?;
            let mixed = |h: f64| -> Result<f64> {
                Ok((g(h, h)? - g(h, -h)? - g(-h, h)? + g(-h, -h)?) / (4.0 * h * h))
            };
            let h12 = extrapolate(&mixed, 2)?;
            coeffs.a1 = Some(h11);
            coeffs.a2 = Some(-h12);
            coeffs.a3 = Some(h22);
        }
        TaylorCase::Wedge | TaylorCase::AtRhoHat1 => {
            if case == TaylorCase::Wedge {
                coeffs.b1 = Some(extrapolate(&one_sided1(1.0, 0.0), 1)?);
                coeffs.c1 = Some(extrapolate(&one_sided2(0.0, -1.0), 1)?);
            } else {
                let h11 = extrapolate(&one_sided2(1.0, 0.0), 1)?;
                let h22 = extrapolate(&one_sided2(0.0, -1.0), 1)?;
                let anti = extrapolate(&one_sided2(1.0, -1.0), 1)?;
                let h12 = (h11 + h22 - anti) / 2.0;
                coeffs.a1 = Some(h11);
                coeffs.a2 = Some(-h12);
                coeffs.a3 = Some(h22);
            }
            coeffs.b2 = Some(extrapolate(&one_sided1(0.0, 1.0), 1)?);
            coeffs.c2 = Some(extrapolate(&one_sided2(-1.0, 0.0), 1)?);
            coeffs.b0 = Some(extrapolate(&central2(1.0, 1.0), 2)?);
        }
    }
    let h_rho = matches!(case, TaylorCase::InteriorA | TaylorCase::AtRhoHat1)
        .then(|| interior_a(params).0);
    Ok(TaylorCoeffs {
        case,
        point,
        h_rho,
        coeffs,
    })
}

/// Per-coefficient discrepancy `|fd - exact| / max(|exact|, floor)` where the
/// floor is `1e-2` times the largest coefficient magnitude in the set, so
/// that coefficients passing through zero (e.g. `a2` at `rho = 0`) are
/// judged on the scale of their neighbours.
pub fn fd_residuals(exact: &TaylorCoeffs, fd: &TaylorCoeffs) -> Vec<(&'static str, f64)> {
    let largest = exact
        .coeffs
        .entries()
        .iter()
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    let floor = 1e-2 * largest;
    exact
        .coeffs
        .entries()
        .into_iter()
        .filter_map(|(k, v)| {
            fd.coeffs
                .get(k)
                .map(|w| (k, (w - v).abs() / v.abs().max(floor)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonicalize, thresholds};
    use approx::assert_relative_eq;

    #[test]
    fn independent_case_values() {
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let tc = taylor_coefficients(&p).unwrap();
        assert_eq!(tc.case, TaylorCase::InteriorA);
        assert_eq!(tc.h_rho, Some(2.0));
        assert_relative_eq!(tc.coeffs.a1.unwrap(), 2.0);
        assert_eq!(tc.coeffs.a2.unwrap(), 0.0);
        assert_relative_eq!(tc.coeffs.a3.unwrap(), 16.0);
        // g = g1(t) + g2(s) here, so the Hessian is diag(2/t^3, 2/s^3) at (1, 1/2)
        let fd = finite_difference_coeffs(&p, FdOptions::default()).unwrap();
        assert_relative_eq!(fd.coeffs.a1.unwrap(), 2.0, max_relative = 1e-5);
        assert_relative_eq!(fd.coeffs.a3.unwrap(), 16.0, max_relative = 1e-5);
        assert!(fd.coeffs.a2.unwrap().abs() < 1e-4);
    }

    #[test]
    fn equal_drift_curvature_along_diagonal() {
        // the expansion assumes mu1 < mu2; b0 = 4 / ((1 + rho) t*^3) with t* = 1/mu
        let p = canonicalize(1.0, 1.0, 0.5).unwrap();
        assert!(taylor_coefficients(&p).is_err());
        let t = star_point(&p).unwrap().t_star;
        assert_relative_eq!(4.0 / (1.5 * t.powi(3)), 8.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn wedge_case_matches_fd() {
        let p = canonicalize(1.0, 2.0, 0.5).unwrap();
        let tc = taylor_coefficients(&p).unwrap();
        assert_eq!(tc.case, TaylorCase::Wedge);
        assert!(tc.sign_violations().is_empty());
        let fd = finite_difference_coeffs(&p, FdOptions::default()).unwrap();
        for (k, r) in fd_residuals(&tc, &fd) {
            assert!(r < 1e-3, "{k}: {r}");
        }
    }

    #[test]
    fn at_rho_hat1_consistency() {
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let p = p.with_rho(thresholds(&p).0).unwrap();
        let tc = taylor_coefficients(&p).unwrap();
        assert_eq!(tc.case, TaylorCase::AtRhoHat1);
        let c = tc.coeffs;
        // along the diagonal the A-side quadratic form gives b0
        let along = c.a1.unwrap() - 2.0 * c.a2.unwrap() + c.a3.unwrap();
        assert_relative_eq!(along, c.b0.unwrap(), max_relative = 1e-10);
        let fd = finite_difference_coeffs(&p, FdOptions::default()).unwrap();
        for (k, r) in fd_residuals(&tc, &fd) {
            assert!(r < 1e-3, "{k}: {r}");
        }
    }

    #[test]
    fn unsupported_regimes() {
        for rho in [0.75, 0.9, 1.0] {
            let p = canonicalize(1.0, 2.0, rho).unwrap();
            assert!(matches!(
                taylor_coefficients(&p),
                Err(Error::UnsupportedRegime { .. })
            ));
        }
    }
}
