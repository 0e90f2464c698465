//! Model parameters, correlation thresholds and the regime classifier.
//!
//! The process pair is `(X1(t) - mu1 t, X2(s) - mu2 s)` where `X1, X2` are
//! standard Brownian motions with `E[X1(t) X2(s)] = rho min(t, s)`. The joint
//! tail of the two suprema is symmetric in the component labels, so every
//! parameter set is stored in canonical order `mu1 <= mu2`.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Relative tolerance on `|mu1 - mu2| / mu2` below which drifts count as equal.
pub const EQUAL_DRIFT_REL_TOL: f64 = 1e-12;

/// Drifts and correlation in canonical order (`mu1 <= mu2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    mu1: f64,
    mu2: f64,
    rho: f64,
    swapped: bool,
}

impl ModelParams {
    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// True when the caller's components were exchanged to reach `mu1 <= mu2`.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    pub fn mu(&self) -> [f64; 2] {
        [self.mu1, self.mu2]
    }

    /// Same drifts, different correlation.
    pub fn with_rho(&self, rho: f64) -> Result<ModelParams> {
        let mut p = canonicalize(self.mu1, self.mu2, rho)?;
        p.swapped = self.swapped;
        Ok(p)
    }

    pub fn equal_drifts(&self) -> bool {
        (self.mu2 - self.mu1).abs() <= EQUAL_DRIFT_REL_TOL * self.mu2
    }
}

/// Validate `(mu1, mu2, rho)` and put the drifts in ascending order.
pub fn canonicalize(mu1: f64, mu2: f64, rho: f64) -> Result<ModelParams> {
    if !(mu1 > 0.0 && mu2 > 0.0) || !mu1.is_finite() || !mu2.is_finite() {
        return Err(Error::NonPositiveDrift { mu1, mu2 });
    }
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::InvalidCorrelation(rho));
    }
    let swapped = mu1 > mu2;
    let (mu1, mu2) = if swapped { (mu2, mu1) } else { (mu1, mu2) };
    Ok(ModelParams {
        mu1,
        mu2,
        rho,
        swapped,
    })
}

/// The two correlation thresholds `(rho_hat1, rho_hat2)`.
///
/// `rho_hat1 = (mu1 + mu2 - sqrt(D)) / (4 mu1)` with
/// `D = (mu1 + mu2)^2 - 4 mu1 (mu2 - mu1)`, evaluated in the rationalised form
/// `(mu2 - mu1) / (mu1 + mu2 + sqrt(D))` which avoids cancellation and is
/// exactly zero for equal drifts. `rho_hat2 = (mu1 + mu2) / (2 mu2)`.
pub fn thresholds(params: &ModelParams) -> (f64, f64) {
    let (m1, m2) = (params.mu1, params.mu2);
    let sum = m1 + m2;
    let disc = (m2 - m1) * (m2 - m1) + 4.0 * m1 * m1;
    let rho_hat1 = (m2 - m1) / (sum + disc.sqrt());
    let rho_hat2 = if params.equal_drifts() {
        1.0
    } else {
        sum / (2.0 * m2)
    };
    (rho_hat1, rho_hat2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeTag {
    RhoOne,
    RhoZero,
    RhoMinusOne,
    BelowRhoHat1,
    AtRhoHat1,
    Between,
    AtRhoHat2,
    AboveRhoHat2,
    EqualDriftNeg,
    EqualDriftZero,
    EqualDriftPos,
}

impl RegimeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeTag::RhoOne => "RhoOne",
            RegimeTag::RhoZero => "RhoZero",
            RegimeTag::RhoMinusOne => "RhoMinusOne",
            RegimeTag::BelowRhoHat1 => "BelowRhoHat1",
            RegimeTag::AtRhoHat1 => "AtRhoHat1",
            RegimeTag::Between => "Between",
            RegimeTag::AtRhoHat2 => "AtRhoHat2",
            RegimeTag::AboveRhoHat2 => "AboveRhoHat2",
            RegimeTag::EqualDriftNeg => "EqualDriftNeg",
            RegimeTag::EqualDriftZero => "EqualDriftZero",
            RegimeTag::EqualDriftPos => "EqualDriftPos",
        }
    }

    /// Regimes whose prefactor involves the band constant `H~`.
    pub fn has_pickands_constant(&self) -> bool {
        matches!(self, RegimeTag::Between | RegimeTag::EqualDriftPos)
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub tag: RegimeTag,
    pub rho_hat1: f64,
    pub rho_hat2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Half-width of the band around each boundary value that is dispatched
    /// to the boundary tag. Zero means exact comparison.
    pub boundary_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { boundary_tol: 0.0 }
    }
}

pub fn classify(params: &ModelParams) -> Regime {
    classify_with(params, ClassifyOptions::default())
}

pub fn classify_with(params: &ModelParams, opts: ClassifyOptions) -> Regime {
    let (rho_hat1, rho_hat2) = thresholds(params);
    let rho = params.rho;
    let tol = opts.boundary_tol.max(0.0);
    let near = |x: f64| (rho - x).abs() <= tol;

    let tag = if near(1.0) {
        RegimeTag::RhoOne
    } else if near(-1.0) {
        RegimeTag::RhoMinusOne
    } else if params.equal_drifts() {
        if near(0.0) {
            RegimeTag::EqualDriftZero
        } else if rho < 0.0 {
            RegimeTag::EqualDriftNeg
        } else {
            RegimeTag::EqualDriftPos
        }
    } else if near(0.0) {
        RegimeTag::RhoZero
    } else if near(rho_hat1) {
        RegimeTag::AtRhoHat1
    } else if rho < rho_hat1 {
        RegimeTag::BelowRhoHat1
    } else if near(rho_hat2) {
        RegimeTag::AtRhoHat2
    } else if rho < rho_hat2 {
        RegimeTag::Between
    } else {
        RegimeTag::AboveRhoHat2
    };
    Regime {
        tag,
        rho_hat1,
        rho_hat2,
    }
}

/// Symmetric 2x2 matrix `[[a, b], [b, c]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovMatrix2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl CovMatrix2 {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        CovMatrix2 { a, b, c }
    }

    pub fn identity() -> Self {
        CovMatrix2::new(1.0, 0.0, 1.0)
    }

    pub fn det(&self) -> f64 {
        self.a * self.c - self.b * self.b
    }

    /// Determinant at or below `tol * a * c` counts as singular.
    pub fn is_singular(&self, tol: f64) -> bool {
        self.det() <= tol * (self.a * self.c).abs()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0.0 && self.det() > 0.0
    }

    pub fn inverse(&self) -> Result<CovMatrix2> {
        let det = self.det();
        if self.is_singular(1e-14) {
            return Err(Error::SingularCovariance(det));
        }
        Ok(CovMatrix2::new(self.c / det, -self.b / det, self.a / det))
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.b * v[0] + self.c * v[1]]
    }

    /// `v^T M v`.
    pub fn quad_form(&self, v: [f64; 2]) -> f64 {
        self.a * v[0] * v[0] + 2.0 * self.b * v[0] * v[1] + self.c * v[1] * v[1]
    }

    pub fn to_rows(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.b, self.c]]
    }
}

/// Covariance of `(X1(t), X2(s))`: `[[t, rho min(t,s)], [rho min(t,s), s]]`.
pub fn sigma_ts(params: &ModelParams, t: f64, s: f64) -> Result<CovMatrix2> {
    if !(t > 0.0 && s > 0.0) {
        return Err(Error::NonPositiveTime { t, s });
    }
    Ok(CovMatrix2::new(t, params.rho * t.min(s), s))
}

/// The diagonal point `t* = s*` together with `Sigma*` and `b*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarPoint {
    pub t_star: f64,
    pub sigma_star: CovMatrix2,
    pub b_star: [f64; 2],
}

impl StarPoint {
    /// `Sigma*^{-1} b*`, the exponential weight vector of the band constant.
    pub fn weights(&self) -> Result<[f64; 2]> {
        Ok(self.sigma_star.inverse()?.mul_vec(self.b_star))
    }
}

/// `t* = sqrt(2 (1 - rho) / (mu1^2 + mu2^2 - 2 rho mu1 mu2))`.
pub fn star_point(params: &ModelParams) -> Result<StarPoint> {
    let (m1, m2, rho) = (params.mu1, params.mu2, params.rho);
    if rho >= 1.0 {
        return Err(Error::DegenerateCovariance(if params.equal_drifts() {
            "rho = 1 with equal drifts: t* is 0/0".into()
        } else {
            "rho = 1: t* = 0 and Sigma* vanishes".into()
        }));
    }
    let denom = m1 * m1 + m2 * m2 - 2.0 * rho * m1 * m2;
    let t_star = (2.0 * (1.0 - rho) / denom).sqrt();
    Ok(StarPoint {
        t_star,
        sigma_star: CovMatrix2::new(t_star, rho * t_star, t_star),
        b_star: [1.0 + m1 * t_star, 1.0 + m2 * t_star],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn canonicalize_swaps_and_validates() {
        let p = canonicalize(2.0, 1.0, 0.3).unwrap();
        assert_eq!((p.mu1(), p.mu2(), p.rho(), p.swapped()), (1.0, 2.0, 0.3, true));
        let p = canonicalize(1.0, 2.0, 0.3).unwrap();
        assert!(!p.swapped());
        assert_eq!(canonicalize(1.0, 1.0, -1.5), Err(Error::InvalidCorrelation(-1.5)));
        assert!(matches!(
            canonicalize(0.0, 1.0, 0.0),
            Err(Error::NonPositiveDrift { .. })
        ));
        assert!(matches!(
            canonicalize(1.0, -2.0, 0.0),
            Err(Error::NonPositiveDrift { .. })
        ));
        assert!(canonicalize(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn threshold_values() {
        let p = canonicalize(1.5, 1.5, 0.2).unwrap();
        assert_eq!(thresholds(&p), (0.0, 1.0));
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let (r1, r2) = thresholds(&p);
        // (3 - sqrt 5) / 4
        assert_relative_eq!(r1, 0.190_983_005_625_052_6, max_relative = 1e-14);
        assert_eq!(r2, 0.75);
        let p = canonicalize(1.0, 3.0, 0.0).unwrap();
        assert_relative_eq!(thresholds(&p).1, 2.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn classify_examples() {
        let tag = |m1, m2, r| classify(&canonicalize(m1, m2, r).unwrap()).tag;
        assert_eq!(tag(1.0, 2.0, 0.5), RegimeTag::Between);
        assert_eq!(tag(1.0, 2.0, 0.0), RegimeTag::RhoZero);
        assert_eq!(tag(1.0, 1.0, -0.5), RegimeTag::EqualDriftNeg);
        assert_eq!(tag(1.0, 1.0, 0.0), RegimeTag::EqualDriftZero);
        assert_eq!(tag(1.0, 1.0, 0.3), RegimeTag::EqualDriftPos);
        assert_eq!(tag(1.0, 2.0, -0.5), RegimeTag::BelowRhoHat1);
        assert_eq!(tag(1.0, 2.0, 0.1), RegimeTag::BelowRhoHat1);
        assert_eq!(tag(1.0, 2.0, 0.75), RegimeTag::AtRhoHat2);
        assert_eq!(tag(1.0, 2.0, 0.9), RegimeTag::AboveRhoHat2);
        assert_eq!(tag(1.0, 2.0, 1.0), RegimeTag::RhoOne);
        assert_eq!(tag(1.0, 1.0, 1.0), RegimeTag::RhoOne);
        assert_eq!(tag(1.0, 2.0, -1.0), RegimeTag::RhoMinusOne);
    }

    #[test]
    fn boundary_band() {
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let (r1, _) = thresholds(&p);
        let at = p.with_rho(r1).unwrap();
        assert_eq!(classify(&at).tag, RegimeTag::AtRhoHat1);
        let off = p.with_rho(r1 + 1e-9).unwrap();
        assert_eq!(classify(&off).tag, RegimeTag::Between);
        let banded = classify_with(&off, ClassifyOptions { boundary_tol: 1e-8 });
        assert_eq!(banded.tag, RegimeTag::AtRhoHat1);
    }

    #[test]
    fn sigma_ts_entries() {
        let p = canonicalize(1.0, 2.0, 0.5).unwrap();
        let m = sigma_ts(&p, 2.0, 1.0).unwrap();
        assert_eq!(m.to_rows(), [[2.0, 0.5], [0.5, 1.0]]);
        let p0 = p.with_rho(0.0).unwrap();
        assert_eq!(sigma_ts(&p0, 3.0, 0.5).unwrap().to_rows(), [[3.0, 0.0], [0.0, 0.5]]);
        let p1 = p.with_rho(1.0).unwrap();
        let m = sigma_ts(&p1, 1.0, 1.0).unwrap();
        assert_eq!(m.det(), 0.0);
        assert!(m.is_singular(0.0));
        assert!(m.inverse().is_err());
        assert!(matches!(sigma_ts(&p, 0.0, 1.0), Err(Error::NonPositiveTime { .. })));
    }

    #[test]
    fn star_point_examples() {
        let p = canonicalize(1.7, 1.7, -0.3).unwrap();
        assert_relative_eq!(star_point(&p).unwrap().t_star, 1.0 / 1.7, max_relative = 1e-14);
        let p = canonicalize(1.0, 2.0, 0.5).unwrap();
        let sp = star_point(&p).unwrap();
        assert_relative_eq!(sp.t_star, (1.0f64 / 3.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(sp.sigma_star.b, 0.5 * sp.t_star);
        assert_relative_eq!(sp.b_star[1], 1.0 + 2.0 * sp.t_star);
        let p = canonicalize(1.0, 2.0, 0.75).unwrap();
        assert_relative_eq!(star_point(&p).unwrap().t_star, 0.5, max_relative = 1e-14);
        let p = canonicalize(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(star_point(&p), Err(Error::DegenerateCovariance(_))));
    }

    proptest! {
        #[test]
        fn thresholds_ordered(a in 0.01f64..10.0, b in 0.01f64..10.0) {
            let p = canonicalize(a, b, 0.0).unwrap();
            let (r1, r2) = thresholds(&p);
            prop_assert!(r1 >= 0.0 && r1 < 0.5);
            prop_assert!(r2 > 0.5 && r2 <= 1.0);
        }

        #[test]
        fn boundary_tags_hit_exactly(a in 0.05f64..5.0, ratio in 1.01f64..6.0) {
            let p = canonicalize(a, a * ratio, 0.0).unwrap();
            let (r1, r2) = thresholds(&p);
            prop_assert_eq!(classify(&p.with_rho(r1).unwrap()).tag, RegimeTag::AtRhoHat1);
            prop_assert_eq!(classify(&p.with_rho(r2).unwrap()).tag, RegimeTag::AtRhoHat2);
        }

        #[test]
        fn sigma_ts_positive_definite(rho in -0.999f64..0.999, t in 1e-3f64..50.0, s in 1e-3f64..50.0) {
            let p = canonicalize(1.0, 2.0, rho).unwrap();
            let m = sigma_ts(&p, t, s).unwrap();
            prop_assert!(m.is_positive_definite());
            let diag = sigma_ts(&p, t, t).unwrap();
            prop_assert!(diag.is_positive_definite());
        }

        #[test]
        fn t_star_symmetric_and_decreasing(a in 0.1f64..5.0, b in 0.1f64..5.0, rho in -0.95f64..0.95) {
            let p = canonicalize(a, b, rho).unwrap();
            let q = canonicalize(b, a, rho).unwrap();
            let t = star_point(&p).unwrap().t_star;
            prop_assert_eq!(t, star_point(&q).unwrap().t_star);
            // d/da of the denominator is 2 (a - rho b): t* falls in `a`
            // exactly when a >= rho b.
            let bigger = canonicalize(a * 1.1, b, rho).unwrap();
            let t_big = star_point(&bigger).unwrap().t_star;
            if a >= rho * b {
                prop_assert!(t_big <= t * (1.0 + 1e-12));
            } else if a * 1.1 <= rho * b {
                prop_assert!(t_big >= t * (1.0 - 1e-12));
            }
        }
    }
}
