//! Explicit pieces of the objective `g(t, s)`.
//!
//! On the wedge `A = {s < t}` and `B = {s > t}` the full-active-set value
//! `g3(t, s) = b^T Sigma_ts^{-1} b`, `b = (1 + mu1 t, 1 + mu2 s)`, has two
//! algebraically equivalent closed forms; both are exposed so they can be
//! checked against each other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{sigma_ts, ModelParams};
use crate::variational::qp::{inner_qp, QpSolution};

fn check_times(t: f64, s: f64) -> Result<()> {
    if t > 0.0 && s > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveTime { t, s })
    }
}

/// Level vector `b(t, s) = (1 + mu1 t, 1 + mu2 s)`.
pub fn levels(params: &ModelParams, t: f64, s: f64) -> [f64; 2] {
    [1.0 + params.mu1() * t, 1.0 + params.mu2() * s]
}

/// `(1 + mu1 t)^2 / t`
pub fn g1(params: &ModelParams, t: f64) -> f64 {
    let x = 1.0 + params.mu1() * t;
    x * x / t
}

/// `(1 + mu2 s)^2 / s`
pub fn g2(params: &ModelParams, s: f64) -> f64 {
    let y = 1.0 + params.mu2() * s;
    y * y / s
}

/// Ratio form of `g3` valid on `s <= t`.
pub fn g_a(params: &ModelParams, t: f64, s: f64) -> f64 {
    let [x, y] = levels(params, t, s);
    let rho = params.rho();
    (x * x * s - 2.0 * rho * s * x * y + y * y * t) / (t * s - rho * rho * s * s)
}

/// Ratio form of `g3` valid on `s >= t`.
pub fn g_b(params: &ModelParams, t: f64, s: f64) -> f64 {
    let [x, y] = levels(params, t, s);
    let rho = params.rho();
    (x * x * s - 2.0 * rho * t * x * y + y * y * t) / (t * s - rho * rho * t * t)
}

/// Sum-of-squares form of `g3` on `s <= t`.
pub fn g_a_alt(params: &ModelParams, t: f64, s: f64) -> f64 {
    let [x, y] = levels(params, t, s);
    let rho = params.rho();
    y * y / s + (x - rho * y).powi(2) / (t - rho * rho * s)
}

/// Sum-of-squares form of `g3` on `s >= t`.
pub fn g_b_alt(params: &ModelParams, t: f64, s: f64) -> f64 {
    let [x, y] = levels(params, t, s);
    let rho = params.rho();
    x * x / t + (y - rho * x).powi(2) / (s - rho * rho * t)
}

/// `g3` on the diagonal `s = t`.
pub fn g_l(params: &ModelParams, s: f64) -> f64 {
    let [x, y] = levels(params, s, s);
    let rho = params.rho();
    (x * x + y * y - 2.0 * rho * x * y) / ((1.0 - rho * rho) * s)
}

/// Which wedge a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Wedge {
    A,
    L,
    B,
}

pub fn wedge(t: f64, s: f64) -> Wedge {
    if s < t {
        Wedge::A
    } else if s > t {
        Wedge::B
    } else {
        Wedge::L
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GPieces {
    pub wedge: Wedge,
    pub g1: f64,
    pub g2: f64,
    /// `g3` in ratio form (`g_A` on `s <= t`, `g_B` on `s >= t`).
    pub g3: f64,
    /// `g3` in the sum-of-squares form, for cross-checking.
    pub g3_alt: f64,
    /// `g_L(s)`, only on the diagonal.
    pub g_l: Option<f64>,
}

pub fn g_pieces(params: &ModelParams, t: f64, s: f64) -> Result<GPieces> {
    check_times(t, s)?;
    if params.rho().abs() >= 1.0 {
        return Err(Error::DegenerateCovariance("|rho| = 1".into()));
    }
    let w = wedge(t, s);
    let (g3, g3_alt) = match w {
        Wedge::A | Wedge::L => (g_a(params, t, s), g_a_alt(params, t, s)),
        Wedge::B => (g_b(params, t, s), g_b_alt(params, t, s)),
    };
    Ok(GPieces {
        wedge: w,
        g1: g1(params, t),
        g2: g2(params, s),
        g3,
        g3_alt,
        g_l: (w == Wedge::L).then(|| g_l(params, s)),
    })
}

/// Inner-layer solution at `(t, s)`.
pub fn g_solve(params: &ModelParams, t: f64, s: f64) -> Result<QpSolution> {
    let sigma = sigma_ts(params, t, s)?;
    inner_qp(&sigma, levels(params, t, s))
}

/// `g(t, s)`: the inner infimum of the two-layer problem at fixed times.
pub fn g_eval(params: &ModelParams, t: f64, s: f64) -> Result<f64> {
    g_solve(params, t, s).map(|q| q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::canonicalize;
    use crate::variational::qp::ActiveSet;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn g2_at_inverse_drift() {
        let p = canonicalize(1.0, 2.0, 0.3).unwrap();
        assert_relative_eq!(g2(&p, 0.5), 8.0, max_relative = 1e-15);
    }

    #[test]
    fn g_l_independent_case() {
        let p = canonicalize(1.0, 2.0, 0.0).unwrap();
        let s: f64 = 0.7;
        let expect = ((1.0 + s).powi(2) + (1.0 + 2.0 * s).powi(2)) / s;
        assert_relative_eq!(g_l(&p, s), expect, max_relative = 1e-14);
        let pieces = g_pieces(&p, s, s).unwrap();
        assert_eq!(pieces.wedge, Wedge::L);
        assert_relative_eq!(pieces.g_l.unwrap(), expect, max_relative = 1e-14);
    }

    #[test]
    fn g_eval_examples() {
        let p = canonicalize(1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(g_eval(&p, 1.0, 1.0).unwrap(), 8.0, max_relative = 1e-14);

        let p = canonicalize(1.0, 2.0, -0.5).unwrap();
        assert_relative_eq!(g_eval(&p, 2.0, 1.0 / 3.0).unwrap(), 16.0, max_relative = 1e-13);

        // beyond rho_hat2 the second constraint alone binds at s = 1/mu2
        let p = canonicalize(1.0, 2.0, 0.9).unwrap();
        let sol = g_solve(&p, 0.5, 0.5).unwrap();
        assert_eq!(sol.active_set, ActiveSet::Second);
        assert_relative_eq!(sol.value, 8.0, max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_times() {
        let p = canonicalize(1.0, 2.0, 0.2).unwrap();
        assert!(matches!(g_pieces(&p, -1.0, 1.0), Err(Error::NonPositiveTime { .. })));
        assert!(matches!(g_eval(&p, 1.0, 0.0), Err(Error::NonPositiveTime { .. })));
    }

    proptest! {
        #[test]
        fn two_forms_agree(
            m1 in 0.1f64..4.0, m2 in 0.1f64..4.0, rho in -0.95f64..0.95,
            t in 0.01f64..10.0, s in 0.01f64..10.0,
        ) {
            let p = canonicalize(m1, m2, rho).unwrap();
            let pc = g_pieces(&p, t, s).unwrap();
            prop_assert!((pc.g3 - pc.g3_alt).abs() <= 1e-12 * pc.g3.abs().max(1.0));
        }

        #[test]
        fn diagonal_forms_coincide(m1 in 0.1f64..4.0, m2 in 0.1f64..4.0, rho in -0.95f64..0.95, s in 0.01f64..10.0) {
            let p = canonicalize(m1, m2, rho).unwrap();
            let gl = g_l(&p, s);
            prop_assert!((g_a(&p, s, s) - gl).abs() <= 1e-12 * gl);
            prop_assert!((g_b(&p, s, s) - gl).abs() <= 1e-12 * gl);
        }

        #[test]
        fn g_dominates_single_components(
            m1 in 0.1f64..4.0, m2 in 0.1f64..4.0, rho in -0.95f64..0.95,
            t in 0.01f64..10.0, s in 0.01f64..10.0,
        ) {
            let p = canonicalize(m1, m2, rho).unwrap();
            let g = g_eval(&p, t, s).unwrap();
            let tol = 1e-12 * g;
            prop_assert!(g >= g1(&p, t) - tol);
            prop_assert!(g >= g2(&p, s) - tol);
        }

        #[test]
        fn g_matches_branch(
            m1 in 0.1f64..4.0, m2 in 0.1f64..4.0, rho in -0.95f64..0.95,
            t in 0.01f64..10.0, s in 0.01f64..10.0,
        ) {
            let p = canonicalize(m1, m2, rho).unwrap();
            let sol = g_solve(&p, t, s).unwrap();
            let pc = g_pieces(&p, t, s).unwrap();
            let expect = match sol.active_set {
                ActiveSet::Both => pc.g3,
                ActiveSet::First => pc.g1,
                ActiveSet::Second => pc.g2,
                ActiveSet::Empty => 0.0,
            };
            prop_assert!((sol.value - expect).abs() <= 1e-10 * expect.max(1.0));
            prop_assert!(sol.active_set != ActiveSet::Empty);
        }
    }
}
