//! Inner layer: `min v^T Sigma^{-1} v` subject to `v >= b` in two dimensions.
//!
//! With two constraints there are only four candidate active sets, so the
//! problem is solved by enumeration: for each candidate the equality
//! constrained minimiser is formed in closed form and kept if it is primal
//! feasible and its multipliers are non-negative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CovMatrix2;

/// Subset of the two constraint indices that bind at the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActiveSet {
    Both,
    First,
    Second,
    Empty,
}

impl ActiveSet {
    pub fn contains(&self, i: usize) -> bool {
        match self {
            ActiveSet::Both => true,
            ActiveSet::First => i == 0,
            ActiveSet::Second => i == 1,
            ActiveSet::Empty => false,
        }
    }

    /// One-based indices, e.g. `[1, 2]`.
    pub fn indices(&self) -> Vec<usize> {
        (0..2).filter(|&i| self.contains(i)).map(|i| i + 1).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpSolution {
    pub value: f64,
    pub optimizer_v: [f64; 2],
    pub active_set: ActiveSet,
    /// KKT multipliers of `v >= b` for the objective `v^T Sigma^{-1} v`
    /// (zero outside the active set).
    pub multipliers: [f64; 2],
    /// Set when more than one candidate passed the checks within tolerance.
    pub degenerate: bool,
    /// Number of candidates that passed the strict checks.
    pub passing: usize,
}

const DET_TOL: f64 = 1e-14;
const KKT_TOL: f64 = 1e-12;

struct Candidate {
    set: ActiveSet,
    v: [f64; 2],
    lambda: [f64; 2],
}

pub fn inner_qp(sigma: &CovMatrix2, b: [f64; 2]) -> Result<QpSolution> {
    if sigma.a <= 0.0 || sigma.c <= 0.0 || sigma.is_singular(DET_TOL) {
        return Err(Error::SingularCovariance(sigma.det()));
    }
    let inv = sigma.inverse()?;
    let scale = b[0].abs().max(b[1].abs()).max(f64::MIN_POSITIVE);

    // Both constraints bind: v = b, gradient 2 Sigma^{-1} b must be >= 0.
    let g = inv.mul_vec(b);
    let both = Candidate {
        set: ActiveSet::Both,
        v: b,
        lambda: [2.0 * g[0], 2.0 * g[1]],
    };
    // Only the first binds: v2 is the conditional mean sigma_12 / sigma_11 * b1.
    let first = Candidate {
        set: ActiveSet::First,
        v: [b[0], sigma.b / sigma.a * b[0]],
        lambda: [2.0 * b[0] / sigma.a, 0.0],
    };
    let second = Candidate {
        set: ActiveSet::Second,
        v: [sigma.b / sigma.c * b[1], b[1]],
        lambda: [0.0, 2.0 * b[1] / sigma.c],
    };
    let empty = Candidate {
        set: ActiveSet::Empty,
        v: [0.0, 0.0],
        lambda: [0.0, 0.0],
    };

    // Ordered from the largest set down so that ties resolve to the larger set.
    let candidates = [both, first, second, empty];
    let lam_scale = 2.0 * inv.a.abs().max(inv.c.abs()) * scale;
    let passes = |c: &Candidate, slack: f64| {
        let feasible = (0..2).all(|i| c.v[i] >= b[i] - slack * scale);
        let dual_ok = c.lambda.iter().all(|&l| l >= -slack * lam_scale);
        feasible && dual_ok
    };

    let strict: Vec<&Candidate> = candidates.iter().filter(|c| passes(c, 0.0)).collect();
    let loose: Vec<&Candidate> = candidates.iter().filter(|c| passes(c, KKT_TOL)).collect();
    let chosen = strict
        .first()
        .or_else(|| loose.first())
        .copied()
        .ok_or_else(|| Error::NoConvergence("no active set satisfies the KKT conditions".into()))?;

    Ok(QpSolution {
        value: inv.quad_form(chosen.v),
        optimizer_v: chosen.v,
        active_set: chosen.set,
        multipliers: chosen.lambda,
        degenerate: loose.len() > 1,
        passing: strict.len(),
    })
}
