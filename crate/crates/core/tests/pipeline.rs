//! Cross-module consistency: rate, formula, constants and simulation.

use cwextrema::asymptotics::{asymptotic_formula, htilde_bounds, log_rate};
use cwextrema::constants::{estimate_h_band, BandRegion};
use cwextrema::model::{canonicalize, thresholds};
use cwextrema::simulation::{estimate_p_crude, estimate_p_tilted, estimate_p_tilted_full, PathConfig};
use cwextrema::variational::closed_form::minimize_closed_form;
use cwextrema::variational::pieces::g_eval;

#[test]
fn formula_rate_is_half_the_minimum() {
    for (m1, m2, rho) in [(1.0, 2.0, -0.5), (1.0, 2.0, 0.5), (1.0, 2.0, 0.9), (1.0, 1.0, 0.5), (0.7, 1.9, 0.2)] {
        let p = canonicalize(m1, m2, rho).unwrap();
        let f = asymptotic_formula(&p, None).unwrap();
        let g = minimize_closed_form(&p).unwrap().value;
        assert!((f.rate - g / 2.0).abs() < 1e-12 * g, "{p:?}");
        assert_eq!(log_rate(&p).unwrap(), g / 2.0);
    }
}

#[test]
fn minimum_is_attained_by_g() {
    let p = canonicalize(1.0, 3.0, 0.4).unwrap();
    let sol = minimize_closed_form(&p).unwrap();
    let (t, s) = sol.minimizers[0];
    assert!((g_eval(&p, t, s).unwrap() - sol.value).abs() < 1e-10 * sol.value);
}

#[test]
fn labels_do_not_matter() {
    let a = canonicalize(2.0, 1.0, 0.3).unwrap();
    let b = canonicalize(1.0, 2.0, 0.3).unwrap();
    assert!(a.swapped() && !b.swapped());
    let cfg = PathConfig { dt: 1e-3, seed: 4, ..PathConfig::default() };
    let ea = estimate_p_tilted(&a, 0.8, &cfg, 2000).unwrap();
    let eb = estimate_p_tilted(&b, 0.8, &cfg, 2000).unwrap();
    assert_eq!(ea.mean, eb.mean);
}

#[test]
fn tilted_matches_crude_where_both_work() {
    let p = canonicalize(1.0, 2.0, 0.5).unwrap();
    let cfg = PathConfig { dt: 1e-3, seed: 9, ..PathConfig::default() };
    let crude = estimate_p_crude(&p, 0.4, &cfg, 30_000).unwrap();
    let tilted = estimate_p_tilted_full(&p, 0.4, &cfg, 10_000).unwrap();
    let z = tilted.estimate.z_against(&crude);
    assert!(z < 4.0, "{crude:?} {:?}", tilted.estimate);
}

#[test]
fn band_constant_exceeds_lower_bound() {
    let p = canonicalize(1.0, 1.0, 0.5).unwrap();
    let (lo, hi) = htilde_bounds(&p).unwrap();
    assert_eq!(lo, 0.09375);
    assert!(hi.is_infinite());
    let h = estimate_h_band(&p, &BandRegion::new(4.0, 2.0, 0.01).unwrap(), 400, 3).unwrap();
    assert!(h.mean / 4.0 > lo);
}

#[test]
fn thresholds_order() {
    for (m1, m2) in [(1.0, 2.0), (0.3, 5.0), (1.0, 1.0 + 1e-6)] {
        let p = canonicalize(m1, m2, 0.0).unwrap();
        let (r1, r2) = thresholds(&p);
        assert!(0.0 <= r1 && r1 < r2 && r2 <= 1.0, "{r1} {r2}");
    }
}
