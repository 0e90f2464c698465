//! Standard normal tail helpers that stay accurate far into the tail.

use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Upper tail `1 - Phi(z)`.
pub fn norm_sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// `Phi(z)`.
pub fn norm_cdf(z: f64) -> f64 {
    norm_sf(-z)
}

/// `ln(1 - Phi(z))`, finite for every finite `z`.
pub fn ln_norm_sf(z: f64) -> f64 {
    if z < 30.0 {
        return norm_sf(z).ln();
    }
    // Mills-ratio series
    let z2 = z * z;
    let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    -0.5 * z2 - (z * (2.0 * PI).sqrt()).ln() + series.ln()
}

/// `e^a (1 - Phi(z))` without intermediate overflow or underflow.
pub fn exp_norm_sf(a: f64, z: f64) -> f64 {
    (a + ln_norm_sf(z)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_values() {
        assert_relative_eq!(norm_sf(0.0), 0.5);
        assert_relative_eq!(norm_sf(1.0), 0.15865525393145707, max_relative = 1e-14);
        assert_relative_eq!(norm_cdf(1.0) + norm_sf(1.0), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn log_tail_is_continuous_at_switch() {
        let below = ln_norm_sf(30.0 - 1e-9);
        let above = ln_norm_sf(30.0);
        assert!((below - above).abs() < 1e-7);
        assert_relative_eq!(above, -454.321243956343, max_relative = 1e-12);
        // ln sf(40) = -804.608442013754...
        assert_relative_eq!(ln_norm_sf(40.0), -804.608442013754, max_relative = 1e-12);
    }
}
