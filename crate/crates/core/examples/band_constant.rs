//! Two-dimensional band constant `H(T, S)` and its growth rate per unit
//! length, compared with the known lower bound.
//!
//! `cargo run --release --example band_constant`

use cwextrema::canonicalize;
use cwextrema::constants::{estimate_h_band_with, estimate_htilde, BandMethod, BandOptions, BandRegion};

fn main() -> cwextrema::Result<()> {
    let p = canonicalize(1.0, 1.0, 0.5)?;

    // The crude estimator is heavy-tailed: at small n it typically sits
    // below the mixture estimate with an optimistic standard error.
    let band = BandRegion::new(5.0, 2.0, 0.01)?;
    for method in [BandMethod::Mixture, BandMethod::Crude] {
        let opts = BandOptions { method, workers: 1 };
        let e = estimate_h_band_with(&p, &band, 2000, 1, &opts)?;
        println!("H(5, 2), {}: {:.4} +- {:.4}", method.as_str(), e.mean, e.stderr);
    }

    let h = estimate_htilde(&p, &[20.0, 40.0], 5.0, 0.005, 500, 7, &BandOptions::default())?;
    for bp in &h.per_t {
        println!("H({}, 5) = {:.3} +- {:.3}", bp.t, bp.estimate.mean, bp.estimate.stderr);
    }
    println!(
        "per unit length: {:.3} +- {:.3} (lower bound {})",
        h.htilde.mean, h.htilde.stderr, h.lower_bound
    );
    Ok(())
}
