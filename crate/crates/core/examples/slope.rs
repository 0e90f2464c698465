//! Empirical logarithmic decay rate from tilted estimates.
//!
//! `cargo run --release --example slope`

use cwextrema::canonicalize;
use cwextrema::simulation::{slope_fit, time_scales, PathConfig};

fn main() -> cwextrema::Result<()> {
    let u = [0.5, 0.75, 1.0, 1.25, 1.5];
    for (mu1, mu2, rho) in [(1.0, 2.0, -0.5), (1.0, 2.0, 0.0), (1.0, 2.0, 0.9)] {
        let p = canonicalize(mu1, mu2, rho)?;
        let (t0, s0) = time_scales(&p);
        let cfg = PathConfig { dt: 0.005 * u[0] * t0.min(s0), seed: 5, ..PathConfig::default() };
        let f = slope_fit(&p, &u, &cfg, 4000)?;
        println!(
            "({mu1}, {mu2}, {rho}): slope {:.3} +- {:.3}, theory {:.3}, deviation {:.1}%",
            f.slope,
            f.stderr,
            f.theory,
            100.0 * f.relative_deviation()
        );
    }
    Ok(())
}
