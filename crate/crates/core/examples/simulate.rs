//! Monte Carlo estimates of the joint tail: crude, tilted, and the
//! marginal check, against the cases with exact answers.
//!
//! `cargo run --release --example simulate`

use cwextrema::canonicalize;
use cwextrema::simulation::{estimate_marginal, estimate_p_crude, estimate_p_tilted_full, PathConfig};

fn main() -> cwextrema::Result<()> {
    let cfg = PathConfig { dt: 1e-3, seed: 11, ..PathConfig::default() };

    let p = canonicalize(1.0, 2.0, 0.0)?;
    let u = 0.5;
    let crude = estimate_p_crude(&p, u, &cfg, 50_000)?;
    println!("rho = 0, u = {u}: crude {:.5} +- {:.5}, exact {:.5}", crude.mean, crude.stderr, (-6.0 * u).exp());

    let m = estimate_marginal(&p, 2, u, &cfg, 50_000)?;
    println!("marginal 2: {:.5} +- {:.5}, exact {:.5}", m.mean, m.stderr, (-4.0 * u).exp());

    for (rho, u) in [(0.0, 2.0), (-0.5, 1.5), (0.9, 2.0)] {
        let p = canonicalize(1.0, 2.0, rho)?;
        let t = estimate_p_tilted_full(&p, u, &cfg, 10_000)?;
        println!(
            "rho = {rho}, u = {u}: tilted {:.4e} +- {:.1e} (ess {:.0}), drift {:?}",
            t.estimate.mean,
            t.estimate.stderr,
            t.estimate.ess.unwrap_or(0.0),
            t.tilt.delta
        );
    }
    Ok(())
}
