//! One-dimensional Pickands constant of a drifted Brownian motion,
//! `H(mu; T) / T -> mu`.
//!
//! `cargo run --example pickands`

use cwextrema::constants::h_mu_t;
use cwextrema::quadrature::QuadOptions;

fn main() -> cwextrema::Result<()> {
    let opts = QuadOptions::default();
    for mu in [0.5, 1.0, 2.0] {
        for t in [1.0, 10.0, 200.0] {
            let q = h_mu_t(mu, t, &opts)?;
            println!(
                "mu = {mu}, T = {t:>5}: H = {:.10} (err {:.1e}), H/T = {:.6}, mu T + 1/mu = {:.6}",
                q.value,
                q.error,
                q.value / t,
                mu * t + 1.0 / mu
            );
        }
    }
    Ok(())
}
