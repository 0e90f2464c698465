//! Correlation thresholds and the regime of a few parameter sets.
//!
//! `cargo run --example regimes`

use cwextrema::{canonicalize, classify};

fn main() -> cwextrema::Result<()> {
    for (mu1, mu2) in [(1.0, 2.0), (1.0, 1.0), (1.0, 3.0)] {
        let p = canonicalize(mu1, mu2, 0.0)?;
        let r = classify(&p);
        println!("mu = ({mu1}, {mu2}): rho_hat1 = {:.6}, rho_hat2 = {:.6}", r.rho_hat1, r.rho_hat2);
        for rho in [-0.5, 0.0, r.rho_hat1, 0.5, r.rho_hat2, 0.9] {
            let tag = classify(&p.with_rho(rho)?).tag;
            println!("  rho = {rho:>9.6} -> {tag}");
        }
    }
    Ok(())
}
