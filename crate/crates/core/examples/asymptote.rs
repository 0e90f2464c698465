//! Exact asymptotic formula in every regime, evaluated at a few levels.
//!
//! `cargo run --example asymptote`

use cwextrema::asymptotics::{approx_p, asymptotic_formula, htilde_bounds};
use cwextrema::{canonicalize, classify};

fn main() -> cwextrema::Result<()> {
    let sets = [
        (1.0, 2.0, -1.0),
        (1.0, 2.0, -0.5),
        (1.0, 2.0, 0.0),
        (1.0, 2.0, 0.5),
        (1.0, 2.0, 0.75),
        (1.0, 2.0, 0.9),
        (1.0, 2.0, 1.0),
        (1.0, 1.0, -0.5),
        (1.0, 1.0, 0.5),
    ];
    for (mu1, mu2, rho) in sets {
        let p = canonicalize(mu1, mu2, rho)?;
        let f = asymptotic_formula(&p, None)?;
        println!(
            "({mu1}, {mu2}, {rho:>5}) {:<13} C u^{} exp(-{} u), C = {:?} [{:?}]",
            classify(&p).tag.as_str(),
            f.power,
            f.rate,
            f.constant,
            f.exactness
        );
        if classify(&p).tag.has_pickands_constant() {
            let (lo, _) = htilde_bounds(&p)?;
            println!("    band constant >= {lo}");
        }
        for u in [1.0, 5.0] {
            println!("    u = {u}: {:?}", approx_p(&f, u)?);
        }
    }
    Ok(())
}
