//! Decay-rate minimisation: closed form against the grid-plus-simplex oracle.
//!
//! `cargo run --release --example minimize`

use cwextrema::canonicalize;
use cwextrema::variational::closed_form::minimize_closed_form;
use cwextrema::variational::numeric::{minimize_numeric, NumericOptions};

fn main() -> cwextrema::Result<()> {
    let opts = NumericOptions::default();
    for (mu1, mu2, rho) in [(1.0, 2.0, -0.5), (1.0, 2.0, 0.5), (1.0, 2.0, 0.9), (1.0, 1.0, -0.5)] {
        let p = canonicalize(mu1, mu2, rho)?;
        let c = minimize_closed_form(&p)?;
        let n = minimize_numeric(&p, &opts)?;
        println!(
            "({mu1}, {mu2}, {rho}): region {}, g = {} (numeric {:.12}), minimisers {:?}",
            c.region.as_str(),
            c.value,
            n.value,
            c.minimizers
        );
        if let Some((lo, hi)) = c.curve_t_range {
            println!("  minimum attained along s = 1/mu2 for t in [{lo:.6}, {hi:.6}]");
        }
    }
    Ok(())
}
