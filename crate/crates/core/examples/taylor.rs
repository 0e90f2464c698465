//! Local expansion of the decay-rate function at its minimiser, checked by
//! finite differences.
//!
//! `cargo run --release --example taylor`

use cwextrema::canonicalize;
use cwextrema::model::thresholds;
use cwextrema::variational::taylor::{fd_residuals, finite_difference_coeffs, taylor_coefficients, FdOptions};

fn main() -> cwextrema::Result<()> {
    let base = canonicalize(1.0, 2.0, 0.0)?;
    let (rho_hat1, _) = thresholds(&base);
    for rho in [-0.4, rho_hat1, 0.5] {
        let p = base.with_rho(rho)?;
        let exact = taylor_coefficients(&p)?;
        let fd = finite_difference_coeffs(&p, FdOptions::default())?;
        println!("rho = {rho:.6}: case {:?} at {:?}", exact.case, exact.point);
        for (name, r) in fd_residuals(&exact, &fd) {
            println!(
                "  {name} = {:>12.6}  finite difference {:>12.6}  rel. residual {r:.1e}",
                exact.coeffs.get(name).unwrap(),
                fd.coeffs.get(name).unwrap()
            );
        }
        println!("  sign violations: {:?}", exact.sign_violations());
    }
    Ok(())
}
