//! The inner quadratic programme `min v' Sigma^-1 v` s.t. `v >= b`.
//!
//! `cargo run --example inner_qp`

use cwextrema::model::{sigma_ts, CovMatrix2};
use cwextrema::variational::pieces::g_pieces;
use cwextrema::variational::qp::inner_qp;

fn main() -> cwextrema::Result<()> {
    let sigma = CovMatrix2::new(1.0, 0.9, 1.0);
    for b in [[1.0, 1.0], [0.5, 1.0], [1.0, 0.2]] {
        let s = inner_qp(&sigma, b)?;
        println!("b = {b:?}: value {:.6}, active {:?}, v = {:?}", s.value, s.active_set.indices(), s.optimizer_v);
    }

    // the same kernel inside g(t, s)
    let p = cwextrema::canonicalize(1.0, 2.0, 0.5)?;
    let (t, s) = (0.8, 0.4);
    println!("Sigma_ts = {:?}", sigma_ts(&p, t, s)?.to_rows());
    println!("{:?}", g_pieces(&p, t, s)?);
    Ok(())
}
