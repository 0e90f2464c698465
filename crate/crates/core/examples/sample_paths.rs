//! Raw correlated path samples.
//!
//! `cargo run --example sample_paths`

use cwextrema::canonicalize;
use cwextrema::simulation::{sample_paths, PathConfig};

fn main() -> cwextrema::Result<()> {
    let p = canonicalize(1.0, 2.0, -0.6)?;
    let cfg = PathConfig { dt: 1e-2, seed: 3, ..PathConfig::default() };
    let batch = sample_paths(&p, &cfg, 5.0, 200)?;
    println!("{} paths of {} points", batch.x1.len(), batch.x1[0].len());
    println!("increment correlation {:.3} (target -0.6)", batch.increment_correlation());
    let ends: Vec<String> = batch.x1.iter().take(3).map(|x| format!("{:.3}", x.last().unwrap())).collect();
    println!("X1(5) of the first paths: {}", ends.join(", "));
    Ok(())
}
