//! Driving the command-line front end in-process: a correlation sweep
//! written to CSV.
//!
//! `cargo run --example cli_sweep`

fn main() {
    let path = std::env::temp_dir().join("cwx_sweep.csv");
    let args = [
        "cwx", "asymptote", "--mu1", "1", "--mu2", "2", "--rho", "-0.9:0.9:0.3", "--u", "1,2",
        "--csv", path.to_str().unwrap(),
    ];
    let code = cwextrema::cli::run(args, &mut std::io::stdout(), &mut std::io::stderr());
    println!("exit code {code}");
    print!("{}", std::fs::read_to_string(&path).unwrap());
}
