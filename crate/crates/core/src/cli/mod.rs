//! `cwx` command-line front end.
//!
//! Every command reads its settings through [`config::RunConfig`] (flags over
//! config file over defaults), runs over the Cartesian product of the given
//! `mu1`, `mu2`, `rho` (and `u`, where applicable) lists, and emits one
//! [`output::Document`]. Exit codes: 0 success, 2 bad input, 3 a
//! verification check failed, 4 numeric failure.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::asymptotics::{approx_p, asymptotic_formula, Approx, Constant, Exactness};
use crate::constants::{estimate_h_band_with, estimate_htilde, h_mu_t, BandMethod, BandOptions, BandRegion};
use crate::error::{Error, Result};
use crate::mc::McEstimate;
use crate::model::{canonicalize, classify, ModelParams};
use crate::quadrature::QuadOptions;
use crate::simulation::{
    estimate_marginal, estimate_p_crude, estimate_p_tilted_full, slope_fit, time_scales, PathConfig,
};
use crate::variational::closed_form::{minimize_closed_form, OuterSolution, Region};
use crate::variational::numeric::{minimize_numeric, NumericOptions};
use crate::variational::taylor::{fd_residuals, finite_difference_coeffs, taylor_coefficients, FdOptions};

use config::RunConfig;
use output::Document;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cwx", version, about = "Tail asymptotics of component-wise extrema of correlated drifted Brownian motion")]
pub struct Cli {
    /// Settings file in `key = value` format; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write CSV rows to this path instead of JSON to stdout.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Random seed (default: $CWX_SEED, else 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo and grid searches.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// Model parameters. Each accepts a list (`a,b,c` or `start:stop:step`).
#[derive(Debug, Args, Clone, Default)]
pub struct ModelArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mu1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct PathArgs {
    /// Time step (default: 0.5% of the shortest crossing time, at most 1e-3).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub horizon_mult: Option<f64>,
    /// Disable the Brownian-bridge crossing correction.
    #[arg(long)]
    pub no_bridge: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation thresholds and regime.
    Regimes(ModelArgs),
    /// Minimise the decay-rate function over the two crossing times.
    Minimize {
        #[command(flatten)]
        model: ModelArgs,
        /// closed | numeric | both
        #[arg(long)]
        method: Option<String>,
        /// Relative tolerance on the value for `both`.
        #[arg(long)]
        tol: Option<f64>,
        /// Tolerance on the minimiser location for `both`.
        #[arg(long)]
        loc_tol: Option<f64>,
        #[arg(long)]
        grid_n: Option<usize>,
    },
    /// Exact asymptotic formula and its value at the given levels.
    Asymptote {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        /// Plug-in estimate of the band constant.
        #[arg(long)]
        htilde: Option<f64>,
    },
    /// Local expansion coefficients at the minimiser.
    Taylor {
        #[command(flatten)]
        model: ModelArgs,
        /// Attach finite-difference residuals; exit 3 above `--tol`.
        #[arg(long)]
        check_fd: bool,
        #[arg(long)]
        fd_step: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Pickands-type constants.
    Constant {
        #[command(subcommand)]
        kind: ConstantKind,
    },
    /// Monte Carlo estimates of the joint or marginal tail.
    Simulate {
        #[arg(value_enum)]
        kind: SimKind,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[command(flatten)]
        path: PathArgs,
        /// Component for `marginal` (1 or 2, caller's labelling).
        #[arg(long)]
        component: Option<usize>,
    },
    /// Empirical logarithmic decay rate from tilted estimates.
    Slope {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[command(flatten)]
        path: PathArgs,
        /// Largest accepted relative deviation from theory; exit 3 above it.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConstantKind {
    /// One-dimensional constant over a finite horizon, by quadrature.
    Hmu {
        #[arg(long)]
        mu: Option<String>,
        #[arg(long = "T")]
        t: Option<f64>,
    },
    /// Two-dimensional band constant by Monte Carlo.
    Hband {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        band: BandArgs,
        #[arg(long = "T")]
        t: Option<f64>,
    },
    /// Band constant per unit length, checked against its lower bound.
    Htilde {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        band: BandArgs,
        /// Horizons (increasing list).
        #[arg(long = "T")]
        t: Option<String>,
    },
}

#[derive(Debug, Args, Clone, Default)]
pub struct BandArgs {
    #[arg(long = "S")]
    pub s: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// mixture | crude
    #[arg(long)]
    pub method: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    Crude,
    Tilt,
    Marginal,
}

/// Records plus the verification verdict (if the command checks anything).
struct Outcome {
    records: Vec<Value>,
    passed: Option<bool>,
}

/// Parse `args` (including the program name), run, write output, and
/// return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(doc) => {
            let written = match &cli.csv {
                Some(path) => doc.write_csv(path),
                None => doc.write_json(out),
            };
            if let Err(e) = written {
                return report(err, &e);
            }
            if doc.passed == Some(false) {
                EXIT_VERIFY
            } else {
                EXIT_OK
            }
        }
        Err(e) => report(err, &e),
    }
}

fn report(err: &mut dyn Write, e: &Error) -> i32 {
    let v = json!({"error": e.kind(), "message": e.to_string()});
    let _ = writeln!(err, "{v}");
    e.exit_code()
}

/// Run a parsed command and build its output document.
pub fn execute(cli: &Cli) -> Result<Document> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    let (name, outcome) = match &cli.command {
        Command::Regimes(m) => ("regimes", regimes(&mut cfg, m)?),
        Command::Minimize { model, method, tol, loc_tol, grid_n } => (
            "minimize",
            minimize(&mut cfg, cli, model, method.clone(), *tol, *loc_tol, *grid_n)?,
        ),
        Command::Asymptote { model, u, htilde } => {
            ("asymptote", asymptote(&mut cfg, model, u.clone(), *htilde)?)
        }
        Command::Taylor { model, check_fd, fd_step, tol } => {
            ("taylor", taylor(&mut cfg, model, *check_fd, *fd_step, *tol)?)
        }
        Command::Constant { kind } => match kind {
            ConstantKind::Hmu { mu, t } => ("constant hmu", hmu(&mut cfg, mu.clone(), *t)?),
            ConstantKind::Hband { model, band, t } => {
                ("constant hband", hband(&mut cfg, cli, model, band, *t)?)
            }
            ConstantKind::Htilde { model, band, t } => {
                ("constant htilde", htilde(&mut cfg, cli, model, band, t.clone())?)
            }
        },
        Command::Simulate { kind, model, u, path, component } => {
            let name = match kind {
                SimKind::Crude => "simulate crude",
                SimKind::Tilt => "simulate tilt",
                SimKind::Marginal => "simulate marginal",
            };
            (name, simulate(&mut cfg, cli, *kind, model, u.clone(), path, *component)?)
        }
        Command::Slope { model, u, path, tol } => {
            ("slope", slope(&mut cfg, cli, model, u.clone(), path, *tol)?)
        }
    };
    cfg.finish()?;
    Ok(Document::new(name, cfg.resolved(), outcome.records, outcome.passed))
}

/// All parameter sets in the product of the three lists, in input order.
fn model_grid(cfg: &mut RunConfig, m: &ModelArgs) -> Result<Vec<(f64, f64, f64)>> {
    let mu1 = cfg.list("mu1", m.mu1.clone(), None)?;
    let mu2 = cfg.list("mu2", m.mu2.clone(), None)?;
    let rho = cfg.list("rho", m.rho.clone(), None)?;
    let mut v = Vec::with_capacity(mu1.len() * mu2.len() * rho.len());
    for &a in &mu1 {
        for &b in &mu2 {
            for &r in &rho {
                v.push((a, b, r));
            }
        }
    }
    Ok(v)
}

fn model_json(p: &ModelParams, raw: (f64, f64, f64)) -> Value {
    json!({
        "mu1": raw.0,
        "mu2": raw.1,
        "rho": raw.2,
        "swapped": p.swapped(),
        "regime": classify(p).tag.as_str(),
    })
}

fn with_model(model: Value, extra: Value) -> Value {
    let mut m = model.as_object().cloned().unwrap_or_default();
    if let Value::Object(e) = extra {
        m.extend(e);
    }
    Value::Object(m)
}

fn workers(cfg: &mut RunConfig, cli: &Cli) -> Result<usize> {
    let w = cfg.get("workers", cli.workers, 1usize)?;
    if w == 0 {
        return Err(Error::InvalidInput("workers must be positive".into()));
    }
    Ok(w)
}

fn regimes(cfg: &mut RunConfig, m: &ModelArgs) -> Result<Outcome> {
    let mut records = Vec::new();
    for raw in model_grid(cfg, m)? {
        let p = canonicalize(raw.0, raw.1, raw.2)?;
        let r = classify(&p);
        records.push(with_model(
            model_json(&p, raw),
            json!({"rho_hat1": r.rho_hat1, "rho_hat2": r.rho_hat2}),
        ));
    }
    Ok(Outcome { records, passed: None })
}

/// Largest distance from a closed-form minimiser to the nearest numeric one,
/// relative to `max(1, |coordinate|)`.
fn location_gap(a: &OuterSolution, b: &OuterSolution) -> f64 {
    a.minimizers
        .iter()
        .map(|&(t, s)| {
            b.minimizers
                .iter()
                .map(|&(u, v)| {
                    ((t - u).abs() / t.abs().max(1.0)).max((s - v).abs() / s.abs().max(1.0))
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn minimize(
    cfg: &mut RunConfig,
    cli: &Cli,
    m: &ModelArgs,
    method: Option<String>,
    tol: Option<f64>,
    loc_tol: Option<f64>,
    grid_n: Option<usize>,
) -> Result<Outcome> {
    let grid = model_grid(cfg, m)?;
    let method = cfg.choice("method", method, "closed", &["closed", "numeric", "both"])?;
    let mut opts = NumericOptions::default();
    if method != "closed" {
        opts.grid_n = cfg.get("grid_n", grid_n, opts.grid_n)?;
        opts.workers = workers(cfg, cli)?;
    }
    let (tol, loc_tol) = if method == "both" {
        (cfg.get("tol", tol, 1e-6)?, cfg.get("loc_tol", loc_tol, 1e-4)?)
    } else {
        (0.0, 0.0)
    };
    let mut records = Vec::new();
    let mut all_ok = true;
    for raw in grid {
        let p = canonicalize(raw.0, raw.1, raw.2)?;
        let base = model_json(&p, raw);
        let rec = match method.as_str() {
            "closed" => json!({"closed": minimize_closed_form(&p)?}),
            "numeric" => json!({"numeric": minimize_numeric(&p, &opts)?}),
            _ => {
                let c = minimize_closed_form(&p)?;
                let n = minimize_numeric(&p, &opts)?;
                let value_rel = (c.value - n.value).abs() / c.value.abs();
                // the attainment set of a curve minimum is not a point
                let loc = (c.region != Region::CurveG2).then(|| location_gap(&c, &n));
                let ok = value_rel <= tol && loc.is_none_or(|g| g <= loc_tol);
                all_ok &= ok;
                json!({
                    "closed": c,
                    "numeric": n,
                    "discrepancy": {"value_rel": value_rel, "location": loc},
                    "passed": ok,
                })
            }
        };
        records.push(with_model(base, rec));
    }
    let passed = (method == "both").then_some(all_ok);
    Ok(Outcome { records, passed })
}

fn constant_json(c: &Constant) -> Value {
    match c {
        Constant::Value { value } => json!(value),
        other => json!(other),
    }
}

fn asymptote(cfg: &mut RunConfig, m: &ModelArgs, u: Option<String>, htilde: Option<f64>) -> Result<Outcome> {
    let grid = model_grid(cfg, m)?;
    let us = cfg.list("u", u, None)?;
    let htilde = cfg.opt("htilde", htilde)?;
    let mut records = Vec::new();
    for raw in grid {
        let p = canonicalize(raw.0, raw.1, raw.2)?;
        let f = asymptotic_formula(&p, htilde)?;
        for &u in &us {
            let (value, lo, hi) = match approx_p(&f, u)? {
                Approx::Point { value } => (Some(value), None, None),
                Approx::Interval { lo, hi } => (None, Some(lo), Some(hi)),
            };
            records.push(with_model(
                model_json(&p, raw),
                json!({
                    "u": u,
                    "rate": f.rate,
                    "power": f.power,
                    "constant": constant_json(&f.constant),
                    "exactness": f.exactness,
                    "exact": f.exactness == Exactness::ExactForAllU,
                    "value": value,
                    "lo": lo,
                    "hi": hi,
                }),
            ));
        }
    }
    Ok(Outcome { records, passed: None })
}

fn coeff_map(entries: &[(&'static str, f64)]) -> Value {
    Value::Object(entries.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn taylor(
    cfg: &mut RunConfig,
    m: &ModelArgs,
    check_fd: bool,
    fd_step: Option<f64>,
    tol: Option<f64>,
) -> Result<Outcome> {
    let grid = model_grid(cfg, m)?;
    let check = cfg.switch("check_fd", check_fd)?;
    let (step, tol) = if check {
        (cfg.get("fd_step", fd_step, FdOptions::default().step)?, cfg.get("tol", tol, 1e-3)?)
    } else {
        (0.0, 0.0)
    };
    let mut records = Vec::new();
    let mut all_ok = true;
    for raw in grid {
        let p = canonicalize(raw.0, raw.1, raw.2)?;
        let c = taylor_coefficients(&p)?;
        let signs = c.sign_violations();
        let mut rec = json!({
            "case": c.case,
            "point": c.point,
            "h_rho": c.h_rho,
            "coefficients": coeff_map(&c.coeffs.entries()),
            "sign_violations": signs,
        });
        if check {
            let fd = finite_difference_coeffs(&p, FdOptions { step, ..FdOptions::default() })?;
            let res = fd_residuals(&c, &fd);
            let worst = res.iter().map(|(_, r)| *r).fold(0.0, f64::max);
            let ok = worst <= tol && signs.is_empty();
            all_ok &= ok;
            let o = rec.as_object_mut().expect("object");
            o.insert("finite_difference".into(), coeff_map(&fd.coeffs.entries()));
            o.insert("residuals".into(), coeff_map(&res));
            o.insert("max_residual".into(), json!(worst));
            o.insert("passed".into(), json!(ok));
        }
        records.push(with_model(model_json(&p, raw), rec));
    }
    Ok(Outcome { records, passed: check.then_some(all_ok) })
}

fn hmu(cfg: &mut RunConfig, mu: Option<String>, t: Option<f64>) -> Result<Outcome> {
    let mus = cfg.list("mu", mu, None)?;
    let t = cfg.get("T", t, 200.0)?;
    let mut records = Vec::new();
    for mu in mus {
        let q = h_mu_t(mu, t, &QuadOptions::default())?;
        records.push(json!({
            "mu": mu,
            "T": t,
            "h": q.value,
            "h_over_T": q.value / t,
            "rel_dev_from_mu": (q.value / t - mu).abs() / mu,
            "quad_error": q.error,
            "evaluations": q.evaluations,
        }));
    }
    Ok(Outcome { records, passed: None })
}

fn band_options(cfg: &mut RunConfig, cli: &Cli, b: &BandArgs) -> Result<(f64, f64, usize, u64, BandOptions)> {
    let s = cfg.get("S", b.s, 5.0)?;
    let grid_step = cfg.get("grid_step", b.grid_step, 0.005)?;
    let n = cfg.get("n", b.n, 2000usize)?;
    let method = match cfg.choice("method", b.method.clone(), "mixture", &["mixture", "crude"])?.as_str() {
        "crude" => BandMethod::Crude,
        _ => BandMethod::Mixture,
    };
    let seed = cfg.seed(cli.seed)?;
    let workers = workers(cfg, cli)?;
    Ok((s, grid_step, n, seed, BandOptions { method, workers }))
}

fn hband(cfg: &mut RunConfig, cli: &Cli, m: &ModelArgs, b: &BandArgs, t: Option<f64>) -> Result<Outcome> {
    let grid = model_grid(cfg, m)?;
    let t = cfg.get("T", t, 20.0)?;
    let (s, grid_step, n, seed, opts) = band_options(cfg, cli, b)?;
    let band = BandRegion::new(t, s, grid_step)?;
    let mut records = Vec::new();
    for raw in grid {
        let p = canonicalize(raw.0, raw.1, raw.2)?;
        let e = estimate_h_band_with(&p, &band, n, seed, &opts)?;
        records.push(with_model(model_json(&p, raw), json!({"band": band, "estimate": e})));
    }
    Ok(Outcome { records, passed: None })
}

/// Subadditivity `H(Ta + Tb) <= H(Ta) + H(Tb)` for every triple present in
/// the horizon list, as `(Ta, Tb, z)` with `z` the excess in joint stderrs.
fn subadditivity(points: &[(f64, &McEstimate)]) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for (i, &(ta, a)) in points.iter().enumerate() {
        for &(tb, b) in &points[i..] {
            if let Some(&(_, c)) = points.iter().find(|(t, _)| (t - (ta + tb)).abs() <= 1e-9 * t.abs()) {
                let same = ta == tb;
                let sum = if same { 2.0 * a.mean } else { a.mean + b.mean };
                let var_sum = if same { 4.0 * a.stderr.powi(2) } else { a.stderr.powi(2) + b.stderr.powi(2) };
                let se = (var_sum + c.stderr.powi(2)).sqrt();
                out.push((ta, tb, (c.mean - sum) / se));
            }
        }
    }
    out
}

fn htilde(cfg: &mut RunConfig, cli: &Cli, m: &ModelArgs, b: &BandArgs, t: Option<String>) -> Result<Outcome> {
    let grid = model_grid(cfg, m)?;
    let t_list = cfg.list("T", t, Some("20,40"))?;
    let (s, grid_step, n, seed, opts) = band_options(cfg, cli, b)?;
    let mut records = Vec::new();
    let mut all_ok = true;
    for raw in grid {
        let p = canonicalize(raw.0, raw.1, raw.2)?;
        let h = estimate_htilde(&p, &t_list, s, grid_step, n, seed, &opts)?;
        let z = (h.htilde.mean - h.lower_bound) / h.htilde.stderr;
        let bound_ok = h.htilde.mean.is_finite() && z > 3.0;
        let pts: Vec<(f64, &McEstimate)> = h.per_t.iter().map(|bp| (bp.t, &bp.estimate)).collect();
        let sub: Vec<Value> = subadditivity(&pts)
            .into_iter()
            .map(|(ta, tb, z)| json!({"Ta": ta, "Tb": tb, "z": z, "passed": z <= 3.0}))
            .collect();
        let sub_ok = sub.iter().all(|v| v["passed"] == json!(true));
        all_ok &= bound_ok && sub_ok;
        records.push(with_model(
            model_json(&p, raw),
            json!({
                "htilde": h.htilde,
                "S": h.s,
                "per_T": h.per_t,
                "bound_check": {"lower_bound": h.lower_bound, "z": z, "passed": bound_ok},
                "subadditivity": sub,
                "passed": bound_ok && sub_ok,
            }),
        ));
    }
    Ok(Outcome { records, passed: Some(all_ok) })
}

/// Default time step: half a percent of the shortest crossing time at the
/// smallest level, capped at `1e-3`.
fn auto_dt(u_min: f64, scale: f64) -> f64 {
    (0.005 * u_min * scale).min(1e-3)
}

fn path_config(
    cfg: &mut RunConfig,
    cli: &Cli,
    a: &PathArgs,
    default_n: usize,
    dt_default: f64,
) -> Result<(PathConfig, usize)> {
    let d = PathConfig::default();
    let n = cfg.get("n", a.n, default_n)?;
    let c = PathConfig {
        dt: cfg.get("dt", a.dt, dt_default)?,
        horizon_mult: cfg.get("horizon_mult", a.horizon_mult, d.horizon_mult)?,
        bridge_correction: !cfg.switch("no_bridge", a.no_bridge)?,
        seed: cfg.seed(cli.seed)?,
        workers: workers(cfg, cli)?,
        ..d
    };
    c.validate()?;
    Ok((c, n))
}

fn estimate_json(e: &McEstimate) -> Value {
    let mut v = json!(e);
    v["rel_stderr"] = json!(e.rel_stderr());
    v
}

/// Reference values for a joint-tail estimate: the asymptote (or its
/// bracket) and whether it is exact.
fn reference(p: &ModelParams, u: f64) -> Value {
    match asymptotic_formula(p, None).and_then(|f| Ok((f, approx_p(&f, u)?))) {
        Ok((f, Approx::Point { value })) => json!({
            "asymptote": value,
            "exact": f.exactness == Exactness::ExactForAllU,
            "ratio": null,
        }),
        Ok((_, Approx::Interval { lo, hi })) => json!({"asymptote_lo": lo, "asymptote_hi": hi}),
        Err(_) => Value::Null,
    }
}

fn simulate(
    cfg: &mut RunConfig,
    cli: &Cli,
    kind: SimKind,
    m: &ModelArgs,
    u: Option<String>,
    a: &PathArgs,
    component: Option<usize>,
) -> Result<Outcome> {
    let grid = model_grid(cfg, m)?;
    let us = cfg.list("u", u, None)?;
    let comp = if kind == SimKind::Marginal {
        let j = cfg.require("component", component)?;
        if j != 1 && j != 2 {
            return Err(Error::InvalidInput(format!("component must be 1 or 2 (got {j})")));
        }
        j
    } else {
        0
    };
    let u_min = us.iter().cloned().filter(|u| *u > 0.0).fold(f64::INFINITY, f64::min);
    let mut scale = f64::INFINITY;
    let mut params = Vec::with_capacity(grid.len());
    for &raw in &grid {
        let p = canonicalize(raw.0, raw.1, raw.2)?;
        let s = if kind == SimKind::Marginal {
            1.0 / if comp == 1 { raw.0 } else { raw.1 }
        } else {
            let (t0, s0) = time_scales(&p);
            t0.min(s0)
        };
        scale = scale.min(s);
        params.push((p, raw));
    }
    let dt_default = if u_min.is_finite() { auto_dt(u_min, scale) } else { 1e-3 };
    let default_n = if kind == SimKind::Tilt { 10_000 } else { 100_000 };
    let (pc, n) = path_config(cfg, cli, a, default_n, dt_default)?;
    let mut records = Vec::new();
    for (p, raw) in params {
        for &u in &us {
            let rec = match kind {
                SimKind::Crude => {
                    let e = estimate_p_crude(&p, u, &pc, n)?;
                    json!({"u": u, "estimate": estimate_json(&e), "reference": reference(&p, u)})
                }
                SimKind::Marginal => {
                    // canonical order may have exchanged the labels
                    let j = if p.swapped() { 3 - comp } else { comp };
                    let e = estimate_marginal(&p, j, u, &pc, n)?;
                    let mu = p.mu()[j - 1];
                    json!({
                        "u": u,
                        "component": comp,
                        "estimate": estimate_json(&e),
                        "exact": (-2.0 * mu * u.max(0.0)).exp(),
                    })
                }
                SimKind::Tilt => {
                    let t = estimate_p_tilted_full(&p, u, &pc, n)?;
                    json!({
                        "u": u,
                        "estimate": estimate_json(&t.estimate),
                        "likelihood_ratio_mean": t.lr_mean,
                        "tilt": t.tilt,
                        "reference": reference(&p, u),
                    })
                }
            };
            let mut rec = with_model(model_json(&p, raw), rec);
            if let Some(v) = rec["reference"]["asymptote"].as_f64() {
                rec["reference"]["ratio"] = json!(rec["estimate"]["mean"].as_f64().unwrap_or(f64::NAN) / v);
            }
            records.push(rec);
        }
    }
    Ok(Outcome { records, passed: None })
}

fn slope(
    cfg: &mut RunConfig,
    cli: &Cli,
    m: &ModelArgs,
    u: Option<String>,
    a: &PathArgs,
    tol: Option<f64>,
) -> Result<Outcome> {
    let grid = model_grid(cfg, m)?;
    let us = cfg.list("u", u, Some("0.5,0.75,1,1.25,1.5"))?;
    let tol = cfg.opt("tol", tol)?;
    let mut params = Vec::new();
    let mut scale = f64::INFINITY;
    for &raw in &grid {
        let p = canonicalize(raw.0, raw.1, raw.2)?;
        let (t0, s0) = time_scales(&p);
        scale = scale.min(t0.min(s0));
        params.push((p, raw));
    }
    let u_min = us.iter().cloned().fold(f64::INFINITY, f64::min);
    let dt_default = if u_min > 0.0 && u_min.is_finite() { auto_dt(u_min, scale) } else { 1e-3 };
    let (pc, n) = path_config(cfg, cli, a, 10_000, dt_default)?;
    let mut records = Vec::new();
    let mut all_ok = true;
    for (p, raw) in params {
        let f = slope_fit(&p, &us, &pc, n)?;
        let dev = f.relative_deviation();
        let ok = tol.is_none_or(|t| dev <= t);
        all_ok &= ok;
        records.push(with_model(
            model_json(&p, raw),
            json!({
                "slope": f.slope,
                "stderr": f.stderr,
                "intercept": f.intercept,
                "theory": f.theory,
                "relative_deviation": dev,
                "points": f.points,
                "passed": tol.map(|_| ok),
            }),
        ));
    }
    Ok(Outcome { records, passed: tol.map(|_| all_ok) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["cwx"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn regimes_between() {
        let (code, out, _) = run_str(&["regimes", "--mu1", "1", "--mu2", "2", "--rho", "0.5"]);
        assert_eq!(code, 0);
        let d: Document = serde_json::from_str(&out).unwrap();
        assert_eq!(d.results[0]["regime"], "Between");
        assert_eq!(d.config["rho"], json!([0.5]));
    }

    #[test]
    fn bad_correlation_exit_code() {
        let (code, _, err) = run_str(&["regimes", "--mu1", "1", "--mu2", "2", "--rho", "2"]);
        assert_eq!(code, 2);
        assert!(err.contains("InvalidCorrelation"));
    }

    #[test]
    fn missing_parameter() {
        let (code, _, err) = run_str(&["regimes", "--mu1", "1", "--mu2", "2"]);
        assert_eq!(code, 2);
        assert!(err.contains("rho"));
    }

    #[test]
    fn sweep_over_rho() {
        let (code, out, _) = run_str(&["regimes", "--mu1", "1", "--mu2", "1", "--rho", "-0.5:0.5:0.5"]);
        assert_eq!(code, 0);
        let d: Document = serde_json::from_str(&out).unwrap();
        let tags: Vec<&str> = d.results.iter().map(|r| r["regime"].as_str().unwrap()).collect();
        assert_eq!(tags, ["EqualDriftNeg", "EqualDriftZero", "EqualDriftPos"]);
    }

    #[test]
    fn subadditivity_pairs() {
        let e = |mean: f64| McEstimate {
            mean,
            stderr: 1.0,
            n: 10,
            method: "x".into(),
            seed: 0,
            ess: None,
        };
        let (a, b) = (e(50.0), e(92.0));
        let s = subadditivity(&[(20.0, &a), (40.0, &b)]);
        assert_eq!(s.len(), 1);
        assert!((s[0].2 - (92.0 - 100.0) / 5f64.sqrt()).abs() < 1e-12);
    }
}
