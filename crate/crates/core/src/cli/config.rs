//! Run configuration: a `key = value` file merged with command-line flags.
//!
//! File format, one setting per line:
//!
//! ```text
//! # comment
//! mu1 = 1
//! mu2 = 2
//! rho = -0.5:0.5:0.25   # lists: comma separated or start:stop:step
//! grid-step = 0.005     # '-' and '_' are interchangeable in keys
//! ```
//!
//! Precedence: flag, then file, then the `CWX_SEED` environment variable
//! (seed only), then the built-in default. Every value a command reads is
//! recorded and echoed back with its output. Keys in the file that the
//! command never reads are an error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "CWX_SEED";

fn norm_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

/// Parse the `key = value` format.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!("config line {}: expected `key = value`", i + 1))
        })?;
        let k = norm_key(k);
        if k.is_empty() {
            return Err(Error::InvalidInput(format!("config line {}: empty key", i + 1)));
        }
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(Error::InvalidInput(format!("config key `{k}` given twice")));
        }
    }
    Ok(out)
}

/// A list of numbers: `a,b,c` or `start:stop:step` (inclusive of `stop`
/// up to rounding).
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidInput(format!("cannot parse number list `{s}`"));
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(num).collect(),
        3 => {
            let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(h > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
                return Err(bad());
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            if n > 1_000_000 {
                return Err(Error::InvalidInput(format!("range `{s}` has too many points")));
            }
            // snap accumulated rounding so that e.g. -0.9:0.9:0.3 hits 0 exactly
            let tiny = 1e-12 * h;
            Ok((0..=n)
                .map(|k| {
                    let v = a + k as f64 * h;
                    if v.abs() < tiny {
                        0.0
                    } else {
                        format!("{v:.12e}").parse().unwrap_or(v)
                    }
                })
                .collect())
        }
        _ => Err(bad()),
    }
}

#[derive(Debug, Default)]
pub struct RunConfig {
    file: BTreeMap<String, String>,
    used: BTreeSet<String>,
    resolved: Map<String, Value>,
}

impl RunConfig {
    pub fn new(file: BTreeMap<String, String>) -> RunConfig {
        RunConfig {
            file,
            ..RunConfig::default()
        }
    }

    pub fn load(path: Option<&Path>) -> Result<RunConfig> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    Error::InvalidInput(format!("cannot read config {}: {e}", p.display()))
                })?;
                Ok(RunConfig::new(parse_config(&text)?))
            }
        }
    }

    fn file_value(&mut self, key: &str) -> Option<String> {
        let v = self.file.get(key).cloned();
        if v.is_some() {
            self.used.insert(key.to_string());
        }
        v
    }

    fn record<T: Serialize>(&mut self, key: &str, v: &T) {
        let v = serde_json::to_value(v).unwrap_or(Value::Null);
        self.resolved.insert(key.to_string(), v);
    }

    fn parse<T>(key: &str, raw: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        raw.parse::<T>()
            .map_err(|e| Error::InvalidInput(format!("`{key}`: cannot parse `{raw}`: {e}")))
    }

    /// Optional setting.
    pub fn opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + Serialize,
        T::Err: Display,
    {
        let from_file = self.file_value(key);
        let v = match flag {
            Some(v) => Some(v),
            None => from_file.map(|raw| Self::parse(key, &raw)).transpose()?,
        };
        if let Some(v) = &v {
            self.record(key, v);
        }
        Ok(v)
    }

    /// Setting with a default.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + Serialize,
        T::Err: Display,
    {
        let v = self.opt(key, flag)?.unwrap_or(default);
        self.record(key, &v);
        Ok(v)
    }

    pub fn require<T>(&mut self, key: &str, flag: Option<T>) -> Result<T>
    where
        T: FromStr + Serialize,
        T::Err: Display,
    {
        self.opt(key, flag)?
            .ok_or_else(|| Error::InvalidInput(format!("missing required setting `{key}`")))
    }

    /// Boolean switch: true if the flag is set or the file says `true`.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool> {
        let v = flag || self.opt::<bool>(key, None)?.unwrap_or(false);
        self.record(key, &v);
        Ok(v)
    }

    /// Number list, see [`parse_list`].
    pub fn list(&mut self, key: &str, flag: Option<String>, default: Option<&str>) -> Result<Vec<f64>> {
        let from_file = self.file_value(key);
        let raw = flag
            .or(from_file)
            .or_else(|| default.map(str::to_string))
            .ok_or_else(|| Error::InvalidInput(format!("missing required setting `{key}`")))?;
        let v = parse_list(&raw)?;
        self.record(key, &v);
        Ok(v)
    }

    /// One of a fixed set of words.
    pub fn choice(&mut self, key: &str, flag: Option<String>, default: &str, allowed: &[&str]) -> Result<String> {
        let v = self.get(key, flag, default.to_string())?;
        if !allowed.contains(&v.as_str()) {
            return Err(Error::InvalidInput(format!(
                "`{key}` must be one of {allowed:?} (got `{v}`)"
            )));
        }
        Ok(v)
    }

    /// Seed from the flag, the file, `CWX_SEED`, or zero.
    pub fn seed(&mut self, flag: Option<u64>) -> Result<u64> {
        let env = match std::env::var(SEED_ENV) {
            Ok(s) => Self::parse::<u64>(SEED_ENV, s.trim())?,
            Err(_) => 0,
        };
        self.get("seed", flag, env)
    }

    /// Fail on file keys the command did not read.
    pub fn finish(&self) -> Result<()> {
        let unused: Vec<&str> = self
            .file
            .keys()
            .filter(|k| !self.used.contains(*k))
            .map(String::as_str)
            .collect();
        if unused.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("unknown config keys: {}", unused.join(", "))))
        }
    }

    pub fn resolved(&self) -> Value {
        Value::Object(self.resolved.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_format() {
        let m = parse_config("# x\nmu1 = 1\n grid-step=0.5 # note\n\n").unwrap();
        assert_eq!(m["mu1"], "1");
        assert_eq!(m["grid_step"], "0.5");
        assert!(parse_config("mu1 1").is_err());
        assert!(parse_config("a=1\na=2").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        let r = parse_list("0:1:0.25").unwrap();
        assert_eq!(r.len(), 5);
        assert_eq!(r[4], 1.0);
        assert_eq!(parse_list("-0.9:0.9:0.3").unwrap()[3], 0.0);
        assert_eq!(parse_list("-0.9:0.9:0.3").unwrap()[4], 0.3);
        assert!(parse_list("0:1:0").is_err());
        assert!(parse_list("a,b").is_err());
    }

    #[test]
    fn flag_beats_file() {
        let mut c = RunConfig::new(parse_config("n = 10\nrho = 0.3\nu = 1,2").unwrap());
        assert_eq!(c.get("n", Some(20usize), 5).unwrap(), 20);
        assert_eq!(c.require::<f64>("rho", None).unwrap(), 0.3);
        assert_eq!(c.list("u", Some("3".into()), None).unwrap(), vec![3.0]);
        assert_eq!(c.get("dt", None, 0.1).unwrap(), 0.1);
        c.finish().unwrap();
        assert_eq!(c.resolved()["n"], 20);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut c = RunConfig::new(parse_config("n = 10\nbogus = 1").unwrap());
        c.get("n", None, 1usize).unwrap();
        assert!(c.finish().is_err());
    }
}
