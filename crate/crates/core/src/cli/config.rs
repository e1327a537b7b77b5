//! `key = value` run configuration files.
//!
//! Blank lines and `#` comments are ignored. Recognized keys are `grid.N`,
//! `grid.L`, `seed`, `band`, `tol.<check>` and `output.<subcommand>`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::verify::VerifyConfig;

/// Largest accepted `grid.N`.
pub const MAX_POINTS: usize = 4096;
/// Largest accepted `grid.L`.
pub const MAX_HALF_EXTENT: f64 = 1.0e4;

pub const SUBCOMMANDS: [&str; 8] = ["wigner", "husimi", "quasichar", "matel", "seminorm", "bound-check", "verify", "demo"];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub points: Option<usize>,
    pub half_extent: Option<f64>,
    pub seed: Option<u64>,
    pub band: Option<f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub outputs: BTreeMap<String, PathBuf>,
}

pub fn check_points(n: usize) -> Result<usize> {
    if n < 8 || n > MAX_POINTS || !n.is_power_of_two() {
        return Err(Error::Parse(format!("grid.N must be a power of two in 8..={MAX_POINTS}, got {n}")));
    }
    Ok(n)
}

pub fn check_half_extent(l: f64) -> Result<f64> {
    if !(l.is_finite() && l > 0.0 && l <= MAX_HALF_EXTENT) {
        return Err(Error::Parse(format!("grid.L must be in (0, {MAX_HALF_EXTENT}], got {l}")));
    }
    Ok(l)
}

pub fn check_band(b: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&b) {
        return Err(Error::Parse(format!("band must be in [0, 0.5), got {b}")));
    }
    Ok(b)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| Error::Parse(format!("line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| at(format!("expected `key = value`, got `{line}`")))?;
            if value.is_empty() {
                return Err(at(format!("missing value for `{key}`")));
            }
            cfg.set(key, value).map_err(|e| match e {
                Error::Parse(msg) => at(msg),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse()
                .map_err(|e| Error::Parse(format!("invalid value `{value}` for `{key}`: {e}")))
        }
        match key {
            "grid.N" => self.points = Some(check_points(num(key, value)?)?),
            "grid.L" => self.half_extent = Some(check_half_extent(num(key, value)?)?),
            "seed" => self.seed = Some(num(key, value)?),
            "band" => self.band = Some(check_band(num(key, value)?)?),
            _ => {
                if let Some(check) = key.strip_prefix("tol.") {
                    // Validated against the check list by `VerifyConfig::set_tol`.
                    let mut probe = VerifyConfig::default();
                    let v = num(key, value)?;
                    probe.set_tol(check, v)?;
                    self.tolerances.insert(check.to_string(), v);
                } else if let Some(sub) = key.strip_prefix("output.") {
                    if !SUBCOMMANDS.contains(&sub) {
                        return Err(Error::Parse(format!("unknown key `{key}`: no subcommand `{sub}`")));
                    }
                    self.outputs.insert(sub.to_string(), PathBuf::from(value));
                } else {
                    return Err(Error::Parse(format!("unknown key `{key}`")));
                }
            }
        }
        Ok(())
    }

    /// Verification settings: defaults overridden by this file.
    pub fn verify_config(&self) -> VerifyConfig {
        let mut v = VerifyConfig::default();
        if let Some(n) = self.points {
            v.points = n;
        }
        if let Some(l) = self.half_extent {
            v.half_extent = l;
        }
        if let Some(s) = self.seed {
            v.seed = s;
        }
        if let Some(b) = self.band {
            v.band = b;
        }
        for (k, t) in &self.tolerances {
            v.tolerances.insert(k.clone(), *t);
        }
        v
    }
}
