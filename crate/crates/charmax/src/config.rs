//! Run configuration: the free constants of the method (B, the dimension
//! scale, c1, c2, delta1), search budgets, and output format. Values come
//! from defaults, then an optional key=value config file, then CLI flags.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::Config(format!(
                "unknown format '{other}' (expected json, csv, or text)"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Text => "text",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    /// Constant B in the scan condition q >= B p^exponent.
    pub b_constant: f64,
    pub fouvry_exponent: f64,
    /// Scale delta for the orbit dimension floor(delta log^{1/2} p).
    pub dimension_scale: f64,
    pub s_cap: usize,
    pub restarts: usize,
    pub iters: usize,
    /// Shift-grid resolution per interval [0, 1/M].
    pub tau_grid: u64,
    /// Level-set reporting constants.
    pub c1: f64,
    pub c2: f64,
    /// delta1 in the frequency-cutoff preset m = s^{delta1 s}.
    pub etk_delta1: f64,
    /// Largest N the exact oracle accepts from the CLI.
    pub exact_cap: u64,
    /// Candidate budget for permutation search.
    pub budget: u64,
    pub format: Option<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            b_constant: 1.0,
            fouvry_exponent: 0.6687,
            dimension_scale: 1.0,
            s_cap: 8,
            restarts: 10,
            iters: 30,
            tau_grid: 64,
            c1: 0.1,
            c2: 0.01,
            etk_delta1: 1.0,
            exact_cap: 5,
            budget: 200,
            format: None,
        }
    }
}

impl RunConfig {
    /// Parses plain key=value lines; '#' starts a comment. Unknown keys are
    /// errors so typos do not silently fall back to defaults.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        self.validate()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("invalid value '{value}' for {key}")))
        }
        match key {
            "seed" => self.seed = num(key, value)?,
            "b" => self.b_constant = num(key, value)?,
            "fouvry_exponent" => self.fouvry_exponent = num(key, value)?,
            "delta" => self.dimension_scale = num(key, value)?,
            "s_cap" => self.s_cap = num(key, value)?,
            "restarts" => self.restarts = num(key, value)?,
            "iters" => self.iters = num(key, value)?,
            "tau_grid" => self.tau_grid = num(key, value)?,
            "c1" => self.c1 = num(key, value)?,
            "c2" => self.c2 = num(key, value)?,
            "delta1" => self.etk_delta1 = num(key, value)?,
            "exact_cap" => self.exact_cap = num(key, value)?,
            "budget" => self.budget = num(key, value)?,
            "format" => self.format = Some(value.parse()?),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("b", self.b_constant),
            ("fouvry_exponent", self.fouvry_exponent),
            ("delta", self.dimension_scale),
            ("c1", self.c1),
            ("c2", self.c2),
            ("delta1", self.etk_delta1),
        ];
        for (name, v) in positives {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("s_cap", self.s_cap as u64),
            ("restarts", self.restarts as u64),
            ("iters", self.iters as u64),
            ("tau_grid", self.tau_grid),
            ("exact_cap", self.exact_cap),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn file_parsing() {
        let dir = std::env::temp_dir().join(format!("charmax-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "seed=42\nb=1.5 # comment\n\nformat=csv\n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.b_constant, 1.5);
        assert_eq!(cfg.format, Some(OutputFormat::Csv));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set("nope", "1").is_err());
        assert!(cfg.set("seed", "abc").is_err());
        assert!(cfg.set("format", "yaml").is_err());
        cfg.set("c1", "-2.0").unwrap();
        assert!(cfg.validate().is_err());
    }
}
