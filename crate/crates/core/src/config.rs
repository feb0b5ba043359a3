//! Numerical tolerances and the flat `key = value` run configuration.
//!
//! ```text
//! # comment
//! tol.series = 1e-13
//! quad.max_levels = 12
//! threads = 4
//! ```

use std::path::Path;

use crate::error::{Error, Result};

/// Every tolerance and cap used by the numerical kernels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative truncation tolerance for every series (`tol.series`).
    pub series: f64,
    /// Hard cap on the number of series terms (`series.max_terms`).
    pub series_max_terms: usize,
    /// Relative quadrature tolerance (`tol.quad.rel`).
    pub quad_rel: f64,
    /// Absolute quadrature tolerance (`tol.quad.abs`).
    pub quad_abs: f64,
    /// Number of node-doubling levels before quadrature gives up (`quad.max_levels`).
    pub quad_max_levels: usize,
    /// Relative finite-difference step (`fd.step_rel`).
    pub fd_step_rel: f64,
    /// Significance multiplier for defects and gaps (`defect.kappa`).
    pub kappa: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            series: 1e-13,
            series_max_terms: 20_000,
            quad_rel: 1e-12,
            quad_abs: 1e-300,
            quad_max_levels: 12,
            fd_step_rel: 1e-4,
            kappa: 10.0,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol.series", self.series),
            ("tol.quad.rel", self.quad_rel),
            ("tol.quad.abs", self.quad_abs),
            ("fd.step_rel", self.fd_step_rel),
            ("defect.kappa", self.kappa),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{key} must be positive, got {v}")));
            }
        }
        if self.series_max_terms < 2 {
            return Err(Error::Config("series.max_terms must be at least 2".into()));
        }
        if self.quad_max_levels < 2 {
            return Err(Error::Config("quad.max_levels must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub tol: Tolerances,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            threads: 1,
        }
    }
}

pub const CONFIG_KEYS: [&str; 8] = [
    "tol.series",
    "tol.quad.rel",
    "tol.quad.abs",
    "series.max_terms",
    "quad.max_levels",
    "fd.step_rel",
    "defect.kappa",
    "threads",
];

impl RunConfig {
    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip(e))))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key. Unknown keys and malformed numbers are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn real(key: &str, v: &str) -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("{key}: `{v}` is not a number")))
        }
        fn count(key: &str, v: &str) -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| Error::Config(format!("{key}: `{v}` is not a nonnegative integer")))
        }
        match key {
            "tol.series" => self.tol.series = real(key, value)?,
            "tol.quad.rel" => self.tol.quad_rel = real(key, value)?,
            "tol.quad.abs" => self.tol.quad_abs = real(key, value)?,
            "series.max_terms" => self.tol.series_max_terms = count(key, value)?,
            "quad.max_levels" => self.tol.quad_max_levels = count(key, value)?,
            "fd.step_rel" => self.tol.fd_step_rel = real(key, value)?,
            "defect.kappa" => self.tol.kappa = real(key, value)?,
            "threads" => self.threads = count(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.tol.validate()?;
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Renders the config in the same format `parse` accepts.
    pub fn to_text(&self) -> String {
        let t = &self.tol;
        format!(
            "tol.series = {:e}\ntol.quad.rel = {:e}\ntol.quad.abs = {:e}\nseries.max_terms = {}\n\
             quad.max_levels = {}\nfd.step_rel = {:e}\ndefect.kappa = {}\nthreads = {}\n",
            t.series,
            t.quad_rel,
            t.quad_abs,
            t.series_max_terms,
            t.quad_max_levels,
            t.fd_step_rel,
            t.kappa,
            self.threads
        )
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(s) => s,
        other => other.to_string(),
    }
}
