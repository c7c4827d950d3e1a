//! Default tolerances and their `key = value` override file.
//!
//! ```text
//! # comments and blank lines are ignored
//! series.abs_tol = 1e-14
//! quadrature.n = 16384
//! quadrature.rule = simpson
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::conformal::QuadratureConfig;
use crate::error::{Error, Result};
use crate::lattice::DEFAULT_CLASSIFY_TOL;
use crate::specfun::SeriesConfig;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub series: SeriesConfig,
    pub quadrature: QuadratureConfig,
    pub classify_tol: f64,
    /// Monte Carlo time step as a multiple of `epsilon^2`.
    pub mc_step_factor: f64,
    pub mc_max_steps: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            series: SeriesConfig::default(),
            quadrature: QuadratureConfig::default(),
            classify_tol: DEFAULT_CLASSIFY_TOL,
            mc_step_factor: 0.01,
            mc_max_steps: 100_000_000,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "series.abs_tol" => self.series.abs_tol = parse(key, value)?,
            "series.max_terms" => self.series.max_terms = parse(key, value)?,
            "quadrature.n" => self.quadrature.n = parse(key, value)?,
            "quadrature.rule" => self.quadrature.rule = value.parse()?,
            "quadrature.rel_tol" => self.quadrature.rel_tol = parse(key, value)?,
            "quadrature.max_n" => self.quadrature.max_n = parse(key, value)?,
            "quadrature.cell_nodes" => self.quadrature.cell_nodes = parse(key, value)?,
            "quadrature.residual_tol" => self.quadrature.residual_tol = parse(key, value)?,
            "quadrature.area_tol" => self.quadrature.area_tol = parse(key, value)?,
            "lattice.classify_tol" => self.classify_tol = parse(key, value)?,
            "mc.step_factor" => self.mc_step_factor = parse(key, value)?,
            "mc.max_steps" => self.mc_max_steps = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown setting {key:?}"))),
        }
        Ok(())
    }

    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            self.set(k.trim(), v.trim())?;
        }
        self.validate()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut s = Settings::default();
        s.apply_str(&text)?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.series.validate()?;
        self.quadrature.validate()?;
        if !(self.classify_tol >= 0.0) {
            return Err(Error::Config("classify_tol must be nonnegative".into()));
        }
        if !(self.mc_step_factor > 0.0 && self.mc_step_factor <= 0.1) {
            return Err(Error::Config("mc.step_factor must lie in (0, 0.1]".into()));
        }
        Ok(())
    }

    /// Flat key/value view, recorded in run manifests.
    pub fn tolerances(&self) -> BTreeMap<String, String> {
        let q = &self.quadrature;
        [
            ("series.abs_tol", format!("{:?}", self.series.abs_tol)),
            ("series.max_terms", self.series.max_terms.to_string()),
            ("quadrature.n", q.n.to_string()),
            ("quadrature.rule", q.rule.to_string()),
            ("quadrature.rel_tol", format!("{:?}", q.rel_tol)),
            ("quadrature.max_n", q.max_n.to_string()),
            ("quadrature.cell_nodes", q.cell_nodes.to_string()),
            ("quadrature.residual_tol", format!("{:?}", q.residual_tol)),
            ("quadrature.area_tol", format!("{:?}", q.area_tol)),
            ("lattice.classify_tol", format!("{:?}", self.classify_tol)),
            ("mc.step_factor", format!("{:?}", self.mc_step_factor)),
            ("mc.max_steps", self.mc_max_steps.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::Rule;

    #[test]
    fn parses_overrides_and_comments() {
        let mut s = Settings::default();
        s.apply_str("# tolerances\nquadrature.n = 4096\n\nquadrature.rule = gauss # inline\nseries.abs_tol=1e-13\n")
            .unwrap();
        assert_eq!(s.quadrature.n, 4096);
        assert_eq!(s.quadrature.rule, Rule::Gauss);
        assert_eq!(s.series.abs_tol, 1e-13);
    }

    #[test]
    fn rejects_bad_lines() {
        let mut s = Settings::default();
        assert!(matches!(s.apply_str("quadrature.n"), Err(Error::Config(_))));
        assert!(matches!(s.apply_str("nope = 1"), Err(Error::Config(_))));
        assert!(matches!(s.apply_str("quadrature.n = many"), Err(Error::Config(_))));
        assert!(matches!(Settings::default().apply_str("quadrature.n = 4095"), Err(Error::Config(_))));
    }

    #[test]
    fn every_tolerance_key_round_trips() {
        let d = Settings::default();
        let mut s = Settings::default();
        for (k, v) in d.tolerances() {
            s.set(&k, &v).unwrap();
        }
        assert_eq!(s, d);
    }
}
