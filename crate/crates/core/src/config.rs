//! Run parameters and the plain-text config format.
//!
//! A config file is a list of `key = value` lines followed by an optional
//! `[ellipses]` table whose rows are six whitespace-separated numbers. `#`
//! starts a comment. The same file may carry phantom, scan and solver keys;
//! each consumer reads the keys it knows.

use std::collections::BTreeMap;

use crate::bounds::BoxBounds;
use crate::error::{Error, Result};

/// Tunables shared by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Base `a` of the perturbation schedule `eta_l = a^l`.
    pub eta_base: f64,
    /// Perturbations `N` between two feasibility sweeps.
    pub perturbations_per_sweep: usize,
    /// PSM step lengths are `k^(-step_exponent) / ||phi'(x^k)||`.
    pub step_exponent: f64,
    /// PSM stopping rule is checked every `K` iterations.
    pub psm_check_period: usize,
    /// PSM stops once the best objective improved by less than `prev / M`.
    pub psm_improvement_divisor: usize,
    /// Initial step `alpha_{-1}` of the dual accelerated solver.
    pub nesterov_alpha_init: f64,
    /// Partial-derivative fractions with a smaller denominator are treated as degenerate.
    pub derivative_guard: f64,
    /// Target proximity for the feasibility-seeking runs.
    pub epsilon: f64,
    /// Sweep cap for the basic and superiorized runs.
    pub max_iterations: usize,
    /// Iteration cap for the projected subgradient run.
    pub psm_max_iterations: usize,
    /// Inner solve stops when `||grad|| <= inner_tolerance * (1 + ||b||)`.
    pub inner_tolerance: f64,
    pub max_inner: usize,
    /// Reuse the previous outer iteration's multipliers as the inner start.
    pub warm_start: bool,
    /// Cap on schedule draws while looking for one acceptable perturbation.
    pub max_draws_per_perturbation: usize,
    pub bounds: BoxBounds,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eta_base: 0.999,
            perturbations_per_sweep: 9,
            step_exponent: 0.25,
            psm_check_period: 10,
            psm_improvement_divisor: 5000,
            nesterov_alpha_init: 10.0,
            derivative_guard: 1e-20,
            epsilon: 1e-3,
            max_iterations: 5000,
            psm_max_iterations: 5000,
            inner_tolerance: 1e-6,
            max_inner: 2000,
            warm_start: false,
            max_draws_per_perturbation: 1_000_000,
            bounds: BoxBounds::default(),
        }
    }
}

pub(crate) const RUN_KEYS: &[&str] = &[
    "eta_base",
    "perturbations_per_sweep",
    "step_exponent",
    "psm_check_period",
    "psm_improvement_divisor",
    "nesterov_alpha_init",
    "derivative_guard",
    "epsilon",
    "max_iterations",
    "psm_max_iterations",
    "inner_tolerance",
    "max_inner",
    "warm_start",
    "max_draws_per_perturbation",
    "box_lo",
    "box_hi",
];

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if !(self.eta_base > 0.0 && self.eta_base < 1.0) {
            return bad("eta_base must lie in (0, 1)");
        }
        if !(self.step_exponent.is_finite() && self.step_exponent > 0.0) {
            return bad("step_exponent must be positive");
        }
        if self.psm_check_period == 0 || self.psm_improvement_divisor == 0 {
            return bad("psm_check_period and psm_improvement_divisor must be positive");
        }
        if !(self.nesterov_alpha_init > 0.0) {
            return bad("nesterov_alpha_init must be positive");
        }
        if !(self.derivative_guard > 0.0) {
            return bad("derivative_guard must be positive");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if self.max_iterations == 0 || self.psm_max_iterations == 0 || self.max_inner == 0 {
            return bad("iteration caps must be positive");
        }
        if !(self.inner_tolerance > 0.0) {
            return bad("inner_tolerance must be positive");
        }
        if self.max_draws_per_perturbation == 0 {
            return bad("max_draws_per_perturbation must be positive");
        }
        Ok(())
    }

    /// Overrides defaults with whatever run keys `doc` sets.
    pub fn from_document(doc: &ConfigDocument) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(v) = doc.f64("eta_base")? {
            cfg.eta_base = v;
        }
        if let Some(v) = doc.usize("perturbations_per_sweep")? {
            cfg.perturbations_per_sweep = v;
        }
        if let Some(v) = doc.f64("step_exponent")? {
            cfg.step_exponent = v;
        }
        if let Some(v) = doc.usize("psm_check_period")? {
            cfg.psm_check_period = v;
        }
        if let Some(v) = doc.usize("psm_improvement_divisor")? {
            cfg.psm_improvement_divisor = v;
        }
        if let Some(v) = doc.f64("nesterov_alpha_init")? {
            cfg.nesterov_alpha_init = v;
        }
        if let Some(v) = doc.f64("derivative_guard")? {
            cfg.derivative_guard = v;
        }
        if let Some(v) = doc.f64("epsilon")? {
            cfg.epsilon = v;
        }
        if let Some(v) = doc.usize("max_iterations")? {
            cfg.max_iterations = v;
        }
        if let Some(v) = doc.usize("psm_max_iterations")? {
            cfg.psm_max_iterations = v;
        }
        if let Some(v) = doc.f64("inner_tolerance")? {
            cfg.inner_tolerance = v;
        }
        if let Some(v) = doc.usize("max_inner")? {
            cfg.max_inner = v;
        }
        if let Some(v) = doc.bool("warm_start")? {
            cfg.warm_start = v;
        }
        if let Some(v) = doc.usize("max_draws_per_perturbation")? {
            cfg.max_draws_per_perturbation = v;
        }
        let lo = doc.f64("box_lo")?.unwrap_or(cfg.bounds.lo());
        let hi = doc.f64("box_hi")?.unwrap_or(cfg.bounds.hi());
        cfg.bounds = BoxBounds::new(lo, hi)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    line: usize,
    value: String,
}

/// Parsed `key = value` pairs plus the optional ellipse table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigDocument {
    entries: BTreeMap<String, Entry>,
    ellipses: Vec<(usize, [f64; 6])>,
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Self::default();
        let mut in_table = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if content.starts_with('[') {
                if content == "[ellipses]" {
                    in_table = true;
                    continue;
                }
                return Err(Error::Config {
                    line,
                    message: format!("unknown section {content}"),
                });
            }
            if let Some((key, value)) = content.split_once('=') {
                let key = key.trim();
                if key.is_empty() {
                    return Err(Error::Config {
                        line,
                        message: "missing key before '='".into(),
                    });
                }
                let entry = Entry {
                    line,
                    value: value.trim().to_string(),
                };
                if let Some(prev) = doc.entries.insert(key.to_string(), entry) {
                    return Err(Error::Config {
                        line,
                        message: format!("duplicate key {key} (first set on line {})", prev.line),
                    });
                }
                continue;
            }
            if !in_table {
                return Err(Error::Config {
                    line,
                    message: format!("expected 'key = value', found {content:?}"),
                });
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(Error::Config {
                    line,
                    message: format!(
                        "ellipse rows need 6 fields (cx cy a b rotation_deg value), found {}",
                        fields.len()
                    ),
                });
            }
            let mut row = [0.0; 6];
            for (slot, field) in row.iter_mut().zip(&fields) {
                *slot = field.parse().map_err(|_| Error::Config {
                    line,
                    message: format!("not a number: {field:?}"),
                })?;
            }
            doc.ellipses.push((line, row));
        }
        Ok(doc)
    }

    /// Fails on the first key not listed in `known`.
    pub fn check_known(&self, known: &[&[&str]]) -> Result<()> {
        for (key, entry) in &self.entries {
            if !known.iter().any(|set| set.contains(&key.as_str())) {
                return Err(Error::Config {
                    line: entry.line,
                    message: format!("unknown key {key}"),
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|_| Error::Config {
                line: e.line,
                message: format!("{key} must be {what}, found {:?}", e.value),
            }),
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.parsed(key, "a number")
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.parsed(key, "a nonnegative integer")
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>> {
        self.parsed(key, "true or false")
    }

    pub fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }

    /// Ellipse rows as `(line, [cx, cy, a, b, rotation_deg, value])`.
    pub fn ellipse_rows(&self) -> &[(usize, [f64; 6])] {
        &self.ellipses
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_published_settings() {
        let c = RunConfig::default();
        assert_eq!(c.eta_base, 0.999);
        assert_eq!(c.perturbations_per_sweep, 9);
        assert_eq!(c.step_exponent, 0.25);
        assert_eq!(c.psm_check_period, 10);
        assert_eq!(c.psm_improvement_divisor, 5000);
        assert_eq!(c.nesterov_alpha_init, 10.0);
        assert_eq!(c.derivative_guard, 1e-20);
        assert_eq!(c.bounds, BoxBounds::default());
        c.validate().unwrap();
    }

    #[test]
    fn parse_keys_and_table() {
        let doc = ConfigDocument::parse(
            "# comment\nrows = 8\neta_base = 0.99 # trailing\n\n[ellipses]\n0 0 1 2 30 0.5\n",
        )
        .unwrap();
        assert_eq!(doc.usize("rows").unwrap(), Some(8));
        assert_eq!(doc.f64("eta_base").unwrap(), Some(0.99));
        assert_eq!(doc.ellipse_rows(), &[(6, [0.0, 0.0, 1.0, 2.0, 30.0, 0.5])]);
        let cfg = RunConfig::from_document(&doc).unwrap();
        assert_eq!(cfg.eta_base, 0.99);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ConfigDocument::parse("rows = 8\nbogus line\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
        let err = ConfigDocument::parse("[ellipses]\n0 0 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
        let err = ConfigDocument::parse("rows = 1\nrows = 2\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
        let doc = ConfigDocument::parse("\nrows = eight\n").unwrap();
        assert!(matches!(doc.usize("rows"), Err(Error::Config { line: 2, .. })));
        let doc = ConfigDocument::parse("typo = 1\n").unwrap();
        assert!(matches!(doc.check_known(&[RUN_KEYS]), Err(Error::Config { line: 1, .. })));
    }

    #[test]
    fn invalid_run_values_rejected() {
        let doc = ConfigDocument::parse("eta_base = 1.5\n").unwrap();
        assert!(RunConfig::from_document(&doc).is_err());
        let doc = ConfigDocument::parse("epsilon = 0\n").unwrap();
        assert!(RunConfig::from_document(&doc).is_err());
    }
}
