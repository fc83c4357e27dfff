//! Resolved run configuration shared by every subcommand.
//!
//! Precedence is fixed: built-in defaults first, then the `--config`
//! file, then explicit flags. The file holds one `key=value` per line
//! with `#` comments; keys are spelled exactly like the flags (with
//! underscores). Unknown keys are rejected rather than ignored so a
//! typo cannot silently fall back to a default.

use std::path::{Path, PathBuf};

use cheeger_gap::{DomainMode, EigenOptions, Error, ReductionStrategy, Result};

use crate::cli::CommonOpts;

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Relative residual accepted by the eigensolver.
    pub tol: f64,
    /// Slack on the half-mass feasibility cap for cut searches.
    pub cap_tol: f64,
    /// Relative tolerance on flow-value comparisons in the verify suites.
    pub flow_tol: f64,
    /// Largest matrix dimension sent to the dense eigensolver.
    pub dense_limit: usize,
    /// Largest vertex count for exhaustive cut enumeration.
    pub enum_limit: usize,
    /// Largest cut size enumerated when minimizing over subsets of a cut.
    pub subset_limit: usize,
    /// Reduction strategies evaluated by the bound commands, in order.
    pub strategies: Vec<ReductionStrategy>,
    /// Domain of the reduced minimization. Every bound row carries this
    /// label because the two domains make different soundness promises.
    pub mode: DomainMode,
    /// Seed for the random-instance suites.
    pub seed: u64,
    /// CSV destination; stdout when absent.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol: 1e-10,
            cap_tol: 1e-12,
            flow_tol: 1e-6,
            dense_limit: 4096,
            enum_limit: 24,
            subset_limit: 22,
            strategies: vec![ReductionStrategy::CutOnly, ReductionStrategy::CutPlusPaths],
            mode: DomainMode::SubsetsOfCut,
            seed: 42,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn resolve(opts: &CommonOpts) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &opts.config {
            cfg.apply_file(path)?;
        }
        cfg.apply_flags(opts)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions {
            tol: self.tol,
            dense_limit: self.dense_limit,
            ..EigenOptions::default()
        }
    }

    fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Validation(format!(
                    "{}:{}: expected key=value, got \"{raw}\"",
                    path.display(),
                    idx + 1
                )));
            };
            self.set(key.trim(), value.trim()).map_err(|msg| {
                Error::Validation(format!("{}:{}: {msg}", path.display(), idx + 1))
            })?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("bad value \"{value}\" for {key}"))
        }
        match key {
            "tol" => self.tol = num(key, value)?,
            "cap_tol" => self.cap_tol = num(key, value)?,
            "flow_tol" => self.flow_tol = num(key, value)?,
            "dense_limit" => self.dense_limit = num(key, value)?,
            "enum_limit" => self.enum_limit = num(key, value)?,
            "subset_limit" => self.subset_limit = num(key, value)?,
            "strategies" => self.strategies = parse_strategies(value)?,
            "mode" => self.mode = value.parse()?,
            "seed" => self.seed = num(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            other => return Err(format!("unknown key \"{other}\"")),
        }
        Ok(())
    }

    fn apply_flags(&mut self, opts: &CommonOpts) -> Result<()> {
        if let Some(v) = opts.tol {
            self.tol = v;
        }
        if let Some(v) = opts.cap_tol {
            self.cap_tol = v;
        }
        if let Some(v) = opts.flow_tol {
            self.flow_tol = v;
        }
        if let Some(v) = opts.dense_limit {
            self.dense_limit = v;
        }
        if let Some(v) = opts.enum_limit {
            self.enum_limit = v;
        }
        if let Some(v) = opts.subset_limit {
            self.subset_limit = v;
        }
        if let Some(text) = &opts.strategies {
            self.strategies = parse_strategies(text).map_err(Error::Validation)?;
        }
        if let Some(text) = &opts.mode {
            self.mode = text.parse().map_err(Error::Validation)?;
        }
        if let Some(v) = opts.seed {
            self.seed = v;
        }
        if let Some(path) = &opts.output {
            self.output = Some(path.clone());
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.cap_tol > 0.0) || !(self.flow_tol > 0.0) {
            return Err(Error::Validation(
                "tolerances must be positive finite numbers".into(),
            ));
        }
        if self.dense_limit == 0 || self.enum_limit == 0 || self.subset_limit == 0 {
            return Err(Error::Validation("limits must be positive".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Validation("strategy list must not be empty".into()));
        }
        Ok(())
    }
}

fn parse_strategies(text: &str) -> std::result::Result<Vec<ReductionStrategy>, String> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(part.parse()?);
    }
    if out.is_empty() {
        return Err("strategy list must not be empty".into());
    }
    Ok(out)
}
