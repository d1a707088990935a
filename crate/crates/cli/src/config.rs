//! Run configuration: file format, command-line overrides and resolution.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use vlasov::prelude::*;
use vlasov::scenarios::FilterConfig;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "VLASOV_THREADS";

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Built-in scenario name, used unless `scenario_file` is set.
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_file: Option<PathBuf>,
    pub backend: Backend,
    /// Polynomial degree in both directions (dG only).
    pub degree: usize,
    /// Cells per direction for dG, points per direction for splines.
    pub cells_x: usize,
    pub cells_v: usize,
    pub tau: f64,
    pub t_final: f64,
    pub scheme: SplittingScheme,
    pub record_every: usize,
    pub output_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Ion background; by default it neutralizes the initial charge.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub background: Option<f64>,
    pub snapshot_times: Vec<f64>,
    /// Ignore any filter given by the scenario.
    pub no_filter: bool,
    /// Overrides the scenario's filter.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: "nonlinear_landau".into(),
            scenario_file: None,
            backend: Backend::Dg,
            degree: 3,
            cells_x: 32,
            cells_v: 32,
            tau: 0.1,
            t_final: 100.0,
            scheme: SplittingScheme::Strang,
            record_every: 1,
            output_dir: PathBuf::from("out"),
            threads: None,
            background: None,
            snapshot_times: Vec::new(),
            no_filter: false,
            filter: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).context("invalid run configuration")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_toml_str(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }

    pub fn discretization(&self) -> Discretization {
        match self.backend {
            Backend::Dg => Discretization::Dg {
                degree_x: self.degree,
                degree_v: self.degree,
            },
            Backend::Spline => Discretization::Spline,
        }
    }

    /// Degrees of freedom per direction, `(x, v)`.
    pub fn dofs(&self) -> (usize, usize) {
        match self.backend {
            Backend::Dg => (self.cells_x * (self.degree + 1), self.cells_v * (self.degree + 1)),
            Backend::Spline => (self.cells_x, self.cells_v),
        }
    }

    /// Worker count: this config, then the environment, then all cores.
    pub fn resolved_threads(&self) -> Result<usize> {
        if let Some(n) = self.threads {
            return Ok(n);
        }
        match std::env::var(THREADS_ENV) {
            Ok(s) => s.trim().parse().with_context(|| format!("{THREADS_ENV}=`{s}` is not a thread count")),
            Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }

    /// Loads the scenario and applies the filter settings of this run.
    pub fn resolve_scenario(&self) -> Result<ScenarioConfig> {
        let mut scenario = match &self.scenario_file {
            Some(path) => ScenarioConfig::from_file(path)?,
            None => ScenarioConfig::builtin(&self.scenario)?,
        };
        if self.no_filter {
            scenario.filter = None;
        } else if self.filter.is_some() {
            scenario.filter = self.filter;
        }
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            bail!("tau must be positive, got {}", self.tau);
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            bail!("final time must be >= 0, got {}", self.t_final);
        }
        if self.record_every == 0 {
            bail!("record_every must be at least 1");
        }
        if self.threads == Some(0) {
            bail!("thread count must be at least 1");
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= self.t_final)) {
            bail!("snapshot time {t} lies outside [0, {}]", self.t_final);
        }
        Ok(())
    }
}
