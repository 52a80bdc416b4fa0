//! Experiment configuration: a flat TOML file of `key = value` lines.
//!
//! ```toml
//! engine = "dtwa"        # collective | bosonic | rsw | dtwa | stability | scaling
//! dimension = 2
//! alpha = 3.0
//! sizes = [10, 16]       # N for collective/bosonic, linear size L otherwise
//! fields = [0.2]
//! t_max = 4.0
//! t_points = 201
//! trajectories = 1000
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest dTWA linear size without `--large`.
pub const DESK_MAX_L: usize = 24;
/// Largest dTWA linear size with `--large`.
pub const LARGE_MAX_L: usize = 90;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Collective,
    Bosonic,
    Rsw,
    Dtwa,
    Stability,
    Scaling,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Collective => "collective",
            Engine::Bosonic => "bosonic",
            Engine::Rsw => "rsw",
            Engine::Dtwa => "dtwa",
            Engine::Stability => "stability",
            Engine::Scaling => "scaling",
        }
    }

    /// Engines whose `sizes` are spin counts rather than linear sizes.
    pub fn counts_spins(self) -> bool {
        matches!(self, Engine::Collective | Engine::Bosonic)
    }
}

fn one() -> f64 {
    1.0
}
fn two() -> usize {
    2
}
fn dipolar() -> f64 {
    3.0
}
fn default_points() -> usize {
    201
}
fn default_trajectories() -> usize {
    1000
}
fn default_seed() -> u64 {
    1
}
fn default_energy_tolerance() -> f64 {
    1e-6
}
fn default_length_tolerance() -> f64 {
    1e-8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub engine: Engine,
    /// Extra engines run on the same grid (time-series engines only).
    #[serde(default)]
    pub compare: Vec<Engine>,
    /// Series engine used by `scaling`.
    #[serde(default)]
    pub source: Option<Engine>,
    #[serde(default = "two")]
    pub dimension: usize,
    #[serde(default = "dipolar")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub coupling: f64,
    pub sizes: Vec<usize>,
    pub fields: Vec<f64>,
    #[serde(default)]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub t_points: usize,
    #[serde(default = "default_trajectories")]
    pub trajectories: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub correlation_times: Vec<f64>,
    #[serde(default = "default_energy_tolerance")]
    pub energy_tolerance: f64,
    #[serde(default = "default_length_tolerance")]
    pub length_tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}: `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "`{k}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// 1-based line of the first `key = ...` assignment.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl ExperimentConfig {
    /// Parse and validate. `large` lifts the desk-scale dTWA size cap.
    pub fn parse(text: &str, large: bool) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text).map_err(|e| ConfigError {
            line: e.span().map(|s| line_of_offset(text, s.start)),
            key: None,
            message: e.message().trim().to_string(),
        })?;
        config.validate(large).map_err(|(key, message)| ConfigError {
            line: key_line(text, key),
            key: Some(key.to_string()),
            message,
        })?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn uses_dtwa(&self) -> bool {
        self.engine == Engine::Dtwa || self.compare.contains(&Engine::Dtwa) || self.source == Some(Engine::Dtwa)
    }

    pub fn time_grid(&self) -> Vec<f64> {
        let n = self.t_points;
        (0..n).map(|i| self.t_max * i as f64 / (n - 1) as f64).collect()
    }

    pub fn validate(&self, large: bool) -> Result<(), (&'static str, String)> {
        if self.fields.is_empty() {
            return Err(("fields", "field grid is empty".into()));
        }
        if let Some(f) = self.fields.iter().find(|f| !f.is_finite() || **f < 0.0) {
            return Err(("fields", format!("fields must be finite and non-negative, got {f}")));
        }
        if self.sizes.is_empty() {
            return Err(("sizes", "size grid is empty".into()));
        }
        if !(1..=2).contains(&self.dimension) {
            return Err(("dimension", format!("must be 1 or 2, got {}", self.dimension)));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(("alpha", format!("must be finite and non-negative, got {}", self.alpha)));
        }
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return Err(("coupling", format!("must be positive, got {}", self.coupling)));
        }
        let series_engine = |e: Engine| !matches!(e, Engine::Stability | Engine::Scaling);
        if let Some(e) = self.compare.iter().find(|e| !series_engine(**e)) {
            return Err(("compare", format!("`{}` does not produce a time series", e.name())));
        }
        if !self.compare.is_empty() && !series_engine(self.engine) {
            return Err(("compare", format!("comparisons need a time-series engine, not `{}`", self.engine.name())));
        }
        if let Some(src) = self.source {
            if self.engine != Engine::Scaling {
                return Err(("source", "only meaningful for the scaling engine".into()));
            }
            if !series_engine(src) || src == Engine::Bosonic {
                return Err(("source", format!("`{}` cannot feed a scaling analysis", src.name())));
            }
        }
        let spins = match self.engine {
            Engine::Scaling => self.source.unwrap_or(Engine::Collective).counts_spins(),
            e => e.counts_spins(),
        };
        if self.compare.iter().any(|e| e.counts_spins() != spins) {
            return Err(("compare", "spin-count engines (collective, bosonic) and lattice engines take different sizes".into()));
        }
        let bosonic = self.engine == Engine::Bosonic || self.compare.contains(&Engine::Bosonic);
        if bosonic && self.fields.iter().any(|f| *f > self.coupling) {
            return Err(("fields", "the bosonic model needs fields in [0, coupling]".into()));
        }
        let min_size = if spins { 1 } else { 2 };
        if let Some(s) = self.sizes.iter().find(|s| **s < min_size) {
            return Err(("sizes", format!("sizes must be at least {min_size}, got {s}")));
        }
        if self.engine == Engine::Stability && self.sizes.iter().any(|s| *s < 3) {
            return Err(("sizes", "stability maps need L >= 3".into()));
        }
        if self.engine != Engine::Stability {
            if !(self.t_max > 0.0 && self.t_max.is_finite()) {
                return Err(("t_max", format!("must be positive, got {}", self.t_max)));
            }
            if self.t_points < 2 {
                return Err(("t_points", format!("need at least 2 points, got {}", self.t_points)));
            }
        }
        if self.uses_dtwa() {
            if self.trajectories < 2 {
                return Err(("trajectories", format!("need at least 2, got {}", self.trajectories)));
            }
            let cap = if large { LARGE_MAX_L } else { DESK_MAX_L };
            if let Some(l) = self.sizes.iter().find(|l| **l > cap) {
                let hint = if large { "" } else { " (pass --large to go up to 90)" };
                return Err(("sizes", format!("dTWA linear size {l} exceeds {cap}{hint}")));
            }
        }
        if self.correlation_times.iter().any(|t| !t.is_finite() || *t < 0.0 || *t > self.t_max) {
            return Err(("correlation_times", "times must lie in [0, t_max]".into()));
        }
        for (key, tol) in [("energy_tolerance", self.energy_tolerance), ("length_tolerance", self.length_tolerance)] {
            if !(tol > 0.0) {
                return Err((key, format!("must be positive, got {tol}")));
            }
        }
        Ok(())
    }
}
