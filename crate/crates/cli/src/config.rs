//! Experiment configuration files.
//!
//! A config is a TOML document with a top-level `seed` and `trials`, a
//! `[model]` table, an `[algorithm]` table and an optional `[sweep]` table
//! mapping parameter names to value lists. Values from the command line are
//! applied as `section.key=value` overrides before the document is read.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Sbm,
    Cbm,
    Clique,
    Subspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Weights {
    #[default]
    Bernoulli,
    Mixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    Hsc,
    Hsclr,
    HsclrMl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EigenModeName {
    #[default]
    Assortative,
    Disassortative,
}

impl From<EigenModeName> for hsc_core::EigenMode {
    fn from(m: EigenModeName) -> Self {
        match m {
            EigenModeName::Assortative => hsc_core::EigenMode::Assortative,
            EigenModeName::Disassortative => hsc_core::EigenMode::Disassortative,
        }
    }
}

/// Model parameters. Which fields are needed depends on `kind`.
///
/// Edge density is given by exactly one of `alpha`, `c` (expected edge count
/// `c·n·ln n`), `c_linear` (`c·n`) or, for the censored model,
/// `limit_multiple` (a multiple of the information limit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub k: Option<usize>,
    pub sizes: Option<Vec<usize>>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub c_linear: Option<f64>,
    #[serde(default)]
    pub weights: Weights,
    pub theta: Option<f64>,
    pub limit_multiple: Option<f64>,
    pub s: Option<usize>,
    pub m: Option<usize>,
    pub ell: Option<usize>,
    pub points_per_cluster: Option<usize>,
    pub sigma: Option<f64>,
    /// Expected sketch size as a multiple of the default budget.
    pub budget_multiple: Option<f64>,
    /// Expected sketch size in edges; overrides `budget_multiple`.
    pub budget: Option<f64>,
    pub tau: Option<f64>,
    #[serde(default)]
    pub affine: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub kind: AlgorithmKind,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    pub c_thr: Option<f64>,
    pub beta: Option<f64>,
    #[serde(default)]
    pub eigen_mode: EigenModeName,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_restarts() -> usize {
    10
}

fn default_epsilon() -> f64 {
    1e-6
}

fn default_trials() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub model: ModelConfig,
    pub algorithm: AlgorithmConfig,
    #[serde(default)]
    pub sweep: BTreeMap<String, Vec<f64>>,
}

/// Parameters a sweep may vary.
pub const SWEEP_AXES: &[&str] = &[
    "n",
    "d",
    "k",
    "p",
    "q",
    "alpha",
    "c",
    "c_linear",
    "theta",
    "limit_multiple",
    "s",
    "m",
    "ell",
    "points_per_cluster",
    "sigma",
    "budget_multiple",
    "budget",
    "tau",
    "beta",
    "c_thr",
    "restarts",
];

fn as_count(name: &str, v: f64) -> CliResult<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v < 1e15 {
        Ok(v as usize)
    } else {
        Err(CliError::Config(format!("{name} = {v} must be a nonnegative integer")))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        Self::from_toml_with(text, &[])
    }

    /// Parses `text` after applying `section.key=value` overrides.
    pub fn from_toml_with(text: &str, overrides: &[String]) -> CliResult<Self> {
        let mut doc: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: Self = doc
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        for (name, values) in &self.sweep {
            if !SWEEP_AXES.contains(&name.as_str()) {
                return Err(CliError::Config(format!("unknown sweep parameter `{name}`")));
            }
            if values.is_empty() {
                return Err(CliError::Config(format!("sweep parameter `{name}` has no values")));
            }
        }
        Ok(())
    }

    /// Canonical TOML text of the resolved configuration.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of [`Self::canonical`].
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Every combination of sweep values, axes in name order. A config
    /// without sweep axes has one empty grid point.
    pub fn grid(&self) -> Vec<Vec<(String, f64)>> {
        let mut points = vec![Vec::new()];
        for (name, values) in &self.sweep {
            points = points
                .into_iter()
                .flat_map(|pt| {
                    values.iter().map(move |&v| {
                        let mut next = pt.clone();
                        next.push((name.clone(), v));
                        next
                    })
                })
                .collect();
        }
        points
    }

    /// Copy with the grid point's values substituted.
    pub fn at(&self, point: &[(String, f64)]) -> CliResult<Self> {
        let mut cfg = self.clone();
        for (name, v) in point {
            cfg.set(name, *v)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, name: &str, v: f64) -> CliResult<()> {
        let m = &mut self.model;
        let a = &mut self.algorithm;
        match name {
            "n" => m.n = Some(as_count(name, v)?),
            "d" => m.d = Some(as_count(name, v)?),
            "k" => m.k = Some(as_count(name, v)?),
            "p" => m.p = Some(v),
            "q" => m.q = Some(v),
            "alpha" => m.alpha = Some(v),
            "c" => m.c = Some(v),
            "c_linear" => m.c_linear = Some(v),
            "theta" => m.theta = Some(v),
            "limit_multiple" => m.limit_multiple = Some(v),
            "s" => m.s = Some(as_count(name, v)?),
            "m" => m.m = Some(as_count(name, v)?),
            "ell" => m.ell = Some(as_count(name, v)?),
            "points_per_cluster" => m.points_per_cluster = Some(as_count(name, v)?),
            "sigma" => m.sigma = Some(v),
            "budget_multiple" => m.budget_multiple = Some(v),
            "budget" => m.budget = Some(v),
            "tau" => m.tau = Some(v),
            "beta" => a.beta = Some(v),
            "c_thr" => a.c_thr = Some(v),
            "restarts" => a.restarts = as_count(name, v)?,
            _ => return Err(CliError::Config(format!("unknown parameter `{name}`"))),
        }
        Ok(())
    }
}

/// Applies `section.key=value` (or `key=value` at top level). The value is
/// read as a TOML value, falling back to a bare string.
pub fn apply_override(doc: &mut toml::Table, spec: &str) -> CliResult<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not key=value")))?;
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut parts: Vec<&str> = path.trim().split('.').collect();
    let key = parts.pop().expect("split yields one part");
    let mut table = doc;
    for part in parts {
        table = table
            .entry(part)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("`{part}` is not a table")))?;
    }
    table.insert(key.to_string(), value);
    Ok(())
}
