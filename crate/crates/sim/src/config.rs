//! Experiment configuration: JSON manifests merged with command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{config_err, SimError, SimResult};

/// Default number of renewal blocks used to estimate the CLT constants.
pub const DEFAULT_CLT_BLOCKS: u64 = 20_000_000;
/// Default number of product-chain steps for the occupation experiment.
pub const DEFAULT_STATIONARY_STEPS: u64 = 10_000_000;
/// Default weak-law scaling: `q = 1 - WEAK_LAW_SCALE / n`.
pub const WEAK_LAW_SCALE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExperimentKind {
    WeakLaw,
    FiniteBeta,
    Clt,
    Renewal,
    Stationary,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::WeakLaw => "WEAK_LAW",
            ExperimentKind::FiniteBeta => "FINITE_BETA",
            ExperimentKind::Clt => "CLT",
            ExperimentKind::Renewal => "RENEWAL",
            ExperimentKind::Stationary => "STATIONARY",
        })
    }
}

fn default_one() -> u64 {
    1
}

fn default_workers() -> usize {
    1
}

/// A fully specified experiment.
///
/// `n` is the permutation size, except for `STATIONARY` where it is the number
/// of chain steps; `RENEWAL` ignores it. `blocks` is the renewal block count
/// (`RENEWAL`) or the number of blocks behind the CLT estimates (`CLT`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default = "default_one")]
    pub replicas: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<u64>,
    #[serde(default = "default_workers", skip_serializing)]
    pub workers: usize,
    #[serde(default, skip_serializing)]
    pub output_path: Option<PathBuf>,
}

fn check_unit(name: &str, q: f64) -> SimResult<f64> {
    if q > 0.0 && q < 1.0 {
        Ok(q)
    } else {
        Err(config_err(format!("{name} must lie in (0, 1), got {q}")))
    }
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, seed: u64) -> Self {
        ExperimentConfig {
            kind,
            n: 0,
            q: None,
            q_prime: None,
            beta: None,
            replicas: 1,
            seed,
            blocks: None,
            workers: 1,
            output_path: None,
        }
    }

    /// The `q` actually used: explicit, `1 - 100/n` for the weak law, or
    /// `1 - beta/n` for the finite-beta law.
    pub fn effective_q(&self) -> SimResult<f64> {
        match self.kind {
            ExperimentKind::FiniteBeta => {
                let beta = self
                    .beta
                    .ok_or_else(|| config_err("FINITE_BETA needs beta"))?;
                if !(beta > 0.0 && beta.is_finite()) {
                    return Err(config_err(format!("beta must be positive, got {beta}")));
                }
                if beta >= self.n as f64 {
                    return Err(config_err(format!(
                        "beta must be smaller than n ({beta} >= {})",
                        self.n
                    )));
                }
                if self.q.is_some() {
                    return Err(config_err("FINITE_BETA derives q from beta; do not set q"));
                }
                Ok(1.0 - beta / self.n as f64)
            }
            ExperimentKind::WeakLaw => match self.q {
                Some(q) => check_unit("q", q),
                None if self.n as f64 > WEAK_LAW_SCALE => Ok(1.0 - WEAK_LAW_SCALE / self.n as f64),
                None => Err(config_err(format!(
                    "the default q = 1 - {WEAK_LAW_SCALE}/n needs n > {WEAK_LAW_SCALE}; set q explicitly"
                ))),
            },
            _ => check_unit("q", self.q.ok_or_else(|| config_err(format!("{} needs q", self.kind)))?),
        }
    }

    /// `q_prime`, defaulting to `q`.
    pub fn effective_q_prime(&self) -> SimResult<f64> {
        match self.q_prime {
            Some(qp) => check_unit("q_prime", qp),
            None => self.effective_q(),
        }
    }

    pub fn effective_blocks(&self) -> u64 {
        self.blocks.unwrap_or(DEFAULT_CLT_BLOCKS)
    }

    pub fn validate(&self) -> SimResult<()> {
        if self.workers == 0 {
            return Err(config_err("workers must be at least 1"));
        }
        let needs_n = !matches!(self.kind, ExperimentKind::Renewal);
        if needs_n && self.n == 0 {
            return Err(config_err(format!("{} needs n >= 1", self.kind)));
        }
        if matches!(
            self.kind,
            ExperimentKind::WeakLaw | ExperimentKind::FiniteBeta | ExperimentKind::Clt
        ) && self.n > u32::MAX as u64
        {
            return Err(config_err(format!("n = {} is too large", self.n)));
        }
        if self.replicas == 0 {
            return Err(config_err("replicas must be at least 1"));
        }
        self.effective_q()?;
        match self.kind {
            ExperimentKind::WeakLaw | ExperimentKind::FiniteBeta => {
                if self.q_prime.is_some() {
                    return Err(config_err(format!("{} uses q_prime = q", self.kind)));
                }
            }
            ExperimentKind::Clt => {
                self.effective_q_prime()?;
                if self.replicas < 10 {
                    return Err(config_err("CLT needs at least 10 replicas"));
                }
                if self.effective_blocks() < 2 {
                    return Err(config_err("CLT needs at least 2 blocks"));
                }
            }
            ExperimentKind::Renewal => {
                self.effective_q_prime()?;
                match self.blocks {
                    Some(b) if b >= 2 => {}
                    _ => return Err(config_err("RENEWAL needs blocks >= 2")),
                }
            }
            ExperimentKind::Stationary => {
                self.effective_q_prime()?;
            }
        }
        if self.beta.is_some() && self.kind != ExperimentKind::FiniteBeta {
            return Err(config_err(format!("{} does not take beta", self.kind)));
        }
        Ok(())
    }

    /// Parses a config object, either at the top level or under a `"config"`
    /// key (as in an experiment report).
    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        let mut value: serde_json::Value = serde_json::from_str(s)?;
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
        serde_json::from_value(value)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Config fields as given by a file or by flags; unset fields are `None`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub kind: Option<ExperimentKind>,
    pub n: Option<u64>,
    pub q: Option<f64>,
    pub q_prime: Option<f64>,
    pub beta: Option<f64>,
    pub replicas: Option<u64>,
    pub seed: Option<u64>,
    pub blocks: Option<u64>,
    pub workers: Option<usize>,
    pub output_path: Option<PathBuf>,
}

impl PartialConfig {
    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        let mut value: serde_json::Value = serde_json::from_str(s)?;
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
        serde_json::from_value(value)
    }

    pub fn load(path: &Path) -> SimResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text).map_err(|source| SimError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overridden_by(self, over: PartialConfig) -> PartialConfig {
        PartialConfig {
            kind: over.kind.or(self.kind),
            n: over.n.or(self.n),
            q: over.q.or(self.q),
            q_prime: over.q_prime.or(self.q_prime),
            beta: over.beta.or(self.beta),
            replicas: over.replicas.or(self.replicas),
            seed: over.seed.or(self.seed),
            blocks: over.blocks.or(self.blocks),
            workers: over.workers.or(self.workers),
            output_path: over.output_path.or(self.output_path),
        }
    }

    /// Resolves into a validated config of the given kind. The seed must be
    /// set explicitly.
    pub fn resolve(self, kind: ExperimentKind) -> SimResult<ExperimentConfig> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(config_err(format!("config is for {k}, not {kind}")));
            }
        }
        let seed = self
            .seed
            .ok_or_else(|| config_err("a seed is required (--seed or \"seed\" in the config)"))?;
        let cfg = ExperimentConfig {
            kind,
            n: self.n.unwrap_or(0),
            q: self.q,
            q_prime: self.q_prime,
            beta: self.beta,
            replicas: self.replicas.unwrap_or(1),
            seed,
            blocks: self.blocks,
            workers: self.workers.unwrap_or(1),
            output_path: self.output_path,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
