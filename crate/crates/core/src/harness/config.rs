//! Experiment configuration: one JSON document, validated before any work starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basis::GammaSequence;
use crate::concentration::bounds::{DEFAULT_C1, DEFAULT_C3};
use crate::concentration::verify::MIN_REPS;
use crate::concentration::FunctionClass;
use crate::error::{Error, Result};
use crate::modelselect::PenaltyScale;
use crate::pointprocess::IntensityModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Simulate,
    Coeffs,
    Estimate,
    Adapt,
    Risk,
    Conc,
    BoundsTable,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Coeffs => "coeffs",
            Experiment::Estimate => "estimate",
            Experiment::Adapt => "adapt",
            Experiment::Risk => "risk",
            Experiment::Conc => "conc",
            Experiment::BoundsTable => "bounds-table",
        }
    }
}

/// Either an explicit list or an arithmetic range `start, start+step, …, ≤ stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl XGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            XGrid::List(v) => v.clone(),
            XGrid::Range { start, stop, step } => {
                let m = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=m).map(|i| start + i as f64 * step).collect()
            }
        }
    }
}

impl Default for XGrid {
    fn default() -> Self {
        XGrid::Range {
            start: 0.5,
            stop: 8.0,
            step: 0.5,
        }
    }
}

/// Upper end of the dimension search in model selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KMaxPolicy {
    /// `min(n, 4⌈√n⌉ + 64)`.
    #[default]
    Auto,
    /// `min(n, k)`.
    Fixed(usize),
}

impl KMaxPolicy {
    pub fn resolve(&self, n: usize) -> usize {
        match *self {
            KMaxPolicy::Auto => n.min(crate::estimator::default_k_cap(n)),
            KMaxPolicy::Fixed(k) => n.min(k),
        }
    }
}

fn default_reps() -> usize {
    1
}

fn default_threads() -> usize {
    1
}

fn default_eps() -> f64 {
    1.0
}

fn default_upsilon() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub model: Option<IntensityModel>,
    #[serde(default)]
    pub gamma: Option<GammaSequence>,
    /// Sample size for single-n experiments.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    #[serde(rename = "R", default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub x_grid: XGrid,
    #[serde(default)]
    pub k_max: KMaxPolicy,
    /// Fixed projection dimension for `estimate` (oracle `k*` if absent).
    #[serde(default)]
    pub k: Option<usize>,
    /// Coefficient range for `coeffs`.
    #[serde(rename = "J", default)]
    pub max_index: Option<usize>,
    #[serde(default)]
    pub penalty_scale: PenaltyScale,
    #[serde(default)]
    pub class: Option<FunctionClass>,
    /// `ε` of the sup-abs and integrated bounds.
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Scales for `bounds-table`.
    #[serde(default = "default_upsilon")]
    pub upsilon: Vec<f64>,
    #[serde(default)]
    pub c1: Option<f64>,
    #[serde(default)]
    pub c3: Option<f64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_threads")]
    pub threads: usize,
}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Empty config for `experiment`; fields are filled by the caller.
    pub fn new(experiment: Experiment) -> Self {
        Self::from_json(&format!(r#"{{"experiment":"{}"}}"#, experiment.name())).expect("minimal config parses")
    }

    pub fn experiment(&self) -> Result<Experiment> {
        self.experiment.ok_or_else(|| Error::Config("no experiment selected".into()))
    }

    pub fn c1(&self) -> f64 {
        self.c1.unwrap_or(DEFAULT_C1)
    }

    pub fn c3(&self) -> f64 {
        self.c3.unwrap_or(DEFAULT_C3)
    }

    pub fn model(&self) -> Result<&IntensityModel> {
        self.model.as_ref().ok_or_else(|| Error::Config("`model` is required".into()))
    }

    pub fn gamma(&self) -> Result<&GammaSequence> {
        self.gamma.as_ref().ok_or_else(|| Error::Config("`gamma` is required".into()))
    }

    pub fn n(&self) -> Result<usize> {
        match self.n {
            Some(n) if n >= 1 => Ok(n),
            Some(_) => cfg_err("`n` must be at least 1"),
            None => cfg_err("`n` is required"),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Hex SHA-256 of the canonical JSON form, excluding `threads` and `out_dir`
    /// since neither affects results.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.threads = 1;
        canon.out_dir = None;
        let json = serde_json::to_string(&canon).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Checks every field the selected experiment needs.
    pub fn validate(&self) -> Result<()> {
        let exp = self.experiment()?;
        if self.threads == 0 {
            return cfg_err("`threads` must be at least 1");
        }
        if self.reps == 0 {
            return cfg_err("`R` must be at least 1");
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return cfg_err("`eps` must be positive");
        }
        for (name, v) in [("c1", self.c1), ("c3", self.c3)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return cfg_err(format!("`{name}` must be positive"));
                }
            }
        }
        if let Some(g) = &self.gamma {
            g.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        let xs = self.x_grid.values();
        if xs.is_empty() || xs.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return cfg_err("`x_grid` must be a nonempty list of nonnegative numbers");
        }
        if let XGrid::Range { step, .. } = self.x_grid {
            if !(step > 0.0) {
                return cfg_err("`x_grid.step` must be positive");
            }
        }
        match exp {
            Experiment::Simulate | Experiment::Coeffs | Experiment::Adapt => {
                self.model()?;
                self.n()?;
            }
            Experiment::Estimate => {
                self.model()?;
                self.n()?;
                if self.k.is_none() {
                    self.gamma()?;
                }
            }
            Experiment::Risk => {
                self.model()?;
                self.gamma()?;
                if self.n_grid.is_empty() || self.n_grid.contains(&0) {
                    return cfg_err("`n_grid` must be a nonempty list of positive integers");
                }
            }
            Experiment::Conc => {
                self.model()?;
                self.n()?;
                if self.class.is_none() {
                    return cfg_err("`class` is required");
                }
                if self.reps < MIN_REPS {
                    return cfg_err(format!(
                        "`R` = {} is below {MIN_REPS}; tail standard errors would be too large",
                        self.reps
                    ));
                }
            }
            Experiment::BoundsTable => {
                if self.upsilon.is_empty() || self.upsilon.iter().any(|&u| !(u > 0.0 && u.is_finite())) {
                    return cfg_err("`upsilon` must be a nonempty list of positive numbers");
                }
                if self.model.is_some() && (self.n_grid.is_empty() || self.n_grid.contains(&0)) {
                    return cfg_err("integrated bound table needs a positive `n_grid`");
                }
                if self.model.is_some() && self.k.is_none() {
                    self.gamma()?;
                }
            }
        }
        Ok(())
    }
}
