//! JSON run configuration shared by every subcommand.
//!
//! Values are resolved in this order, first match wins: command-line flag,
//! `TUMORDDE_OUT_DIR` (output directory only), config file, built-in default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tumordde_core::dde::History;
use tumordde_core::{ChemoForcing, Model, ModelParams, State};

use crate::error::CliError;

pub const OUT_DIR_ENV: &str = "TUMORDDE_OUT_DIR";

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub r: f64,
    pub beta: f64,
    #[serde(default)]
    pub b_hat: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub eta: f64,
    pub p: f64,
    pub m: f64,
    pub g: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub tau1: f64,
    #[serde(default)]
    pub tau2: f64,
}

/// `b(t) = b0 + eps cos(2πt/q)`, or `b0 + values` sampled uniformly over `q`.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ChemoConfig {
    pub b0: Option<f64>,
    #[serde(default)]
    pub eps: f64,
    pub q: Option<f64>,
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriaConfig {
    pub a_threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub t_end: Option<f64>,
    pub h: Option<f64>,
    /// Constant history `[T, E]`.
    pub initial: Option<[f64; 2]>,
    /// Tabulated history rows `[s, T, E]`, `s` increasing to `0`.
    pub history: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchingConfig {
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub s_max: Option<i32>,
    pub k_max: Option<i32>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuationConfig {
    pub omega: Option<f64>,
    pub eps: Option<f64>,
    /// `"interior"` or `"tumor-free"`.
    pub equilibrium: Option<String>,
    pub eps_max: Option<f64>,
    pub tau_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    #[serde(default)]
    pub chemo: Option<ChemoConfig>,
    #[serde(default)]
    pub equilibria: EquilibriaConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub switching: SwitchingConfig,
    #[serde(default)]
    pub continuation: ContinuationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn model_params(&self) -> ModelParams {
        let p = &self.params;
        ModelParams {
            r: p.r,
            beta: p.beta,
            b_hat: p.b_hat,
            gamma: p.gamma,
            sigma: p.sigma,
            eta: p.eta,
            p: p.p,
            m: p.m,
            g: p.g,
            a: p.a,
            tau1: p.tau1,
            tau2: p.tau2,
        }
    }

    /// Model with optional delay overrides.
    pub fn model(&self, tau1: Option<f64>, tau2: Option<f64>) -> Result<Model, CliError> {
        let mut mp = self.model_params();
        if let Some(t) = tau1 {
            mp.tau1 = t;
        }
        if let Some(t) = tau2 {
            mp.tau2 = t;
        }
        Ok(mp.validated()?)
    }

    /// Forcing from the `chemo` section; absent means `b(t) ≡ b̂`.
    pub fn forcing(&self) -> Result<ChemoForcing, CliError> {
        let b_hat = self.params.b_hat;
        let Some(c) = &self.chemo else {
            return Ok(ChemoForcing::constant(b_hat));
        };
        let b0 = c.b0.unwrap_or(b_hat);
        if b0 != b_hat {
            return Err(CliError::Usage(format!(
                "chemo.b0 = {b0} conflicts with params.b_hat = {b_hat}"
            )));
        }
        match (&c.values, c.q) {
            (Some(_), _) if c.eps != 0.0 => Err(CliError::Usage(
                "chemo.eps and chemo.values are mutually exclusive".into(),
            )),
            (Some(values), Some(q)) => Ok(ChemoForcing::tabulated(b0, q, values.clone())?),
            (Some(_), None) => Err(CliError::Usage("chemo.values needs chemo.q".into())),
            (None, Some(q)) => Ok(ChemoForcing::cosine(b0, c.eps, q)?),
            (None, None) if c.eps == 0.0 => Ok(ChemoForcing::constant(b0)),
            (None, None) => Err(CliError::Usage("chemo.eps needs chemo.q".into())),
        }
    }

    pub fn history(&self, default: State) -> Result<History, CliError> {
        let s = &self.simulate;
        match (&s.initial, &s.history) {
            (Some(_), Some(_)) => Err(CliError::Usage(
                "simulate.initial and simulate.history are mutually exclusive".into(),
            )),
            (Some([t, e]), None) => Ok(History::constant(State::new(*t, *e))?),
            (None, Some(rows)) => {
                let times = rows.iter().map(|r| r[0]).collect();
                let states = rows.iter().map(|r| State::new(r[1], r[2])).collect();
                Ok(History::tabulated(times, states)?)
            }
            (None, None) => Ok(History::constant(default)?),
        }
    }

    /// Output directory: flag, then environment, then config, then `.`.
    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(d) = flag {
            return d.to_path_buf();
        }
        if let Some(d) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(d);
        }
        self.output
            .dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn format(&self, flag: Option<Format>, default: Format) -> Format {
        flag.or(self.output.format).unwrap_or(default)
    }
}
