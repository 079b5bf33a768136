//! Run configuration: one JSON document, with every CLI flag overriding a key.

use std::path::{Path, PathBuf};

use bcs_core::analysis::Axis;
use bcs_core::cloners::{Scheme, SchemeOptions, TapReceiver};
use bcs_core::discrimination::ReceiverKind;
use bcs_core::TruncationConfig;
use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Units {
    /// Mean photon number `|α|²`.
    NMean,
    /// Coherent amplitude `|α|`.
    Amplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub units: Units,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self { start: 0.0, stop: 3.0, points: 61, units: Units::NMean }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.points < 2 {
            return Err(CliError::Config(format!("grid needs at least 2 points, got {}", self.points)));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(CliError::Config(format!("grid start {} must be below stop {}", self.start, self.stop)));
        }
        if self.start < 0.0 {
            return Err(CliError::Config(format!("grid start {} is negative", self.start)));
        }
        Ok(())
    }

    /// Amplitudes of the grid points, in increasing order.
    pub fn amplitudes(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let v = if i + 1 == self.points { self.stop } else { self.start + step * i as f64 };
                match self.units {
                    Units::NMean => v.sqrt(),
                    Units::Amplitude => v,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Overrides each scheme's default number of starts.
    pub starts: Option<usize>,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { starts: None, seed: SchemeOptions::default().seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationOverrides {
    /// Fixed dimension; sized per state when absent.
    pub dim: Option<usize>,
    pub tail_tol: f64,
}

impl Default for TruncationOverrides {
    fn default() -> Self {
        Self { dim: None, tail_tol: TruncationConfig::DEFAULT_TAIL_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum WignerState {
    Vacuum,
    Coherent,
    CatEven,
    CatOdd,
    QubitBasis0,
    QubitBasis1,
    OptimalClone,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WignerConfig {
    pub state: WignerState,
    /// Operating point, in the units of the sweep grid.
    pub at: f64,
    pub points: usize,
    pub half_width: f64,
    /// Write `W_state - W_coherent` instead of `W_state`.
    pub diff: bool,
}

impl Default for WignerConfig {
    fn default() -> Self {
        Self { state: WignerState::OptimalClone, at: 0.5, points: 121, half_width: 4.5, diff: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: SweepGrid,
    /// Defaults depend on the subcommand.
    pub schemes: Option<Vec<Scheme>>,
    pub receiver: ReceiverKind,
    pub tap: TapReceiver,
    pub optimizer: OptimizerConfig,
    pub truncation: TruncationOverrides,
    pub axes: Vec<Axis>,
    pub wigner: WignerConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Seed for the Monte-Carlo homodyne check.
    pub seed: u64,
    /// Shots for the Monte-Carlo homodyne column; 0 disables it.
    pub mc_shots: u64,
    pub sequential: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let opts = SchemeOptions::default();
        Self {
            grid: SweepGrid::default(),
            schemes: None,
            receiver: opts.receiver,
            tap: opts.tap,
            optimizer: OptimizerConfig::default(),
            truncation: TruncationOverrides::default(),
            axes: vec![Axis::X, Axis::P],
            wigner: WignerConfig::default(),
            format: Format::Csv,
            out: None,
            seed: 0,
            mc_shots: 0,
            sequential: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn scheme_options(&self) -> SchemeOptions {
        SchemeOptions { receiver: self.receiver, tap: self.tap, seed: self.optimizer.seed, starts: self.optimizer.starts }
    }

    pub fn wigner_amplitude(&self) -> f64 {
        match self.grid.units {
            Units::NMean => self.wigner.at.sqrt(),
            Units::Amplitude => self.wigner.at,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.grid.validate()?;
        if self.truncation.dim.is_some_and(|d| d < 2) || !(self.truncation.tail_tol >= 0.0) {
            return Err(CliError::Config(format!("bad truncation {:?}", self.truncation)));
        }
        if self.optimizer.starts == Some(0) {
            return Err(CliError::Config("optimizer needs at least one start".into()));
        }
        let w = &self.wigner;
        if w.points < 2 || !(w.half_width > 0.0) || !(w.at >= 0.0) {
            return Err(CliError::Config(format!("bad wigner settings {w:?}")));
        }
        if self.axes.is_empty() {
            return Err(CliError::Config("no cumulant axes".into()));
        }
        Ok(())
    }
}

/// Parses a value by its JSON name, so flags and config keys share spellings.
pub fn parse_named<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}
