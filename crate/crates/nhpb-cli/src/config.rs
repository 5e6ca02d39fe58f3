//! Scan configuration: a single JSON document, validated fail-closed.
//!
//! Unknown keys are rejected everywhere so a typo in a physics parameter
//! cannot silently fall back to a default.

use nhpb_core::hamiltonian::{DriveSpec, ModelKind, ModelParams};
use nhpb_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Pseudo-parameter name addressing the laser detuning `Δω_L` as a scan
/// axis. All other axis names refer to model parameters.
pub const LASER_AXIS: &str = "delta_omega_L";

/// Relative disagreement between the Born-series g² and the master-equation
/// oracle above which a row is flagged when oracle checking is enabled.
pub const ORACLE_G2_REL_TOL: f64 = 1e-2;

/// One linear scan axis. Grid values are `from + (to-from)·i/(steps-1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        let span = self.to - self.from;
        (0..self.steps).map(|i| self.from + span * i as f64 / (self.steps - 1) as f64).collect()
    }
}

/// Requested observable columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputKind {
    #[serde(rename = "I")]
    Intensity,
    #[serde(rename = "g2")]
    G2,
    #[serde(rename = "g3")]
    G3,
    /// Widths of the selected chain states p₁, p₂.
    #[serde(rename = "eigs")]
    Eigs,
    /// Broad-mode occupation of the chain states (hybrid only).
    #[serde(rename = "components")]
    Components,
    #[serde(rename = "two_state")]
    TwoState,
    #[serde(rename = "tampered")]
    Tampered,
    /// Closed-form g² reference (resonance law or second-order law).
    #[serde(rename = "analytic")]
    Analytic,
    /// Blockade-threshold coupling `d` from the loss-matching condition
    /// (hybrid only).
    #[serde(rename = "threshold")]
    Threshold,
}

/// Per-row cross-check of g² against the master-equation solver.
///
/// `omega` and `n_max` fall back to the model defaults (drive two orders
/// below the smallest decay rate, truncation per `TruncationSpec`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[derive(Default)]
pub struct OracleSettings {
    pub enabled: bool,
    pub omega: Option<f64>,
    pub n_max: Option<Vec<u32>>,
}

/// Ties one model parameter to a fixed multiple of an axis value, applied
/// at every grid point before evaluation (e.g. co-varying two couplings).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    /// Parameter overwritten at each grid point.
    pub param: String,
    /// Axis parameter supplying the source value.
    pub follows: String,
    /// `param = ratio · follows`.
    pub ratio: f64,
}

/// A full scan description; the on-disk format is this struct as JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub model: ModelKind,
    /// Parameter record for `model`, deferred so the same config type
    /// serves both models.
    pub params: serde_json::Value,
    pub drive: DriveSpec,
    #[serde(default)]
    pub axes: Vec<AxisSpec>,
    #[serde(default)]
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub oracle: OracleSettings,
    #[serde(default)]
    pub links: Vec<LinkSpec>,
}

impl ScanConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config parse: {e}")))
    }

    /// Parses the deferred parameter record against the declared model.
    pub fn base_params(&self) -> Result<ModelParams> {
        let parsed = match self.model {
            ModelKind::Quadratic => {
                serde_json::from_value(self.params.clone()).map(ModelParams::Quadratic)
            }
            ModelKind::Hybrid => {
                serde_json::from_value(self.params.clone()).map(ModelParams::Hybrid)
            }
        };
        parsed.map_err(|e| Error::InvalidConfig(format!("params: {e}")))
    }

    /// Full validation; returns the parsed base parameters on success.
    pub fn validate(&self) -> Result<ModelParams> {
        let base = self.base_params()?;
        base.validate()?;
        self.drive.validate(&base)?;

        if self.axes.len() > 2 {
            return Err(Error::InvalidConfig(format!(
                "at most 2 axes are supported, got {}",
                self.axes.len()
            )));
        }
        let known = ModelParams::param_names(self.model);
        let axis_ok = |name: &str| name == LASER_AXIS || known.contains(&name);
        for (i, axis) in self.axes.iter().enumerate() {
            if !axis_ok(&axis.param) {
                return Err(Error::InvalidConfig(format!(
                    "axes[{i}]: unknown parameter '{}' for the {:?} model",
                    axis.param, self.model
                )));
            }
            if axis.steps < 2 {
                return Err(Error::InvalidConfig(format!(
                    "axes[{i}]: steps must be at least 2, got {}",
                    axis.steps
                )));
            }
            if !axis.from.is_finite() || !axis.to.is_finite() || axis.from >= axis.to {
                return Err(Error::InvalidConfig(format!(
                    "axes[{i}]: need finite from < to, got [{}, {}]",
                    axis.from, axis.to
                )));
            }
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::InvalidConfig(format!("both axes scan '{}'", self.axes[0].param)));
        }

        for (i, link) in self.links.iter().enumerate() {
            if !known.contains(&link.param.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "links[{i}]: unknown parameter '{}'",
                    link.param
                )));
            }
            if !self.axes.iter().any(|a| a.param == link.follows) {
                return Err(Error::InvalidConfig(format!(
                    "links[{i}]: '{}' must follow a scan axis, got '{}'",
                    link.param, link.follows
                )));
            }
            if self.axes.iter().any(|a| a.param == link.param) {
                return Err(Error::InvalidConfig(format!(
                    "links[{i}]: '{}' is already a scan axis",
                    link.param
                )));
            }
            if !link.ratio.is_finite() {
                return Err(Error::InvalidConfig(format!("links[{i}]: ratio must be finite")));
            }
        }

        for out in &self.outputs {
            let hybrid_only = matches!(out, OutputKind::Components | OutputKind::Threshold);
            if hybrid_only && self.model != ModelKind::Hybrid {
                return Err(Error::InvalidConfig(format!(
                    "output {out:?} is defined for the hybrid model only"
                )));
            }
        }

        if self.oracle.enabled {
            if let Some(omega) = self.oracle.omega {
                if !(omega.is_finite() && omega > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "oracle.omega must be finite and positive, got {omega}"
                    )));
                }
            }
            if let Some(n_max) = &self.oracle.n_max {
                if n_max.len() != 2 || n_max.iter().any(|&n| n < 2) {
                    return Err(Error::InvalidConfig(
                        "oracle.n_max needs one entry of at least 2 per bosonic mode".into(),
                    ));
                }
            }
        }

        Ok(base)
    }

    /// Number of grid points (1 for an axis-free single-point scan).
    pub fn grid_len(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }
}
