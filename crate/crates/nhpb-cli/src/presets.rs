//! Named figure presets: fully expanded scan configs for every dataset the
//! project reproduces.
//!
//! Shared base: hybrid model with γ₂ = 1 (the unit of rate), γ₁ = 10⁻³,
//! γ_e = 10⁻⁵, g₁ = 0, g₂ = 1/15, zero detunings, pump and detection on the
//! narrow mode. Axis ranges bracket all highlighted parameter values; they
//! are display-range decisions and are echoed in dataset metadata.

use crate::config::{AxisSpec, LinkSpec, OracleSettings, OutputKind, ScanConfig, LASER_AXIS};
use nhpb_core::hamiltonian::{DriveSpec, ModelKind};
use nhpb_core::{Error, Result};
use serde_json::json;

pub const PRESET_NAMES: &[&str] = &["fig2", "fig3", "figS1", "figS2", "figS3", "figS4", "figS5"];

fn hybrid_base(d: f64) -> serde_json::Value {
    json!({
        "gamma_e": 1e-5,
        "gamma_1": 1e-3,
        "gamma_2": 1.0,
        "g_1": 0.0,
        "g_2": 1.0 / 15.0,
        "d": d,
    })
}

fn laser_axis() -> AxisSpec {
    AxisSpec { param: LASER_AXIS.into(), from: -1.5, to: 1.5, steps: 301 }
}

fn coupling_axis(param: &str) -> AxisSpec {
    AxisSpec { param: param.into(), from: 0.0, to: 0.2, steps: 201 }
}

fn detuning_axis(param: &str) -> AxisSpec {
    AxisSpec { param: param.into(), from: -2.0, to: 2.0, steps: 201 }
}

fn preset(d: f64, axes: Vec<AxisSpec>, outputs: Vec<OutputKind>) -> ScanConfig {
    ScanConfig {
        model: ModelKind::Hybrid,
        params: hybrid_base(d),
        drive: DriveSpec::narrow_mode(),
        axes,
        outputs,
        oracle: OracleSettings::default(),
        links: vec![],
    }
}

/// Expands a preset name into its scan config.
///
/// The cavity-coupling value differs per dataset on purpose: the coupling
/// maps (fig2, figS2) scan d, the S1 map fixes d = 1/15, and the detuning
/// maps inherit d = 1/10 from the headline spectra.
pub fn figure_preset(name: &str) -> Result<ScanConfig> {
    use OutputKind::*;
    let cfg = match name {
        // g² and eigenstructure over the (d, Δω_L) plane.
        "fig2" => preset(0.1, vec![coupling_axis("d"), laser_axis()], vec![G2, Eigs, Components]),
        // Headline spectra: full, two-state, and width-tampered curves.
        "fig3" => preset(0.1, vec![laser_axis()], vec![Intensity, G2, G3, TwoState, Tampered]),
        // Emitter-plasmon coupling map at fixed cavity coupling.
        "figS1" => preset(
            1.0 / 15.0,
            vec![coupling_axis("g_2"), laser_axis()],
            vec![Intensity, G2, Eigs, Components],
        ),
        // Blockade region in the (g₂, d) plane plus the threshold line.
        "figS2" => preset(0.1, vec![coupling_axis("g_2"), coupling_axis("d")], vec![G2, Threshold]),
        // Co-varying emitter coupling: g₁ tied to d by the dipole ratio.
        "figS3" => {
            let mut cfg = preset(
                0.1,
                vec![coupling_axis("d"), laser_axis()],
                vec![Intensity, G2, Eigs, Components],
            );
            cfg.links =
                vec![LinkSpec { param: "g_1".into(), follows: "d".into(), ratio: 1.0 / 83.5 }];
            cfg
        }
        // Robustness against plasmon and emitter detuning.
        "figS4" => {
            preset(0.1, vec![detuning_axis("delta_2"), laser_axis()], vec![G2, Eigs, Components])
        }
        "figS5" => preset(
            0.1,
            vec![detuning_axis("delta_e"), laser_axis()],
            vec![Intensity, G2, Components],
        ),
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown preset '{other}' (known: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(cfg)
}
