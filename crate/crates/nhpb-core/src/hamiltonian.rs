//! Model parameters and non-Hermitian manifold Hamiltonians.
//!
//! Two lossy models are supported, both expressed in a frame rotating at the
//! frequency origin so that only detunings appear:
//!
//! * **Quadratic**: a broad auxiliary mode `a` (weight 2) parametrically
//!   converting photon pairs of a narrow mode `b` (weight 1, the frequency
//!   origin) through `g (a† b² + (b†)² a)`.
//! * **Hybrid**: a two-level emitter coupled to a narrow mode (index 0, the
//!   frequency origin) and a broad mode (index 1), the two modes coupled
//!   directly by `d (a_1† a_2 + a_2† a_1)`.
//!
//! Decay enters as `-i γ/2` per quantum on the diagonal, which makes every
//! manifold block complex-symmetric in the canonical occupation basis.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    enumerate_manifold, operator_block, ManifoldBasis, ModeLayout, OperatorSpec, PrimitiveOp,
};
use crate::linalg::CMatrix;

/// Parameters of the quadratic two-mode model. `gamma_a` is the unit rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticParams {
    /// Decay rate of the broad conversion mode `a`.
    pub gamma_a: f64,
    /// Decay rate of the narrow mode `b`; must not exceed `gamma_a`.
    pub gamma_b: f64,
    /// Two-photon conversion amplitude.
    pub g: f64,
    /// Detuning of mode `a` from exact two-photon resonance.
    #[serde(default)]
    pub delta_a: f64,
}

impl QuadraticParams {
    pub fn layout() -> ModeLayout {
        ModeLayout::new(false, &[2, 1])
    }

    pub fn validate(&self) -> Result<()> {
        if !positive_finite(self.gamma_a) || !positive_finite(self.gamma_b) {
            return Err(Error::InvalidParameter(
                "quadratic model requires gamma_a > 0 and gamma_b > 0".into(),
            ));
        }
        if self.gamma_b > self.gamma_a {
            return Err(Error::InvalidParameter(
                "quadratic model requires gamma_b <= gamma_a".into(),
            ));
        }
        if !non_negative_finite(self.g) {
            return Err(Error::InvalidParameter("coupling g must be non-negative".into()));
        }
        if !self.delta_a.is_finite() {
            return Err(Error::InvalidParameter("delta_a must be finite".into()));
        }
        Ok(())
    }
}

/// Rejects NaN and infinities along with the sign; rate and coupling checks
/// must not let non-finite values poison the spectra.
fn positive_finite(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

fn non_negative_finite(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

/// Parameters of the hybrid emitter + two-mode model. `gamma_2` is the unit
/// rate; mode 1 (index 0) is the frequency origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridParams {
    /// Emitter decay rate (may be zero).
    pub gamma_e: f64,
    /// Narrow-mode decay rate (may be zero).
    pub gamma_1: f64,
    /// Broad-mode decay rate; the unit rate, strictly positive.
    pub gamma_2: f64,
    /// Emitter coupling to the narrow mode.
    pub g_1: f64,
    /// Emitter coupling to the broad mode.
    pub g_2: f64,
    /// Direct mode-mode coupling.
    pub d: f64,
    /// Emitter detuning from the narrow mode.
    #[serde(default)]
    pub delta_e: f64,
    /// Broad-mode detuning from the narrow mode.
    #[serde(default)]
    pub delta_2: f64,
}

impl HybridParams {
    pub fn layout() -> ModeLayout {
        ModeLayout::new(true, &[1, 1])
    }

    pub fn validate(&self) -> Result<()> {
        if !positive_finite(self.gamma_2) {
            return Err(Error::InvalidParameter("hybrid model requires gamma_2 > 0".into()));
        }
        if !non_negative_finite(self.gamma_e) || !non_negative_finite(self.gamma_1) {
            return Err(Error::InvalidParameter("decay rates must be non-negative".into()));
        }
        if !non_negative_finite(self.g_1)
            || !non_negative_finite(self.g_2)
            || !non_negative_finite(self.d)
        {
            return Err(Error::InvalidParameter(
                "couplings g_1, g_2, d must be non-negative".into(),
            ));
        }
        if !self.delta_e.is_finite() || !self.delta_2.is_finite() {
            return Err(Error::InvalidParameter("detunings must be finite".into()));
        }
        Ok(())
    }
}

/// Which model a set of parameters belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Quadratic,
    Hybrid,
}

/// Parameters of either model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelParams {
    Quadratic(QuadraticParams),
    Hybrid(HybridParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Quadratic(_) => ModelKind::Quadratic,
            ModelParams::Hybrid(_) => ModelKind::Hybrid,
        }
    }

    pub fn layout(&self) -> ModeLayout {
        match self {
            ModelParams::Quadratic(_) => QuadraticParams::layout(),
            ModelParams::Hybrid(_) => HybridParams::layout(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelParams::Quadratic(p) => p.validate(),
            ModelParams::Hybrid(p) => p.validate(),
        }
    }

    pub fn basis(&self, q: u32) -> ManifoldBasis {
        enumerate_manifold(&self.layout(), q)
    }

    /// Maps a drive target to a bosonic mode index of this model's layout.
    pub fn target_mode_index(&self, t: DriveTarget) -> Option<usize> {
        match (self, t) {
            (ModelParams::Quadratic(_), DriveTarget::Narrow) => Some(1),
            (ModelParams::Quadratic(_), DriveTarget::Broad) => Some(0),
            (ModelParams::Hybrid(_), DriveTarget::Narrow) => Some(0),
            (ModelParams::Hybrid(_), DriveTarget::Broad) => Some(1),
            (_, DriveTarget::Emitter) => None,
        }
    }

    /// Overwrites one named parameter; returns false for unknown names.
    pub fn set_named_param(&mut self, name: &str, value: f64) -> bool {
        match self {
            ModelParams::Quadratic(p) => match name {
                "gamma_a" => p.gamma_a = value,
                "gamma_b" => p.gamma_b = value,
                "g" => p.g = value,
                "delta_a" => p.delta_a = value,
                _ => return false,
            },
            ModelParams::Hybrid(p) => match name {
                "gamma_e" => p.gamma_e = value,
                "gamma_1" => p.gamma_1 = value,
                "gamma_2" => p.gamma_2 = value,
                "g_1" => p.g_1 = value,
                "g_2" => p.g_2 = value,
                "d" => p.d = value,
                "delta_e" => p.delta_e = value,
                "delta_2" => p.delta_2 = value,
                _ => return false,
            },
        }
        true
    }

    /// Parameter names accepted by [`Self::set_named_param`].
    pub fn param_names(kind: ModelKind) -> &'static [&'static str] {
        match kind {
            ModelKind::Quadratic => &["gamma_a", "gamma_b", "g", "delta_a"],
            ModelKind::Hybrid => {
                &["gamma_e", "gamma_1", "gamma_2", "g_1", "g_2", "d", "delta_e", "delta_2"]
            }
        }
    }
}

/// Degree of freedom addressed by the pump or the detector.
///
/// `Narrow` is mode `b` of the quadratic model and mode 1 of the hybrid
/// model; `Broad` the respective lossy partner. `Emitter` is accepted by the
/// master-equation oracle but rejected by scan validation, where targets must
/// be bosonic modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveTarget {
    Narrow,
    Broad,
    Emitter,
}

/// Pump and detection channels plus the base laser detuning.
///
/// `omega_l_detuning` stores `Δω_L = ω_origin - ω_L`, the sign convention of
/// the plotted spectra. The opposite sign (the laser offset above the origin)
/// enters resolvents; [`detuned_hamiltonian`] takes that offset, and the
/// conversion happens in exactly one place, in the correlation evaluators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub pump_target: DriveTarget,
    pub detect_target: DriveTarget,
    #[serde(rename = "omega_L_detuning", default)]
    pub omega_l_detuning: f64,
}

impl DriveSpec {
    /// Both targets pointed at the narrow mode, laser on the origin.
    pub fn narrow_mode() -> Self {
        DriveSpec {
            pump_target: DriveTarget::Narrow,
            detect_target: DriveTarget::Narrow,
            omega_l_detuning: 0.0,
        }
    }

    /// Scan-level validation: targets must resolve to bosonic modes.
    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        for (label, t) in [("pump_target", self.pump_target), ("detect_target", self.detect_target)]
        {
            if params.target_mode_index(t).is_none() {
                return Err(Error::InvalidConfig(format!("{label} must address a bosonic mode")));
            }
        }
        if !self.omega_l_detuning.is_finite() {
            return Err(Error::InvalidConfig("omega_L_detuning must be finite".into()));
        }
        Ok(())
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Assembles the non-Hermitian Hamiltonian block of excitation manifold `q`.
///
/// The result is complex-symmetric in the canonical basis; its diagonal
/// carries `-i/2` times the accumulated decay rate of each occupation state.
pub fn build_manifold_hamiltonian(params: &ModelParams, q: u32) -> CMatrix {
    let basis = params.basis(q);
    build_in_basis(params, &basis)
}

/// Same as [`build_manifold_hamiltonian`] but reusing an enumerated basis.
pub fn build_in_basis(params: &ModelParams, basis: &ManifoldBasis) -> CMatrix {
    let block =
        |op: OperatorSpec| operator_block(&op, basis, basis).expect("manifold-preserving term");
    let mut h = CMatrix::zeros(basis.dim(), basis.dim());
    match params {
        ModelParams::Quadratic(p) => {
            let n_a = block(OperatorSpec::single(PrimitiveOp::Number(0)));
            let n_b = block(OperatorSpec::single(PrimitiveOp::Number(1)));
            let convert_up = block(OperatorSpec::new(vec![
                PrimitiveOp::Raise(0),
                PrimitiveOp::Lower(1),
                PrimitiveOp::Lower(1),
            ]));
            let convert_down = block(OperatorSpec::new(vec![
                PrimitiveOp::Raise(1),
                PrimitiveOp::Raise(1),
                PrimitiveOp::Lower(0),
            ]));
            h = h.add(&n_a.scale(c(p.delta_a, -0.5 * p.gamma_a)));
            h = h.add(&n_b.scale(c(0.0, -0.5 * p.gamma_b)));
            h = h.add(&convert_up.add(&convert_down).scale(c(p.g, 0.0)));
        }
        ModelParams::Hybrid(p) => {
            let p_e =
                block(OperatorSpec::new(vec![PrimitiveOp::SigmaPlus, PrimitiveOp::SigmaMinus]));
            let n_1 = block(OperatorSpec::single(PrimitiveOp::Number(0)));
            let n_2 = block(OperatorSpec::single(PrimitiveOp::Number(1)));
            h = h.add(&p_e.scale(c(p.delta_e, -0.5 * p.gamma_e)));
            h = h.add(&n_1.scale(c(0.0, -0.5 * p.gamma_1)));
            h = h.add(&n_2.scale(c(p.delta_2, -0.5 * p.gamma_2)));
            for (gn, mode) in [(p.g_1, 0usize), (p.g_2, 1usize)] {
                let up = block(OperatorSpec::new(vec![
                    PrimitiveOp::SigmaPlus,
                    PrimitiveOp::Lower(mode),
                ]));
                let down = block(OperatorSpec::new(vec![
                    PrimitiveOp::Raise(mode),
                    PrimitiveOp::SigmaMinus,
                ]));
                h = h.add(&up.add(&down).scale(c(gn, 0.0)));
            }
            let hop = block(OperatorSpec::new(vec![PrimitiveOp::Raise(0), PrimitiveOp::Lower(1)]));
            let hop_back =
                block(OperatorSpec::new(vec![PrimitiveOp::Raise(1), PrimitiveOp::Lower(0)]));
            h = h.add(&hop.add(&hop_back).scale(c(p.d, 0.0)));
        }
    }
    h
}

/// Shifts a manifold block into the frame of the driving laser:
/// `H_q - q * laser_offset * I`, where `laser_offset = ω_L - ω_origin`.
///
/// Note the sign: for a spectrum plotted against `Δω_L = ω_origin - ω_L`,
/// pass `laser_offset = -Δω_L`.
pub fn detuned_hamiltonian(h_q: &CMatrix, q: u32, laser_offset: f64) -> CMatrix {
    h_q.add_scaled_identity(c(-(f64::from(q)) * laser_offset, 0.0))
}

/// Literal transcriptions of the one- and two-excitation hybrid matrices,
/// kept as an independent cross-check of the generic assembly above. Entries
/// are typed out state by state; detunings generalize the degenerate case by
/// carrying each state's frequency relative to the narrow mode.
pub fn reference_matrices_hybrid(p: &HybridParams) -> (CMatrix, CMatrix) {
    let r2 = 2.0f64.sqrt();
    // basis {σ+|0>, a1†|0>, a2†|0>}
    let h1 = CMatrix::from_rows(&[
        vec![c(p.delta_e, -0.5 * p.gamma_e), c(p.g_1, 0.0), c(p.g_2, 0.0)],
        vec![c(p.g_1, 0.0), c(0.0, -0.5 * p.gamma_1), c(p.d, 0.0)],
        vec![c(p.g_2, 0.0), c(p.d, 0.0), c(p.delta_2, -0.5 * p.gamma_2)],
    ]);
    // basis {σ+a1†|0>, σ+a2†|0>, (a1†)²/√2|0>, a1†a2†|0>, (a2†)²/√2|0>}
    let h2 = CMatrix::from_rows(&[
        vec![
            c(p.delta_e, -0.5 * (p.gamma_e + p.gamma_1)),
            c(p.d, 0.0),
            c(r2 * p.g_1, 0.0),
            c(p.g_2, 0.0),
            c(0.0, 0.0),
        ],
        vec![
            c(p.d, 0.0),
            c(p.delta_e + p.delta_2, -0.5 * (p.gamma_e + p.gamma_2)),
            c(0.0, 0.0),
            c(p.g_1, 0.0),
            c(r2 * p.g_2, 0.0),
        ],
        vec![c(r2 * p.g_1, 0.0), c(0.0, 0.0), c(0.0, -p.gamma_1), c(r2 * p.d, 0.0), c(0.0, 0.0)],
        vec![
            c(p.g_2, 0.0),
            c(p.g_1, 0.0),
            c(r2 * p.d, 0.0),
            c(p.delta_2, -0.5 * (p.gamma_1 + p.gamma_2)),
            c(r2 * p.d, 0.0),
        ],
        vec![
            c(0.0, 0.0),
            c(r2 * p.g_2, 0.0),
            c(0.0, 0.0),
            c(r2 * p.d, 0.0),
            c(2.0 * p.delta_2, -p.gamma_2),
        ],
    ]);
    (h1, h2)
}

/// Diagonal block of the photon-number operator of `mode` on a manifold.
pub fn number_block(basis: &ManifoldBasis, mode: usize) -> CMatrix {
    operator_block(&OperatorSpec::single(PrimitiveOp::Number(mode)), basis, basis)
        .expect("number operator preserves excitation")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hybrid_example() -> HybridParams {
        HybridParams {
            gamma_e: 1e-5,
            gamma_1: 1e-3,
            gamma_2: 1.0,
            g_1: 0.0,
            g_2: 1.0 / 15.0,
            d: 0.1,
            delta_e: 0.0,
            delta_2: 0.0,
        }
    }

    #[test]
    fn quadratic_single_excitation_block() {
        let p = QuadraticParams { gamma_a: 1.0, gamma_b: 1e-3, g: 0.05, delta_a: 0.0 };
        let h = build_manifold_hamiltonian(&ModelParams::Quadratic(p), 1);
        assert_eq!(h.nrows(), 1);
        assert!((h[(0, 0)] - C64::new(0.0, -0.5e-3)).norm() < 1e-18);
    }

    #[test]
    fn quadratic_two_excitation_block_is_textbook() {
        let p = QuadraticParams { gamma_a: 1.0, gamma_b: 1e-3, g: 0.05, delta_a: 0.2 };
        let h = build_manifold_hamiltonian(&ModelParams::Quadratic(p), 2);
        assert_eq!(h.nrows(), 2);
        // basis ordering: (n_a, n_b) = (1,0), (0,2)
        assert!((h[(0, 0)] - C64::new(0.2, -0.5)).norm() < 1e-15);
        assert!((h[(1, 1)] - C64::new(0.0, -1e-3)).norm() < 1e-18);
        let coup = 2.0f64.sqrt() * 0.05;
        assert!((h[(0, 1)] - C64::new(coup, 0.0)).norm() < 1e-15);
        assert!((h[(1, 0)] - C64::new(coup, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hybrid_blocks_match_reference_transcription() {
        let mut p = hybrid_example();
        p.g_1 = 0.02;
        p.delta_e = -0.3;
        p.delta_2 = 0.7;
        let mp = ModelParams::Hybrid(p);
        let (r1, r2) = reference_matrices_hybrid(&p);
        let h1 = build_manifold_hamiltonian(&mp, 1);
        let h2 = build_manifold_hamiltonian(&mp, 2);
        assert!(h1.sub(&r1).max_abs() < 1e-15 * (1.0 + r1.max_abs()));
        assert!(h2.sub(&r2).max_abs() < 1e-15 * (1.0 + r2.max_abs()));
    }

    #[test]
    fn assembled_blocks_are_exactly_symmetric() {
        let mp = ModelParams::Hybrid(hybrid_example());
        for q in 1..=3u32 {
            assert_eq!(build_manifold_hamiltonian(&mp, q).max_asymmetry(), 0.0, "q = {q}");
        }
        let qp = QuadraticParams { gamma_a: 2.0, gamma_b: 0.4, g: 0.3, delta_a: -0.8 };
        for q in 1..=3u32 {
            let h = build_manifold_hamiltonian(&ModelParams::Quadratic(qp), q);
            assert_eq!(h.max_asymmetry(), 0.0, "q = {q}");
        }
    }

    #[test]
    fn laser_shift_moves_the_diagonal() {
        let mp = ModelParams::Hybrid(hybrid_example());
        let h1 = build_manifold_hamiltonian(&mp, 1);
        let shifted = detuned_hamiltonian(&h1, 1, 0.1);
        for i in 0..3 {
            assert!((shifted[(i, i)] - h1[(i, i)] + C64::new(0.1, 0.0)).norm() < 1e-15);
        }
        let h2 = build_manifold_hamiltonian(&mp, 2);
        let shifted2 = detuned_hamiltonian(&h2, 2, 0.1);
        assert!((shifted2[(0, 0)] - h2[(0, 0)] + C64::new(0.2, 0.0)).norm() < 1e-15);
        // off-diagonals untouched
        assert!((shifted2[(0, 1)] - h2[(0, 1)]).norm() == 0.0);
    }

    #[test]
    fn drive_targets_resolve_per_model() {
        let qp = ModelParams::Quadratic(QuadraticParams {
            gamma_a: 1.0,
            gamma_b: 0.1,
            g: 0.0,
            delta_a: 0.0,
        });
        let hp = ModelParams::Hybrid(hybrid_example());
        assert_eq!(qp.target_mode_index(DriveTarget::Narrow), Some(1));
        assert_eq!(qp.target_mode_index(DriveTarget::Broad), Some(0));
        assert_eq!(hp.target_mode_index(DriveTarget::Narrow), Some(0));
        assert_eq!(hp.target_mode_index(DriveTarget::Broad), Some(1));
        assert_eq!(hp.target_mode_index(DriveTarget::Emitter), None);
        let drive = DriveSpec { pump_target: DriveTarget::Emitter, ..DriveSpec::narrow_mode() };
        assert!(drive.validate(&hp).is_err());
        assert!(DriveSpec::narrow_mode().validate(&hp).is_ok());
    }

    #[test]
    fn invalid_rates_are_rejected() {
        let p = QuadraticParams { gamma_a: 1.0, gamma_b: 2.0, g: 0.1, delta_a: 0.0 };
        assert!(p.validate().is_err());
        let p = QuadraticParams { gamma_a: 1.0, gamma_b: 0.0, g: 0.1, delta_a: 0.0 };
        assert!(p.validate().is_err());
        let mut h = hybrid_example();
        h.gamma_2 = 0.0;
        assert!(h.validate().is_err());
        let mut h = hybrid_example();
        h.gamma_e = 0.0;
        assert!(h.validate().is_ok(), "vanishing emitter decay is a valid regime");
        let mut h = hybrid_example();
        h.d = -0.1;
        assert!(h.validate().is_err());
    }
}
