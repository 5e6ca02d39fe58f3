//! Weak-drive intensity and photon correlations.
//!
//! Under a weak coherent drive the steady state expands in powers of the
//! drive amplitude, one excitation manifold per order:
//! `c_q = -(ΔH^(q))⁻¹ V↑ c_{q-1}` with `c_0` the vacuum. Emission amplitudes
//! follow by lowering back to the vacuum through the detect mode, and
//!
//! `I ∝ |A_1|²`, `g² = |A_2|²/|A_1|⁴`, `g³ = |A_3|²/|A_1|⁶`
//!
//! with `A_q = ⟨0|a_det^q c_q⟩`. Drive amplitude and detector efficiency
//! cancel in the normalized correlators; intensities are reported per
//! squared drive amplitude.
//!
//! Amplitudes come in two independent flavors: direct linear solves against
//! the assembled detuned blocks (the default route), and sums over
//! c-normalized eigenstates with resolvent denominators `Ẽ_j + qΔω_L` (the
//! spectral route). The two are algebraically identical; computing both is a
//! cross-check, and only the spectral form admits the two-state restriction
//! and the width-tampering diagnostic.

use num_complex::Complex64 as C64;

use crate::eigen::{decompose_symmetric, narrowest_accessible, Eigensystem};
use crate::error::{Error, Result};
use crate::fock::{operator_block, ManifoldBasis, OperatorSpec, PrimitiveOp, Q_MAX};
use crate::hamiltonian::{
    build_in_basis, detuned_hamiltonian, number_block, DriveSpec, HybridParams, ModelParams,
    QuadraticParams,
};
use crate::linalg::{c_dot, lu_factor, CMatrix};

/// Relative tolerance for the cross-check between the linear-solve and
/// eigenstate-sum amplitude routes.
pub const ROUTE_EQUIVALENCE_TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Manifold blocks and pump/detect operator blocks for one model and drive,
/// built once and reused across laser detunings.
pub struct ModelOperators {
    pub params: ModelParams,
    pub drive: DriveSpec,
    bases: Vec<ManifoldBasis>,
    /// Manifold Hamiltonians, `h[q]` on manifold q (index 0 is the 1x1 vacuum block).
    h: Vec<CMatrix>,
    /// Pump raising blocks, `pump_up[q]`: manifold q-1 -> q (index 0 unused).
    pump_up: Vec<CMatrix>,
    /// Detect lowering blocks, `detect_down[q]`: manifold q -> q-1 (index 0 unused).
    detect_down: Vec<CMatrix>,
}

impl ModelOperators {
    /// Builds all blocks up to the maximum supported excitation number.
    pub fn new(params: ModelParams, drive: DriveSpec) -> Result<Self> {
        params.validate()?;
        let pump_mode = params
            .target_mode_index(drive.pump_target)
            .ok_or_else(|| Error::InvalidConfig("pump target must be a bosonic mode".into()))?;
        let detect_mode = params
            .target_mode_index(drive.detect_target)
            .ok_or_else(|| Error::InvalidConfig("detect target must be a bosonic mode".into()))?;
        let bases: Vec<ManifoldBasis> = (0..=Q_MAX as u32).map(|q| params.basis(q)).collect();
        let mut h = Vec::with_capacity(bases.len());
        let mut pump_up = vec![CMatrix::zeros(1, 1)];
        let mut detect_down = vec![CMatrix::zeros(1, 1)];
        for (q, basis) in bases.iter().enumerate() {
            h.push(build_in_basis(&params, basis));
            if q > 0 {
                let raise = OperatorSpec::single(PrimitiveOp::Raise(pump_mode));
                let lower = OperatorSpec::single(PrimitiveOp::Lower(detect_mode));
                pump_up.push(operator_block(&raise, &bases[q - 1], basis)?);
                detect_down.push(operator_block(&lower, basis, &bases[q - 1])?);
            }
        }
        Ok(ModelOperators { params, drive, bases, h, pump_up, detect_down })
    }

    pub fn basis(&self, q: u32) -> &ManifoldBasis {
        &self.bases[q as usize]
    }

    pub fn hamiltonian(&self, q: u32) -> &CMatrix {
        &self.h[q as usize]
    }

    pub fn pump_block(&self, q: u32) -> &CMatrix {
        &self.pump_up[q as usize]
    }

    pub fn detect_block(&self, q: u32) -> &CMatrix {
        &self.detect_down[q as usize]
    }

    /// Row vector of `⟨0| a_det^q` on manifold q: the detect blocks composed
    /// down to the vacuum.
    fn detect_row(&self, q: u32) -> Vec<C64> {
        let mut row = self.detect_down[1].clone();
        for k in 2..=q {
            row = row.mul(&self.detect_down[k as usize]);
        }
        debug_assert_eq!(row.nrows(), 1);
        row.data().to_vec()
    }

    /// Eigensystems of manifolds 1..=q_max.
    pub fn eigensystems(&self, q_max: u32) -> Result<Vec<Eigensystem>> {
        (1..=q_max).map(|q| decompose_symmetric(&self.h[q as usize])).collect()
    }
}

/// Steady-state expansion coefficients per manifold, one order of the drive
/// amplitude each.
pub struct BornCoefficients {
    pub omega_l_detuning: f64,
    /// `c[q]` lives on manifold q; `c[0] = (1)`.
    pub c: Vec<Vec<C64>>,
}

/// Computes the expansion coefficients by direct linear solves.
///
/// The laser enters via `Δω_L = ω_origin - ω_L`; each manifold block is
/// shifted by `-q` times the laser offset `-Δω_L` (the one conversion point
/// between the plotted detuning and the rotating-frame offset).
pub fn born_coefficients(
    ops: &ModelOperators,
    omega_l_detuning: f64,
    q_max: u32,
) -> Result<BornCoefficients> {
    assert!(q_max as usize <= Q_MAX, "expansion implemented up to q = {Q_MAX}");
    let mut c: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0)]];
    for q in 1..=q_max {
        let dh = detuned_hamiltonian(ops.hamiltonian(q), q, -omega_l_detuning);
        let rhs_vec = ops.pump_block(q).mul_vec(&c[(q - 1) as usize]);
        let neg_rhs: Vec<C64> = rhs_vec.iter().map(|x| -x).collect();
        let lu = lu_factor(dh).map_err(|e| match e {
            Error::SingularMatrix { .. } => Error::SingularResolvent { manifold: q as usize },
            other => other,
        })?;
        c.push(lu.solve(&neg_rhs));
    }
    Ok(BornCoefficients { omega_l_detuning, c })
}

/// Vacuum-return amplitude of order q: `⟨0| a_det^q c_q`.
pub fn emission_amplitude(ops: &ModelOperators, bc: &BornCoefficients, q: u32) -> C64 {
    c_dot(&ops.detect_row(q), &bc.c[q as usize])
}

/// Relative intensity `|A_1|²` (units of squared drive amplitude).
pub fn intensity(ops: &ModelOperators, bc: &BornCoefficients) -> f64 {
    emission_amplitude(ops, bc, 1).norm_sqr()
}

/// Normalized zero-delay correlation of order n (2 or 3) from amplitudes.
fn normalized_correlation(a1: C64, an: C64, n: u32) -> Result<f64> {
    let i = a1.norm_sqr();
    if i == 0.0 {
        return Err(Error::ZeroIntensity);
    }
    Ok(an.norm_sqr() / i.powi(n as i32))
}

/// Intensity, g², and optionally g³ at one laser detuning via linear solves.
pub fn correlations_full(
    ops: &ModelOperators,
    omega_l_detuning: f64,
    with_g3: bool,
) -> Result<(f64, f64, Option<f64>)> {
    let q_max = if with_g3 { 3 } else { 2 };
    let bc = born_coefficients(ops, omega_l_detuning, q_max)?;
    let a1 = emission_amplitude(ops, &bc, 1);
    let a2 = emission_amplitude(ops, &bc, 2);
    let g2 = normalized_correlation(a1, a2, 2)?;
    let g3 = if with_g3 {
        Some(normalized_correlation(a1, emission_amplitude(ops, &bc, 3), 3)?)
    } else {
        None
    };
    Ok((a1.norm_sqr(), g2, g3))
}

/// How the spectral route treats eigenvalue widths.
enum WidthRule {
    /// Use the eigenvalues as they are.
    Exact,
    /// Replace every width in manifold q by `q` times this rate, keeping
    /// real parts and eigenvectors (the anharmonicity-removal diagnostic).
    Uniform(f64),
}

/// Resolvent denominator of eigenstate j in manifold q.
fn denominator(value: C64, q: u32, omega_l_detuning: f64, rule: &WidthRule) -> C64 {
    let shifted = match rule {
        WidthRule::Exact => value,
        WidthRule::Uniform(gamma_p1) => C64::new(value.re, -0.5 * f64::from(q) * gamma_p1),
    };
    shifted + C64::new(f64::from(q) * omega_l_detuning, 0.0)
}

/// Emission amplitudes per order computed from the eigenstate sums.
///
/// `restrict_to` optionally picks a single eigenstate index per manifold
/// (the few-state approximation); `None` sums everything.
fn spectral_amplitudes(
    ops: &ModelOperators,
    eigs: &[Eigensystem],
    omega_l_detuning: f64,
    q_max: u32,
    rule: &WidthRule,
    restrict_to: Option<&[usize]>,
) -> Result<Vec<C64>> {
    let mut amps = Vec::with_capacity(q_max as usize);
    let mut prev: Vec<C64> = vec![C64::new(1.0, 0.0)];
    for q in 1..=q_max {
        let eig = &eigs[(q - 1) as usize];
        let pumped = ops.pump_block(q).mul_vec(&prev);
        let mut next = vec![ZERO; eig.dim()];
        let picked = restrict_to.map(|r| r[(q - 1) as usize]);
        for j in 0..eig.dim() {
            if let Some(p) = picked {
                if j != p {
                    continue;
                }
            }
            let d = denominator(eig.values[j], q, omega_l_detuning, rule);
            if d.norm() == 0.0 {
                return Err(Error::SingularResolvent { manifold: q as usize });
            }
            let weight = -c_dot(&eig.vectors[j], &pumped) / d;
            for (n, v) in next.iter_mut().zip(eig.vectors[j].iter()) {
                *n += weight * v;
            }
        }
        amps.push(c_dot(&ops.detect_row(q), &next));
        prev = next;
    }
    Ok(amps)
}

/// Intensity and correlations from the full eigenstate sums; the cross-check
/// partner of [`correlations_full`].
pub fn correlations_spectral(
    ops: &ModelOperators,
    eigs: &[Eigensystem],
    omega_l_detuning: f64,
    with_g3: bool,
) -> Result<(f64, f64, Option<f64>)> {
    let q_max = if with_g3 { 3 } else { 2 };
    let amps = spectral_amplitudes(ops, eigs, omega_l_detuning, q_max, &WidthRule::Exact, None)?;
    let g2 = normalized_correlation(amps[0], amps[1], 2)?;
    let g3 = if with_g3 { Some(normalized_correlation(amps[0], amps[2], 3)?) } else { None };
    Ok((amps[0].norm_sqr(), g2, g3))
}

/// The narrowest-accessible eigenstate chain `p_1, p_2, ...` selected
/// manifold by manifold: accessibility of order q is judged by pumping from
/// the selected state of order q-1.
pub fn select_narrow_chain(
    ops: &ModelOperators,
    eigs: &[Eigensystem],
    q_max: u32,
) -> Result<Vec<usize>> {
    let mut chain = Vec::with_capacity(q_max as usize);
    let mut prev: Vec<C64> = vec![C64::new(1.0, 0.0)];
    for q in 1..=q_max {
        let eig = &eigs[(q - 1) as usize];
        let pumped = ops.pump_block(q).mul_vec(&prev);
        let amps: Vec<C64> = eig.vectors.iter().map(|v| c_dot(v, &pumped)).collect();
        let p = narrowest_accessible(eig, &amps)?;
        prev = eig.vectors[p].clone();
        chain.push(p);
    }
    Ok(chain)
}

/// The two-state correlation formula: Lorentzian-ratio factor times pump and
/// detection matrix-element factors, all c-products over the selected states
/// `p_1` (manifold 1) and `p_2` (manifold 2).
pub fn g2_two_state(
    ops: &ModelOperators,
    eigs: &[Eigensystem],
    chain: &[usize],
    omega_l_detuning: f64,
) -> Result<f64> {
    let (p1, p2) = (chain[0], chain[1]);
    let (e1, e2) = (&eigs[0], &eigs[1]);
    let v1 = &e1.vectors[p1];
    let v2 = &e2.vectors[p2];

    let d1 = e1.values[p1] + C64::new(omega_l_detuning, 0.0);
    let d2 = e2.values[p2] * 0.5 + C64::new(omega_l_detuning, 0.0);
    if d2.norm() == 0.0 {
        return Err(Error::SingularResolvent { manifold: 2 });
    }
    let lorentzian_ratio = (d1 / d2).norm_sqr();

    let pump_10 = c_dot(v1, &ops.pump_block(1).mul_vec(&[C64::new(1.0, 0.0)]));
    let pump_21 = c_dot(v2, &ops.pump_block(2).mul_vec(v1));
    if pump_10.norm() == 0.0 {
        return Err(Error::NoAccessibleState);
    }
    let pump_factor = pump_21.norm_sqr() / (2.0 * pump_10.norm_sqr());

    // (p|E⁻..E⁺..|p) factorizes through the vacuum: the detect rows.
    let w1 = c_dot(&ops.detect_row(1), v1);
    let w2 = c_dot(&ops.detect_row(2), v2);
    let det1 = w1 * w1; // (p1|E⁻E⁺|p1)
    let det2 = w2 * w2; // (p2|E⁻E⁻E⁺E⁺|p2)
    if det1.norm() == 0.0 {
        return Err(Error::ZeroIntensity);
    }
    let detect_factor = det2.norm() / (2.0 * det1.norm_sqr());

    Ok(lorentzian_ratio * pump_factor * detect_factor)
}

/// Few-state intensity and correlations: the spectral sums restricted to the
/// selected chain (one eigenstate per manifold). `g2` here is algebraically
/// identical to [`g2_two_state`]; both are computed as mutual checks.
pub fn correlations_few_state(
    ops: &ModelOperators,
    eigs: &[Eigensystem],
    chain: &[usize],
    omega_l_detuning: f64,
    with_g3: bool,
) -> Result<(f64, f64, Option<f64>)> {
    let q_max = if with_g3 { 3 } else { 2 };
    let amps = spectral_amplitudes(
        ops,
        eigs,
        omega_l_detuning,
        q_max,
        &WidthRule::Exact,
        Some(&chain[..q_max as usize]),
    )?;
    let g2 = normalized_correlation(amps[0], amps[1], 2)?;
    let g3 = if with_g3 { Some(normalized_correlation(amps[0], amps[2], 3)?) } else { None };
    Ok((amps[0].norm_sqr(), g2, g3))
}

/// Width-tampered observables: every eigenvalue's width in manifold q is
/// forced to `q · Γ_p1` (real parts and eigenvectors untouched), with
/// `Γ_p1` the untampered width of the selected first-manifold state. Removes
/// exactly the loss anharmonicity; surviving antibunching must come from
/// real-energy structure.
pub fn correlations_tampered(
    ops: &ModelOperators,
    eigs: &[Eigensystem],
    chain: &[usize],
    omega_l_detuning: f64,
    with_g3: bool,
) -> Result<(f64, f64, Option<f64>)> {
    let q_max = if with_g3 { 3 } else { 2 };
    let gamma_p1 = eigs[0].width(chain[0]);
    let rule = WidthRule::Uniform(gamma_p1);
    let amps = spectral_amplitudes(ops, eigs, omega_l_detuning, q_max, &rule, None)?;
    let g2 = normalized_correlation(amps[0], amps[1], 2)?;
    let g3 = if with_g3 { Some(normalized_correlation(amps[0], amps[2], 3)?) } else { None };
    Ok((amps[0].norm_sqr(), g2, g3))
}

/// Cooperativity of the quadratic model, `η = 4g²/(γ_a γ_b)`.
pub fn quadratic_cooperativity(p: &QuadraticParams) -> f64 {
    4.0 * p.g * p.g / (p.gamma_a * p.gamma_b)
}

/// Exact resonant second-order correlation of the quadratic model,
/// `1/(1+η)²`.
pub fn g2_quadratic_resonance(p: &QuadraticParams) -> f64 {
    let eta = quadratic_cooperativity(p);
    1.0 / ((1.0 + eta) * (1.0 + eta))
}

/// Resonant relative intensity of the quadratic model, `4/γ_b²`.
pub fn intensity_quadratic_resonance(p: &QuadraticParams) -> f64 {
    4.0 / (p.gamma_b * p.gamma_b)
}

/// Weak-coupling width of the narrowest two-excitation state,
/// `Γ_p2 ≈ 2γ_b(1+η)`, valid for `g < γ_a/(2√2)`.
pub fn gamma_p2_weak_coupling(p: &QuadraticParams) -> Result<f64> {
    if p.g >= p.gamma_a / (2.0 * 2.0f64.sqrt()) {
        return Err(Error::InvalidParameter(format!(
            "width formula requires g < gamma_a/(2*sqrt(2)), got g = {}",
            p.g
        )));
    }
    Ok(2.0 * p.gamma_b * (1.0 + quadratic_cooperativity(p)))
}

/// Cooperativity of the hybrid model's two optical modes, `η = 4d²/(γ_1γ_2)`.
pub fn hybrid_cooperativity(p: &HybridParams) -> f64 {
    4.0 * p.d * p.d / (p.gamma_1 * p.gamma_2)
}

/// Second-order-in-coupling resonant correlation of the hybrid model:
/// `(1/η²)[g₂²/d² + 2 + 4(g₂/γ₂)²(g₂²/d² - 1)]²`, derived for
/// `γ_1/γ_2 ≪ 1` and vanishing emitter decay.
pub fn g2_hybrid_second_order(p: &HybridParams) -> Result<f64> {
    if p.d == 0.0 {
        return Err(Error::InvalidParameter(
            "second-order correlation formula diverges at d = 0".into(),
        ));
    }
    let eta = hybrid_cooperativity(p);
    let r = (p.g_2 / p.d).powi(2);
    let s = (p.g_2 / p.gamma_2).powi(2);
    let bracket = r + 2.0 + 4.0 * s * (r - 1.0);
    Ok(bracket * bracket / (eta * eta))
}

/// Minimal mode-mode coupling for loss-induced antibunching at given
/// emitter-broad-mode coupling: `d = (γ₁/γ₂ (g₂⁴ + g₂²γ₂²/4))^(1/4)`.
pub fn nhpb_threshold_d(g2_coupling: f64, gamma_1: f64, gamma_2: f64) -> f64 {
    let g2sq = g2_coupling * g2_coupling;
    (gamma_1 / gamma_2 * (g2sq * g2sq + g2sq * gamma_2 * gamma_2 / 4.0)).powf(0.25)
}

/// Plasmonic-mode occupation diagnostics `N₂ = |v_pᵀ n̂₂ v_p|` of the
/// selected chain states (hybrid model; mode index 1 is the broad mode).
pub fn plasmonic_components(
    ops: &ModelOperators,
    eigs: &[Eigensystem],
    chain: &[usize],
) -> Vec<f64> {
    let mode = 1;
    chain
        .iter()
        .enumerate()
        .map(|(qm1, &p)| {
            let n2 = number_block(ops.basis(qm1 as u32 + 1), mode);
            eigs[qm1].mode_component(p, &n2)
        })
        .collect()
}
