//! Brute-force master-equation reference.
//!
//! Everything else in this crate leans on the weak-drive expansion; this
//! module does not. It builds the full Lindblad generator on a truncated
//! product Fock space, solves for the steady state by dense linear algebra,
//! and reads intensities and correlations off the density matrix. Agreement
//! between the two pipelines is the strongest end-to-end check the crate has.
//!
//! The generator works in the frame rotating at the laser frequency, where
//! each mode's number operator picks up its frequency weight times
//! `Δω_L = ω_origin - ω_L` and the drive is static.
//!
//! At the drive strengths of interest the density matrix spans dozens of
//! orders of magnitude (element of coherence order q scales like the q-th
//! power of the drive). A direct solve loses everything below the round-off
//! floor of the vacuum population, so the solver rescales the unknowns by
//! excitation sector first (two passes: a cheap low-cutoff solve pins the
//! per-quantum amplitude, the full solve runs in the rescaled variables).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::eigen::general_eigenvalues;
use crate::error::{Error, Result};
use crate::hamiltonian::{DriveSpec, DriveTarget, ModelParams};
use crate::linalg::{lu_factor, CMatrix};

/// Hard cap on superoperator rows for the dense solver.
pub const SUPEROP_ROW_CAP: usize = 10_000;
/// Bound on `‖L(ρ_ss)‖` (Frobenius, unscaled generator).
pub const STEADY_STATE_RESIDUAL_TOL: f64 = 1e-9;
/// Density matrices must be Hermitian and unit-trace within this.
pub const DENSITY_TOL: f64 = 1e-10;
/// Density-matrix eigenvalues may dip this far below zero numerically.
pub const POSITIVITY_FLOOR: f64 = -1e-8;
/// Default bound on successive-truncation relative g² differences.
pub const DEFAULT_CONVERGENCE_BOUND: f64 = 1e-3;

const ZERO: C64 = C64::new(0.0, 0.0);
const IM: C64 = C64::new(0.0, 1.0);

/// One tensor factor of the truncated space.
#[derive(Clone, Copy, Debug)]
struct Factor {
    dim: usize,
    /// Quanta per occupation unit (frequency weight of the mode).
    weight: u32,
}

/// Truncated product Fock space. Factor order: emitter first when present,
/// then the bosonic modes in model order; composite index is row-major.
#[derive(Clone, Debug)]
pub struct ProductSpace {
    factors: Vec<Factor>,
    emitter_present: bool,
    /// `stride[k]` = product of dims after factor k.
    stride: Vec<usize>,
}

impl ProductSpace {
    fn new(params: &ModelParams, n_max: &[u32]) -> Self {
        let mut factors = Vec::new();
        let emitter_present = match params {
            ModelParams::Quadratic(_) => {
                factors.push(Factor { dim: n_max[0] as usize + 1, weight: 2 });
                factors.push(Factor { dim: n_max[1] as usize + 1, weight: 1 });
                false
            }
            ModelParams::Hybrid(_) => {
                factors.push(Factor { dim: 2, weight: 1 });
                factors.push(Factor { dim: n_max[0] as usize + 1, weight: 1 });
                factors.push(Factor { dim: n_max[1] as usize + 1, weight: 1 });
                true
            }
        };
        let mut stride = vec![1usize; factors.len()];
        for k in (0..factors.len() - 1).rev() {
            stride[k] = stride[k + 1] * factors[k + 1].dim;
        }
        ProductSpace { factors, emitter_present, stride }
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    /// Occupation of factor k in composite state m.
    pub fn occupation(&self, m: usize, k: usize) -> usize {
        m / self.stride[k] % self.factors[k].dim
    }

    /// Weighted total excitation of composite state m.
    pub fn weighted_excitation(&self, m: usize) -> u32 {
        (0..self.factors.len()).map(|k| self.occupation(m, k) as u32 * self.factors[k].weight).sum()
    }

    /// Index of the factor a drive target refers to.
    fn factor_of(&self, target: DriveTarget) -> Result<usize> {
        match (self.emitter_present, target) {
            (true, DriveTarget::Emitter) => Ok(0),
            (true, DriveTarget::Narrow) => Ok(1),
            (true, DriveTarget::Broad) => Ok(2),
            (false, DriveTarget::Narrow) => Ok(1),
            (false, DriveTarget::Broad) => Ok(0),
            (false, DriveTarget::Emitter) => {
                Err(Error::InvalidConfig("this model has no emitter to target".into()))
            }
        }
    }

    /// Dense lowering operator of factor k on the full space.
    fn lowering(&self, k: usize) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for col in 0..n {
            let occ = self.occupation(col, k);
            if occ > 0 {
                m[(col - self.stride[k], col)] = C64::new((occ as f64).sqrt(), 0.0);
            }
        }
        m
    }

    /// Dense number operator of factor k.
    fn number(&self, k: usize) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(self.occupation(i, k) as f64, 0.0);
        }
        m
    }
}

/// Truncation and drive strength for one oracle run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSpec {
    /// Maximum occupation per bosonic mode, in model order (the emitter is
    /// always two-level).
    pub n_max: Vec<u32>,
    /// Drive amplitude in units of the reference rate.
    pub omega: f64,
}

impl TruncationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_max.len() != 2 {
            return Err(Error::InvalidConfig(format!(
                "expected one n_max per bosonic mode (2), got {}",
                self.n_max.len()
            )));
        }
        if self.n_max.iter().any(|&n| n < 2) {
            return Err(Error::InvalidConfig("n_max must be at least 2 per mode".into()));
        }
        if !self.omega.is_finite() || self.omega < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "drive amplitude must be finite and nonnegative, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// Default truncation for a model at the default weak drive.
    pub fn default_for(params: &ModelParams) -> Self {
        let n_max = match params {
            ModelParams::Quadratic(_) => vec![3, 4],
            ModelParams::Hybrid(_) => vec![4, 4],
        };
        TruncationSpec { n_max, omega: default_omega(params) }
    }
}

/// Default drive amplitude: two orders below the smallest decay rate present.
pub fn default_omega(params: &ModelParams) -> f64 {
    1e-2 * min_positive_rate(params)
}

fn min_positive_rate(params: &ModelParams) -> f64 {
    let rates: Vec<f64> = match params {
        ModelParams::Quadratic(p) => vec![p.gamma_a, p.gamma_b],
        ModelParams::Hybrid(p) => vec![p.gamma_e, p.gamma_1, p.gamma_2],
    };
    rates.into_iter().filter(|&g| g > 0.0).fold(f64::INFINITY, f64::min)
}

/// The vectorized Lindblad generator plus the pieces needed to apply it
/// without the big matrix (residual checks) and to rebuild it at a reduced
/// truncation (the scaling pre-pass).
pub struct Liouvillian {
    pub params: ModelParams,
    pub drive: DriveSpec,
    pub trunc: TruncationSpec,
    pub space: ProductSpace,
    /// Row-major-vectorized generator: `L · vec(ρ) = vec(dρ/dt)`.
    pub matrix: CMatrix,
    h_eff: CMatrix,
    jumps: Vec<(f64, CMatrix)>,
}

/// Accumulates `coeff · (a ⊗ b)` into `out` without a temporary.
fn add_kron_scaled(out: &mut CMatrix, coeff: C64, a: &CMatrix, b: &CMatrix) {
    let (p, q) = (b.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let aij = coeff * a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..p {
                for l in 0..q {
                    let bkl = b[(k, l)];
                    if bkl != ZERO {
                        out[(i * p + k, j * q + l)] += aij * bkl;
                    }
                }
            }
        }
    }
}

fn conjugated(m: &CMatrix) -> CMatrix {
    m.adjoint().transpose()
}

/// Rotating-frame Hermitian Hamiltonian including the drive term.
fn rotating_hamiltonian(
    params: &ModelParams,
    drive: &DriveSpec,
    space: &ProductSpace,
    omega: f64,
) -> Result<CMatrix> {
    let dim = space.dim();
    let dw = drive.omega_l_detuning;
    let mut h = CMatrix::zeros(dim, dim);
    let mode_detunings: Vec<f64> = match params {
        ModelParams::Quadratic(p) => vec![p.delta_a, 0.0],
        ModelParams::Hybrid(p) => vec![p.delta_e, 0.0, p.delta_2],
    };
    for (k, (f, delta)) in space.factors.iter().zip(mode_detunings.iter()).enumerate() {
        let coeff = delta + f64::from(f.weight) * dw;
        if coeff != 0.0 {
            h = h.add(&space.number(k).scale(C64::new(coeff, 0.0)));
        }
    }
    match params {
        ModelParams::Quadratic(p) => {
            if p.g != 0.0 {
                // g (a† b b + h.c.)
                let (a, b) = (space.lowering(0), space.lowering(1));
                let term = a.adjoint().mul(&b).mul(&b).scale(C64::new(p.g, 0.0));
                h = h.add(&term).add(&term.adjoint());
            }
        }
        ModelParams::Hybrid(p) => {
            let (sm, a1, a2) = (space.lowering(0), space.lowering(1), space.lowering(2));
            for (g, left, right) in [(p.g_1, &sm, &a1), (p.g_2, &sm, &a2), (p.d, &a1, &a2)] {
                if g != 0.0 {
                    let term = left.adjoint().mul(right).scale(C64::new(g, 0.0));
                    h = h.add(&term).add(&term.adjoint());
                }
            }
        }
    }
    if omega != 0.0 {
        let pump = space.lowering(space.factor_of(drive.pump_target)?);
        let v = pump.adjoint().add(&pump).scale(C64::new(omega, 0.0));
        h = h.add(&v);
    }
    Ok(h)
}

fn decay_rates(params: &ModelParams) -> Vec<f64> {
    match params {
        ModelParams::Quadratic(p) => vec![p.gamma_a, p.gamma_b],
        ModelParams::Hybrid(p) => vec![p.gamma_e, p.gamma_1, p.gamma_2],
    }
}

/// Builds the vectorized generator
/// `L = -i(H_eff ⊗ 1) + i(1 ⊗ H_eff*) + Σ γ (a ⊗ a*)`
/// with `H_eff = H - (i/2) Σ γ a†a`, in the row-major convention
/// `vec(A X B) = (A ⊗ Bᵀ) vec(X)`.
pub fn build_liouvillian(
    params: &ModelParams,
    drive: &DriveSpec,
    trunc: &TruncationSpec,
) -> Result<Liouvillian> {
    params.validate()?;
    trunc.validate()?;
    let space = ProductSpace::new(params, &trunc.n_max);
    let dim = space.dim();
    let rows = dim * dim;
    if rows > SUPEROP_ROW_CAP {
        return Err(Error::DimensionLimit { rows, cap: SUPEROP_ROW_CAP });
    }

    let h = rotating_hamiltonian(params, drive, &space, trunc.omega)?;
    let mut jumps: Vec<(f64, CMatrix)> = Vec::new();
    for (k, &gamma) in decay_rates(params).iter().enumerate() {
        if gamma > 0.0 {
            jumps.push((gamma, space.lowering(k)));
        }
    }

    let mut h_eff = h;
    for (gamma, a) in &jumps {
        let n_op = a.adjoint().mul(a);
        h_eff = h_eff.add(&n_op.scale(C64::new(0.0, -0.5 * gamma)));
    }

    let eye = CMatrix::identity(dim);
    let mut matrix = CMatrix::zeros(rows, rows);
    add_kron_scaled(&mut matrix, -IM, &h_eff, &eye);
    add_kron_scaled(&mut matrix, IM, &eye, &conjugated(&h_eff));
    for (gamma, a) in &jumps {
        add_kron_scaled(&mut matrix, C64::new(*gamma, 0.0), a, &conjugated(a));
    }

    Ok(Liouvillian {
        params: *params,
        drive: *drive,
        trunc: trunc.clone(),
        space,
        matrix,
        h_eff,
        jumps,
    })
}

impl Liouvillian {
    /// Applies the generator to a density matrix directly from the small
    /// operators, independent of the assembled superoperator.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        apply_generator(&self.h_eff, &self.jumps, rho)
    }
}

fn apply_generator(h_eff: &CMatrix, jumps: &[(f64, CMatrix)], rho: &CMatrix) -> CMatrix {
    let mut out = h_eff.mul(rho).scale(-IM);
    out = out.add(&rho.mul(&h_eff.adjoint()).scale(IM));
    for (gamma, a) in jumps {
        out = out.add(&a.mul(rho).mul(&a.adjoint()).scale(C64::new(*gamma, 0.0)));
    }
    out
}

/// Steady-state density matrix with its accepted diagnostics.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    pub matrix: CMatrix,
    pub space: ProductSpace,
    /// `‖L(ρ)‖` after Hermitization and normalization.
    pub residual: f64,
    /// Largest `|ρ - ρ†|` entry before Hermitization.
    pub hermiticity_deviation: f64,
    /// Most negative eigenvalue (should be non-negative up to round-off).
    pub min_eigenvalue: f64,
}

impl DensityOperator {
    pub fn populations(&self) -> Vec<f64> {
        (0..self.space.dim()).map(|m| self.matrix[(m, m)].re).collect()
    }
}

/// A-priori per-quantum amplitude scale for the pre-pass: the largest
/// plausible linear response, capped at one.
fn apriori_scale(params: &ModelParams, omega: f64) -> f64 {
    (2.0 * omega / min_positive_rate(params)).clamp(1e-12, 1.0)
}

/// Solves `L ρ = 0` with the trace constraint in sector-rescaled variables.
///
/// Element (m, n) is rescaled by `s^(q_m + q_n)` with q the weighted
/// excitation; the vacuum-diagonal row (redundant by trace preservation) is
/// replaced by the trace constraint. Returns the unscaled, Hermitized,
/// unit-trace result plus deviations.
fn solve_scaled(liou: Liouvillian, s: f64) -> Result<(CMatrix, f64, f64)> {
    let Liouvillian { space, matrix, h_eff, jumps, .. } = liou;
    let dim = space.dim();
    let rows = dim * dim;
    let q: Vec<usize> = (0..dim).map(|m| space.weighted_excitation(m) as usize).collect();
    let q_top = 2 * q.iter().copied().max().unwrap_or(0);
    let mut pow = vec![1.0f64; q_top + 1];
    for k in 1..=q_top {
        pow[k] = pow[k - 1] * s;
    }

    let mut m = matrix;
    // row r = (m, n) is divided by its sector scale, column c multiplied
    for r in 0..rows {
        let sr = pow[q[r / dim] + q[r % dim]];
        for c in 0..rows {
            let sc = pow[q[c / dim] + q[c % dim]];
            m[(r, c)] *= sc / sr;
        }
    }
    for c in 0..rows {
        m[(0, c)] = ZERO;
    }
    for d in 0..dim {
        m[(0, d * dim + d)] = C64::new(pow[2 * q[d]], 0.0);
    }

    let lu = lu_factor(m).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::NonUniqueSteadyState,
        other => other,
    })?;
    let mut b = vec![ZERO; rows];
    b[0] = C64::new(1.0, 0.0);
    let x = lu.solve(&b);

    let mut rho = CMatrix::zeros(dim, dim);
    for r in 0..rows {
        rho[(r / dim, r % dim)] = x[r] * pow[q[r / dim] + q[r % dim]];
    }

    let mut herm_dev = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            herm_dev = herm_dev.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    let adj = rho.adjoint();
    rho = rho.add(&adj).scale(C64::new(0.5, 0.0));
    let tr = rho.trace().re;
    if !(tr.is_finite() && tr > 0.0) {
        return Err(Error::NonUniqueSteadyState);
    }
    rho = rho.scale(C64::new(1.0 / tr, 0.0));

    let residual = apply_generator(&h_eff, &jumps, &rho).fro_norm();
    if residual > STEADY_STATE_RESIDUAL_TOL {
        return Err(Error::SteadyStateResidual { residual, tolerance: STEADY_STATE_RESIDUAL_TOL });
    }
    Ok((rho, residual, herm_dev))
}

/// Unique steady state of the generator, via the two-pass rescaled solve.
///
/// Consumes the Liouvillian; the superoperator is factored in place.
pub fn steady_state(liou: Liouvillian) -> Result<DensityOperator> {
    let omega = liou.trunc.omega;
    let s = if omega == 0.0 {
        1.0
    } else {
        // pre-pass at a low cutoff pins the per-quantum amplitude
        let small_trunc =
            TruncationSpec { n_max: liou.trunc.n_max.iter().map(|&n| n.min(2)).collect(), omega };
        let s0 = apriori_scale(&liou.params, omega);
        let small = build_liouvillian(&liou.params, &liou.drive, &small_trunc)?;
        let space = small.space.clone();
        let (rho1, _, _) = solve_scaled(small, s0)?;
        let p1: f64 = (0..space.dim())
            .filter(|&m| space.weighted_excitation(m) == 1)
            .map(|m| rho1[(m, m)].re)
            .sum();
        if p1 > 0.0 {
            p1.sqrt().clamp(1e-12, 1.0)
        } else {
            s0
        }
    };

    let space = liou.space.clone();
    let (rho, residual, herm_dev) = solve_scaled(liou, s)?;

    let tr_dev = (rho.trace().re - 1.0).abs();
    if tr_dev > DENSITY_TOL || herm_dev > DENSITY_TOL {
        return Err(Error::SteadyStateResidual {
            residual: tr_dev.max(herm_dev),
            tolerance: DENSITY_TOL,
        });
    }
    let min_eigenvalue =
        general_eigenvalues(&rho)?.into_iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
    if min_eigenvalue < POSITIVITY_FLOOR {
        return Err(Error::InvalidParameter(format!(
            "steady state is not positive (min eigenvalue {min_eigenvalue:.3e})"
        )));
    }

    Ok(DensityOperator {
        matrix: rho,
        space,
        residual,
        hermiticity_deviation: herm_dev,
        min_eigenvalue,
    })
}

/// Intensity and normalized correlations of the detect mode:
/// `I = tr(a†a ρ)`, `g² = tr(a†²a² ρ)/I²`, `g³ = tr(a†³a³ ρ)/I³`.
///
/// The intensity is the raw steady-state population (not normalized by the
/// drive); divide by Ω² to compare with the weak-drive expansion.
pub fn oracle_correlations(rho: &DensityOperator, drive: &DriveSpec) -> Result<(f64, f64, f64)> {
    let k = rho.space.factor_of(drive.detect_target)?;
    let (mut i1, mut g2n, mut g3n) = (0.0f64, 0.0f64, 0.0f64);
    for m in 0..rho.space.dim() {
        let n = rho.space.occupation(m, k) as f64;
        let p = rho.matrix[(m, m)].re;
        i1 += n * p;
        g2n += n * (n - 1.0) * p;
        g3n += n * (n - 1.0) * (n - 2.0) * p;
    }
    if i1 == 0.0 {
        return Err(Error::ZeroIntensity);
    }
    Ok((i1, g2n / (i1 * i1), g3n / (i1 * i1 * i1)))
}

/// g² (and g³) per truncation with successive relative differences.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub omega: f64,
    pub g2: Vec<f64>,
    pub g3: Vec<f64>,
    pub successive_rel_diff: Vec<f64>,
    pub bound: f64,
    pub converged: bool,
}

/// Runs the oracle across a truncation ladder and reports whether the last
/// g² step came in under `bound` (relative).
pub fn convergence_check(
    params: &ModelParams,
    drive: &DriveSpec,
    truncs: &[TruncationSpec],
    bound: f64,
) -> Result<ConvergenceReport> {
    assert!(truncs.len() >= 2, "convergence needs at least two truncations");
    let mut g2 = Vec::with_capacity(truncs.len());
    let mut g3 = Vec::with_capacity(truncs.len());
    for t in truncs {
        let rho = steady_state(build_liouvillian(params, drive, t)?)?;
        let (_, x2, x3) = oracle_correlations(&rho, drive)?;
        g2.push(x2);
        g3.push(x3);
    }
    let successive_rel_diff: Vec<f64> =
        g2.windows(2).map(|w| (w[1] - w[0]).abs() / w[1].abs().max(f64::MIN_POSITIVE)).collect();
    let converged = *successive_rel_diff.last().unwrap() <= bound;
    Ok(ConvergenceReport { omega: truncs[0].omega, g2, g3, successive_rel_diff, bound, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{correlations_full, ModelOperators};
    use crate::hamiltonian::{HybridParams, QuadraticParams};

    fn quad(gamma_b: f64, g: f64) -> ModelParams {
        ModelParams::Quadratic(QuadraticParams { gamma_a: 1.0, gamma_b, g, delta_a: 0.0 })
    }

    fn fig_hybrid(d: f64) -> ModelParams {
        ModelParams::Hybrid(HybridParams {
            gamma_e: 1e-5,
            gamma_1: 1e-3,
            gamma_2: 1.0,
            g_1: 0.0,
            g_2: 1.0 / 15.0,
            d,
            delta_e: 0.0,
            delta_2: 0.0,
        })
    }

    fn drive() -> DriveSpec {
        DriveSpec::narrow_mode()
    }

    fn trunc(n: &[u32], omega: f64) -> TruncationSpec {
        TruncationSpec { n_max: n.to_vec(), omega }
    }

    #[test]
    fn vacuum_is_a_null_vector_without_drive() {
        let liou = build_liouvillian(&fig_hybrid(0.1), &drive(), &trunc(&[2, 2], 0.0)).unwrap();
        let dim = liou.space.dim();
        let col: Vec<f64> = (0..dim * dim).map(|r| liou.matrix[(r, 0)].norm()).collect();
        let worst = col.into_iter().fold(0.0, f64::max);
        assert!(worst < 1e-14, "L vec(|0><0|) has norm {worst}");
    }

    #[test]
    fn identity_row_annihilates_the_generator() {
        let liou = build_liouvillian(&quad(0.2, 0.15), &drive(), &trunc(&[2, 3], 0.05)).unwrap();
        let dim = liou.space.dim();
        let rows = dim * dim;
        let scale = liou.matrix.max_abs();
        for col in 0..rows {
            let s: C64 = (0..dim).map(|m| liou.matrix[(m * dim + m, col)]).sum();
            assert!(s.norm() < 1e-13 * scale, "trace leak {s} in column {col}");
        }
    }

    #[test]
    fn driven_lossy_mode_reaches_a_coherent_state() {
        // decoupled narrow mode: the textbook driven damped oscillator
        let p = quad(0.5, 0.0);
        let omega = 1e-3;
        let rho =
            steady_state(build_liouvillian(&p, &drive(), &trunc(&[2, 4], omega)).unwrap()).unwrap();
        let (i1, g2, g3) = oracle_correlations(&rho, &drive()).unwrap();
        let mean_n = 4.0 * omega * omega / (0.5 * 0.5);
        assert!((i1 - mean_n).abs() < 1e-9 * mean_n, "I = {i1} vs {mean_n}");
        assert!((g2 - 1.0).abs() < 1e-9, "g2 = {g2}");
        assert!((g3 - 1.0).abs() < 1e-6, "g3 = {g3}");
    }

    #[test]
    fn undriven_hybrid_decays_to_vacuum() {
        let rho = steady_state(
            build_liouvillian(&fig_hybrid(0.1), &drive(), &trunc(&[3, 3], 0.0)).unwrap(),
        )
        .unwrap();
        assert!((rho.matrix[(0, 0)].re - 1.0).abs() < 1e-12);
        let off_vacuum: f64 = (1..rho.space.dim()).map(|m| rho.matrix[(m, m)].re.abs()).sum();
        assert!(off_vacuum < 1e-12, "population leaked: {off_vacuum}");
        assert!(rho.residual < STEADY_STATE_RESIDUAL_TOL);
        assert!(rho.min_eigenvalue > POSITIVITY_FLOOR);
    }

    #[test]
    fn emitter_alone_is_perfectly_antibunched() {
        let p = ModelParams::Hybrid(HybridParams {
            gamma_e: 0.1,
            gamma_1: 1e-3,
            gamma_2: 1.0,
            g_1: 0.0,
            g_2: 0.0,
            d: 0.0,
            delta_e: 0.0,
            delta_2: 0.0,
        });
        let dr = DriveSpec {
            pump_target: DriveTarget::Emitter,
            detect_target: DriveTarget::Emitter,
            omega_l_detuning: 0.0,
        };
        let rho = steady_state(build_liouvillian(&p, &dr, &trunc(&[2, 2], 1e-4)).unwrap()).unwrap();
        let (i1, g2, g3) = oracle_correlations(&rho, &dr).unwrap();
        assert!(i1 > 0.0);
        assert_eq!(g2, 0.0, "two-level emitter cannot emit pairs");
        assert_eq!(g3, 0.0);
    }

    #[test]
    fn oracle_matches_expansion_for_quadratic_reference() {
        let p = quad(1e-3, 0.1);
        let omega = 1e-5;
        let rho =
            steady_state(build_liouvillian(&p, &drive(), &trunc(&[3, 4], omega)).unwrap()).unwrap();
        let (i_o, g2_o, g3_o) = oracle_correlations(&rho, &drive()).unwrap();

        assert!((g2_o - 5.95e-4).abs() < 0.02 * 5.95e-4, "g2 = {g2_o}");

        let ops = ModelOperators::new(p, drive()).unwrap();
        let (i_b, g2_b, g3_b) = correlations_full(&ops, 0.0, true).unwrap();
        assert!((g2_o - g2_b).abs() < 1e-2 * g2_b, "{g2_o} vs {g2_b}");
        assert!((g3_o - g3_b.unwrap()).abs() < 5e-2 * g3_b.unwrap());
        assert!((i_o / (omega * omega) - i_b).abs() < 1e-2 * i_b);
    }

    #[test]
    fn oracle_matches_expansion_for_hybrid_reference() {
        let p = fig_hybrid(0.1);
        let omega = 1e-5;
        let rho =
            steady_state(build_liouvillian(&p, &drive(), &trunc(&[4, 4], omega)).unwrap()).unwrap();
        let (i_o, g2_o, g3_o) = oracle_correlations(&rho, &drive()).unwrap();

        let ops = ModelOperators::new(p, drive()).unwrap();
        let (i_b, g2_b, g3_b) = correlations_full(&ops, 0.0, true).unwrap();
        assert!((g2_o - g2_b).abs() < 1e-2 * g2_b, "{g2_o} vs {g2_b}");
        assert!((g3_o - g3_b.unwrap()).abs() < 5e-2 * g3_b.unwrap());
        assert!((i_o / (omega * omega) - i_b).abs() < 1e-2 * i_b);
        assert!(rho.residual < STEADY_STATE_RESIDUAL_TOL);
        assert!(rho.hermiticity_deviation < DENSITY_TOL);
        assert!(rho.min_eigenvalue > POSITIVITY_FLOOR);
    }

    #[test]
    fn truncation_ladder_converges_monotonically() {
        // nearly linear narrow mode at visible occupation: each extra Fock
        // level shrinks the truncation error by a factor of the occupation,
        // keeping every difference well above solver round-off
        let p = quad(0.5, 0.01);
        let ts: Vec<TruncationSpec> =
            [[3, 3], [4, 4], [5, 5]].iter().map(|n| trunc(n, 0.05)).collect();
        let report = convergence_check(&p, &drive(), &ts, DEFAULT_CONVERGENCE_BOUND).unwrap();
        assert!(report.converged, "diffs: {:?}", report.successive_rel_diff);
        assert!(report.successive_rel_diff[1] < report.successive_rel_diff[0]);
    }

    #[test]
    fn coarse_truncation_suffices_at_weak_drive() {
        let p = quad(1e-3, 0.1);
        let ts = [trunc(&[2, 2], 1e-5), trunc(&[3, 3], 1e-5)];
        let report = convergence_check(&p, &drive(), &ts, DEFAULT_CONVERGENCE_BOUND).unwrap();
        assert!(report.successive_rel_diff[0] < 1e-3, "{:?}", report.successive_rel_diff);
    }

    #[test]
    fn strong_drive_is_flagged_nonconverged() {
        // drive at half the linewidth puts ~1 photon in the mode; low Fock
        // cutoffs clip the distribution hard
        let p = quad(1e-3, 0.0);
        let ts = [trunc(&[2, 2], 5e-4), trunc(&[3, 3], 5e-4), trunc(&[3, 4], 5e-4)];
        let report = convergence_check(&p, &drive(), &ts, DEFAULT_CONVERGENCE_BOUND).unwrap();
        assert!(!report.converged, "diffs: {:?}", report.successive_rel_diff);
    }

    // The drive correction to g2 is quadratic in the amplitude: halving the
    // drive shrinks the change by four, and its size stays within a small
    // multiple of (drive / narrowest rate)². The multiple is measured, not
    // unity: at resonance the blockade amplifies the relative correction by
    // roughly the inverse of g2 itself, which cancels the narrowing of the
    // dressed state and leaves a model-wide prefactor near six.
    #[test]
    fn drive_correction_to_g2_is_quadratic_and_small() {
        let p = quad(1e-3, 0.03);
        let g2_at = |w: f64| {
            let rho =
                steady_state(build_liouvillian(&p, &drive(), &trunc(&[3, 4], w)).unwrap()).unwrap();
            oracle_correlations(&rho, &drive()).unwrap().1
        };
        let omega = 2e-5;
        let step1 = (g2_at(omega) - g2_at(omega / 2.0)).abs() / g2_at(omega / 2.0);
        let step2 = (g2_at(omega / 2.0) - g2_at(omega / 4.0)).abs() / g2_at(omega / 4.0);
        let ratio = step1 / step2;
        assert!((3.2..=4.8).contains(&ratio), "halving ratio {ratio}, want ~4");
        let bound = 10.0 * (omega / 1e-3) * (omega / 1e-3);
        assert!(step1 < bound, "rel change {step1} vs bound {bound}");
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let err = build_liouvillian(&fig_hybrid(0.1), &drive(), &trunc(&[12, 12], 1e-5));
        match err.map(|_| ()) {
            Err(Error::DimensionLimit { rows, cap }) => {
                assert!(rows > cap);
            }
            other => panic!("expected DimensionLimit, got {other:?}"),
        }
    }

    #[test]
    fn conserved_sector_yields_non_unique_steady_state() {
        // dark decoupled emitter: its population never decays
        let p = ModelParams::Hybrid(HybridParams {
            gamma_e: 0.0,
            gamma_1: 1e-3,
            gamma_2: 1.0,
            g_1: 0.0,
            g_2: 0.0,
            d: 0.0,
            delta_e: 0.0,
            delta_2: 0.0,
        });
        let res = steady_state(build_liouvillian(&p, &drive(), &trunc(&[2, 2], 0.0)).unwrap());
        match res {
            Err(Error::NonUniqueSteadyState) => {}
            other => panic!("expected NonUniqueSteadyState, got {other:?}"),
        }
    }

    #[test]
    fn truncation_validation() {
        assert!(trunc(&[1, 4], 1e-5).validate().is_err());
        assert!(trunc(&[3], 1e-5).validate().is_err());
        assert!(trunc(&[3, 4], -1.0).validate().is_err());
        assert!(trunc(&[3, 4], f64::NAN).validate().is_err());
        assert!(trunc(&[2, 2], 0.0).validate().is_ok());
        let t = TruncationSpec::default_for(&fig_hybrid(0.1));
        assert_eq!(t.n_max, vec![4, 4]);
        assert!((t.omega - 1e-7).abs() < 1e-20);
        let tq = TruncationSpec::default_for(&quad(1e-3, 0.1));
        assert_eq!(tq.n_max, vec![3, 4]);
        assert!((tq.omega - 1e-5).abs() < 1e-18);
    }

    #[test]
    fn emitter_target_is_rejected_without_an_emitter() {
        let dr = DriveSpec {
            pump_target: DriveTarget::Emitter,
            detect_target: DriveTarget::Narrow,
            omega_l_detuning: 0.0,
        };
        let res = build_liouvillian(&quad(0.5, 0.1), &dr, &trunc(&[2, 2], 1e-4));
        assert!(matches!(res, Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn detect_on_the_broad_mode_works() {
        let p = quad(1e-3, 0.1);
        let dr = DriveSpec {
            pump_target: DriveTarget::Narrow,
            detect_target: DriveTarget::Broad,
            omega_l_detuning: 0.0,
        };
        let rho = steady_state(build_liouvillian(&p, &dr, &trunc(&[3, 4], 1e-5)).unwrap()).unwrap();
        let (i1, g2, _) = oracle_correlations(&rho, &dr).unwrap();
        assert!(i1 > 0.0 && g2.is_finite());
    }

    #[test]
    fn detuned_asymmetric_spectrum_matches_expansion() {
        // nonzero delta_2 breaks the spectral mirror symmetry, so any frame
        // or sign mismatch between the two pipelines shows up here
        let p = ModelParams::Hybrid(HybridParams {
            gamma_e: 1e-5,
            gamma_1: 1e-3,
            gamma_2: 1.0,
            g_1: 0.02,
            g_2: 1.0 / 15.0,
            d: 0.1,
            delta_e: 0.0,
            delta_2: 0.3,
        });
        let omega = 1e-5;
        for dw in [0.07, -0.07] {
            let mut dr = drive();
            dr.omega_l_detuning = dw;
            let rho =
                steady_state(build_liouvillian(&p, &dr, &trunc(&[3, 3], omega)).unwrap()).unwrap();
            let (i_o, g2_o, _) = oracle_correlations(&rho, &dr).unwrap();
            let ops = ModelOperators::new(p, dr).unwrap();
            let (i_b, g2_b, _) = correlations_full(&ops, dw, false).unwrap();
            assert!((g2_o - g2_b).abs() < 2e-2 * g2_b, "{g2_o} vs {g2_b} at {dw}");
            assert!((i_o / (omega * omega) - i_b).abs() < 2e-2 * i_b, "at {dw}");
        }
    }

    #[test]
    fn laser_detuning_shifts_the_response() {
        // detuned drive sees a weaker resonance: lower intensity
        let p = quad(1e-3, 0.0);
        let mut dr = drive();
        dr.omega_l_detuning = 0.05;
        let on =
            steady_state(build_liouvillian(&p, &drive(), &trunc(&[2, 3], 1e-5)).unwrap()).unwrap();
        let off = steady_state(build_liouvillian(&p, &dr, &trunc(&[2, 3], 1e-5)).unwrap()).unwrap();
        let (i_on, _, _) = oracle_correlations(&on, &drive()).unwrap();
        let (i_off, _, _) = oracle_correlations(&off, &dr).unwrap();
        // bare mode: Lorentzian response Ω²/((γ/2)² + Δω²)
        let expect = ((0.5e-3f64).powi(2)) / ((0.5e-3f64).powi(2) + 0.05f64.powi(2));
        assert!((i_off / i_on - expect).abs() < 1e-6 * expect, "{}", i_off / i_on);
    }
}
