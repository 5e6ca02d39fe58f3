//! Complex spectra of non-Hermitian manifold blocks.
//!
//! The manifold Hamiltonians are complex-symmetric, so left eigenvectors are
//! transposes (not adjoints) of right ones and the natural normalization is
//! bilinear: `vᵀ v = 1`. Near an exceptional point that product collapses to
//! zero; we detect the collapse and refuse to normalize instead of silently
//! amplifying noise.
//!
//! Eigenpairs are computed by unitary reduction to Hessenberg form followed
//! by explicitly shifted QR with deflation, then back-substitution on the
//! triangular factor. Manifold blocks here are tiny (dimension grows linearly
//! with excitation number), so robustness wins over bulge-chasing cleverness.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::HybridParams;
use crate::linalg::{c_dot, norm2, CMatrix};

/// Relative tolerance on `max |H_ij - H_ji|` before a matrix is rejected as
/// not symmetric; below it the input is symmetrized.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Threshold on `|vᵀv|` (Euclidean-normalized v) below which an eigenvector
/// is reported as self-orthogonal, i.e. an exceptional point.
pub const C_NORM_TOL: f64 = 1e-10;

/// Relative access-amplitude cutoff for [`narrowest_accessible`].
pub const ACCESS_THRESHOLD: f64 = 1e-6;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Spectrum of one manifold block, sorted by ascending width.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    /// Complex eigenvalues, narrowest first.
    pub values: Vec<C64>,
    /// Right eigenvectors, bilinearly normalized (`vᵀv = 1`), one per value.
    pub vectors: Vec<Vec<C64>>,
}

impl Eigensystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Width of eigenstate `j`: `Γ_j = -2 Im Ẽ_j`.
    pub fn width(&self, j: usize) -> f64 {
        -2.0 * self.values[j].im
    }

    pub fn widths(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.width(j)).collect()
    }

    /// Expectation-like weight of an operator block in eigenstate `j` under
    /// the bilinear metric: `|v_jᵀ N v_j|`.
    pub fn mode_component(&self, j: usize, op: &CMatrix) -> f64 {
        c_dot(&self.vectors[j], &op.mul_vec(&self.vectors[j])).norm()
    }
}

/// Index of the narrowest eigenstate whose access amplitude is not
/// negligible relative to the strongest one.
///
/// Ties on width prefer the larger amplitude, then the lower index. A fully
/// dark manifold (all amplitudes zero) is an error.
pub fn narrowest_accessible(eig: &Eigensystem, amps: &[C64]) -> Result<usize> {
    assert_eq!(amps.len(), eig.dim());
    let max_amp = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if max_amp == 0.0 {
        return Err(Error::NoAccessibleState);
    }
    let cutoff = ACCESS_THRESHOLD * max_amp;
    let mut best: Option<usize> = None;
    for j in 0..eig.dim() {
        if amps[j].norm() < cutoff {
            continue;
        }
        best = Some(match best {
            None => j,
            Some(b) => {
                let (wb, wj) = (eig.width(b), eig.width(j));
                if wj < wb || (wj == wb && amps[j].norm() > amps[b].norm()) {
                    j
                } else {
                    b
                }
            }
        });
    }
    best.ok_or(Error::NoAccessibleState)
}

/// Eigendecomposition of a complex-symmetric matrix.
///
/// Values are sorted by ascending width (then ascending real part), vectors
/// carry `vᵀv = 1` with a deterministic overall sign.
pub fn decompose_symmetric(h: &CMatrix) -> Result<Eigensystem> {
    assert!(h.is_square(), "eigendecomposition requires a square matrix");
    let scale = h.max_abs().max(1.0);
    let asym = h.max_asymmetry();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::AsymmetricInput { asymmetry: asym, tolerance: SYMMETRY_TOL * scale });
    }
    let mut a = h.clone();
    a.symmetrize();
    let n = a.nrows();
    if n == 1 {
        return Ok(Eigensystem { values: vec![a[(0, 0)]], vectors: vec![vec![ONE]] });
    }

    let (mut t, mut z) = hessenberg(&a);
    schur_triangularize(&mut t, &mut z)?;

    let mut pairs: Vec<(C64, Vec<C64>)> = Vec::with_capacity(n);
    for k in 0..n {
        let lam = t[(k, k)];
        let y = triangular_eigvec(&t, k);
        let mut v = z.mul_vec(&y);
        let nv = norm2(&v);
        for x in v.iter_mut() {
            *x /= nv;
        }
        let c = c_dot(&v, &v);
        if c.norm() < C_NORM_TOL {
            return Err(Error::ExceptionalPoint { index: k, c_norm: c.norm() });
        }
        let root = c.sqrt();
        for x in v.iter_mut() {
            *x /= root;
        }
        orient(&mut v);
        pairs.push((lam, v));
    }

    pairs.sort_by(|(la, _), (lb, _)| {
        let (wa, wb) = (-2.0 * la.im, -2.0 * lb.im);
        wa.partial_cmp(&wb).unwrap().then(la.re.partial_cmp(&lb.re).unwrap())
    });
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(Eigensystem { values, vectors })
}

/// Eigenvalues of a general square complex matrix, no symmetry assumed and
/// no eigenvectors computed. Used for density-operator positivity checks.
pub(crate) fn general_eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    assert!(m.is_square(), "eigenvalues require a square matrix");
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let (mut t, mut z) = hessenberg(m);
    schur_triangularize(&mut t, &mut z)?;
    Ok((0..t.nrows()).map(|k| t[(k, k)]).collect())
}

/// Fixes the overall +-1 left by the bilinear normalization: the largest
/// component gets a positive real part (positive imaginary part if its real
/// part is negligible).
fn orient(v: &mut [C64]) {
    let mut imax = 0;
    let mut best = -1.0;
    for (i, x) in v.iter().enumerate() {
        let m = x.norm_sqr();
        if m > best {
            best = m;
            imax = i;
        }
    }
    let x = v[imax];
    let flip = if x.re.abs() > 1e-12 * x.norm() { x.re < 0.0 } else { x.im < 0.0 };
    if flip {
        for y in v.iter_mut() {
            *y = -*y;
        }
    }
}

/// Householder reduction to upper Hessenberg form; returns (H, Q) with
/// `Q H Qᴴ = A`.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        // reflect column k below the subdiagonal onto e1
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = norm2(&v);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vn2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if vn2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vn2;
        // H <- P H, rows k+1..n
        for j in 0..n {
            let mut s = ZERO;
            for (off, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + off, j)];
            }
            s *= beta;
            for (off, vi) in v.iter().enumerate() {
                let e = h[(k + 1 + off, j)] - s * vi;
                h[(k + 1 + off, j)] = e;
            }
        }
        // H <- H P, cols k+1..n
        for i in 0..n {
            let mut s = ZERO;
            for (off, vi) in v.iter().enumerate() {
                s += h[(i, k + 1 + off)] * vi;
            }
            s *= beta;
            for (off, vi) in v.iter().enumerate() {
                let e = h[(i, k + 1 + off)] - s * vi.conj();
                h[(i, k + 1 + off)] = e;
            }
        }
        // Q <- Q P
        for i in 0..n {
            let mut s = ZERO;
            for (off, vi) in v.iter().enumerate() {
                s += q[(i, k + 1 + off)] * vi;
            }
            s *= beta;
            for (off, vi) in v.iter().enumerate() {
                let e = q[(i, k + 1 + off)] - s * vi.conj();
                q[(i, k + 1 + off)] = e;
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Rotation `[[c, s], [-s̄, c]]` (c real) sending `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let d = (na * na + nb * nb).sqrt();
    (na / d, (a / na) * b.conj() / d)
}

/// Explicitly shifted QR with deflation, in place; `z` accumulates the
/// similarity so that `z t zᴴ` stays constant.
fn schur_triangularize(t: &mut CMatrix, z: &mut CMatrix) -> Result<()> {
    let n = t.nrows();
    let mut hi = n - 1;
    let max_total = 40 * n.max(4);
    let mut iters_here = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // deflate converged subdiagonal entries
        let mut deflated = false;
        while hi > 0 {
            let small = f64::EPSILON
                * (t[(hi, hi)].norm() + t[(hi - 1, hi - 1)].norm()).max(f64::MIN_POSITIVE);
            if t[(hi, hi - 1)].norm() <= small {
                t[(hi, hi - 1)] = ZERO;
                hi -= 1;
                iters_here = 0;
                deflated = true;
            } else {
                break;
            }
        }
        if hi == 0 {
            break;
        }
        if !deflated && total >= max_total {
            return Err(Error::NoConvergence(total));
        }
        // active block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let small = f64::EPSILON
                * (t[(lo, lo)].norm() + t[(lo - 1, lo - 1)].norm()).max(f64::MIN_POSITIVE);
            if t[(lo, lo - 1)].norm() <= small {
                t[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }

        let mu = if iters_here > 0 && iters_here.is_multiple_of(12) {
            // exceptional shift to break symmetry-induced cycling
            t[(hi, hi)] + C64::new(1.5 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(t, hi)
        };

        // QR factor (T - mu I) restricted to the active block
        for i in lo..=hi {
            let d = t[(i, i)] - mu;
            t[(i, i)] = d;
        }
        let mut rots: Vec<(f64, C64)> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
            rots.push((c, s));
            for j in k..n {
                let (tk, tk1) = (t[(k, j)], t[(k + 1, j)]);
                t[(k, j)] = c * tk + s * tk1;
                t[(k + 1, j)] = -s.conj() * tk + c * tk1;
            }
        }
        // T <- R Q, Z <- Z Q with Q = G_loᴴ ... G_{hi-1}ᴴ
        for (k, (c, s)) in (lo..hi).zip(rots) {
            for i in 0..=(k + 1) {
                let (tik, tik1) = (t[(i, k)], t[(i, k + 1)]);
                t[(i, k)] = c * tik + s.conj() * tik1;
                t[(i, k + 1)] = -s * tik + c * tik1;
            }
            for i in 0..n {
                let (zik, zik1) = (z[(i, k)], z[(i, k + 1)]);
                z[(i, k)] = c * zik + s.conj() * zik1;
                z[(i, k + 1)] = -s * zik + c * zik1;
            }
        }
        for i in lo..=hi {
            let d = t[(i, i)] + mu;
            t[(i, i)] = d;
        }
        iters_here += 1;
        total += 1;
    }
    Ok(())
}

/// Eigenvalue of the trailing 2x2 of the active block closest to the corner.
fn wilkinson_shift(t: &CMatrix, hi: usize) -> C64 {
    let a = t[(hi - 1, hi - 1)];
    let b = t[(hi - 1, hi)];
    let c = t[(hi, hi - 1)];
    let d = t[(hi, hi)];
    let tr2 = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr2 * tr2 - det).sqrt();
    let (l1, l2) = (tr2 + disc, tr2 - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvector of an upper-triangular matrix for the eigenvalue at `k`, by
/// back-substitution with guarded near-zero pivots (repeated eigenvalues).
fn triangular_eigvec(t: &CMatrix, k: usize) -> Vec<C64> {
    let n = t.nrows();
    let lam = t[(k, k)];
    let scale = t.max_abs().max(1.0);
    let guard = f64::EPSILON * scale;
    let mut y = vec![ZERO; n];
    y[k] = ONE;
    for i in (0..k).rev() {
        let mut s = ZERO;
        for j in i + 1..=k {
            s += t[(i, j)] * y[j];
        }
        let mut d = t[(i, i)] - lam;
        if d.norm() < guard {
            d = C64::new(guard, 0.0);
        }
        y[i] = -s / d;
    }
    y
}

/// Zeroth-order narrow eigenstate of the one-excitation hybrid block and the
/// size of its leading perturbative correction, with the two smallness
/// conditions that keep the correction controlled.
#[derive(Clone, Debug)]
pub struct NarrowStateDiagnostics {
    /// `(-d, g_2, 0) / k`, the decoupled dark superposition of emitter and
    /// narrow mode (basis {emitter, mode 1, mode 2}).
    pub zeroth_order: Vec<C64>,
    /// Complex splittings `A± = -iγ_2 ± sqrt(16k² - γ_2²)` of the bright
    /// partner states.
    pub a_plus: C64,
    pub a_minus: C64,
    /// Euclidean norm of the first-order correction vector.
    pub correction_norm: f64,
    /// Width-mismatch condition, `|γ_1 - γ_e| / 4` vs `2 k² / γ_2`.
    pub rate_lhs: f64,
    pub rate_rhs: f64,
    /// Coupling-asymmetry condition, `g_1 |d² - g_2²|` vs `2 k⁴ / γ_2`.
    pub coupling_lhs: f64,
    pub coupling_rhs: f64,
}

impl NarrowStateDiagnostics {
    pub fn conditions_hold(&self) -> bool {
        self.rate_lhs < self.rate_rhs && self.coupling_lhs < self.coupling_rhs
    }
}

/// First-order perturbation theory around the strong-coupling eigenbasis of
/// the one-excitation hybrid block, treating decay-rate differences and the
/// emitter-narrow-mode coupling as small.
///
/// Valid in the regime `k² = d² + g_2²` dominating `γ_2²/16`; callers should
/// check `k > 0`.
pub fn narrow_state_diagnostics(p: &HybridParams) -> Result<NarrowStateDiagnostics> {
    let k2 = p.d * p.d + p.g_2 * p.g_2;
    let k = k2.sqrt();
    if k == 0.0 {
        return Err(Error::InvalidParameter(
            "perturbative narrow state undefined at d = g_2 = 0".into(),
        ));
    }
    let zeroth: Vec<C64> = vec![C64::new(-p.d / k, 0.0), C64::new(p.g_2 / k, 0.0), ZERO];

    // Bright partners: unnormalized (g_2, d, A±/4) with A± = -iγ_2 ± sqrt(16k² - γ_2²).
    let root = C64::new(16.0 * k2 - p.gamma_2 * p.gamma_2, 0.0).sqrt();
    let a_plus = -C64::i() * p.gamma_2 + root;
    let a_minus = -C64::i() * p.gamma_2 - root;

    let numer = C64::new(p.g_1 * (p.d * p.d - p.g_2 * p.g_2), 0.0)
        + C64::i() * p.d * p.g_2 * 0.5 * (p.gamma_1 - p.gamma_e);

    let mut correction = vec![ZERO; 3];
    for a in [a_plus, a_minus] {
        let cnorm = (a * a + C64::new(16.0 * k2, 0.0)).sqrt() / 4.0;
        // coefficient of the normalized bright state in the correction
        let coeff =
            C64::new(16.0, 0.0) * numer / (a * k * (a * a + C64::new(16.0 * k2, 0.0)).sqrt());
        let v = [C64::new(p.g_2, 0.0), C64::new(p.d, 0.0), a / 4.0];
        for (ci, vi) in correction.iter_mut().zip(v.iter()) {
            *ci += coeff * vi / cnorm;
        }
    }

    Ok(NarrowStateDiagnostics {
        zeroth_order: zeroth,
        a_plus,
        a_minus,
        correction_norm: norm2(&correction),
        rate_lhs: (p.gamma_1 - p.gamma_e).abs() / 4.0,
        rate_rhs: 2.0 * k2 / p.gamma_2,
        coupling_lhs: p.g_1 * (p.d * p.d - p.g_2 * p.g_2).abs(),
        coupling_rhs: 2.0 * k2 * k2 / p.gamma_2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_manifold_hamiltonian, ModelParams, QuadraticParams};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn residual(h: &CMatrix, eig: &Eigensystem) -> f64 {
        let mut worst: f64 = 0.0;
        for (lam, v) in eig.values.iter().zip(eig.vectors.iter()) {
            let hv = h.mul_vec(v);
            let r: Vec<C64> = hv.iter().zip(v.iter()).map(|(a, b)| a - lam * b).collect();
            worst = worst.max(norm2(&r) / norm2(v));
        }
        worst
    }

    #[test]
    fn two_by_two_matches_closed_form() {
        // [[δ - iγa/2, √2 g], [√2 g, -iγb]]
        let (ga, gb, g, delta) = (1.0, 1e-3, 0.05, 0.3);
        let h = CMatrix::from_rows(&[
            vec![c(delta, -ga / 2.0), c(2.0f64.sqrt() * g, 0.0)],
            vec![c(2.0f64.sqrt() * g, 0.0), c(0.0, -gb)],
        ]);
        let eig = decompose_symmetric(&h).unwrap();
        let tr2 = (h[(0, 0)] + h[(1, 1)]) * 0.5;
        let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)];
        let disc = (tr2 * tr2 - det).sqrt();
        let mut expect = [tr2 + disc, tr2 - disc];
        expect.sort_by(|a, b| (-2.0 * a.im).partial_cmp(&(-2.0 * b.im)).unwrap());
        for (got, want) in eig.values.iter().zip(expect.iter()) {
            assert!((got - want).norm() < 1e-12, "{got} vs {want}");
        }
        assert!(residual(&h, &eig) < 1e-12);
        assert!(eig.width(0) <= eig.width(1));
    }

    #[test]
    fn manifold_blocks_decompose_with_small_residual() {
        let p = ModelParams::Quadratic(QuadraticParams {
            gamma_a: 1.0,
            gamma_b: 1e-3,
            g: 0.05,
            delta_a: 0.0,
        });
        for q in 1..=3u32 {
            let h = build_manifold_hamiltonian(&p, q);
            let eig = decompose_symmetric(&h).unwrap();
            assert!(residual(&h, &eig) < 1e-11, "q = {q}");
        }
    }

    #[test]
    fn eigenvectors_are_c_orthonormal() {
        let h = CMatrix::from_rows(&[
            vec![c(0.1, -0.5), c(0.3, 0.0), c(0.0, 0.2)],
            vec![c(0.3, 0.0), c(-0.4, -0.01), c(0.7, -0.1)],
            vec![c(0.0, 0.2), c(0.7, -0.1), c(0.9, -0.2)],
        ]);
        let eig = decompose_symmetric(&h).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let d = c_dot(&eig.vectors[i], &eig.vectors[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d.norm() - want).abs() < 1e-9, "({i},{j}) -> {d}");
            }
        }
    }

    #[test]
    fn exceptional_point_is_reported_not_normalized() {
        // [[i, 1], [1, -i]] is defective: one eigenvector (1, -i), vᵀv = 0.
        let h =
            CMatrix::from_rows(&[vec![c(0.0, 1.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, -1.0)]]);
        match decompose_symmetric(&h) {
            Err(Error::ExceptionalPoint { c_norm, .. }) => assert!(c_norm < 1e-10),
            other => panic!("expected exceptional point, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let h =
            CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.5, 0.0), c(0.0, 0.0)]]);
        assert!(matches!(decompose_symmetric(&h), Err(Error::AsymmetricInput { .. })));
    }

    #[test]
    fn orientation_is_deterministic() {
        let h = CMatrix::from_rows(&[
            vec![c(0.2, -0.3), c(0.4, 0.1)],
            vec![c(0.4, 0.1), c(-0.6, -0.8)],
        ]);
        let a = decompose_symmetric(&h).unwrap();
        let b = decompose_symmetric(&h.scale(c(1.0, 0.0))).unwrap();
        for (va, vb) in a.vectors.iter().zip(b.vectors.iter()) {
            for (x, y) in va.iter().zip(vb.iter()) {
                assert!((x - y).norm() < 1e-14);
            }
        }
        for v in &a.vectors {
            let imax = (0..v.len())
                .max_by(|&i, &j| v[i].norm().partial_cmp(&v[j].norm()).unwrap())
                .unwrap();
            let lead = v[imax];
            assert!(lead.re > 0.0 || (lead.re.abs() <= 1e-12 * lead.norm() && lead.im > 0.0));
        }
    }

    #[test]
    fn accessibility_filter_and_tie_breaks() {
        let eig = Eigensystem {
            values: vec![c(0.0, -0.05), c(1.0, -0.05), c(0.0, -0.5)],
            vectors: vec![vec![ONE], vec![ONE], vec![ONE]],
        };
        // narrowest (index 0) is dark: skipped in favor of equally narrow index 1
        let amps = vec![c(1e-9, 0.0), c(0.5, 0.0), c(1.0, 0.0)];
        assert_eq!(narrowest_accessible(&eig, &amps).unwrap(), 1);
        // both narrow ones accessible: width tie prefers larger amplitude
        let amps = vec![c(0.2, 0.0), c(0.5, 0.0), c(1.0, 0.0)];
        assert_eq!(narrowest_accessible(&eig, &amps).unwrap(), 1);
        let amps = vec![c(0.6, 0.0), c(0.5, 0.0), c(1.0, 0.0)];
        assert_eq!(narrowest_accessible(&eig, &amps).unwrap(), 0);
        let amps = vec![ZERO, ZERO, ZERO];
        assert!(matches!(narrowest_accessible(&eig, &amps), Err(Error::NoAccessibleState)));
    }

    #[test]
    fn narrow_state_conditions_at_reference_point() {
        let p = HybridParams {
            gamma_e: 1e-5,
            gamma_1: 1e-3,
            gamma_2: 1.0,
            g_1: 0.0,
            g_2: 1.0 / 15.0,
            d: 0.1,
            delta_e: 0.0,
            delta_2: 0.0,
        };
        let diag = narrow_state_diagnostics(&p).unwrap();
        // Vieta checks on A±: sum = -2iγ₂, product = -16k²
        let k2 = p.d * p.d + p.g_2 * p.g_2;
        assert!((diag.a_plus + diag.a_minus - c(0.0, -2.0 * p.gamma_2)).norm() < 1e-12);
        assert!((diag.a_plus * diag.a_minus - c(-16.0 * k2, 0.0)).norm() < 1e-12);
        assert!((diag.rate_lhs - 2.475e-4).abs() < 1e-12);
        assert!((diag.rate_rhs - 0.028_888_888_888_888_89).abs() < 1e-12);
        assert_eq!(diag.coupling_lhs, 0.0, "g_1 = 0 kills the second condition");
        assert!(diag.conditions_hold());
        // with g_1 = 0 the correction is purely the rate mismatch channel
        assert!(diag.correction_norm > 0.0 && diag.correction_norm < 0.05);
    }

    proptest! {
        #[test]
        fn random_symmetric_matrices_decompose(seed in 1u64..120) {
            let n = 3 + (seed % 4) as usize; // 3..=6
            let mut s = seed.wrapping_mul(0x2545f4914f6cdd1d).wrapping_add(11);
            let mut next = move || {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            };
            let mut h = CMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let z = c(next(), next());
                    h[(i, j)] = z;
                    h[(j, i)] = z;
                }
            }
            match decompose_symmetric(&h) {
                Ok(eig) => {
                    prop_assert!(residual(&h, &eig) < 1e-9);
                    for w in eig.widths().windows(2) {
                        prop_assert!(w[0] <= w[1]);
                    }
                }
                Err(Error::ExceptionalPoint { .. }) => {} // legitimately defective draw
                Err(e) => prop_assert!(false, "unexpected error {e:?}"),
            }
        }
    }
}
