//! Excitation-resolved Fock bases and operator blocks.
//!
//! The models in this crate conserve a weighted excitation number
//! `N = Σ_k w_k n_k (+ emitter bit)`, so every operator of interest maps one
//! fixed-`q` manifold to another. This module enumerates those manifolds in a
//! canonical order and materializes operator blocks between them.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Largest bosonic mode count any layout may declare.
pub const MAX_MODES: usize = 4;

/// Highest excitation manifold the weak-drive machinery ever builds.
pub const Q_MAX: usize = 3;

/// Static description of a model's degrees of freedom.
///
/// The optional two-level emitter always carries excitation weight 1; each
/// bosonic mode `k` carries `weights[k]` quanta of excitation per photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeLayout {
    pub emitter_present: bool,
    pub mode_count: usize,
    pub weights: [u32; MAX_MODES],
}

impl ModeLayout {
    pub fn new(emitter_present: bool, weights: &[u32]) -> Self {
        assert!(
            !weights.is_empty() && weights.len() <= MAX_MODES,
            "1..={MAX_MODES} modes supported"
        );
        assert!(weights.iter().all(|&w| w >= 1), "mode weights must be at least 1");
        let mut w = [0u32; MAX_MODES];
        w[..weights.len()].copy_from_slice(weights);
        ModeLayout { emitter_present, mode_count: weights.len(), weights: w }
    }
}

/// Occupation of every degree of freedom; mode entries beyond the layout's
/// `mode_count` are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OccupationState {
    pub emitter: bool,
    pub n: [u32; MAX_MODES],
}

impl OccupationState {
    pub fn vacuum() -> Self {
        OccupationState { emitter: false, n: [0; MAX_MODES] }
    }

    pub fn excitation(&self, layout: &ModeLayout) -> u32 {
        let mut q = u32::from(self.emitter);
        for k in 0..layout.mode_count {
            q += self.n[k] * layout.weights[k];
        }
        q
    }
}

/// All occupation states of one excitation manifold, canonically ordered.
///
/// The order is descending lexicographic over `(emitter, n_0, n_1, ...)`:
/// emitter-excited states first, then higher occupation of earlier modes.
#[derive(Clone, Debug)]
pub struct ManifoldBasis {
    pub layout: ModeLayout,
    pub q: u32,
    pub states: Vec<OccupationState>,
}

impl ManifoldBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, s: &OccupationState) -> Option<usize> {
        self.states.iter().position(|t| t == s)
    }
}

/// Enumerates the manifold of weighted excitation `q` in canonical order.
pub fn enumerate_manifold(layout: &ModeLayout, q: u32) -> ManifoldBasis {
    let mut states = Vec::new();
    let emitter_choices: &[bool] = if layout.emitter_present { &[true, false] } else { &[false] };
    for &e in emitter_choices {
        let budget = match q.checked_sub(u32::from(e)) {
            Some(b) => b,
            None => continue,
        };
        let mut n = [0u32; MAX_MODES];
        fill_modes(layout, 0, budget, &mut n, e, &mut states);
    }
    ManifoldBasis { layout: *layout, q, states }
}

fn fill_modes(
    layout: &ModeLayout,
    k: usize,
    budget: u32,
    n: &mut [u32; MAX_MODES],
    emitter: bool,
    out: &mut Vec<OccupationState>,
) {
    if k == layout.mode_count - 1 {
        let w = layout.weights[k];
        if budget.is_multiple_of(w) {
            n[k] = budget / w;
            out.push(OccupationState { emitter, n: *n });
            n[k] = 0;
        }
        return;
    }
    let w = layout.weights[k];
    let top = budget / w;
    for nk in (0..=top).rev() {
        n[k] = nk;
        fill_modes(layout, k + 1, budget - nk * w, n, emitter, out);
    }
    n[k] = 0;
}

/// One ladder or diagonal factor acting on a single degree of freedom.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimitiveOp {
    /// Bosonic annihilation on mode `k`: `a|n> = sqrt(n)|n-1>`.
    Lower(usize),
    /// Bosonic creation on mode `k`: `a†|n> = sqrt(n+1)|n+1>`.
    Raise(usize),
    /// Bosonic number on mode `k`: `n|n> = n|n>` (exact integer amplitude).
    Number(usize),
    /// Emitter lowering; annihilates the ground state.
    SigmaMinus,
    /// Emitter raising; annihilates the excited state (two-level saturation).
    SigmaPlus,
}

impl PrimitiveOp {
    fn excitation_change(&self, layout: &ModeLayout) -> i64 {
        match *self {
            PrimitiveOp::Lower(k) => -i64::from(layout.weights[k]),
            PrimitiveOp::Raise(k) => i64::from(layout.weights[k]),
            PrimitiveOp::Number(_) => 0,
            PrimitiveOp::SigmaMinus => -1,
            PrimitiveOp::SigmaPlus => 1,
        }
    }

    fn apply(&self, s: &OccupationState) -> Option<(OccupationState, f64)> {
        let mut t = *s;
        match *self {
            PrimitiveOp::Lower(k) => {
                if t.n[k] == 0 {
                    return None;
                }
                let amp = f64::from(t.n[k]).sqrt();
                t.n[k] -= 1;
                Some((t, amp))
            }
            PrimitiveOp::Raise(k) => {
                let amp = f64::from(t.n[k] + 1).sqrt();
                t.n[k] += 1;
                Some((t, amp))
            }
            PrimitiveOp::Number(k) => {
                if t.n[k] == 0 {
                    return None;
                }
                Some((t, f64::from(t.n[k])))
            }
            PrimitiveOp::SigmaMinus => {
                if !t.emitter {
                    return None;
                }
                t.emitter = false;
                Some((t, 1.0))
            }
            PrimitiveOp::SigmaPlus => {
                if t.emitter {
                    return None;
                }
                t.emitter = true;
                Some((t, 1.0))
            }
        }
    }
}

/// An ordered product of primitive factors, applied right-to-left like the
/// written operator string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSpec {
    factors: Vec<PrimitiveOp>,
}

impl OperatorSpec {
    pub fn new(factors: Vec<PrimitiveOp>) -> Self {
        OperatorSpec { factors }
    }

    pub fn single(op: PrimitiveOp) -> Self {
        OperatorSpec { factors: vec![op] }
    }

    /// Net weighted excitation change of the whole product.
    pub fn excitation_change(&self, layout: &ModeLayout) -> i64 {
        self.factors.iter().map(|f| f.excitation_change(layout)).sum()
    }

    /// Applies the product to one basis state; `None` when annihilated.
    pub fn apply(&self, s: &OccupationState) -> Option<(OccupationState, f64)> {
        let mut state = *s;
        let mut amp = 1.0;
        for f in self.factors.iter().rev() {
            let (t, a) = f.apply(&state)?;
            state = t;
            amp *= a;
        }
        Some((state, amp))
    }
}

/// Materializes the block `<to| op |from>` as a dense `|to| x |from|` matrix.
///
/// The operator's net excitation change must equal `to.q - from.q`; every
/// surviving image state is guaranteed to lie in `to` by that bookkeeping.
pub fn operator_block(
    op: &OperatorSpec,
    from: &ManifoldBasis,
    to: &ManifoldBasis,
) -> Result<CMatrix> {
    let change = op.excitation_change(&from.layout);
    let actual = i64::from(to.q) - i64::from(from.q);
    if change != actual {
        return Err(Error::ExcitationMismatch { change, actual });
    }
    let mut m = CMatrix::zeros(to.dim(), from.dim());
    for (j, s) in from.states.iter().enumerate() {
        if let Some((t, amp)) = op.apply(s) {
            if amp == 0.0 {
                continue;
            }
            let i = to
                .index_of(&t)
                .expect("excitation bookkeeping guarantees the image lies in the target manifold");
            m[(i, j)] += C64::new(amp, 0.0);
        }
    }
    Ok(m)
}
