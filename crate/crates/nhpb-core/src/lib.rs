//! Weak-drive photon statistics of lossy bosonic models whose antibunching
//! is carried by the widths of complex eigenstates rather than by level
//! repulsion.
//!
//! The crate builds non-Hermitian excitation-manifold Hamiltonians for two
//! models (a quadratically coupled mode pair and an emitter hybridized with
//! two linearly coupled modes), extracts their complex spectra, and evaluates
//! steady-state intensity and normalized second- and third-order correlation
//! functions under a weak coherent drive. Every quantity is available through
//! two independent routes (direct linear solves against assembled matrices,
//! and eigendecomposition sums) plus a full master-equation reference
//! integrator used for validation.

pub mod correlations;
pub mod eigen;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod linalg;
pub mod lindblad;

pub use error::{Error, Result};
