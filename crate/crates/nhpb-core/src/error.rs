//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An operator was asked to map between manifolds whose excitation
    /// difference does not equal the operator's net excitation change.
    #[error("excitation mismatch: operator changes excitation by {change}, manifolds differ by {actual}")]
    ExcitationMismatch { change: i64, actual: i64 },

    /// A matrix expected to be complex-symmetric deviates beyond tolerance.
    #[error("matrix asymmetry {asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    AsymmetricInput { asymmetry: f64, tolerance: f64 },

    /// An eigenvector is self-orthogonal under the bilinear product, so the
    /// matrix sits at (or numerically indistinguishable from) an exceptional
    /// point and the spectral decomposition does not exist.
    #[error("eigenvector {index} is self-orthogonal (|v^T v| = {c_norm:.3e}): exceptional point")]
    ExceptionalPoint { index: usize, c_norm: f64 },

    /// The QR iteration failed to reduce the matrix to triangular form.
    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),

    /// A linear solve encountered a pivot too small to trust.
    #[error("matrix is numerically singular (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    /// The detuned manifold Hamiltonian cannot be inverted.
    #[error("resolvent is numerically singular in manifold {manifold}")]
    SingularResolvent { manifold: usize },

    /// The one-excitation amplitude vanished, so normalized correlations are undefined.
    #[error("detected intensity is zero; normalized correlations undefined")]
    ZeroIntensity,

    /// No eigenstate couples to the pump above the accessibility threshold.
    #[error("no eigenstate is accessible above the amplitude threshold")]
    NoAccessibleState,

    /// A physical parameter violates its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A scan configuration is malformed.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The steady-state solve did not meet the residual tolerance.
    #[error("steady-state residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    SteadyStateResidual { residual: f64, tolerance: f64 },

    /// A truncated product space would exceed the dense-solver budget.
    #[error("superoperator would have {rows} rows, above the cap of {cap}")]
    DimensionLimit { rows: usize, cap: usize },

    /// The Lindblad generator has more than one steady state.
    #[error("steady state is not unique (singular after trace closure)")]
    NonUniqueSteadyState,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable code used in dataset `status` columns.
    pub fn status_code(&self) -> &'static str {
        match self {
            Error::ExcitationMismatch { .. } => "excitation_mismatch",
            Error::AsymmetricInput { .. } => "asymmetric_input",
            Error::ExceptionalPoint { .. } => "exceptional_point",
            Error::NoConvergence(_) => "no_convergence",
            Error::SingularMatrix { .. } => "singular_matrix",
            Error::SingularResolvent { .. } => "singular_resolvent",
            Error::ZeroIntensity => "zero_intensity",
            Error::NoAccessibleState => "no_accessible_state",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidConfig(_) => "invalid_config",
            Error::SteadyStateResidual { .. } => "steady_state_residual",
            Error::DimensionLimit { .. } => "dimension_limit",
            Error::NonUniqueSteadyState => "non_unique_steady_state",
            Error::Io(_) => "io_error",
            Error::Json(_) => "json_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
