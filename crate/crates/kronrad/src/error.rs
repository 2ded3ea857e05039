//! Error type shared by all modules of the core crate.
//!
//! Numerical routines never panic on bad input: dimension and parameter
//! violations, rank deficiency, and failed positive-definiteness checks all
//! surface as [`Error`] variants so callers (and the CLI) can map them to
//! diagnostics and exit codes.

/// Unified error for the radar core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A size parameter (array length, FFT size, pulse count, ...) is
    /// invalid on its own, e.g. zero where a positive count is required.
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// Two arguments have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A set of basis vectors is numerically rank-deficient; carries the
    /// estimated condition number that tripped the guard.
    #[error("singular subspace: condition number {cond:.3e} exceeds the rank guard")]
    SingularSubspace { cond: f64 },

    /// More interference directions than receive elements (Q > N), so the
    /// interference-plus-noise model is over-determined.
    #[error("over-determined interference: {q} directions for {n} receive elements")]
    OverDeterminedInterference { q: usize, n: usize },

    /// A slow-time code family cannot be built with the requested sizes.
    #[error("code construction failed: {0}")]
    CodeConstruction(String),

    /// Array geometry or chirp parameters violate a physical constraint.
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    /// A matrix required to be Hermitian positive definite failed its
    /// Cholesky factorization.
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// A requested range/Doppler bin lies outside the decoded grid.
    #[error("bin out of range: {0}")]
    BinOutOfRange(String),

    /// A scalar parameter is out of its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A special-case reduction was requested for a scenario that does not
    /// satisfy the required preconditions.
    #[error("special-case precondition violated: {0}")]
    SpecialCase(String),
}

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;
