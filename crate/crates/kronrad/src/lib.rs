//! Core library for simulating mutual interference between MIMO-FMCW
//! automotive radars and for detecting targets through that interference.
//!
//! The crate models the full victim-radar signal chain — slow-time coded
//! transmit pulses, object and interferer returns at the ADC output,
//! range/Doppler decoding into virtual-array snapshots — together with the
//! detector family built on the Kronecker structure of decoded interference:
//!
//! * a clairvoyant benchmark that subtracts the true interference,
//! * an orthogonal-subspace (null-steering) detector,
//! * an LCMV detector against the interference-plus-noise covariance, and
//! * a regularized-projection (generalized-sidelobe) detector that uses the
//!   interferers' spatial directions plus per-direction power estimates.
//!
//! Closed-form performance theory (exact false-alarm/detection curves via
//! the Marcum Q function) and the adaptive estimators that feed the
//! detectors from training bins complete the toolkit. The companion harness
//! crate drives Monte Carlo experiments and the CLI.
//!
//! # Layout
//!
//! | module | contents |
//! |---|---|
//! | [`array_math`] | steering vectors, Kronecker products, orthogonal and regularized projections, dense Hermitian helpers |
//! | [`waveform`] | chirp parameters, array geometry, slow-time code families |
//! | [`signal_chain`] | object/interference simulation, decoding, snapshots, special-case validators |
//! | [`detectors`] | the four test statistics and their weight vectors |
//! | [`theory`] | Marcum Q, thresholds, non-centrality parameters, ROC curves |
//! | [`estimation`] | training-bin statistics, covariance perturbation, estimated detector inputs |
//!
//! # Conventions
//!
//! * All DFTs use the negative-exponent forward kernel `exp(-j2πfk)` with no
//!   normalization.
//! * Virtual-array snapshots are ordered transmit-major: entry `m·N + n`.
//! * Angles at public API boundaries are in degrees; spatial frequencies are
//!   in cycles per element.
//! * Everything is generic over the real scalar via [`scalar::RadarScalar`];
//!   use [`Real`]/[`C64`] for the common double-precision instantiation.

pub mod array_math;
pub mod detectors;
pub mod error;
pub mod estimation;
pub mod scalar;
pub mod signal_chain;
pub mod theory;
pub mod waveform;

pub use error::{Error, Result};
pub use scalar::{RadarScalar, C};

/// Default real scalar used by the harness and most tests.
pub type Real = f64;

/// Double-precision complex sample.
pub type C64 = num_complex::Complex<f64>;

/// Single-precision complex sample.
pub type C32 = num_complex::Complex<f32>;

/// Speed of light in vacuum (m/s), the only physical constant the crate
/// needs: it converts ranges to delays and carrier frequency to wavelength.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Numerical tolerances used by the linear-algebra guards.
///
/// The defaults are deliberately conservative for double precision; callers
/// with unusually scaled data can pass their own values through the
/// `*_with` function variants.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relative singular-value threshold below which a basis is declared
    /// rank-deficient (`s_min <= rank_rel · s_max`).
    pub rank_rel: f64,
    /// Relative pivot threshold for Cholesky factorization
    /// (`pivot <= pivot_rel · max_initial_diagonal` fails).
    pub pivot_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rel: 1e-10,
            pivot_rel: 1e-12,
        }
    }
}
