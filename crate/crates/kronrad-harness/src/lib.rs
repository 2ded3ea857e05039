//! Scenario-driven experiment harness for the `kronrad` radar toolkit.
//!
//! The library side of the `kronrad` binary: JSON scenario configs, Monte
//! Carlo ROC sweeps against closed-form detection theory, realistic
//! range-angle heatmaps and output-interference-power sweeps built on the
//! full simulation chain, special-case reduction checks, and CSV/SVG
//! emitters.
//!
//! Everything here is deterministic given the scenario seed: Monte Carlo
//! trials draw from counter-mode substreams keyed by `(seed, trial)`, so
//! results are independent of thread scheduling.

pub mod config;
pub mod emit;
pub mod realistic;
pub mod rng;
pub mod roc;
pub mod special;

/// Harness-level error, carrying the process exit code policy.
///
/// * `Config` — unreadable, unparsable, or invalid scenario input (exit 2).
/// * `Numerical` — a validation or reduction check failed (exit 3).
/// * `Io` — output could not be written (exit 4).
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    /// Process exit code associated with this error class.
    #[must_use]
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numerical(_) => 3,
            HarnessError::Io(_) => 4,
        }
    }
}

impl From<kronrad::Error> for HarnessError {
    fn from(e: kronrad::Error) -> Self {
        HarnessError::Numerical(e.to_string())
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Config(format!(
            "JSON parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

/// Harness result alias.
pub type Result<T> = std::result::Result<T, HarnessError>;
