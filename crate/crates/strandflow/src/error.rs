//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]. The CLI maps variants onto
//! process exit codes (configuration problems, numerical failures, property
//! verdicts), so variants are grouped by failure class rather than by module.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Machine geometry violates a structural requirement (lengths, counts).
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// A numeric argument is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The end-winding ratio must satisfy alpha_w >= 1 (l_EW >= 0).
    #[error("alpha_w must be >= 1, got {0}")]
    AlphaBelowOne(f64),

    /// A conductor index does not exist in the referenced slot layout.
    #[error("conductor index {index} out of bounds in slot {slot} ({count} conductors)")]
    ConductorOutOfBounds { slot: u32, index: usize, count: usize },

    /// Distance between a conductor and itself was requested.
    #[error("distance from conductor {index} to itself is undefined (slot {slot})")]
    SelfDistance { slot: u32, index: usize },

    /// Two distinct conductors share the same cross-section position, which
    /// makes the log-distance inductance entry singular.
    #[error("singular layout: conductors {a} and {b} in slot {slot} are coincident")]
    SingularLayout { slot: u32, a: usize, b: usize },

    /// Matrix/vector dimensions passed to an assembly step disagree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The winding description failed structural validation.
    #[error("invalid winding: {0}")]
    InvalidWinding(String),

    /// The vector-potential field lacks a value needed by the winding.
    #[error("flux field has no entry for slot {slot}, conductor {conductor}, harmonic {k}")]
    MissingFlux { slot: u32, conductor: usize, k: u32 },

    /// A per-harmonic system is numerically singular or too ill-conditioned
    /// to trust (1-norm condition estimate above the documented limit).
    #[error("harmonic {k}: system is singular or ill-conditioned (condition estimate {estimate:.3e})")]
    SingularSystem { k: u32, estimate: f64 },

    /// The solved vector fails the relative residual bound.
    #[error("harmonic {k}: solve residual {residual:.3e} exceeds {bound:.3e}")]
    ResidualTooLarge { k: u32, residual: f64, bound: f64 },

    /// Waveform sampling below the alias-free minimum.
    #[error("samples_per_period {samples} is below the alias-free minimum {required} (2*N_h + 1)")]
    Undersampled { samples: u32, required: u32 },

    /// A sweep step failed; wraps the underlying error with the ratio at
    /// which it occurred.
    #[error("sweep point alpha_w = {alpha}: {source}")]
    SweepPoint {
        alpha: f64,
        #[source]
        source: Box<Error>,
    },

    /// Scenario or winding configuration could not be parsed or is
    /// semantically inconsistent; the message names the offending key.
    #[error("config error: {0}")]
    Config(String),

    /// A flux table failed strict parsing.
    #[error("flux file {path}: line {line}: {message}")]
    FluxParse { path: String, line: usize, message: String },

    /// Filesystem failure, with the path that caused it.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Helper to wrap `std::io::Error` with its path context.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
