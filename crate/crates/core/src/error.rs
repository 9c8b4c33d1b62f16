use thiserror::Error;

/// Errors raised by the algebra, operator and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported gamma representation `{0}` (expected `standard` or `chiral`)")]
    UnsupportedRepresentation(String),

    #[error("index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("no spatial rotation about the time axis")]
    TimeAxisRotation,

    #[error("translation undefined on axis {axis}: K_{axis} = 0")]
    TranslationUndefined { axis: usize },

    #[error("momentum is off shell (dispersion residual {residual:e})")]
    OffShell { residual: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("wavefunction has {got} samples, grid has {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("off-diagonal metric term v3 requires a cartesian-3d grid")]
    CrossTermNeedsCartesian,

    #[error("literal operator ordering is not Hermitian; bound states need symmetrized ordering")]
    NonHermitianOrdering,

    #[error("supercritical coupling {0} (must satisfy 0 < alpha*Z < 1)")]
    Supercritical(f64),

    #[error("invalid quantum numbers n = {n}, kappa = {kappa}")]
    InvalidQuantumNumbers { n: u32, kappa: i32 },

    #[error("no bound state: {0}")]
    NoBoundState(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}
