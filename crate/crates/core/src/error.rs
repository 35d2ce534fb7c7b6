use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("inconsistent data: {0}")]
    InconsistentData(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("evaluation point within guardband of a pole: {0}")]
    PoleProximity(String),
    #[error("no quad system with invertible B' found")]
    NoQuadFound,
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("no strict angle structure (best minimal angle {best_min_angle:.6})")]
    NoStrictAngles { best_min_angle: f64 },
    #[error("lattice sum does not converge: {0}")]
    NonConvergent(String),
    #[error("prefactor convention is ambiguous: {0}")]
    AmbiguousConvention(String),
    #[error("contour is pinched: {0}")]
    PinchDetected(String),
    #[error("quadrature did not converge (grid {grid}, last relative change {change:.3e})")]
    NoConvergence { grid: usize, change: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
