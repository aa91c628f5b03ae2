use thiserror::Error;

/// Errors raised by the solvers, integrators and sweep drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("potential has no central barrier (beta = 0)")]
    NoBarrier,

    #[error("energy {energy} lies below the potential minimum {minimum}")]
    EnergyBelowMinimum { energy: f64, minimum: f64 },

    #[error("trace-minimization cubic is degenerate (alpha = 0 gives gamma = 0)")]
    DegenerateCubic,

    #[error("eigensolver failed: {0}")]
    EigensolverFailure(String),

    #[error("quadrature did not converge after {panels} panels: estimates {coarse} and {fine}")]
    NonConvergent { coarse: f64, fine: f64, panels: usize },

    #[error("state {0} is outside the tabulated closed forms (n <= 3)")]
    UnsupportedState(usize),

    #[error("state index {index} out of range for a basis of size {size}")]
    StateOutOfRange { index: usize, size: usize },

    #[error("grid too coarse: {points} points, need at least {required}")]
    GridTooCoarse { points: usize, required: usize },

    #[error("turning point search failed: {0}")]
    RootNotFound(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoBarrier
                | Error::EnergyBelowMinimum { .. }
                | Error::DegenerateCubic
                | Error::EigensolverFailure(_)
                | Error::NonConvergent { .. }
                | Error::RootNotFound(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
