use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("payoff coefficient c{index} = {value} is negative")]
    NegativeCoefficient { index: usize, value: f64 },
    #[error("angle {name} = {value} is outside the open interval (0, pi/2)")]
    AngleOutOfRange { name: &'static str, value: f64 },
    #[error("matrix is not symmetric (off-diagonal mismatch {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("angle {0} makes the change of variables singular (sin 2θ = 0)")]
    SingularAngle(f64),
    #[error("angular parameters differ: theta = {theta}, tau = {tau}")]
    AnglesDiffer { theta: f64, tau: f64 },
    #[error("omega = b - a vanishes")]
    ZeroOmega,
    #[error("vector {0} is not of unit length")]
    NotUnit(String),
    #[error("grid resolution {0} is below the minimum of 8")]
    ResolutionTooSmall(usize),
    #[error("grid epsilon {0} must be finite and nonnegative")]
    InvalidEpsilon(f64),
}
