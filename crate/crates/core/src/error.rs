use thiserror::Error;

use crate::curve::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),

    #[error("invalid curve: {}", fmt_violations(.0))]
    InvalidCurve(Vec<Violation>),

    #[error("curve has jumps; use the relaxed functionals")]
    NotAbsolutelyContinuous,

    #[error("operation requires a curve of positive length")]
    ZeroLength,

    #[error("invalid reparametrisation: {0}")]
    InvalidReparam(String),

    #[error("expected a unit vector, got norm {0}")]
    NonUnitVector(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("ramp width {eps} too large (must be below {max})")]
    EpsilonTooLarge { eps: f64, max: f64 },

    #[error("brute force instance too large: {paths} monotone paths")]
    InstanceTooLarge { paths: f64 },

    #[error("grid is missing node parameter {0}")]
    GridMissingNode(f64),

    #[error("invalid grid configuration: {0}")]
    InvalidConfig(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
