use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("pole: coordinate {axis} is zero where the polynomial has a negative exponent")]
    Pole { axis: usize },

    #[error("a first integral must be non-constant")]
    ConstantCandidate,

    #[error("origin is not an equilibrium: f(0) != 0 (component {component})")]
    NotEquilibrium { component: usize },

    #[error("{field} is not defined at the origin (negative exponent)")]
    SingularAtOrigin { field: String },

    #[error("root finder did not converge for a degree-{degree} polynomial after {attempts} attempts")]
    RootNonConvergence { degree: usize, attempts: usize },

    #[error("Df(0) is singular (det = 0)")]
    SingularJacobian,

    #[error("Df(0) has a zero eigenvalue")]
    ZeroEigenvalue,

    #[error("Df(0) has repeated eigenvalues; only the diagonalizable, simple-spectrum case is supported")]
    RepeatedEigenvalues,

    #[error("no admissible noise base u found after {tries} tries (last offending l = {offending:?})")]
    NoAdmissibleBase { tries: usize, offending: Vec<i64> },

    #[error("no pole-free sample point found after {0} tries")]
    NoSamplePoint(usize),

    #[error("invalid window: dmin = {dmin} > dmax = {dmax}")]
    InvalidWindow { dmin: i64, dmax: i64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("duplicate exponent vector {exps:?} in {location}")]
    DuplicateTerm { exps: Vec<i64>, location: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
