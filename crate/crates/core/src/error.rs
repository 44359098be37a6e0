use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The randomized zero test could neither confirm nor refute an identity.
    #[error("zero test inconclusive for `{0}`")]
    Inconclusive(String),

    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("invalid leaf slice: {0}")]
    InvalidSlice(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("vector field is not tangent to the foliation")]
    NotSubordinate,

    #[error("interior product needs a form of positive degree")]
    ZeroDegree,

    #[error("degenerate leafwise two-form: {0}")]
    Degenerate(String),

    #[error("leafwise two-form is not closed: {0}")]
    NotClosed(String),

    #[error("characteristic distribution rank drop: {0}")]
    RankDrop(String),

    #[error("potential along `{0}` is not purely imaginary")]
    NonImaginaryPotential(String),

    #[error("operation requires the Hermitian gauge")]
    NotHermitianGauge,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
