use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    #[error("matrix is not symmetric (defect {defect:e})")]
    NotSymmetric { defect: f64 },

    #[error("matrix is not special orthogonal (orthogonality defect {defect:e}, det {det})")]
    NotSpecialOrthogonal { defect: f64, det: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("degenerate case: {0}")]
    DegenerateCase(String),

    #[error("closed form does not apply: {0}")]
    WrongCase(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
