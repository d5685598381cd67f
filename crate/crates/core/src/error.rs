use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds {allowed:.3e}")]
    NotHermitian { defect: f64, allowed: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix side {0} is not even, so it has no 2x2 block structure")]
    OddDimension(usize),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },

    #[error("Choi matrix is not in face form: entry ({row}, {col}) has magnitude {magnitude:.3e}")]
    NotInFaceForm { row: usize, col: usize, magnitude: f64 },

    #[error("map does not lie in the requested face: |phi(P_xi) eta| = {residual:.3e}")]
    FaceConditionViolated { residual: f64 },

    #[error("functional witness is not admissible: {0}")]
    InvalidWitness(String),

    #[error("operation requires block dimension n = {expected}, got {actual}")]
    WrongBlockDim { expected: usize, actual: usize },

    #[error("sampler exhausted its budget: {0}")]
    SamplerExhausted(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
