use thiserror::Error;

/// Errors produced by the algebraic constructions and checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration bound exceeded: {0}")]
    EnumerationBound(String),

    #[error("invalid quadratic form: {0}")]
    InvalidForm(String),

    #[error("bilinear form is not compatible with the quadratic form")]
    IncompatibleBilinear,

    #[error("invalid anisotropic support set: {0}")]
    InvalidSubset(String),

    #[error("invalid hermitian data: {0}")]
    InvalidData(String),

    #[error("matrix index ({i}, {j}) out of range for size {l}")]
    IndexOutOfRange { i: usize, j: usize, l: usize },

    #[error("operands belong to different algebras")]
    DataMismatch,

    #[error("matrix is not skew-hermitian")]
    NotInF,

    #[error("element is not central and symmetric")]
    NotCentralSymmetric,

    #[error("{0} is not a root of BC_r")]
    NotARoot(String),

    #[error("sl2 condition fails: {0}")]
    Sl2(String),
    #[error("root space is zero at the requested degree")]
    EmptyRootSpace,

    #[error("derivation constraint violated at degree {0}")]
    DerivationConstraint(String),

    #[error("requires Witt index r >= 3, got {0}")]
    WittIndexTooSmall(usize),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
