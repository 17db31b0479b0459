use thiserror::Error;

/// Errors produced by network construction, evolution, bath quadrature and
/// the brute-force validators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported path length {0}: only lengths 2 and 3 are uniform-coupling transfer chains")]
    InvalidPathLength(usize),

    #[error("operation requires a {expected} network, got {found}")]
    InvalidFamily { expected: &'static str, found: String },

    #[error("network of {nodes} nodes exceeds the configured maximum of {limit}")]
    NetworkTooLarge { nodes: usize, limit: usize },

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:.3e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("matrix has nonzero diagonal entry at index {index}")]
    NonzeroDiagonal { index: usize },

    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("node index {index} out of range for {size} nodes")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("state descriptors mix incompatible kinds: {context}")]
    MixedStateKinds { context: &'static str },

    #[error("Fock cutoff mismatch: expected {expected}, found {found}")]
    CutoffMismatch { expected: usize, found: usize },

    #[error("state vector is not normalized: |norm^2 - 1| = {defect:.3e}")]
    NotNormalized { defect: f64 },

    #[error(
        "quadrature did not converge: value {value:.6e}, achieved error estimate {achieved:.3e} \
         exceeds tolerance {tolerance:.3e}"
    )]
    QuadratureDidNotConverge {
        value: f64,
        achieved: f64,
        tolerance: f64,
    },

    #[error("operation requires a {expected} bath specification")]
    WrongBathKind { expected: &'static str },

    #[error("Fock space dimension {dim} exceeds the limit {limit}")]
    FockSpaceTooLarge { dim: usize, limit: usize },

    #[error("Krylov propagation did not converge (residual estimate {residual:.3e})")]
    KrylovDidNotConverge { residual: f64 },

    #[error("Monte Carlo sample count {got} is below the minimum {min}")]
    TooFewSamples { got: usize, min: usize },

    #[error("empty parameter grid: {name}")]
    EmptyGrid { name: &'static str },

    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parsing bath modes from {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
