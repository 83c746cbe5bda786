use thiserror::Error;

/// Errors produced by the simulation, mitigation and cost-model layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("channel integrity violated: {0}")]
    ChannelIntegrity(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("observable is not Hermitian (deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("observable norm {0} exceeds 1; rescale the observable")]
    ObservableNorm(f64),

    #[error("index {index} out of range for {len} terms")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("product-formula order {0} is not supported (use 1 or an even order)")]
    InvalidOrder(u32),

    #[error("channel is not invertible: transfer eigenvalue {0:.3e} vanishes")]
    NonInvertible(f64),

    #[error("infeasible segmentation: per-segment error {q_st:.6} >= 1/2; use at least {suggested} segments")]
    InfeasibleSegmentation { q_st: f64, suggested: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown suite `{name}`; available: {available}")]
    UnknownSuite { name: String, available: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
