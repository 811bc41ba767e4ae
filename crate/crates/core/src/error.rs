use thiserror::Error;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("evaluation budget exhausted ({fe_max} evaluations)")]
    BudgetExhausted { fe_max: usize },
    #[error("evaluation index {fe} outside budget of {fe_max}")]
    FeOutOfRange { fe: usize, fe_max: usize },
    #[error("no evaluations recorded")]
    EmptyLedger,
    #[error("no episodes to aggregate")]
    NoEpisodes,
    #[error("random baseline is zero; instance is degenerate")]
    DegenerateBaseline,
    #[error("action entry {value} at ({row}, {col}) outside [0, 1]")]
    ActionOutOfRange { row: usize, col: usize, value: f64 },
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error("checkpoint: bad magic")]
    BadMagic,
    #[error("checkpoint: truncated tensor `{0}`")]
    TruncatedTensor(alloc::string::String),
    #[error("checkpoint: tensor `{name}` has dims {got:?}, expected {expected:?}")]
    DimensionMismatch {
        name: alloc::string::String,
        expected: alloc::vec::Vec<usize>,
        got: alloc::vec::Vec<usize>,
    },
    #[error("checkpoint: unexpected tensor `{got}`, expected `{expected}`")]
    UnexpectedTensor {
        expected: alloc::string::String,
        got: alloc::string::String,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
