use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{qubits} qubits exceed the dense simulation limit of {limit}")]
    DenseLimit { qubits: usize, limit: usize },

    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitIndex { index: usize, num_qubits: usize },

    #[error("dimension mismatch: expected {expected} qubits, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no regular partitions of a {n}-qubit ring into {l} clusters")]
    EmptyPartitionSet { n: usize, l: usize },

    #[error("unsupported operator: {0}")]
    UnsupportedOperator(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
