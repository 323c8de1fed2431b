use thiserror::Error;

/// Errors produced by the simulation, embedding, model and data layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unnormalizable: input has zero norm")]
    Unnormalizable,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("qubit index {qubit} out of range 1..={n_qubits}")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("duplicate qubit {0} in gate")]
    DuplicateQubit(usize),

    #[error("parameter slot {slot} out of range for {available} parameters")]
    ParamOutOfRange { slot: usize, available: usize },

    #[error("dense representation of {n_qubits} qubits exceeds cap of {cap}")]
    TooLarge { n_qubits: usize, cap: usize },

    #[error("invalid representation: {0}")]
    InvalidRep(String),

    #[error("qubit {0} is not active")]
    InactiveQubit(usize),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("unknown ansatz id {0}")]
    UnknownAnsatz(u8),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty batch")]
    EmptyBatch,

    #[error("bad magic number {found:#010x}, expected {expected:#010x}")]
    BadMagic { found: u32, expected: u32 },

    #[error("truncated file: {0}")]
    Truncated(String),

    #[error("class {0} absent from data")]
    ClassAbsent(u8),

    #[error("malformed data: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("png decode: {0}")]
    Png(#[from] png::DecodingError),
}

pub type Result<T> = std::result::Result<T, Error>;
