use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("counts are empty")]
    EmptyCounts,

    #[error("term index {index} out of range for {n_terms} terms")]
    TermIndexOutOfRange { index: usize, n_terms: usize },

    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("invalid Pauli term: {0}")]
    InvalidTerm(String),

    #[error("{requested} qubits exceed the capacity of {max}")]
    TooManyQubits { requested: usize, max: usize },

    #[error("color count {0} is not a power of two >= 2")]
    ColorCountNotPowerOfTwo(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("parameter {index} is not usable for a parameter-shift gradient: {reason}")]
    IncompatibleParameter { index: usize, reason: &'static str },

    #[error("partition count {count} outside the allowed range {min}..={max}")]
    PartitionCount { count: usize, min: usize, max: usize },

    #[error("invalid partition schedule: {0}")]
    InvalidSchedule(String),

    #[error("template `{0}` is not identity at zero parameters")]
    NotIdentityAtZero(String),

    #[error("operation requires a {expected} instance")]
    WrongProblemKind { expected: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.into(),
            reason: reason.into(),
        }
    }
}
