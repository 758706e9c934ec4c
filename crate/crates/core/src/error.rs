use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Variants split into two families: validation problems (bad input, wrong
/// shapes, unsupported parameters) and numerical-consistency problems (a
/// computed object failed a post-condition). [`Error::is_numerical`] tells
/// them apart, which the CLI uses to pick its exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("operation needs a group of the form Z_n x Z_n, got moduli {0:?}")]
    NotSquareGroup(Vec<usize>),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not an SPT pattern: {0}")]
    NotSptPattern(String),
    #[error("bond dimension {bond} admits no projective representation of class k={k} (needs a multiple of {required})")]
    IncompatibleBond { bond: usize, k: usize, required: usize },
    #[error("channel is not trace preserving: max deviation of sum K^dag K from identity is {0:e}")]
    Incomplete(f64),
    #[error("matrix is not Hermitian: max deviation {0:e}")]
    NotHermitian(f64),
    #[error("dense construction too large: {0}")]
    SizeLimit(String),
    #[error("unknown name: {0}")]
    Unknown(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("leading eigenvalue is degenerate (|lambda_1| - |lambda_2| = {gap:e})")]
    Degenerate { gap: f64 },
    #[error("tensor is not injective: {0}")]
    NotInjective(String),
    #[error("state is not symmetric under element {element}: leading modulus {modulus}")]
    NotSymmetric { element: String, modulus: f64 },
    #[error("random symmetric state generation failed after {retries} retries (seed {seed})")]
    GenerationFailed { retries: usize, seed: u64 },
    #[error("ambiguous twist: generator {generator} matches both {first} and {second}")]
    AmbiguousTwist { generator: String, first: String, second: String },
    #[error("malformed pattern: {0}")]
    MalformedPattern(String),
    #[error("twisted sector is empty at this length (norm {0:e})")]
    EmptySector(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    /// True for failures of a numerical post-condition rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Degenerate { .. }
                | Error::NotInjective(_)
                | Error::NotSymmetric { .. }
                | Error::GenerationFailed { .. }
                | Error::AmbiguousTwist { .. }
                | Error::MalformedPattern(_)
                | Error::EmptySector(_)
                | Error::Numerical(_)
                | Error::Inconsistent(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
