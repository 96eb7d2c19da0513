use thiserror::Error;

/// Crate-wide error type.
///
/// Variants split into *validation* failures (malformed inputs: wrong
/// dimensions, non-physical operators, bad files) and *numerical* failures
/// (boundary states, degenerate determinants). The CLI maps the former to
/// exit code 1 and the latter to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("operator {index} is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPositive { index: usize, min_eig: f64 },

    #[error("outcomes do not sum to the identity (max deviation {0:.3e})")]
    IncompletePovm(f64),

    #[error("outcome {index} has nonpositive trace {trace:.3e}")]
    ZeroTraceOutcome { index: usize, trace: f64 },

    #[error("not a state: trace {0} differs from 1")]
    NotUnitTrace(f64),

    #[error("SIC condition violated: |<psi_{i}|psi_{j}>|^2 = {found:.12} but expected {expected:.12}")]
    SicConditionViolated {
        i: usize,
        j: usize,
        found: f64,
        expected: f64,
    },

    #[error("no built-in SIC fiducial for dimension {0}; supply one")]
    NoBuiltinFiducial(usize),

    #[error("MUB construction requires a prime dimension, got {0}")]
    DimNotPrime(usize),

    #[error("unknown platonic solid `{0}`")]
    UnknownSolid(String),

    #[error("boundary state: outcome {index} has probability {probability:.3e} <= {epsilon:.3e}")]
    BoundaryState {
        index: usize,
        probability: f64,
        epsilon: f64,
    },

    #[error("state has an eigenvalue {0:.3e} too close to the boundary")]
    BoundaryEigenvalue(f64),

    #[error("measurement is not informationally complete (frame rank {rank} < {needed})")]
    NotInformationallyComplete { rank: usize, needed: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("numerical degeneracy in {context}: {detail}")]
    NumericalDegeneracy {
        context: &'static str,
        detail: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors arising from well-formed inputs that hit a numerical
    /// limitation rather than from malformed inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BoundaryState { .. }
                | Error::BoundaryEigenvalue(_)
                | Error::NumericalDegeneracy { .. }
                | Error::NotInformationallyComplete { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
