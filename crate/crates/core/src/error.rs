use alloc::string::String;
use core::fmt;

/// Everything that can go wrong while building or checking the objects in this crate.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Two operands (or an operand and its declared layout) disagree on a dimension.
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    /// A matrix entry is NaN or infinite.
    NonFinite,
    NotSquare {
        rows: usize,
        cols: usize,
    },
    NotHermitian {
        deviation: f64,
    },
    NotPositive {
        min_eigenvalue: f64,
    },
    NotNormalized {
        trace: f64,
    },
    /// A measurement failed one of the projection-valued-measure conditions.
    InvalidPvm(String),
    /// The operation needs every projector of the measurement to be rank one.
    NotRankOne,
    NotPure {
        purity: f64,
    },
    UnknownLabel(String),
    InvalidRank {
        rank: usize,
        dim: usize,
    },
    /// The weights of a quadrature rule do not integrate the time density to one.
    QuadratureNotNormalized {
        error: f64,
    },
    InvalidExperiment(u8),
    InvalidCircuit(String),
    UnknownCase(String),
    MismatchedShots {
        expected: u64,
        found: u64,
    },
    InvalidArgument(String),
    EigenNoConvergence,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                context,
                expected,
                found,
            } => write!(
                f,
                "dimension mismatch in {context}: expected {expected}, found {found}"
            ),
            Error::NonFinite => write!(f, "matrix has a non-finite entry"),
            Error::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max deviation {deviation:e})")
            }
            Error::NotPositive { min_eigenvalue } => write!(
                f,
                "matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})"
            ),
            Error::NotNormalized { trace } => write!(f, "state has trace {trace}, expected 1"),
            Error::InvalidPvm(why) => write!(f, "invalid projective measurement: {why}"),
            Error::NotRankOne => write!(f, "measurement projectors must be rank one"),
            Error::NotPure { purity } => write!(f, "state is not pure (purity {purity})"),
            Error::UnknownLabel(label) => write!(f, "no subsystem labelled {label:?}"),
            Error::InvalidRank { rank, dim } => {
                write!(f, "rank {rank} is not in 1..={dim}")
            }
            Error::QuadratureNotNormalized { error } => write!(
                f,
                "quadrature does not normalize the time density (error {error:e})"
            ),
            Error::InvalidExperiment(id) => write!(f, "no experiment with id {id} (valid: 1-6)"),
            Error::InvalidCircuit(why) => write!(f, "invalid circuit: {why}"),
            Error::UnknownCase(id) => write!(f, "unknown gallery case {id:?}"),
            Error::MismatchedShots { expected, found } => write!(
                f,
                "shot tables disagree on shot count: {expected} vs {found}"
            ),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
            Error::EigenNoConvergence => write!(f, "Hermitian eigensolver did not converge"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
