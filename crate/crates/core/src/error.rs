use alloc::string::String;
use core::fmt;

use crate::tspace::PairIndex;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the core library.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Two operands (or an operand and a declared dimension) disagree.
    DimensionMismatch { expected: usize, found: usize },
    /// A matrix that must be hermitian deviates from its adjoint.
    NotHermitian { deviation: f64 },
    /// A state vector or density matrix is not normalized.
    Normalization { state: usize, deviation: f64 },
    /// A density matrix has an eigenvalue below the clamping window.
    NegativeEigenvalue { state: usize, value: f64 },
    /// Two states of the set overlap. For pure pairs `overlap` is
    /// `|<psi|psi'>|`, otherwise `Tr(rho rho')`.
    Orthogonality { first: usize, second: usize, overlap: f64 },
    IndexOutOfRange { index: usize, bound: usize },
    /// Operation requires `d_A = d_B`.
    NotSquare { d_a: usize, d_b: usize },
    NonCommutingInput { max_commutator: f64 },
    DegenerateFailure { attempts: usize },
    NonTraceless { trace: f64 },
    /// A singular value sits too close to the rank cutoff to call.
    RankAmbiguity { matrix: usize, singular_value: f64, cutoff: f64 },
    /// The measurement does not preserve orthogonality.
    OpViolation { outcome: usize, pair: PairIndex, value: f64 },
    /// The measurement only works without the conjugation step.
    Convention { conjugated: f64, unconjugated: f64 },
    InvalidParameter(String),
    InternalConsistency(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not hermitian (max deviation {deviation:e})")
            }
            Error::Normalization { state, deviation } => {
                write!(f, "state {state} is not normalized (deviation {deviation:e})")
            }
            Error::NegativeEigenvalue { state, value } => {
                write!(f, "state {state} has negative eigenvalue {value:e}")
            }
            Error::Orthogonality { first, second, overlap } => write!(
                f,
                "states {first} and {second} are not orthogonal (overlap {overlap:e})"
            ),
            Error::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} out of range (must be < {bound})")
            }
            Error::NotSquare { d_a, d_b } => {
                write!(f, "state set is {d_a}x{d_b}; pad it to a square system first")
            }
            Error::NonCommutingInput { max_commutator } => write!(
                f,
                "basis is not abelian (largest commutator norm {max_commutator:e})"
            ),
            Error::DegenerateFailure { attempts } => write!(
                f,
                "simultaneous diagonalization failed after {attempts} random combinations"
            ),
            Error::NonTraceless { trace } => write!(f, "matrix is not traceless (trace {trace:e})"),
            Error::RankAmbiguity { matrix, singular_value, cutoff } => write!(
                f,
                "rank of matrix {matrix} is ambiguous: singular value {singular_value:e} near cutoff {cutoff:e}"
            ),
            Error::OpViolation { outcome, pair, value } => write!(
                f,
                "outcome {outcome} breaks orthogonality of ({}, {}, {}, {}): {value:e}",
                pair.i, pair.i_prime, pair.j, pair.j_prime
            ),
            Error::Convention { conjugated, unconjugated } => write!(
                f,
                "measurement fails with the conjugate convention ({conjugated:e}) but passes without it ({unconjugated:e})"
            ),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InternalConsistency(msg) => write!(f, "internal consistency check failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
