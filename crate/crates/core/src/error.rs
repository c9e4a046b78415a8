//! Error type shared by all modules.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operands live over different base-field specifications.
    #[error("base field mismatch: {0}")]
    SpecMismatch(String),

    /// The base-field specification itself is invalid.
    #[error("invalid base field: {0}")]
    InvalidSpec(String),

    /// An element is congruent to zero at its precision, so its valuation
    /// (or its inverse) cannot be determined.
    #[error("indeterminate valuation: element is 0 at precision {prec} but not exactly 0")]
    IndeterminateValuation { prec: i64 },

    /// Division by an element indistinguishable from zero.
    #[error("division by an element indistinguishable from zero")]
    DivisionByZero,

    /// An operation would need more precision than its inputs carry.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// A substitution or product would need terms beyond the truncation.
    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),

    /// The Frobenius-image basis decomposition failed.
    #[error("decomposition failure: {0}")]
    DecompositionFailure(String),

    /// A connection fails the integrability (flatness) test.
    #[error("connection is not integrable: symmetry defect has valuation {defect}")]
    NotIntegrable { defect: String },

    /// A matrix with non-invertible constant term.
    #[error("matrix is not invertible: {0}")]
    NotInvertible(String),

    /// Operation needs a nontrivial set of non-identity embeddings.
    #[error("operation requires F != Q_p (residue degree >= 2)")]
    RequiresNontrivialEmbeddings,

    /// Operation only defined for the unramified (or Q_p) flavor.
    #[error("operation requires an unramified base field: {0}")]
    RequiresUnramified(String),

    /// Malformed input data (files, wire records).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
