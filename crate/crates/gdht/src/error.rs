//! Crate-wide error type.
//!
//! Every fallible operation in the crate returns [`Result`]. Variant names are
//! stable identifiers that also appear verbatim in the rendered message, so a
//! caller (or a shell script grepping CLI stderr) can match on them.

use thiserror::Error;

/// Errors produced by matrix kernels, the solver, initializers, generators,
/// ingestion, and the CLI configuration layer.
#[derive(Debug, Error)]
pub enum Error {
    /// A square matrix was required.
    #[error("NotSquare: expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// Symmetry check failed beyond the entrywise tolerance.
    #[error("NotSymmetric: entries ({i},{j}) and ({j},{i}) differ by {diff:e} (tolerance {tol:e})")]
    NotSymmetric { i: usize, j: usize, diff: f64, tol: f64 },

    /// A Cholesky pivot fell below the positive-definiteness threshold.
    #[error("NotPositiveDefinite: pivot {pivot:e} at column {col} is not above threshold {threshold:e}")]
    NotPositiveDefinite { col: usize, pivot: f64, threshold: f64 },

    /// A matrix entry was NaN or infinite.
    #[error("NonFiniteEntry: entry ({i},{j}) is {value}")]
    NonFiniteEntry { i: usize, j: usize, value: f64 },

    /// Operand shapes are incompatible.
    #[error("DimensionMismatch: {context}")]
    DimensionMismatch { context: String },

    /// A sparsity budget lies outside its admissible range.
    #[error("BudgetOutOfRange: {context}")]
    BudgetOutOfRange { context: String },

    /// The contraction parameter passed to the sparsity helper is not in (0, 1).
    #[error("RhoOutOfRange: rho must lie strictly inside (0, 1), got {rho}")]
    RhoOutOfRange { rho: f64 },

    /// Step-size halving could not restore positive definiteness of the
    /// precision iterate.
    #[error("PositiveDefiniteRecoveryFailed: omega step stayed indefinite after {attempts} halvings of eta2 at iteration {iteration}")]
    PositiveDefiniteRecoveryFailed { iteration: usize, attempts: usize },

    /// Resampling would produce empty slices.
    #[error("SliceTooSmall: {n} rows split into {t} slices leaves floor(n/T) = 0 rows per slice")]
    SliceTooSmall { n: usize, t: usize },

    /// A predictor column has zero norm but nonzero correlation with the
    /// response, so no coordinate update exists for it.
    #[error("ZeroColumn: predictor column {col} has zero norm but nonzero response correlation")]
    ZeroColumn { col: usize },

    /// A configuration or constructor argument is outside its valid range.
    #[error("InvalidValue: {context}")]
    InvalidValue { context: String },

    /// A text input could not be parsed.
    #[error("ParseError: line {line}: {context}")]
    ParseError { line: usize, context: String },

    /// A price panel entry was zero or negative.
    #[error("NonPositivePrice: line {line}: price {value} is not strictly positive")]
    NonPositivePrice { line: usize, value: f64 },

    /// An input table has too few rows to be usable.
    #[error("TooFewRows: {context}")]
    TooFewRows { context: String },

    /// A CSV row has a different number of fields than the first row.
    #[error("RaggedRows: row {row} has {got} fields, expected {expected}")]
    RaggedRows { row: usize, got: usize, expected: usize },

    /// A configuration key (or section) is not part of the schema.
    #[error("UnknownKey: '{key}' is not a recognized configuration key")]
    UnknownKey { key: String },

    /// A configuration key required by the invoked command is absent.
    #[error("MissingKey: required configuration key '{key}' was not provided")]
    MissingKey { key: String },

    /// A scaling grid does not cover enough settings or sample sizes.
    #[error("GridTooSmall: {context}")]
    GridTooSmall { context: String },

    /// An underlying filesystem operation failed.
    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dim(context: impl Into<String>) -> Self {
        Error::DimensionMismatch { context: context.into() }
    }

    pub(crate) fn budget(context: impl Into<String>) -> Self {
        Error::BudgetOutOfRange { context: context.into() }
    }

    pub(crate) fn invalid(context: impl Into<String>) -> Self {
        Error::InvalidValue { context: context.into() }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
