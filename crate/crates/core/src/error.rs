//! Error types shared across the engine.

use thiserror::Error;

/// Errors raised by ring and matrix arithmetic.
#[derive(Debug, Error)]
pub enum RingError {
    #[error("variable-count mismatch: {left} vs {right}")]
    VarMismatch { left: usize, right: usize },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("zero polynomial not allowed here")]
    ZeroInput,
    #[error("matrix is not unimodular over the ring (determinant is not a unit)")]
    NotUnimodular,
    #[error("adjugate inverse requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// Parse failures for the polynomial text grammar. Column is 1-based.
#[derive(Debug, Error)]
#[error("parse error at column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

/// Errors from the normalization / realization pipeline.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("system is not autonomous (annihilator is the zero ideal); no first-order realization exists")]
    NotAutonomous,
    #[error("no integrality certificate for variable s{var} at level d={d} within degree bound {bound}: not strongly relevant of order {d} (or bound too small)")]
    NotStronglyRelevant { var: usize, d: usize, bound: usize },
    #[error("normalization incomplete at level d={d}: {detail}")]
    NormalizationIncomplete { d: usize, detail: String },
    #[error("relation matrix is not invariant under companion action: {0}")]
    RelationsNotInvariant(String),
    #[error("{0}")]
    Ring(#[from] RingError),
}

/// Errors from finite-window trajectory evaluation.
#[derive(Debug, Error)]
pub enum WindowError {
    #[error("window width {got} does not match expected {expected}")]
    WidthMismatch { got: usize, expected: usize },
    #[error("window exhausted: operator support leaves no evaluatable point; pad the box by {padding:?} (per-axis lo/hi)")]
    Exhausted { padding: Vec<(i64, i64)> },
    #[error("insufficient support: samples are needed on the box {needed}")]
    InsufficientSupport { needed: String },
    #[error("initial condition violates the compatibility equations (X x != 0)")]
    Incompatible,
    #[error("no checkable points on the given window")]
    NothingToCheck,
    #[error("missing lattice points for pull-back; samples are needed on the box {needed}")]
    MissingPullbackPoints { needed: String },
}
