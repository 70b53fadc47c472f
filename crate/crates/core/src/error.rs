//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong short of a solver diverging (divergence is a
/// trace status, not an error: the partial trace is still useful evidence).
#[derive(Debug, Error)]
pub enum DcError {
    /// A vector had the wrong length for the problem or operation.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A numeric parameter was outside its admissible range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    /// Step size exceeds the 1/M_g cap required by the descent analysis.
    #[error("step size {alpha} exceeds 1/M_g = {limit} for this problem")]
    StepTooLarge { alpha: f64, limit: f64 },

    /// Sparsity level outside 1..=dim.
    #[error("sparsity level {s} out of range for dimension {dim}")]
    SparsityOutOfRange { s: usize, dim: usize },

    /// The solver requires a prox oracle the problem does not provide.
    #[error("problem has no prox oracle but the solver requires one")]
    MissingProx,

    /// The solver assumes phi == 0 but the problem carries a prox part.
    #[error("problem carries a prox part but the solver assumes phi == 0")]
    UnexpectedProx,

    /// A check needed a constant (alpha, M_g, ...) that was not supplied.
    #[error("missing constant {0} for this check")]
    MissingConstant(&'static str),

    /// Starting point violates a feasibility requirement.
    #[error("infeasible starting point: {0}")]
    InfeasibleStart(String),

    /// An operation received an empty sequence.
    #[error("empty sequence passed to {0}")]
    EmptySequence(&'static str),

    /// Slope fitting window had fewer than the minimum number of usable points.
    #[error("log-log fit window [{k_min}, {k_max}] has {usable} usable points, need at least 3")]
    WindowTooShort {
        k_min: usize,
        k_max: usize,
        usable: usize,
    },

    /// Geometric mean of a sequence containing a negative entry is undefined.
    #[error("negative entry {value} at index {index} in geometric mean input")]
    NegativeEntry { index: usize, value: f64 },

    /// Sorted magnitudes tie at the sparsity boundary, so the top-k gradient
    /// selection (and hence the convex subproblem) is ambiguous.
    #[error("magnitude tie at sparsity boundary: |x|_({s}) - |x|_({s_next}) = {gap:.3e}")]
    TieAtSparsityLevel { s: usize, s_next: usize, gap: f64 },

    /// A function value or derivative evaluated non-finite where finiteness is required.
    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    /// Brute-force enumeration guard.
    #[error("brute force enumeration limited to p <= 15, got p = {p}")]
    BruteForceTooLarge { p: usize },

    /// Estimation error is undefined for a zero estimate.
    #[error("estimation error undefined: estimate has zero norm")]
    ZeroEstimate,

    /// Check asked for a trace produced by a different algorithm.
    #[error("trace was produced by {actual:?} but the check expects {expected:?}")]
    AlgoMismatch {
        expected: crate::trace::AlgoKind,
        actual: crate::trace::AlgoKind,
    },

    /// Malformed PGM input.
    #[error("PGM parse error at byte {offset}: {reason}")]
    PgmParse { offset: usize, reason: String },

    /// Malformed CSV input.
    #[error("CSV parse error at line {line}: {reason}")]
    CsvParse { line: usize, reason: String },

    /// Underlying I/O failure.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
