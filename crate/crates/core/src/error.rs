//! Error type shared across the crate.

/// Everything that can go wrong when building model inputs, solving, or
/// processing scenario documents.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A numeric parameter violated its domain.
    #[error("{name} {value} outside {constraint}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// The input is valid for the type but has no finite answer
    /// (for example optimizing with a zero scalable fraction).
    #[error("degenerate {name}: {reason}")]
    Degenerate {
        name: &'static str,
        reason: &'static str,
    },

    /// An operation was called outside its contract.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The iterative solver exhausted its budget.
    #[error("solver did not converge within {iterations} iterations (bracket width {width:e})")]
    NoConvergence { iterations: usize, width: f64 },

    /// A supplied function returned NaN or infinity.
    #[error("function evaluation returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },

    /// A scenario document is not well-formed JSON.
    #[error("scenario syntax error: {0}")]
    Syntax(String),

    /// A scenario document is well-formed but invalid.
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    /// Curve samples passed to the CSV emitter do not share one label set.
    #[error("samples have inconsistent label sets")]
    InconsistentLabels,
}
