use thiserror::Error;

/// Errors surfaced by the library.
///
/// Violations of validated *data* (a short exact sequence that is not exact,
/// a diagram whose squares do not commute) are not errors; they are reported
/// through [`crate::diagrams::Report`]. `Error` covers contract breaches:
/// mismatched rings or presentations, failed preconditions, and internal
/// construction faults that indicate a bug rather than bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("object mismatch: {0}")]
    ObjectMismatch(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A step that is a theorem of a construction failed at runtime.
    /// This signals a bug in the caller-supplied cover or in the library,
    /// never a normal outcome.
    #[error("construction fault: {0}")]
    ConstructionFault(String),
}

pub type Result<T> = std::result::Result<T, Error>;
