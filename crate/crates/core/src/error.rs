use thiserror::Error;

/// Errors raised by the planning toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the admissible domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Degrees, domains, dimensions or vector lengths do not line up.
    #[error("shape error: {0}")]
    Shape(String),

    /// Euler-angle rate map is singular (pitch near +-pi/2).
    #[error("gimbal lock at (s = {s}, t = {t}): |cos(pitch)| = {cos_pitch:e}")]
    Singularity { s: f64, t: f64, cos_pitch: f64 },

    /// A scenario or option set is inconsistent.
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// An evaluator returned a non-finite value.
    #[error("non-finite {what} at component {index}")]
    NonFinite { what: String, index: usize },

    /// An evaluator failed inside the solver; `x` is the offending point.
    #[error("evaluation failed at a point with {} variables: {source}", .x.len())]
    Evaluation { x: Vec<f64>, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Shape(msg.into()))
}

pub(crate) fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
