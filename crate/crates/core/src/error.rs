use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singularity encountered at {location}: {detail}")]
    Singularity { location: String, detail: String },

    #[error("pole of Kummer function: b = {0} is a non-positive integer")]
    Pole(String),

    #[error("resonance in recurrence: leading coefficient vanishes at n = {n} ({detail})")]
    Resonance { n: usize, detail: String },

    #[error("classification error: {0}")]
    Classification(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("field is not real: {0}")]
    Realness(String),

    #[error("division by zero: {0}")]
    Division(String),

    #[error("solutions are linearly dependent: {0}")]
    Dependent(String),

    #[error("iteration did not converge: {0}")]
    NotConverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn singular_t(t: f64, detail: impl Into<String>) -> Self {
        Error::Singularity {
            location: format!("t = {t}"),
            detail: detail.into(),
        }
    }

    pub(crate) fn singular_z(z: num_complex::Complex64, detail: impl Into<String>) -> Self {
        Error::Singularity {
            location: format!("z = {z}"),
            detail: detail.into(),
        }
    }
}
