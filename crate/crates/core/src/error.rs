use crate::flow::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent input data (coefficient sums, lengths, grids, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A closed-form flow hit a branch cut or a pole.
    #[error("singularity in {context}: value {value} at index {index}")]
    Singularity {
        context: String,
        index: usize,
        value: C64,
    },

    /// An error raised while taking a time step of an integration.
    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn singularity(context: impl Into<String>, index: usize, value: C64) -> Self {
        Error::Singularity {
            context: context.into(),
            index,
            value,
        }
    }

    /// True when the error, possibly wrapped in a step error, is a singularity.
    pub fn is_singularity(&self) -> bool {
        match self {
            Error::Singularity { .. } => true,
            Error::Step { source, .. } => source.is_singularity(),
            _ => false,
        }
    }
}
