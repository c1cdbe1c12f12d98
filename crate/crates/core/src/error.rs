use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A pointwise evaluation produced NaN or infinity.
    #[error("non-finite value at node {node}: {value}")]
    NonFiniteNode { node: usize, value: f64 },

    /// A time step produced a non-finite state.
    #[error("non-finite state after step {step}{}", sample_suffix(*.sample))]
    NonFiniteStep { step: usize, sample: Option<u64> },

    /// A mesh or configuration failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// Malformed configuration text or CLI values.
    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn sample_suffix(sample: Option<u64>) -> String {
    match sample {
        Some(i) => format!(" (sample {i})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code for the CLI: 1 for validation-type failures, 2 for
    /// numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFiniteNode { .. } | Error::NonFiniteStep { .. } => 2,
            _ => 1,
        }
    }

    /// Attaches a Monte Carlo sample index to a step failure.
    pub fn with_sample(self, sample: u64) -> Self {
        match self {
            Error::NonFiniteStep { step, .. } => Error::NonFiniteStep {
                step,
                sample: Some(sample),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
