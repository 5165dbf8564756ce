use thiserror::Error;

/// Errors returned by the analysis engine.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the function.
    #[error("{what} must satisfy {requirement} (got {value})")]
    Domain {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// The OMA/NOMA crossover search found no sign change inside the scan range.
    #[error("no finite crossover in [{lo:e}, {hi:e}]")]
    NoCrossover { lo: f64, hi: f64 },

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unknown formula id `{0}`")]
    UnknownFormula(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub(crate) fn ensure_positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            requirement: "x > 0",
            value,
        })
    }
}

pub(crate) fn ensure_nonneg(what: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            requirement: "x >= 0",
            value,
        })
    }
}
