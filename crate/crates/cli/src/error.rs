use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numeric failure at {point}: {source}")]
    Numeric {
        point: String,
        #[source]
        source: thzlink_core::Error,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric { .. } => 3,
            CliError::Io(_) | CliError::Csv(_) => 2,
        }
    }

    /// Tags a core error with the operating point it came from. Parameter
    /// and usage errors are configuration problems; the rest are numeric.
    pub fn at(point: impl Into<String>) -> impl FnOnce(thzlink_core::Error) -> CliError {
        let point = point.into();
        move |e| match e {
            thzlink_core::Error::InvalidParameter(_) | thzlink_core::Error::Usage(_) => {
                CliError::Config(format!("{point}: {e}"))
            }
            e => CliError::Numeric { point, source: e },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
