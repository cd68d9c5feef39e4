use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_OVERFLOW: i32 = 4;
pub const EXIT_BOUND: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("integrand overflow: {0}")]
    Overflow(String),
    #[error("bound check failed: {0}")]
    Bound(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) | CliError::Io(_) => EXIT_NUMERICAL,
            CliError::Overflow(_) => EXIT_OVERFLOW,
            CliError::Bound(_) => EXIT_BOUND,
        }
    }
}

impl From<qmcis::Error> for CliError {
    fn from(e: qmcis::Error) -> Self {
        use qmcis::Error as E;
        match e {
            E::Overflow { .. } => CliError::Overflow(e.to_string()),
            E::InvalidInput(_) | E::Domain { .. } | E::Parse(_) | E::IllDefinedScheme(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
