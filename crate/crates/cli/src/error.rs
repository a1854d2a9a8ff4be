use thiserror::Error;

/// Process exit codes.
pub const EXIT_MATCH: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_SAMPLING: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("numerical failure: {0}")]
    Sampling(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Sampling(_) => EXIT_SAMPLING,
            _ => EXIT_INVALID,
        }
    }
}

impl From<isopar::Error> for CliError {
    fn from(e: isopar::Error) -> Self {
        use isopar::Error as E;
        match e {
            E::DimensionMismatch { .. } | E::InvalidInput(_) | E::DegenerateMultiplicity { .. } => {
                CliError::Input(e.to_string())
            }
            E::NotOnFocalVariety(_)
            | E::OffFocalSet(_)
            | E::InvalidNormal(_)
            | E::SamplingFailed { .. }
            | E::Clustering(_) => CliError::Sampling(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
