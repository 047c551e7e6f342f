#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure in {context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: kgnf::Error,
    },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit code: 2 for configuration, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numerical { .. } => 3,
            HarnessError::Io(_) => 1,
        }
    }
}

impl From<kgnf::Error> for HarnessError {
    fn from(source: kgnf::Error) -> Self {
        HarnessError::Numerical {
            context: "kgnf".into(),
            source,
        }
    }
}

/// Attaches context to module errors.
pub trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T>;
}

impl<T> Context<T> for kgnf::Result<T> {
    fn context(self, what: impl Into<String>) -> Result<T> {
        self.map_err(|source| HarnessError::Numerical {
            context: what.into(),
            source,
        })
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
