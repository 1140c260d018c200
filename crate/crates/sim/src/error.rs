use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] dyson_core::Error),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("config: {0}")]
    Usage(String),
    #[error("window of {free} free sites exceeds max_free_sites = {cap}")]
    Budget { free: u64, cap: u64 },
    #[error("{0}")]
    Contract(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// Process exit code: 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config { .. } | SimError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
