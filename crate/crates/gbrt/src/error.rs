use thiserror::Error;

#[derive(Debug, Error)]
pub enum GbrtError {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid config field {field}: {reason}")]
    InvalidConfig {
        field: &'static str,
        reason: &'static str,
    },

    #[error("model (de)serialization failed: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("model file io failed: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GbrtError>;
