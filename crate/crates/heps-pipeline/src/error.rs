use thiserror::Error;

/// Errors produced while building datasets, models, or maps.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("converter error: {0}")]
    Converter(#[from] dab_converter::ConverterError),

    #[error("training error: {0}")]
    Training(#[from] gbrt::GbrtError),

    #[error("swarm error: {0}")]
    Swarm(#[from] pso_savl::PsoError),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed record at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("operating point ({p} W, {v2} V) is outside the map domain")]
    OutOfDomain { p: f64, v2: f64 },
}

pub type Result<T> = std::result::Result<T, PipelineError>;
