use thiserror::Error;

/// Errors produced by the converter model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConverterError {
    /// A parameter is outside its physical domain.
    #[error("invalid parameter {name}: {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
        value: f64,
    },

    /// The commanded power exceeds what the converter can transfer
    /// at the given operating conditions.
    #[error("target power {p_target} W unreachable; maximum is {p_max} W")]
    Unreachable { p_target: f64, p_max: f64 },
}

pub type Result<T> = std::result::Result<T, ConverterError>;
