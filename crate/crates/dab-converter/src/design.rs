//! Series inductance sizing.

use crate::error::{ConverterError, Result};

/// Largest series inductance that still lets the converter reach `p_max`
/// watts at the lowest secondary voltage: the plain phase shift transfer
/// curve peaks at n V1 V2 / (8 fs Lr), so
///
///   Lr_max = n * v1 * v2_min / (8 * fs * p_max).
///
/// The chosen build value should sit below this bound to keep regulation
/// margin.
pub fn design_leakage_inductance(n: f64, v1: f64, v2_min: f64, fs: f64, p_max: f64) -> Result<f64> {
    for (name, value) in [
        ("n", n),
        ("v1", v1),
        ("v2_min", v2_min),
        ("fs", fs),
        ("p_max", p_max),
    ] {
        if !(value.is_finite() && value > 0.0) {
            return Err(ConverterError::InvalidParameter {
                name,
                reason: "must be finite and positive",
                value,
            });
        }
    }
    Ok(n * v1 * v2_min / (8.0 * fs * p_max))
}
