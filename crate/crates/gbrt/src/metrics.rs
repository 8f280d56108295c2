//! Regression quality metrics.

/// Root mean squared error.
pub fn rmse(predictions: &[f64], targets: &[f64]) -> f64 {
    assert_eq!(predictions.len(), targets.len());
    assert!(!predictions.is_empty());
    let sse: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    (sse / predictions.len() as f64).sqrt()
}

/// Mean absolute error.
pub fn mae(predictions: &[f64], targets: &[f64]) -> f64 {
    assert_eq!(predictions.len(), targets.len());
    assert!(!predictions.is_empty());
    predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t).abs())
        .sum::<f64>()
        / predictions.len() as f64
}

/// Coefficient of determination. A perfect fit returns 1 even when the
/// targets are constant; a constant-target set with any error returns
/// negative infinity, as any nonzero error is infinitely worse than the
/// trivial predictor.
pub fn r_squared(predictions: &[f64], targets: &[f64]) -> f64 {
    assert_eq!(predictions.len(), targets.len());
    assert!(!predictions.is_empty());
    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    let sse: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    let sst: f64 = targets.iter().map(|t| (t - mean) * (t - mean)).sum();
    if sse == 0.0 {
        1.0
    } else if sst == 0.0 {
        f64::NEG_INFINITY
    } else {
        1.0 - sse / sst
    }
}
