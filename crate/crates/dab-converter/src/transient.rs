//! Time-marching reference simulation of the inductor current.
//!
//! Starts from zero current and integrates di/dt = (vp - n vs) / Lr on a
//! fixed sampling grid. Within each step the integrand is piecewise
//! constant, so the step is split exactly at the gate edges instead of
//! assuming one voltage per step; the result carries no discretization
//! error in the current itself, only in where samples land. The simulated
//! current equals the periodic steady state plus a dc offset fixed by the
//! start condition, so subtracting the sample mean recovers the steady
//! state. This is deliberately a different algorithm from the closed-form
//! solver and serves to cross-check it.

use crate::error::{ConverterError, Result};
use crate::gating::gate_schedule;
use crate::types::{ConverterSpec, ModulationPoint};

/// Uniformly sampled current trace over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientTrace {
    /// Sample spacing (s).
    pub dt: f64,
    /// Current samples at t = k * dt for k in 0..len (A), mean removed.
    pub samples: Vec<f64>,
}

impl TransientTrace {
    /// Sample closest to time t (cyclic).
    pub fn sample_at(&self, t: f64) -> f64 {
        let ts = self.dt * self.samples.len() as f64;
        let idx = (t.rem_euclid(ts) / self.dt).round() as usize % self.samples.len();
        self.samples[idx]
    }
}

/// Simulate one switching period on a grid of spacing `dt`.
/// Requires dt <= Ts / 5000 so every voltage interval is well resolved.
pub fn simulate_transient(
    spec: &ConverterSpec,
    point: &ModulationPoint,
    v2: f64,
    dt: f64,
) -> Result<TransientTrace> {
    if !(v2.is_finite() && v2 > 0.0) {
        return Err(ConverterError::InvalidParameter {
            name: "v2",
            reason: "must be finite and positive",
            value: v2,
        });
    }
    let schedule = gate_schedule(spec, point)?;
    let ts = schedule.ts;
    if !(dt > 0.0) || dt > ts / 5000.0 {
        return Err(ConverterError::InvalidParameter {
            name: "dt",
            reason: "must be positive and at most Ts/5000",
            value: dt,
        });
    }

    // Gate edges sorted ascending; used to split integration steps that
    // straddle a voltage change.
    let edges = schedule.edge_times();
    let n_steps = (ts / dt).round() as usize;
    let slope_at = |t: f64| -> f64 {
        let vp = spec.v1 * schedule.primary_level(t) as f64;
        let vs = v2 * schedule.secondary_level(t) as f64;
        (vp - spec.n * vs) / spec.lr
    };

    let mut samples = Vec::with_capacity(n_steps);
    let mut i = 0.0f64;
    for k in 0..n_steps {
        samples.push(i);
        let t0 = k as f64 * dt;
        let t1 = (k + 1) as f64 * dt;
        let mut t = t0;
        while t < t1 {
            // Next gate edge strictly after t, or the end of the step.
            let mut t_next = t1;
            for &e in &edges {
                if e > t && e < t_next {
                    t_next = e;
                    break;
                }
            }
            i += slope_at(0.5 * (t + t_next)) * (t_next - t);
            t = t_next;
        }
    }

    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    for s in &mut samples {
        *s -= mean;
    }
    Ok(TransientTrace { dt, samples })
}
