//! Particle swarm minimization with a self-adaptive velocity limit.
//!
//! A small swarm moves under the standard inertia-plus-attraction rule.
//! Each particle keeps its personal best; the swarm keeps the global best.
//! The velocity limit adapts to the swarm state: an evolutionary factor
//! derived from how far the currently best particle sits from the rest maps
//! through a logistic curve to a per-dimension speed cap between a
//! exploitation fraction and an exploration fraction of the search range.
//! When the best particle is central (converging), the factor is low and
//! the cap tightens; when it is peripheral (exploring), the cap widens.
//!
//! Everything is driven by one seeded counter-based generator in a fixed
//! draw order, so a run is a pure function of (objective, bounds, config,
//! seed).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PsoError {
    #[error("invalid config field {field}: {reason}")]
    InvalidConfig {
        field: &'static str,
        reason: &'static str,
    },

    #[error("invalid bounds in dimension {dim}: low {lo} must be below high {hi}")]
    InvalidBounds { dim: usize, lo: f64, hi: f64 },

    #[error("objective returned a non-finite value {value} at {position:?}")]
    NonFiniteObjective { value: f64, position: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, PsoError>;

/// Swarm hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwarmConfig {
    pub n_particles: usize,
    pub n_iters: usize,
    /// Personal-best attraction gain.
    pub c1: f64,
    /// Global-best attraction gain.
    pub c2: f64,
    /// Inertia weight at the first iteration.
    pub omega_start: f64,
    /// Inertia weight at the last iteration.
    pub omega_end: f64,
    /// Velocity cap as a fraction of the range when fully exploring.
    pub vl_fraction_max: f64,
    /// Velocity cap as a fraction of the range when fully converging.
    pub vl_fraction_min: f64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        SwarmConfig {
            n_particles: 5,
            n_iters: 50,
            c1: 2.05,
            c2: 2.05,
            omega_start: 0.9,
            omega_end: 0.4,
            vl_fraction_max: 0.7,
            vl_fraction_min: 0.4,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles < 2 {
            return Err(PsoError::InvalidConfig {
                field: "n_particles",
                reason: "need at least 2 particles",
            });
        }
        if self.n_iters == 0 {
            return Err(PsoError::InvalidConfig {
                field: "n_iters",
                reason: "must be at least 1",
            });
        }
        for (field, v) in [("c1", self.c1), ("c2", self.c2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(PsoError::InvalidConfig {
                    field,
                    reason: "must be finite and non-negative",
                });
            }
        }
        for (field, v) in [
            ("omega_start", self.omega_start),
            ("omega_end", self.omega_end),
        ] {
            if !(v.is_finite() && v >= 0.0 && v <= 2.0) {
                return Err(PsoError::InvalidConfig {
                    field,
                    reason: "must lie in [0, 2]",
                });
            }
        }
        if !(self.vl_fraction_min > 0.0 && self.vl_fraction_min < 1.0) {
            return Err(PsoError::InvalidConfig {
                field: "vl_fraction_min",
                reason: "must lie in (0, 1)",
            });
        }
        if !(self.vl_fraction_max > self.vl_fraction_min && self.vl_fraction_max < 1.0) {
            return Err(PsoError::InvalidConfig {
                field: "vl_fraction_max",
                reason: "must lie in (vl_fraction_min, 1)",
            });
        }
        Ok(())
    }
}

/// Outcome of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Global best fitness after initialization and after every iteration;
    /// length n_iters + 1, non-increasing.
    pub trace: Vec<f64>,
}

/// Mean distance from each particle to every other particle, then the
/// factor (d_best - d_min) / (d_max - d_min) clamped to [0, 1]. A swarm
/// whose distances all agree (range below 1e-12) yields 0.
pub fn evolutionary_factor(positions: &[Vec<f64>], best_index: usize) -> f64 {
    let n = positions.len();
    debug_assert!(n >= 2 && best_index < n);
    let mut d = vec![0.0f64; n];
    for (j, dj) in d.iter_mut().enumerate() {
        let mut acc = 0.0;
        for k in 0..n {
            if k == j {
                continue;
            }
            let dist: f64 = positions[j]
                .iter()
                .zip(&positions[k])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            acc += dist;
        }
        *dj = acc / (n - 1) as f64;
    }
    let d_min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let d_max = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if d_max - d_min < 1e-12 {
        return 0.0;
    }
    ((d[best_index] - d_min) / (d_max - d_min)).clamp(0.0, 1.0)
}

/// Logistic map from the evolutionary factor to the velocity cap fraction:
/// continuous, increasing, and hitting vl_min at f = 0 and vl_max at f = 1
/// exactly.
pub fn velocity_limit_fraction(f: f64, config: &SwarmConfig) -> f64 {
    let a = 1.0 / config.vl_fraction_min - 1.0;
    let b = ((1.0 / config.vl_fraction_max - 1.0) / a).ln();
    1.0 / (1.0 + a * (b * f).exp())
}

/// Minimize `objective` over the box `bounds`, seeded and fully
/// deterministic.
pub fn optimize(
    objective: &mut dyn FnMut(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    config: &SwarmConfig,
    seed: u64,
) -> Result<OptimizeResult> {
    config.validate()?;
    if bounds.is_empty() {
        return Err(PsoError::InvalidConfig {
            field: "bounds",
            reason: "need at least one dimension",
        });
    }
    for (dim, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(PsoError::InvalidBounds { dim, lo, hi });
        }
    }

    let n = config.n_particles;
    let dims = bounds.len();
    let ranges: Vec<f64> = bounds.iter().map(|&(lo, hi)| hi - lo).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let eval = |x: &[f64], objective: &mut dyn FnMut(&[f64]) -> f64| -> Result<f64> {
        let v = objective(x);
        if v.is_nan() {
            return Err(PsoError::NonFiniteObjective {
                value: v,
                position: x.to_vec(),
            });
        }
        Ok(v)
    };

    // Draw order: all positions particle by particle, then all velocities.
    let mut positions: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..dims)
                .map(|d| bounds[d].0 + rng.random::<f64>() * ranges[d])
                .collect()
        })
        .collect();
    let vl0 = velocity_limit_fraction(0.0, config);
    let mut velocities: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..dims)
                .map(|d| (2.0 * rng.random::<f64>() - 1.0) * vl0 * ranges[d])
                .collect()
        })
        .collect();

    let mut personal_best = positions.clone();
    let mut personal_fitness: Vec<f64> = Vec::with_capacity(n);
    for p in &positions {
        personal_fitness.push(eval(p, objective)?);
    }
    let mut best_index = argmin(&personal_fitness);
    let mut best_position = personal_best[best_index].clone();
    let mut best_fitness = personal_fitness[best_index];

    let mut trace = Vec::with_capacity(config.n_iters + 1);
    trace.push(best_fitness);

    // The cap for the first iteration comes from the converged state; the
    // factor is re-measured after every move.
    let mut vl_fraction = vl0;

    for iter in 0..config.n_iters {
        let omega = if config.n_iters > 1 {
            let s = iter as f64 / (config.n_iters - 1) as f64;
            config.omega_start + (config.omega_end - config.omega_start) * s
        } else {
            config.omega_start
        };

        for j in 0..n {
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            for d in 0..dims {
                let cap = vl_fraction * ranges[d];
                let v = omega * velocities[j][d]
                    + config.c1 * r1 * (personal_best[j][d] - positions[j][d])
                    + config.c2 * r2 * (best_position[d] - positions[j][d]);
                let v = v.clamp(-cap, cap);
                velocities[j][d] = v;
                positions[j][d] = (positions[j][d] + v).clamp(bounds[d].0, bounds[d].1);
            }
            let fitness = eval(&positions[j], objective)?;
            if fitness < personal_fitness[j] {
                personal_fitness[j] = fitness;
                personal_best[j] = positions[j].clone();
                if fitness < best_fitness {
                    best_fitness = fitness;
                    best_position = positions[j].clone();
                    best_index = j;
                }
            }
        }

        // Adapt the cap from the post-move swarm shape for the next
        // iteration.
        let f = evolutionary_factor(&positions, best_index);
        vl_fraction = velocity_limit_fraction(f, config);
        trace.push(best_fitness);
    }

    Ok(OptimizeResult {
        best_position,
        best_fitness,
        trace,
    })
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    best
}
