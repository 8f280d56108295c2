use dab_converter::{ConverterSpec, ZvsCriterion};
use gbrt::TrainConfig;
use pso_savl::SwarmConfig;
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};

/// Everything needed to reproduce one end-to-end run: converter hardware,
/// operating envelope, grid resolutions, optimizer settings, model settings,
/// and the master seed. Two runs with equal configs produce byte-identical
/// output files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub spec: ConverterSpec,

    /// Output voltage envelope in volts.
    pub v2_min: f64,
    pub v2_max: f64,
    /// Transferred power envelope in watts.
    pub p_min: f64,
    pub p_max: f64,

    /// Dataset grid: points along power, output voltage, and inner shift.
    pub dataset_p_points: usize,
    pub dataset_v2_points: usize,
    pub dataset_din_points: usize,
    /// Smallest inner shift sampled; keeps the near-degenerate zero-pulse
    /// corner out of the dataset.
    pub din_min: f64,

    /// Map grid: points along power and output voltage.
    pub map_p_points: usize,
    pub map_v2_points: usize,

    /// Penalty weight per device that misses soft switching.
    pub zvs_penalty: f64,
    /// Fitness assigned to operating points that cannot reach the commanded
    /// power at all.
    pub infeasible_fitness: f64,

    /// How commutation events are classified when evaluating points.
    pub zvs_criterion: ZvsCriterion,

    pub swarm: SwarmConfig,
    pub loss_model: TrainConfig,
    pub zvs_model: TrainConfig,

    /// Gain band treated as unit gain by the selector: |nV2/V1 - 1| below
    /// this returns plain phase-shift with both inner shifts at 1.
    pub unit_gain_band: f64,

    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            spec: ConverterSpec::default(),
            v2_min: 160.0,
            v2_max: 240.0,
            p_min: 100.0,
            p_max: 1000.0,
            dataset_p_points: 20,
            dataset_v2_points: 20,
            dataset_din_points: 80,
            din_min: 0.0125,
            map_p_points: 37,
            map_v2_points: 41,
            zvs_penalty: 100.0,
            infeasible_fitness: 1e6,
            zvs_criterion: ZvsCriterion::Charge,
            swarm: SwarmConfig::default(),
            loss_model: TrainConfig {
                max_depth: 9,
                lambda: 0.1,
                ..TrainConfig::default()
            },
            zvs_model: TrainConfig {
                max_depth: 6,
                lambda: 1.0,
                ..TrainConfig::default()
            },
            unit_gain_band: 0.005,
            seed: 42,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.spec
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        let positive = [
            ("v2_min", self.v2_min),
            ("p_min", self.p_min),
            ("zvs_penalty", self.zvs_penalty),
            ("infeasible_fitness", self.infeasible_fitness),
            ("unit_gain_band", self.unit_gain_band),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(PipelineError::Config(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if self.v2_max <= self.v2_min {
            return Err(PipelineError::Config(format!(
                "v2_max must exceed v2_min, got [{}, {}]",
                self.v2_min, self.v2_max
            )));
        }
        if self.p_max <= self.p_min {
            return Err(PipelineError::Config(format!(
                "p_max must exceed p_min, got [{}, {}]",
                self.p_min, self.p_max
            )));
        }
        if !(self.din_min > 0.0 && self.din_min <= 1.0) {
            return Err(PipelineError::Config(format!(
                "din_min must lie in (0, 1], got {}",
                self.din_min
            )));
        }
        let grids = [
            ("dataset_p_points", self.dataset_p_points),
            ("dataset_v2_points", self.dataset_v2_points),
            ("dataset_din_points", self.dataset_din_points),
            ("map_p_points", self.map_p_points),
            ("map_v2_points", self.map_v2_points),
        ];
        for (name, value) in grids {
            if value == 0 {
                return Err(PipelineError::Config(format!("{name} must be nonzero")));
            }
        }
        self.swarm
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        self.loss_model
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        self.zvs_model
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        Ok(())
    }
}

/// Evenly spaced grid including both endpoints. A single-point grid
/// collapses to the lower endpoint.
pub fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![min];
    }
    let step = (max - min) / (n - 1) as f64;
    (0..n).map(|i| min + step * i as f64).collect()
}
