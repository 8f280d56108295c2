//! Exhaustive dataset generation over the operating and modulation envelope.
//!
//! Rows are laid out lexicographically by (strategy, power, output voltage,
//! inner shift), each strategy block containing the full cartesian grid.
//! Evaluation is embarrassingly parallel and free of randomness, so the
//! result is identical across runs and thread counts.

use dab_converter::{evaluate_operating_point, Strategy};
use rayon::prelude::*;

use crate::config::{linspace, PipelineConfig};
use crate::error::Result;

/// One evaluated dataset row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetRow {
    pub strategy: Strategy,
    /// Commanded power (W).
    pub p: f64,
    /// Output voltage (V).
    pub v2: f64,
    /// Inner shift ratio.
    pub d_inner: f64,
    /// Solved outer shift ratio, 0 when infeasible.
    pub d_outer: f64,
    /// Total loss (W), 0 when infeasible.
    pub p_loss: f64,
    /// Soft-switched devices, 0 when infeasible.
    pub n_zvs: u8,
    /// Inductor rms current (A), 0 when infeasible.
    pub i_rms: f64,
    /// Efficiency, 0 when infeasible.
    pub eta: f64,
    pub feasible: bool,
}

/// The grid axes a dataset was generated over.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub strategies: [Strategy; 2],
    pub p: Vec<f64>,
    pub v2: Vec<f64>,
    pub d_inner: Vec<f64>,
}

impl SweepPlan {
    pub fn from_config(cfg: &PipelineConfig) -> Self {
        SweepPlan {
            strategies: [Strategy::Eps1, Strategy::Eps2],
            p: linspace(cfg.p_min, cfg.p_max, cfg.dataset_p_points),
            v2: linspace(cfg.v2_min, cfg.v2_max, cfg.dataset_v2_points),
            d_inner: linspace(cfg.din_min, 1.0, cfg.dataset_din_points),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.strategies.len() * self.p.len() * self.v2.len() * self.d_inner.len()
    }

    /// Grid coordinates of a row index, in lexicographic row order.
    fn coordinates(&self, idx: usize) -> (Strategy, f64, f64, f64) {
        let n_din = self.d_inner.len();
        let n_v2 = self.v2.len();
        let n_p = self.p.len();
        let i_din = idx % n_din;
        let i_v2 = (idx / n_din) % n_v2;
        let i_p = (idx / (n_din * n_v2)) % n_p;
        let i_s = idx / (n_din * n_v2 * n_p);
        (
            self.strategies[i_s],
            self.p[i_p],
            self.v2[i_v2],
            self.d_inner[i_din],
        )
    }
}

/// Evaluate every grid point. Row order is the plan's lexicographic order
/// regardless of how the work was scheduled.
pub fn generate_dataset(cfg: &PipelineConfig, plan: &SweepPlan) -> Result<Vec<DatasetRow>> {
    cfg.validate()?;
    (0..plan.n_rows())
        .into_par_iter()
        .map(|idx| {
            let (strategy, p, v2, din) = plan.coordinates(idx);
            let r = evaluate_operating_point(&cfg.spec, strategy, din, v2, p, cfg.zvs_criterion)?;
            Ok(DatasetRow {
                strategy,
                p,
                v2,
                d_inner: din,
                d_outer: r.d_outer,
                p_loss: r.loss.total,
                n_zvs: r.n_zvs,
                i_rms: r.i_rms,
                eta: r.efficiency,
                feasible: r.feasible,
            })
        })
        .collect()
}
