//! Per-cell modulation optimization over the (power, voltage) grid.
//!
//! Each grid cell is an independent one-dimensional search of the inner
//! shift for one strategy, scored by total loss plus a penalty per device
//! that misses soft switching. The swarm handles the smooth part of the
//! landscape; a handful of deterministic candidates covers the near
//! gain-matched shifts, where the fully soft window can be narrower than
//! any practical swarm resolution, and the full-width waveform.
//!
//! The same machinery runs against two objective backends: the exact
//! converter model, or the trained surrogates with an exact reachability
//! mask. Cells get scheduling-independent seeds, so a map is a pure
//! function of (objective, grids, swarm config, master seed).

use dab_converter::{
    average_power, solve_steady_state, evaluate_operating_point, ConverterSpec, ModulationPoint,
    Strategy, ZvsCriterion,
};
use pso_savl::{optimize, SwarmConfig};
use rayon::prelude::*;

use crate::config::{linspace, PipelineConfig};
use crate::error::{PipelineError, Result};
use crate::seeds::derive_seed;
use crate::training::Surrogates;

/// Which backend scored a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Direct,
    Surrogate,
}

impl Provenance {
    pub fn token(self) -> &'static str {
        match self {
            Provenance::Direct => "direct",
            Provenance::Surrogate => "surrogate",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "direct" => Some(Provenance::Direct),
            "surrogate" => Some(Provenance::Surrogate),
            _ => None,
        }
    }
}

/// Optimization outcome for one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellChoice {
    pub p: f64,
    pub v2: f64,
    pub strategy: Strategy,
    pub d_inner: f64,
    /// Penalized loss the winner scored.
    pub fitness: f64,
    /// Loss at the winner (W); direct value or surrogate prediction.
    pub p_loss: f64,
    /// Soft-switched devices at the winner; integral for direct maps, a raw
    /// regression output for surrogate maps.
    pub n_zvs: f64,
    /// False when no inner shift can reach the commanded power.
    pub feasible: bool,
}

/// A full grid of per-cell choices, row-major with the voltage index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationMap {
    pub p: Vec<f64>,
    pub v2: Vec<f64>,
    pub provenance: Provenance,
    pub cells: Vec<CellChoice>,
}

impl ModulationMap {
    pub fn cell(&self, ip: usize, iv: usize) -> &CellChoice {
        &self.cells[ip * self.v2.len() + iv]
    }
}

/// The three maps one optimization pass produces.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSet {
    pub eps1: ModulationMap,
    pub eps2: ModulationMap,
    /// Per-cell better of the two, ties to the primary-narrowing strategy.
    pub winner: ModulationMap,
}

/// Scoring backend for cell optimization.
pub struct CellObjective<'a> {
    spec: &'a ConverterSpec,
    criterion: ZvsCriterion,
    penalty: f64,
    infeasible: f64,
    surrogates: Option<&'a Surrogates>,
}

impl<'a> CellObjective<'a> {
    pub fn direct(cfg: &'a PipelineConfig) -> Self {
        CellObjective {
            spec: &cfg.spec,
            criterion: cfg.zvs_criterion,
            penalty: cfg.zvs_penalty,
            infeasible: cfg.infeasible_fitness,
            surrogates: None,
        }
    }

    pub fn surrogate(cfg: &'a PipelineConfig, models: &'a Surrogates) -> Self {
        CellObjective {
            surrogates: Some(models),
            ..CellObjective::direct(cfg)
        }
    }

    pub fn provenance(&self) -> Provenance {
        if self.surrogates.is_some() {
            Provenance::Surrogate
        } else {
            Provenance::Direct
        }
    }

    /// Penalized loss of one modulation choice. Unreachable commands score
    /// the flat infeasible fitness.
    pub fn fitness(&self, strategy: Strategy, d_inner: f64, p: f64, v2: f64) -> f64 {
        match self.surrogates {
            None => {
                let r = evaluate_operating_point(self.spec, strategy, d_inner, v2, p, self.criterion)
                    .expect("cell fitness called with malformed parameters");
                if !r.feasible {
                    return self.infeasible;
                }
                r.loss.total + self.penalty * f64::from(8 - r.n_zvs)
            }
            Some(models) => {
                if p > max_reachable_power(self.spec, strategy, d_inner, v2) {
                    return self.infeasible;
                }
                let loss = models.predict_loss(strategy, p, v2, d_inner);
                let miss = (8.0 - models.predict_n_zvs(strategy, p, v2, d_inner)).max(0.0);
                loss + self.penalty * miss
            }
        }
    }

    /// Loss and device count behind a fitness value, for reporting.
    fn describe(&self, strategy: Strategy, d_inner: f64, p: f64, v2: f64) -> (f64, f64) {
        match self.surrogates {
            None => {
                let r = evaluate_operating_point(self.spec, strategy, d_inner, v2, p, self.criterion)
                    .expect("cell describe called with malformed parameters");
                (r.loss.total, f64::from(r.n_zvs))
            }
            Some(models) => (
                models.predict_loss(strategy, p, v2, d_inner),
                models.predict_n_zvs(strategy, p, v2, d_inner),
            ),
        }
    }
}

/// Largest transferable power at a given strategy, inner shift and output
/// voltage: transfer grows monotonically with the outer shift, so the
/// ceiling sits at an outer shift of one half.
pub fn max_reachable_power(
    spec: &ConverterSpec,
    strategy: Strategy,
    d_inner: f64,
    v2: f64,
) -> f64 {
    let point = ModulationPoint {
        strategy,
        d_inner,
        d_outer: 0.5,
    };
    let wf = solve_steady_state(spec, &point, v2)
        .expect("max power probe called with malformed parameters");
    average_power(&wf)
}

/// Inner shift that matches the narrowed bridge's average pulse height to
/// the opposing bridge voltage: the inductor current flattens inside the
/// pulse, which is where the fully soft window lives.
pub fn gain_matched_inner_shift(spec: &ConverterSpec, strategy: Strategy, v2: f64) -> f64 {
    match strategy {
        Strategy::Eps1 => spec.n * v2 / spec.v1,
        Strategy::Eps2 => spec.v1 / (spec.n * v2),
    }
}

/// Deterministic candidates checked on top of the swarm result: the
/// full-width waveform, plus shifts just below gain match where the fully
/// soft window can be far narrower than the swarm's resolution.
pub fn candidate_inner_shifts(
    spec: &ConverterSpec,
    strategy: Strategy,
    v2: f64,
    din_lo: f64,
) -> Vec<f64> {
    let dm = gain_matched_inner_shift(spec, strategy, v2);
    let mut out = vec![1.0];
    for delta in [1e-3, 1e-4, 1e-5] {
        let d = dm - delta;
        if d > din_lo && d < 1.0 {
            out.push(d);
        }
    }
    out
}

/// Optimize one cell: swarm search over the inner shift, then the
/// deterministic candidates, keeping the strictly best fitness.
pub fn optimize_cell(
    objective: &CellObjective,
    strategy: Strategy,
    p: f64,
    v2: f64,
    swarm: &SwarmConfig,
    din_lo: f64,
    seed: u64,
) -> Result<CellChoice> {
    if !(din_lo > 0.0 && din_lo < 1.0) {
        return Err(PipelineError::Config(format!(
            "inner shift floor must lie in (0, 1), got {din_lo}"
        )));
    }
    if !(p > 0.0 && p.is_finite() && v2 > 0.0 && v2.is_finite()) {
        return Err(PipelineError::Config(format!(
            "cell at ({p} W, {v2} V) is not a valid operating point"
        )));
    }

    // The reachable power only grows with the pulse width, so an unreachable
    // full-width cell is unreachable everywhere.
    if p > max_reachable_power(objective.spec, strategy, 1.0, v2) {
        return Ok(CellChoice {
            p,
            v2,
            strategy,
            d_inner: 1.0,
            fitness: objective.infeasible,
            p_loss: 0.0,
            n_zvs: 0.0,
            feasible: false,
        });
    }

    let run = optimize(
        &mut |x: &[f64]| objective.fitness(strategy, x[0], p, v2),
        &[(din_lo, 1.0)],
        swarm,
        seed,
    )?;
    let mut best_din = run.best_position[0];
    let mut best_fitness = run.best_fitness;

    for d in candidate_inner_shifts(objective.spec, strategy, v2, din_lo) {
        let f = objective.fitness(strategy, d, p, v2);
        if f < best_fitness {
            best_fitness = f;
            best_din = d;
        }
    }

    let (p_loss, n_zvs) = objective.describe(strategy, best_din, p, v2);
    Ok(CellChoice {
        p,
        v2,
        strategy,
        d_inner: best_din,
        fitness: best_fitness,
        p_loss,
        n_zvs,
        feasible: best_fitness < objective.infeasible,
    })
}

/// Exhaustive reference search on a uniform inner shift grid of `n` points
/// ending at 1. Ties keep the smallest shift.
pub fn grid_search_cell(
    objective: &CellObjective,
    strategy: Strategy,
    p: f64,
    v2: f64,
    n: usize,
    din_lo: f64,
) -> CellChoice {
    let grid = linspace(din_lo, 1.0, n);
    let mut best_din = grid[0];
    let mut best_fitness = objective.fitness(strategy, best_din, p, v2);
    for &d in &grid[1..] {
        let f = objective.fitness(strategy, d, p, v2);
        if f < best_fitness {
            best_fitness = f;
            best_din = d;
        }
    }
    let (p_loss, n_zvs) = objective.describe(strategy, best_din, p, v2);
    CellChoice {
        p,
        v2,
        strategy,
        d_inner: best_din,
        fitness: best_fitness,
        p_loss,
        n_zvs,
        feasible: best_fitness < objective.infeasible,
    }
}

/// Optimize every cell of one strategy's map in parallel. Cell seeds are
/// derived from (master seed, strategy, power index, voltage index), so the
/// result does not depend on scheduling.
pub fn optimize_strategy_map(
    objective: &CellObjective,
    strategy: Strategy,
    cfg: &PipelineConfig,
) -> Result<ModulationMap> {
    let p_grid = linspace(cfg.p_min, cfg.p_max, cfg.map_p_points);
    let v2_grid = linspace(cfg.v2_min, cfg.v2_max, cfg.map_v2_points);

    let cells: Vec<CellChoice> = (0..p_grid.len() * v2_grid.len())
        .into_par_iter()
        .map(|idx| {
            let ip = idx / v2_grid.len();
            let iv = idx % v2_grid.len();
            let seed = derive_seed(
                cfg.seed,
                &[u64::from(strategy.code()), ip as u64, iv as u64],
            );
            optimize_cell(
                objective,
                strategy,
                p_grid[ip],
                v2_grid[iv],
                &cfg.swarm,
                cfg.din_min,
                seed,
            )
        })
        .collect::<Result<_>>()?;

    Ok(ModulationMap {
        p: p_grid,
        v2: v2_grid,
        provenance: objective.provenance(),
        cells,
    })
}

/// Per-cell better of the two strategy maps. An exact fitness tie keeps the
/// first map's choice; callers pass the primary-narrowing strategy first.
pub fn winner_map(a: &ModulationMap, b: &ModulationMap) -> Result<ModulationMap> {
    if a.p != b.p || a.v2 != b.v2 || a.provenance != b.provenance {
        return Err(PipelineError::Config(
            "winner map requires both maps on the same grid and backend".into(),
        ));
    }
    let cells = a
        .cells
        .iter()
        .zip(&b.cells)
        .map(|(ca, cb)| if cb.fitness < ca.fitness { *cb } else { *ca })
        .collect();
    Ok(ModulationMap {
        p: a.p.clone(),
        v2: a.v2.clone(),
        provenance: a.provenance,
        cells,
    })
}

/// Build both strategy maps and their winner.
pub fn optimize_maps(objective: &CellObjective, cfg: &PipelineConfig) -> Result<MapSet> {
    let eps1 = optimize_strategy_map(objective, Strategy::Eps1, cfg)?;
    let eps2 = optimize_strategy_map(objective, Strategy::Eps2, cfg)?;
    let winner = winner_map(&eps1, &eps2)?;
    Ok(MapSet { eps1, eps2, winner })
}
