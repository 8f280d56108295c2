//! End-to-end modulation optimization pipeline: sweep the converter model
//! into a dataset, train surrogate models on it, optimize per-cell
//! modulation maps with either backend, and select commands from the maps.

pub mod config;
pub mod error;
pub mod io;
pub mod maps;
pub mod seeds;
pub mod selector;
pub mod sweep;
pub mod training;
pub mod validation;

pub use config::{linspace, PipelineConfig};
pub use error::{PipelineError, Result};
pub use maps::{
    candidate_inner_shifts, gain_matched_inner_shift, grid_search_cell, max_reachable_power,
    optimize_cell, optimize_maps, optimize_strategy_map, winner_map, CellChoice, CellObjective,
    MapSet, ModulationMap, Provenance,
};
pub use seeds::derive_seed;
pub use selector::{select_modulation, SelectedModulation};
pub use sweep::{generate_dataset, DatasetRow, SweepPlan};
pub use training::{features, round_n_zvs, train_surrogates, Surrogates, TrainReport};
pub use validation::{
    check_design_anchors, check_harmonic_convergence, check_solver_against_transient,
    run_all_checks, Check,
};
