//! Steady-state model of a dual active bridge dc-dc converter under
//! two extended phase shift modulation strategies.
//!
//! The crate provides exact piecewise-linear waveform solutions, power and
//! rms integrals, a harmonic-domain model, a time-marching reference
//! simulator, zero-voltage switching classification, a loss model and the
//! inversion from a power command to the outer shift that realizes it.

pub mod design;
pub mod error;
pub mod gating;
pub mod harmonics;
pub mod losses;
pub mod operating_point;
pub mod transient;
pub mod types;
pub mod waveform;
pub mod zvs;

pub use design::design_leakage_inductance;
pub use error::{ConverterError, Result};
pub use gating::{gate_schedule, DeviceId, EdgeKind, LegId, LegTiming, SwitchingSchedule};
pub use harmonics::{eval_harmonic_current, harmonic_spectrum, HarmonicSeries, HarmonicTerm};
pub use losses::{loss_breakdown, LossBreakdown};
pub use operating_point::{evaluate_operating_point, OperatingPointResult};
pub use transient::{simulate_transient, TransientTrace};
pub use types::{ConverterSpec, LossModelParams, ModulationPoint, Strategy};
pub use waveform::{
    average_power, rms_current, solve_outer_shift, solve_steady_state, PiecewiseWaveform, Segment,
};
pub use zvs::{commutation_events, zvs_report, SwitchingEvent, ZvsCriterion, ZvsReport};
