//! One-call evaluation of a modulation command at an operating point.

use crate::error::{ConverterError, Result};
use crate::losses::{loss_breakdown, LossBreakdown};
use crate::types::{ConverterSpec, ModulationPoint, Strategy};
use crate::waveform::{rms_current, solve_outer_shift, solve_steady_state};
use crate::zvs::{commutation_events, zvs_report, ZvsCriterion};

/// Everything the sweeps and optimizers need to know about one evaluated
/// operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPointResult {
    /// Commanded transfer power (W).
    pub p_target: f64,
    /// Secondary dc voltage (V).
    pub v2: f64,
    pub strategy: Strategy,
    pub d_inner: f64,
    /// Outer shift that realizes the commanded power, 0 when infeasible.
    pub d_outer: f64,
    /// Inductor rms current (A).
    pub i_rms: f64,
    /// Peak inductor current (A).
    pub i_peak: f64,
    /// Soft-switched device count, 0 ..= 8.
    pub n_zvs: u8,
    /// Loss components (W).
    pub loss: LossBreakdown,
    /// Output power over output plus losses; 0 when infeasible.
    pub efficiency: f64,
    /// False when the commanded power exceeds the reachable range at this
    /// inner shift, in which case all waveform-derived fields are zeroed.
    pub feasible: bool,
}

/// Solve the outer shift for a power command and evaluate the resulting
/// point. An unreachable command yields `feasible = false` rather than an
/// error; malformed parameters still fail.
pub fn evaluate_operating_point(
    spec: &ConverterSpec,
    strategy: Strategy,
    d_inner: f64,
    v2: f64,
    p_target: f64,
    criterion: ZvsCriterion,
) -> Result<OperatingPointResult> {
    let base = ModulationPoint {
        strategy,
        d_inner,
        d_outer: 0.0,
    };
    base.validate()?;

    let d_outer = match solve_outer_shift(spec, &base, v2, p_target) {
        Ok(d) => d,
        Err(ConverterError::Unreachable { .. }) => {
            return Ok(OperatingPointResult {
                p_target,
                v2,
                strategy,
                d_inner,
                d_outer: 0.0,
                i_rms: 0.0,
                i_peak: 0.0,
                n_zvs: 0,
                loss: LossBreakdown::default(),
                efficiency: 0.0,
                feasible: false,
            });
        }
        Err(e) => return Err(e),
    };

    let point = ModulationPoint {
        strategy,
        d_inner,
        d_outer,
    };
    let wf = solve_steady_state(spec, &point, v2)?;
    let i_rms = rms_current(&wf);
    let events = commutation_events(spec, &wf);
    let report = zvs_report(spec, &events, criterion);
    let loss = loss_breakdown(spec, &wf, i_rms, &events, &report);
    let efficiency = if p_target > 0.0 {
        p_target / (p_target + loss.total)
    } else {
        0.0
    };

    Ok(OperatingPointResult {
        p_target,
        v2,
        strategy,
        d_inner,
        d_outer,
        i_rms,
        i_peak: wf.peak_current(),
        n_zvs: report.n_zvs,
        loss,
        efficiency,
        feasible: true,
    })
}
