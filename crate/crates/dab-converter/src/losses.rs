//! Loss estimation at one operating point.
//!
//! Four contributors: switch conduction, winding copper, switching energy
//! and optional core loss. Conduction and copper scale with the squared rms
//! current; two devices conduct per bridge at any instant, with the
//! secondary current scaled by the turns ratio. Switching energy charges a
//! turn-off term at every edge and a turn-on term only at hard edges. Core
//! loss follows a Steinmetz form fed by the peak flux implied by the
//! primary volt-seconds over a half period; it is disabled by default.

use crate::types::ConverterSpec;
use crate::waveform::PiecewiseWaveform;
use crate::zvs::{SwitchingEvent, ZvsReport};

/// Loss components at one operating point, all in watts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossBreakdown {
    pub conduction: f64,
    pub copper: f64,
    pub switching: f64,
    pub core: f64,
    pub total: f64,
}

/// Compute the loss breakdown from the solved waveform, its rms current,
/// the switching events and the ZVS classification.
pub fn loss_breakdown(
    spec: &ConverterSpec,
    wf: &PiecewiseWaveform,
    i_rms: f64,
    events: &[SwitchingEvent; 8],
    report: &ZvsReport,
) -> LossBreakdown {
    let p = &spec.loss;

    // Two switches conduct in series per bridge; the secondary carries
    // n times the inductor current.
    let i_rms_sq = i_rms * i_rms;
    let conduction = i_rms_sq * 2.0 * p.rds_on + (spec.n * spec.n) * i_rms_sq * 2.0 * p.rds_on;
    let copper = i_rms_sq * p.r_w;

    let mut energy = 0.0;
    for ev in events {
        let i_mag = ev.current.abs();
        // The outgoing device turns off with the same current magnitude the
        // incoming one picks up.
        energy += p.k_off * ev.v_dc * i_mag;
        if !report.soft[ev.incoming.index()] {
            energy += p.k_on * ev.v_dc * i_mag;
        }
    }
    let switching = energy * spec.fs;

    let core = if p.k_c > 0.0 {
        let half = 0.5 * wf.ts;
        let mut volt_seconds = 0.0;
        for seg in &wf.segments {
            if seg.t1 <= half {
                volt_seconds += seg.vp * seg.duration();
            }
        }
        let b_pk = volt_seconds.abs() / (2.0 * p.turns * p.core_area);
        p.k_c * spec.fs.powf(p.alpha) * b_pk.powf(p.beta) * p.core_volume
    } else {
        0.0
    };

    let total = conduction + copper + switching + core;
    LossBreakdown {
        conduction,
        copper,
        switching,
        core,
        total,
    }
}
