//! Zero-voltage switching classification for the eight devices.
//!
//! During the dead time before a device turns on, the inductor current must
//! pull that leg's midpoint node to the incoming device's rail. Whether it
//! can depends on the current direction at the edge and, under the charge
//! criterion, on its magnitude: the current has to move 2 * Coss_eff worth
//! of node charge across the dc rail within the dead time.
//!
//! Sign bookkeeping per leg, with iL flowing out of leg A into the inductor
//! and n * iL flowing out of the transformer into leg C:
//!   leg A sources +iL, leg B sinks it (sees -iL),
//!   leg C sinks +n*iL from the winding (sees +n*iL), leg D sees -n*iL.
//! A rising edge on a primary leg discharges the node only if the leg
//! current is negative; on a secondary leg only if it is positive. Falling
//! edges mirror that. Zero current never qualifies.

use serde::{Deserialize, Serialize};

use crate::gating::{DeviceId, EdgeKind, LegId};
use crate::types::ConverterSpec;
use crate::waveform::PiecewiseWaveform;

/// How strictly a commutation must be loaded to count as soft.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZvsCriterion {
    /// Only the current direction matters.
    SignOnly,
    /// The current must also fully swing the node within the dead time:
    /// |i| > 2 * Coss_eff * V_dc / t_dead.
    Charge,
}

/// One device turn-on event and the current available to commutate it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingEvent {
    pub leg: LegId,
    pub kind: EdgeKind,
    /// Device that turns on at this edge.
    pub incoming: DeviceId,
    /// Edge instant within [0, Ts) (s).
    pub t: f64,
    /// Commutation current referred to the leg (A), signs as in the module
    /// description.
    pub current: f64,
    /// Dc rail voltage of the leg's bridge (V).
    pub v_dc: f64,
}

/// ZVS classification of all eight devices at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct ZvsReport {
    /// Soft-switching flags indexed by `DeviceId::index()`.
    pub soft: [bool; 8],
    /// Number of soft-switched devices, 0 ..= 8.
    pub n_zvs: u8,
    /// Threshold applied to primary-side events (A).
    pub i_th_primary: f64,
    /// Threshold applied to secondary-side events (A).
    pub i_th_secondary: f64,
}

impl ZvsReport {
    pub fn is_full(&self) -> bool {
        self.n_zvs == 8
    }
}

/// Referred commutation current for a leg, from the inductor current at
/// the edge instant.
fn leg_current(leg: LegId, i_l: f64, n: f64) -> f64 {
    match leg {
        LegId::A => i_l,
        LegId::B => -i_l,
        LegId::C => n * i_l,
        LegId::D => -n * i_l,
    }
}

/// Enumerate the eight turn-on events of one period in device order
/// S1, S2, S3, S4, Q1, Q2, Q3, Q4.
pub fn commutation_events(spec: &ConverterSpec, wf: &PiecewiseWaveform) -> [SwitchingEvent; 8] {
    let mut events = [SwitchingEvent {
        leg: LegId::A,
        kind: EdgeKind::Rising,
        incoming: DeviceId::S1,
        t: 0.0,
        current: 0.0,
        v_dc: 0.0,
    }; 8];
    let mut idx = 0;
    for leg in LegId::ALL {
        let timing = wf.schedule.leg(leg);
        let v_dc = if leg.is_primary() { spec.v1 } else { wf.v2 };
        for (kind, t) in [(EdgeKind::Rising, timing.rise), (EdgeKind::Falling, timing.fall)] {
            events[idx] = SwitchingEvent {
                leg,
                kind,
                incoming: DeviceId::turning_on(leg, kind),
                t,
                current: leg_current(leg, wf.current_at(t), spec.n),
                v_dc,
            };
            idx += 1;
        }
    }
    events
}

/// Classify the eight commutations of one operating point.
pub fn zvs_report(
    spec: &ConverterSpec,
    events: &[SwitchingEvent; 8],
    criterion: ZvsCriterion,
) -> ZvsReport {
    let threshold = |v_dc: f64| match criterion {
        ZvsCriterion::SignOnly => 0.0,
        ZvsCriterion::Charge => {
            if spec.t_dead > 0.0 {
                2.0 * spec.loss.coss_eff * v_dc / spec.t_dead
            } else {
                f64::INFINITY
            }
        }
    };

    let mut soft = [false; 8];
    let mut n_zvs = 0u8;
    for ev in events {
        let i_th = threshold(ev.v_dc);
        // Primary legs source current into the tank, so a rising edge needs
        // the leg current flowing back into the node (negative); secondary
        // legs mirror that because the winding drives their nodes.
        let ok = match (ev.leg.is_primary(), ev.kind) {
            (true, EdgeKind::Rising) => ev.current < -i_th,
            (true, EdgeKind::Falling) => ev.current > i_th,
            (false, EdgeKind::Rising) => ev.current > i_th,
            (false, EdgeKind::Falling) => ev.current < -i_th,
        };
        soft[ev.incoming.index()] = ok;
        if ok {
            n_zvs += 1;
        }
    }

    ZvsReport {
        soft,
        n_zvs,
        i_th_primary: threshold(spec.v1),
        i_th_secondary: threshold(events[4].v_dc),
    }
}
