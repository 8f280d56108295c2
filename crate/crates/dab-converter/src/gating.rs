//! Gate timing for the eight devices of the dual active bridge.
//!
//! The primary full bridge is made of legs A (S1 high, S2 low) and
//! B (S3 high, S4 low); the secondary of legs C (Q1, Q2) and D (Q3, Q4).
//! Every leg runs complementary drives at 50% duty, so a leg is fully
//! described by the instant its high-side device turns on and the instant
//! its low-side device turns on, half a period later.
//!
//! Terminal voltages follow from the leg states:
//!   vp = V1 * (legA high - legB high), vs = V2 * (legC high - legD high).
//!
//! Time zero is anchored to the rising edge of leg A. The inner shift sets
//! the width of the narrowed bridge's voltage pulse; the outer shift places
//! the center of the secondary pulse behind the center of the primary pulse
//! by `d_outer * Ts/2`. Anchoring the outer shift between pulse centers
//! keeps transferred power zero at d_outer = 0 and strictly increasing up
//! to d_outer = 0.5 for any inner shift, which the rest of the crate relies
//! on when inverting power commands.

use crate::error::Result;
use crate::types::{ConverterSpec, ModulationPoint, Strategy};

/// Bridge leg identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LegId {
    A,
    B,
    C,
    D,
}

impl LegId {
    pub const ALL: [LegId; 4] = [LegId::A, LegId::B, LegId::C, LegId::D];

    pub fn index(self) -> usize {
        match self {
            LegId::A => 0,
            LegId::B => 1,
            LegId::C => 2,
            LegId::D => 3,
        }
    }

    /// True for legs of the primary bridge.
    pub fn is_primary(self) -> bool {
        matches!(self, LegId::A | LegId::B)
    }
}

/// Edge direction at the leg midpoint node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// High-side device turns on, node commutates toward the positive rail.
    Rising,
    /// Low-side device turns on, node commutates toward the return rail.
    Falling,
}

/// Switch naming: S1..S4 on the primary, Q1..Q4 on the secondary.
/// Odd indices are high side, even indices low side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceId {
    S1,
    S2,
    S3,
    S4,
    Q1,
    Q2,
    Q3,
    Q4,
}

impl DeviceId {
    pub const ALL: [DeviceId; 8] = [
        DeviceId::S1,
        DeviceId::S2,
        DeviceId::S3,
        DeviceId::S4,
        DeviceId::Q1,
        DeviceId::Q2,
        DeviceId::Q3,
        DeviceId::Q4,
    ];

    pub fn index(self) -> usize {
        match self {
            DeviceId::S1 => 0,
            DeviceId::S2 => 1,
            DeviceId::S3 => 2,
            DeviceId::S4 => 3,
            DeviceId::Q1 => 4,
            DeviceId::Q2 => 5,
            DeviceId::Q3 => 6,
            DeviceId::Q4 => 7,
        }
    }

    /// The device that turns on at the given edge of the given leg.
    pub fn turning_on(leg: LegId, kind: EdgeKind) -> DeviceId {
        match (leg, kind) {
            (LegId::A, EdgeKind::Rising) => DeviceId::S1,
            (LegId::A, EdgeKind::Falling) => DeviceId::S2,
            (LegId::B, EdgeKind::Rising) => DeviceId::S3,
            (LegId::B, EdgeKind::Falling) => DeviceId::S4,
            (LegId::C, EdgeKind::Rising) => DeviceId::Q1,
            (LegId::C, EdgeKind::Falling) => DeviceId::Q2,
            (LegId::D, EdgeKind::Rising) => DeviceId::Q3,
            (LegId::D, EdgeKind::Falling) => DeviceId::Q4,
        }
    }
}

impl std::fmt::Display for DeviceId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            DeviceId::S1 => "S1",
            DeviceId::S2 => "S2",
            DeviceId::S3 => "S3",
            DeviceId::S4 => "S4",
            DeviceId::Q1 => "Q1",
            DeviceId::Q2 => "Q2",
            DeviceId::Q3 => "Q3",
            DeviceId::Q4 => "Q4",
        };
        f.write_str(name)
    }
}

/// Edge times of one leg, both within [0, Ts).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegTiming {
    /// Instant the high-side device turns on (s).
    pub rise: f64,
    /// Instant the low-side device turns on (s).
    pub fall: f64,
}

impl LegTiming {
    fn from_rise(rise: f64, ts: f64) -> LegTiming {
        LegTiming {
            rise,
            fall: wrap(rise + 0.5 * ts, ts),
        }
    }

    /// Whether the high-side device is on at time t (cyclic).
    pub fn high_at(&self, t: f64, ts: f64) -> bool {
        (t - self.rise).rem_euclid(ts) < 0.5 * ts
    }
}

/// Complete gate timing for one switching period.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingSchedule {
    /// Timings indexed by `LegId::index()`.
    pub legs: [LegTiming; 4],
    /// Switching period (s).
    pub ts: f64,
}

impl SwitchingSchedule {
    pub fn leg(&self, leg: LegId) -> &LegTiming {
        &self.legs[leg.index()]
    }

    /// Primary terminal voltage level in {-1, 0, +1} at time t.
    pub fn primary_level(&self, t: f64) -> i32 {
        let a = self.legs[0].high_at(t, self.ts) as i32;
        let b = self.legs[1].high_at(t, self.ts) as i32;
        a - b
    }

    /// Secondary terminal voltage level in {-1, 0, +1} at time t.
    pub fn secondary_level(&self, t: f64) -> i32 {
        let c = self.legs[2].high_at(t, self.ts) as i32;
        let d = self.legs[3].high_at(t, self.ts) as i32;
        c - d
    }

    /// All eight edge instants, sorted ascending, within [0, Ts).
    /// Duplicates are kept so callers see one entry per device turn-on.
    pub fn edge_times(&self) -> [f64; 8] {
        let mut edges = [
            self.legs[0].rise,
            self.legs[0].fall,
            self.legs[1].rise,
            self.legs[1].fall,
            self.legs[2].rise,
            self.legs[2].fall,
            self.legs[3].rise,
            self.legs[3].fall,
        ];
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges
    }
}

fn wrap(t: f64, ts: f64) -> f64 {
    let w = t.rem_euclid(ts);
    // rem_euclid of a value within rounding of ts can return ts itself.
    if w >= ts {
        0.0
    } else {
        w
    }
}

/// Build the gate schedule for one modulation point.
///
/// Leg A rises at t = 0. The narrowed bridge's pulse spans `d_inner * Ts/2`;
/// the remaining legs are placed so that the secondary pulse center lags the
/// primary pulse center by exactly `d_outer * Ts/2`.
pub fn gate_schedule(spec: &ConverterSpec, point: &ModulationPoint) -> Result<SwitchingSchedule> {
    spec.validate()?;
    point.validate()?;
    let ts = spec.ts();
    let half = 0.5 * ts;
    let din = point.d_inner;
    let d_o = point.d_outer;

    let legs = match point.strategy {
        Strategy::Eps1 => {
            // Primary pulse spans [0, din * half); its center sits at
            // din * half / 2. The secondary keeps full width, so its two
            // legs switch half a period apart and its rising edge leads
            // its center by half / 2.
            let sec_rise = wrap((d_o - 0.5 * (1.0 - din)) * half, ts);
            [
                LegTiming::from_rise(0.0, ts),
                LegTiming::from_rise(wrap(din * half, ts), ts),
                LegTiming::from_rise(sec_rise, ts),
                LegTiming::from_rise(wrap(sec_rise + half, ts), ts),
            ]
        }
        Strategy::Eps2 => {
            // Primary keeps full width with its center at half / 2; the
            // secondary pulse is narrowed to din * half and its center
            // placed d_outer * half behind the primary center.
            let c_rise = wrap((d_o + 0.5 * (1.0 - din)) * half, ts);
            [
                LegTiming::from_rise(0.0, ts),
                LegTiming::from_rise(half, ts),
                LegTiming::from_rise(c_rise, ts),
                LegTiming::from_rise(wrap(c_rise + din * half, ts), ts),
            ]
        }
    };

    Ok(SwitchingSchedule { legs, ts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule(strategy: Strategy, d_inner: f64, d_outer: f64) -> SwitchingSchedule {
        let spec = ConverterSpec::default();
        let point = ModulationPoint {
            strategy,
            d_inner,
            d_outer,
        };
        gate_schedule(&spec, &point).unwrap()
    }

    #[test]
    fn plain_phase_shift_places_secondary_by_outer_shift() {
        // With full inner width the secondary rising edge lags leg A by
        // exactly d_outer * Ts/2.
        let s = schedule(Strategy::Eps1, 1.0, 0.2);
        let ts = s.ts;
        assert_eq!(s.leg(LegId::A).rise, 0.0);
        assert!((s.leg(LegId::B).rise - 0.5 * ts).abs() < 1e-18);
        assert!((s.leg(LegId::C).rise - 0.2 * 0.5 * ts).abs() < 1e-18);
        assert!((s.leg(LegId::D).rise - (0.2 * 0.5 * ts + 0.5 * ts)).abs() < 1e-18);
    }

    #[test]
    fn strategies_coincide_at_full_inner_width() {
        for &d_o in &[0.0, 0.1, 0.27, 0.5] {
            let s1 = schedule(Strategy::Eps1, 1.0, d_o);
            let s2 = schedule(Strategy::Eps2, 1.0, d_o);
            assert_eq!(s1, s2);
        }
    }

    #[test]
    fn narrowed_pulse_width_matches_inner_shift() {
        let ts = ConverterSpec::default().ts();
        let s = schedule(Strategy::Eps1, 0.6, 0.2);
        // Primary pulse spans from leg A rise to leg B rise.
        let width = (s.leg(LegId::B).rise - s.leg(LegId::A).rise).rem_euclid(ts);
        assert!((width - 0.6 * 0.5 * ts).abs() < 1e-18);

        let s = schedule(Strategy::Eps2, 0.6, 0.2);
        let width = (s.leg(LegId::D).rise - s.leg(LegId::C).rise).rem_euclid(ts);
        assert!((width - 0.6 * 0.5 * ts).abs() < 1e-12 * ts);
    }

    #[test]
    fn pulse_centers_are_separated_by_outer_shift() {
        // Measure centers from the level functions, independent of how the
        // edges were constructed.
        let ts = ConverterSpec::default().ts();
        for &(strategy, din, d_o) in &[
            (Strategy::Eps1, 0.6, 0.2),
            (Strategy::Eps1, 0.35, 0.45),
            (Strategy::Eps2, 0.6, 0.2),
            (Strategy::Eps2, 0.8, 0.05),
        ] {
            let s = schedule(strategy, din, d_o);
            let (p_rise, p_width) = positive_pulse(|t| s.primary_level(t), ts);
            let (s_rise, s_width) = positive_pulse(|t| s.secondary_level(t), ts);
            let p_center = p_rise + 0.5 * p_width;
            let s_center = s_rise + 0.5 * s_width;
            let lag = (s_center - p_center).rem_euclid(ts);
            assert!(
                (lag - d_o * 0.5 * ts).abs() < 2.0 * ts / SCAN as f64,
                "{strategy:?} din={din} d_o={d_o}: lag {lag}"
            );
        }
    }

    const SCAN: usize = 200_000;

    /// Locate the positive pulse of a cyclic three-level waveform by dense
    /// scanning: returns (rise time, width).
    fn positive_pulse(level: impl Fn(f64) -> i32, ts: f64) -> (f64, f64) {
        let dt = ts / SCAN as f64;
        let mut rise = None;
        let mut width = 0.0;
        for k in 0..SCAN {
            let t = k as f64 * dt;
            let here = level(t) > 0;
            let prev = level((t - dt).rem_euclid(ts)) > 0;
            if here && !prev {
                rise = Some(t);
            }
            if here {
                width += dt;
            }
        }
        (rise.expect("no positive pulse found"), width)
    }

    #[test]
    fn levels_are_half_wave_antisymmetric() {
        let ts = ConverterSpec::default().ts();
        for &(strategy, din, d_o) in &[
            (Strategy::Eps1, 0.55, 0.3),
            (Strategy::Eps2, 0.25, 0.05),
            (Strategy::Eps1, 1.0, 0.0),
        ] {
            let s = schedule(strategy, din, d_o);
            for k in 0..997 {
                let t = ts * (k as f64) / 997.0;
                assert_eq!(s.primary_level(t), -s.primary_level(t + 0.5 * ts));
                assert_eq!(s.secondary_level(t), -s.secondary_level(t + 0.5 * ts));
            }
        }
    }

    #[test]
    fn zero_inner_shift_silences_the_narrowed_bridge() {
        let s = schedule(Strategy::Eps1, 0.0, 0.2);
        let ts = s.ts;
        for k in 0..499 {
            let t = ts * (k as f64) / 499.0;
            assert_eq!(s.primary_level(t), 0);
        }
        let s = schedule(Strategy::Eps2, 0.0, 0.2);
        for k in 0..499 {
            let t = ts * (k as f64) / 499.0;
            assert_eq!(s.secondary_level(t), 0);
        }
    }

    #[test]
    fn edge_times_are_sorted_and_in_period() {
        let s = schedule(Strategy::Eps2, 0.3, 0.4);
        let edges = s.edge_times();
        for pair in edges.windows(2) {
            assert!(pair[0] <= pair[1]);
        }
        for &t in &edges {
            assert!((0.0..s.ts).contains(&t));
        }
    }
}
