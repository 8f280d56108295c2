//! Steady-state inductor current as an exact piecewise-linear waveform.
//!
//! Between gate edges both bridge voltages are constant, so the inductor
//! current is a straight line with slope (vp - n*vs)/Lr. Integrating the
//! slopes over one period and imposing half-wave antisymmetry fixes the
//! starting current in closed form; no time stepping is involved.

use crate::error::{ConverterError, Result};
use crate::gating::{gate_schedule, SwitchingSchedule};
use crate::types::{ConverterSpec, ModulationPoint};

/// One constant-voltage interval of the switching period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    /// Interval start (s).
    pub t0: f64,
    /// Interval end (s).
    pub t1: f64,
    /// Primary terminal voltage over the interval (V).
    pub vp: f64,
    /// Secondary terminal voltage over the interval (V).
    pub vs: f64,
    /// Inductor current at t0 (A).
    pub i0: f64,
    /// Current slope (A/s).
    pub slope: f64,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Current at the end of the interval (A).
    pub fn i1(&self) -> f64 {
        self.i0 + self.slope * self.duration()
    }
}

/// Steady-state solution over one switching period.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseWaveform {
    /// Segments covering [0, Ts) without gaps, sorted by start time.
    pub segments: Vec<Segment>,
    /// Switching period (s).
    pub ts: f64,
    /// Secondary dc voltage the solution was computed for (V).
    pub v2: f64,
    /// Gate schedule the solution was built from.
    pub schedule: SwitchingSchedule,
}

impl PiecewiseWaveform {
    /// Inductor current at an arbitrary time (cyclic).
    pub fn current_at(&self, t: f64) -> f64 {
        let t = t.rem_euclid(self.ts);
        for seg in &self.segments {
            if t < seg.t1 {
                return seg.i0 + seg.slope * (t - seg.t0);
            }
        }
        // t fell within rounding of Ts; that is the same point as t = 0.
        self.segments[0].i0
    }

    /// Largest magnitude the current reaches over the period (A).
    /// The waveform is piecewise linear, so extrema sit on segment ends.
    pub fn peak_current(&self) -> f64 {
        let mut peak: f64 = 0.0;
        for seg in &self.segments {
            peak = peak.max(seg.i0.abs()).max(seg.i1().abs());
        }
        peak
    }
}

/// Solve the periodic steady state for one modulation point.
pub fn solve_steady_state(
    spec: &ConverterSpec,
    point: &ModulationPoint,
    v2: f64,
) -> Result<PiecewiseWaveform> {
    if !(v2.is_finite() && v2 > 0.0) {
        return Err(ConverterError::InvalidParameter {
            name: "v2",
            reason: "must be finite and positive",
            value: v2,
        });
    }
    let schedule = gate_schedule(spec, point)?;
    let ts = schedule.ts;
    let half = 0.5 * ts;

    // Breakpoints: every gate edge plus the period boundaries. Leg A
    // contributes exactly 0 and Ts/2, so the half-period boundary is
    // always a segment end.
    let mut breaks: Vec<f64> = Vec::with_capacity(10);
    breaks.push(0.0);
    for leg in &schedule.legs {
        breaks.push(leg.rise);
        breaks.push(leg.fall);
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();

    let mut segments: Vec<Segment> = Vec::with_capacity(breaks.len());
    for (k, &t0) in breaks.iter().enumerate() {
        let t1 = if k + 1 < breaks.len() { breaks[k + 1] } else { ts };
        if t1 <= t0 {
            continue;
        }
        let tm = 0.5 * (t0 + t1);
        let vp = spec.v1 * schedule.primary_level(tm) as f64;
        let vs = v2 * schedule.secondary_level(tm) as f64;
        segments.push(Segment {
            t0,
            t1,
            vp,
            vs,
            i0: 0.0,
            slope: (vp - spec.n * vs) / spec.lr,
        });
    }

    // Half-wave antisymmetry gives iL(Ts/2) = -iL(0), so the current at
    // t = 0 is minus half the slope integral over the first half period.
    let mut rise = 0.0;
    for seg in &segments {
        if seg.t1 <= half {
            rise += seg.slope * seg.duration();
        }
    }
    let mut i = -0.5 * rise;
    for seg in &mut segments {
        seg.i0 = i;
        i = seg.i1();
    }

    Ok(PiecewiseWaveform {
        segments,
        ts,
        v2,
        schedule,
    })
}

/// Average power delivered by the primary bridge over one period (W).
pub fn average_power(wf: &PiecewiseWaveform) -> f64 {
    let mut acc = 0.0;
    for seg in &wf.segments {
        let dt = seg.duration();
        acc += seg.vp * (seg.i0 * dt + 0.5 * seg.slope * dt * dt);
    }
    acc / wf.ts
}

/// RMS of the inductor current over one period (A).
pub fn rms_current(wf: &PiecewiseWaveform) -> f64 {
    let mut acc = 0.0;
    for seg in &wf.segments {
        let dt = seg.duration();
        let (i0, s) = (seg.i0, seg.slope);
        acc += i0 * i0 * dt + i0 * s * dt * dt + s * s * dt * dt * dt / 3.0;
    }
    (acc / wf.ts).sqrt()
}

/// Invert the power transfer curve: find the outer shift that delivers
/// `p_target` watts at the given inner shift and secondary voltage.
///
/// Power is zero at d_outer = 0 and increases monotonically up to
/// d_outer = 0.5, so a bisection converges unconditionally. The result is
/// accurate to max(0.01 W, 1e-6 * p_target); targets at or below that
/// tolerance map to d_outer = 0. Returns `Unreachable` when the target
/// exceeds the curve maximum by more than the tolerance.
pub fn solve_outer_shift(
    spec: &ConverterSpec,
    point_at: &ModulationPoint,
    v2: f64,
    p_target: f64,
) -> Result<f64> {
    if !(p_target.is_finite() && p_target >= 0.0) {
        return Err(ConverterError::InvalidParameter {
            name: "p_target",
            reason: "must be finite and non-negative",
            value: p_target,
        });
    }
    let tol = (1e-6 * p_target).max(0.01);
    if p_target <= tol {
        return Ok(0.0);
    }
    let power_at = |d_outer: f64| -> Result<f64> {
        let point = ModulationPoint {
            d_outer,
            ..*point_at
        };
        Ok(average_power(&solve_steady_state(spec, &point, v2)?))
    };
    let p_max = power_at(0.5)?;
    if p_target > p_max + tol {
        return Err(ConverterError::Unreachable { p_target, p_max });
    }

    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    let mut mid = 0.25;
    for _ in 0..60 {
        mid = 0.5 * (lo + hi);
        let p = power_at(mid)?;
        if (p - p_target).abs() <= tol {
            return Ok(mid);
        }
        if p < p_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // 60 halvings of [0, 0.5] put the bracket far below the tolerance for
    // any finite slope; reaching this line means the curve is not monotone.
    let p = power_at(mid)?;
    if (p - p_target).abs() <= tol {
        Ok(mid)
    } else {
        Err(ConverterError::Unreachable { p_target, p_max })
    }
}
