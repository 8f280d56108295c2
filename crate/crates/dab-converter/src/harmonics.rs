//! Frequency-domain model of the bridge voltages and inductor current.
//!
//! Both terminal voltages are three-level square waves with quarter-wave
//! symmetry about their pulse centers, so their Fourier series contain odd
//! sine harmonics only. Writing the pulse center angle as m, harmonic k of
//! a pulse of width w and amplitude V is
//!
//!   v_k(t) = (4 V / k pi) * cos(k (pi - w) / 2) * sin(k w0 t + k (pi/2 - m))
//!
//! and the inductor current follows each harmonic through the series
//! impedance j k w0 Lr with the secondary referred by the turns ratio.

use std::f64::consts::PI;

use crate::error::Result;
use crate::types::{ConverterSpec, ModulationPoint, Strategy};

/// One sine term: value = amplitude * sin(k * w0 * t + phase).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicTerm {
    /// Harmonic order (odd).
    pub k: u32,
    /// Non-negative amplitude (V or A).
    pub amplitude: f64,
    /// Phase offset (rad), normalized to (-pi, pi].
    pub phase: f64,
}

/// Truncated harmonic decomposition of one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSeries {
    /// Fundamental angular frequency (rad/s).
    pub w0: f64,
    /// Primary terminal voltage harmonics.
    pub vp: Vec<HarmonicTerm>,
    /// Secondary terminal voltage harmonics.
    pub vs: Vec<HarmonicTerm>,
    /// Inductor current harmonics.
    pub il: Vec<HarmonicTerm>,
}

/// Minimal complex arithmetic for the phasor division.
#[derive(Debug, Clone, Copy)]
struct Cpx {
    re: f64,
    im: f64,
}

impl Cpx {
    fn from_polar(r: f64, phi: f64) -> Cpx {
        Cpx {
            re: r * phi.cos(),
            im: r * phi.sin(),
        }
    }

    fn sub_scaled(self, other: Cpx, scale: f64) -> Cpx {
        Cpx {
            re: self.re - scale * other.re,
            im: self.im - scale * other.im,
        }
    }

    /// Divide by the imaginary number j*x.
    fn div_j(self, x: f64) -> Cpx {
        // 1 / (j x) = -j / x.
        Cpx {
            re: self.im / x,
            im: -self.re / x,
        }
    }

    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }
}

fn normalize_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Harmonic of a centered three-level pulse: width `w` rad, center at
/// `m` rad, amplitude `v`.
fn pulse_harmonic(k: u32, v: f64, w: f64, m: f64) -> HarmonicTerm {
    let kf = k as f64;
    let coef = 4.0 * v / (kf * PI) * (kf * (PI - w) / 2.0).cos();
    let raw = kf * (PI / 2.0 - m);
    let (amplitude, phase) = if coef < 0.0 {
        (-coef, raw + PI)
    } else {
        (coef, raw)
    };
    HarmonicTerm {
        k,
        amplitude,
        phase: normalize_phase(phase),
    }
}

/// Decompose one operating point into odd harmonics 1, 3, ... k_max.
pub fn harmonic_spectrum(
    spec: &ConverterSpec,
    point: &ModulationPoint,
    v2: f64,
    k_max: u32,
) -> Result<HarmonicSeries> {
    spec.validate()?;
    point.validate()?;
    let w0 = 2.0 * PI * spec.fs;

    // Pulse widths in radians and center angles measured from the leg A
    // rising edge; the secondary center lags the primary center by
    // pi * d_outer.
    let (w_p, w_s) = match point.strategy {
        Strategy::Eps1 => (PI * point.d_inner, PI),
        Strategy::Eps2 => (PI, PI * point.d_inner),
    };
    let m_p = 0.5 * w_p;
    let m_s = m_p + PI * point.d_outer;

    let count = (k_max as usize + 1) / 2;
    let mut vp = Vec::with_capacity(count);
    let mut vs = Vec::with_capacity(count);
    let mut il = Vec::with_capacity(count);

    let mut k = 1u32;
    while k <= k_max {
        let tp = pulse_harmonic(k, spec.v1, w_p, m_p);
        let ts = pulse_harmonic(k, v2, w_s, m_s);
        let cp = Cpx::from_polar(tp.amplitude, tp.phase);
        let cs = Cpx::from_polar(ts.amplitude, ts.phase);
        let ci = cp.sub_scaled(cs, spec.n).div_j(k as f64 * w0 * spec.lr);
        il.push(HarmonicTerm {
            k,
            amplitude: ci.abs(),
            phase: normalize_phase(ci.arg()),
        });
        vp.push(tp);
        vs.push(ts);
        k += 2;
    }

    Ok(HarmonicSeries { w0, vp, vs, il })
}

/// Reconstruct the inductor current at time t from the truncated series.
pub fn eval_harmonic_current(series: &HarmonicSeries, t: f64) -> f64 {
    series
        .il
        .iter()
        .map(|h| h.amplitude * (h.k as f64 * series.w0 * t + h.phase).sin())
        .sum()
}
