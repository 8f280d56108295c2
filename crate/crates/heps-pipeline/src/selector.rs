//! Online modulation selection from a precomputed map.
//!
//! Given a power command and the measured output voltage, pick the strategy
//! from the voltage conversion ratio and interpolate the optimized inner
//! shift bilinearly between the four surrounding map cells. A thin band
//! around unity ratio falls back to the plain full-width phase shift, where
//! both strategies coincide and no narrowing helps.

use dab_converter::Strategy;

use crate::error::{PipelineError, Result};
use crate::maps::ModulationMap;

/// The command handed to the gate drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectedModulation {
    pub strategy: Strategy,
    pub d_inner: f64,
    /// Conversion ratio n V2 / V1 the decision was based on.
    pub gain: f64,
    /// True when the unit-gain fallback fired.
    pub unit_gain: bool,
}

/// Index of the grid interval containing x, clamped to the last interval,
/// plus the interpolation weight inside it.
fn locate(grid: &[f64], x: f64) -> (usize, f64) {
    let last = grid.len() - 1;
    let i = match grid.iter().position(|&g| x < g) {
        Some(0) => 0,
        Some(j) => j - 1,
        None => last.saturating_sub(1),
    };
    if grid.len() == 1 {
        return (0, 0.0);
    }
    let w = ((x - grid[i]) / (grid[i + 1] - grid[i])).clamp(0.0, 1.0);
    (i, w)
}

/// Bilinear interpolation of the optimized inner shift at (p, v2).
fn interpolate_inner_shift(map: &ModulationMap, p: f64, v2: f64) -> Result<f64> {
    let (ip, wp) = locate(&map.p, p);
    let (iv, wv) = locate(&map.v2, v2);
    let ip1 = (ip + 1).min(map.p.len() - 1);
    let iv1 = (iv + 1).min(map.v2.len() - 1);

    let corners = [
        map.cell(ip, iv),
        map.cell(ip, iv1),
        map.cell(ip1, iv),
        map.cell(ip1, iv1),
    ];
    if corners.iter().any(|c| !c.feasible) {
        return Err(PipelineError::OutOfDomain { p, v2 });
    }

    let d00 = corners[0].d_inner;
    let d01 = corners[1].d_inner;
    let d10 = corners[2].d_inner;
    let d11 = corners[3].d_inner;
    let low = d00 + wv * (d01 - d00);
    let high = d10 + wv * (d11 - d10);
    Ok((low + wp * (high - low)).clamp(0.0, 1.0))
}

/// Select strategy and inner shift for one operating point.
pub fn select_modulation(
    map: &ModulationMap,
    v1: f64,
    n: f64,
    unit_gain_band: f64,
    p: f64,
    v2: f64,
) -> Result<SelectedModulation> {
    if !(p.is_finite() && v2.is_finite()) {
        return Err(PipelineError::OutOfDomain { p, v2 });
    }
    let (p_lo, p_hi) = (map.p[0], *map.p.last().unwrap());
    let (v_lo, v_hi) = (map.v2[0], *map.v2.last().unwrap());
    if p < p_lo || p > p_hi || v2 < v_lo || v2 > v_hi {
        return Err(PipelineError::OutOfDomain { p, v2 });
    }

    let gain = n * v2 / v1;
    if (gain - 1.0).abs() <= unit_gain_band {
        return Ok(SelectedModulation {
            strategy: Strategy::Eps1,
            d_inner: 1.0,
            gain,
            unit_gain: true,
        });
    }

    let strategy = if gain < 1.0 {
        Strategy::Eps1
    } else {
        Strategy::Eps2
    };
    let d_inner = interpolate_inner_shift(map, p, v2)?;
    Ok(SelectedModulation {
        strategy,
        d_inner,
        gain,
        unit_gain: false,
    })
}
