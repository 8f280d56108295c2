//! Cross-model consistency checks.
//!
//! Each check pits two independent routes to the same quantity against each
//! other: the algebraic waveform solver against time-marching integration,
//! the harmonic reconstruction against the exact current, and the solved
//! operating points against closed-form full-width expressions. The checks
//! return structured results so callers can print one verdict line each.

use dab_converter::{
    average_power, design_leakage_inductance, eval_harmonic_current, harmonic_spectrum,
    simulate_transient, solve_outer_shift, solve_steady_state, ConverterSpec, ModulationPoint,
    Strategy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn verdict_line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        format!("[{tag}] {name}: {detail}", name = self.name, detail = self.detail)
    }
}

/// Random but reproducible modulation points spanning both strategies and
/// the whole shift envelope, away from degenerate corners.
fn sample_points(n: usize, seed: u64) -> Vec<(ModulationPoint, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let strategy = if rng.random::<bool>() {
                Strategy::Eps2
            } else {
                Strategy::Eps1
            };
            let d_inner = rng.random_range(0.1..=1.0);
            let d_outer = rng.random_range(0.02..=0.45);
            let v2 = rng.random_range(150.0..=250.0);
            (
                ModulationPoint {
                    strategy,
                    d_inner,
                    d_outer,
                },
                v2,
            )
        })
        .collect()
}

/// Compare the algebraic steady-state solver against time-marching
/// integration at `n_points` random operating points. The worst deviation,
/// relative to the point's own peak current, must stay below `tol_rel`.
pub fn check_solver_against_transient(
    spec: &ConverterSpec,
    n_points: usize,
    seed: u64,
    tol_rel: f64,
) -> Result<Check> {
    let points = sample_points(n_points, seed);
    let dt = spec.ts() / 8192.0;

    let worst = points
        .par_iter()
        .map(|(point, v2)| -> Result<f64> {
            let wf = solve_steady_state(spec, point, *v2)?;
            let trace = simulate_transient(spec, point, *v2, dt)?;
            let scale = wf.peak_current().max(1e-9);
            let mut err: f64 = 0.0;
            for k in (0..trace.samples.len()).step_by(16) {
                let t = k as f64 * trace.dt;
                err = err.max((trace.samples[k] - wf.current_at(t)).abs());
            }
            Ok(err / scale)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;

    Ok(Check {
        name: "solver vs transient",
        pass: worst <= tol_rel,
        detail: format!(
            "max current deviation {worst:.3e} of peak over {n_points} points (limit {tol_rel:.1e})"
        ),
    })
}

/// Truncation orders for the harmonic reconstruction check.
pub const HARMONIC_ORDERS: [u32; 4] = [1, 11, 101, 301];

/// Reconstruct the inductor current from truncated harmonic series and
/// compare against the exact solution. The error must shrink as orders are
/// added and the highest order must land within `tol_rel` of the peak.
pub fn check_harmonic_convergence(
    spec: &ConverterSpec,
    n_points: usize,
    seed: u64,
    tol_rel: f64,
) -> Result<Check> {
    let points = sample_points(n_points, seed);
    let n_samples = 256usize;

    let results: Vec<(bool, f64)> = points
        .par_iter()
        .map(|(point, v2)| -> Result<(bool, f64)> {
            let wf = solve_steady_state(spec, point, *v2)?;
            let scale = wf.peak_current().max(1e-9);

            let mut errs = [0.0f64; HARMONIC_ORDERS.len()];
            for (slot, &k_max) in errs.iter_mut().zip(&HARMONIC_ORDERS) {
                let series = harmonic_spectrum(spec, point, *v2, k_max)?;
                let mut err: f64 = 0.0;
                for s in 0..n_samples {
                    let t = (s as f64 + 0.5) / n_samples as f64 * wf.ts;
                    err = err.max((eval_harmonic_current(&series, t) - wf.current_at(t)).abs());
                }
                *slot = err;
            }

            let slack = 1e-9 * scale;
            let monotone = errs.windows(2).all(|w| w[1] <= w[0] + slack);
            Ok((monotone, errs[HARMONIC_ORDERS.len() - 1] / scale))
        })
        .collect::<Result<_>>()?;

    let all_monotone = results.iter().all(|r| r.0);
    let worst = results.iter().fold(0.0f64, |acc, r| acc.max(r.1));
    Ok(Check {
        name: "harmonic reconstruction",
        pass: all_monotone && worst <= tol_rel,
        detail: format!(
            "orders {HARMONIC_ORDERS:?}: monotone {all_monotone}, max residual {worst:.3e} of peak over {n_points} points (limit {tol_rel:.1e})"
        ),
    })
}

/// Closed-form anchors: the inductance sizing rule, the full-width power
/// law over the whole envelope, and the rated-point outer shift.
pub fn check_design_anchors(spec: &ConverterSpec) -> Result<Check> {
    let mut failures: Vec<String> = Vec::new();

    // Sizing rule at the envelope corner: n V1 V2min / (8 fs Pmax).
    let bound = design_leakage_inductance(1.0, 200.0, 160.0, 20e3, 1000.0)?;
    if (bound - 200e-6).abs() > 0.001 * 200e-6 {
        failures.push(format!("inductance bound {bound:.6e} H, expected 2e-4 H"));
    }

    // Full-width transfer law P = K d (1 - d), K = n V1 V2 / (2 fs Lr).
    let mut worst_rel: f64 = 0.0;
    for iv in 0..9 {
        let v2 = 160.0 + 10.0 * iv as f64;
        let k = spec.n * spec.v1 * v2 / (2.0 * spec.fs * spec.lr);
        for id in 1..=9 {
            let d = 0.05 * id as f64;
            let point = ModulationPoint {
                strategy: Strategy::Eps1,
                d_inner: 1.0,
                d_outer: d,
            };
            let wf = solve_steady_state(spec, &point, v2)?;
            let expect = k * d * (1.0 - d);
            worst_rel = worst_rel.max((average_power(&wf) - expect).abs() / expect);
        }
    }
    if worst_rel > 1e-3 {
        failures.push(format!("full-width power law off by {worst_rel:.3e}"));
    }

    // Rated point: 1 kW at matched 200 V needs an outer shift near 0.2119.
    let base = ModulationPoint {
        strategy: Strategy::Eps1,
        d_inner: 1.0,
        d_outer: 0.0,
    };
    let d_rated = solve_outer_shift(spec, &base, 200.0, 1000.0)?;
    if (d_rated - 0.211903).abs() > 1e-3 {
        failures.push(format!("rated outer shift {d_rated:.6}, expected 0.211903"));
    }

    let pass = failures.is_empty();
    let detail = if pass {
        format!(
            "bound {bound:.4e} H, power law within {worst_rel:.2e}, rated shift {d_rated:.6}"
        )
    } else {
        failures.join("; ")
    };
    Ok(Check {
        name: "closed-form anchors",
        pass,
        detail,
    })
}

/// Run every check with default sample counts.
pub fn run_all_checks(spec: &ConverterSpec, seed: u64) -> Result<Vec<Check>> {
    Ok(vec![
        check_solver_against_transient(spec, 200, seed, 0.005)?,
        check_harmonic_convergence(spec, 50, seed.wrapping_add(1), 0.01)?,
        check_design_anchors(spec)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass_on_the_default_build() {
        let spec = ConverterSpec::default();
        for check in run_all_checks(&spec, 9).unwrap() {
            assert!(check.pass, "{}", check.verdict_line());
        }
    }

    #[test]
    fn verdict_lines_are_single_lines_with_a_tag() {
        let c = Check {
            name: "demo",
            pass: false,
            detail: "broke".into(),
        };
        let line = c.verdict_line();
        assert!(line.starts_with("[FAIL] demo:"));
        assert!(!line.contains('\n'));
    }

    #[test]
    fn sampled_points_are_reproducible_and_in_range() {
        let a = sample_points(40, 3);
        let b = sample_points(40, 3);
        assert_eq!(a.len(), 40);
        for ((pa, va), (pb, vb)) in a.iter().zip(&b) {
            assert_eq!(pa, pb);
            assert_eq!(va, vb);
            assert!(pa.d_inner >= 0.1 && pa.d_inner <= 1.0);
            assert!(pa.d_outer >= 0.02 && pa.d_outer <= 0.45);
            assert!(*va >= 150.0 && *va <= 250.0);
        }
        assert!(a.iter().any(|(p, _)| p.strategy == Strategy::Eps1));
        assert!(a.iter().any(|(p, _)| p.strategy == Strategy::Eps2));
    }
}
