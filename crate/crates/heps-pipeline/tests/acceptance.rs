//! Full-scale acceptance suite.
//!
//! One test per shipped guarantee. Each clause prints a [PASS]/[FAIL] line
//! and the test closes with a one-line verdict; a test fails if any clause
//! misses its bound. Everything runs on the production grids and default
//! config, so the whole file takes on the order of fifteen minutes:
//!
//!   cargo test -p heps-pipeline --test acceptance -- --nocapture
//!
//! The heavy artifacts (direct maps, dataset, models, surrogate maps) are
//! built once per criterion family and shared through OnceLock.

use std::fs;
use std::path::Path;
use std::sync::OnceLock;
use std::time::Instant;

use dab_converter::{
    design_leakage_inductance, eval_harmonic_current, evaluate_operating_point, harmonic_spectrum,
    rms_current, simulate_transient, solve_outer_shift, solve_steady_state, ConverterSpec,
    ModulationPoint, Strategy, ZvsCriterion,
};
use heps_pipeline::io::{write_dataset_csv, write_map_csv};
use heps_pipeline::{
    derive_seed, generate_dataset, grid_search_cell, optimize_cell, optimize_maps, CellObjective,
    DatasetRow, MapSet, PipelineConfig, Surrogates, SweepPlan, TrainReport,
};
use pso_savl::{optimize, velocity_limit_fraction};

const MASTER_SEED: u64 = 42;

/// Collects clause verdicts for one acceptance criterion and prints the
/// closing pass/fail line.
struct ClauseLog {
    name: &'static str,
    n_clauses: usize,
    failures: Vec<String>,
}

impl ClauseLog {
    fn new(name: &'static str) -> Self {
        ClauseLog {
            name,
            n_clauses: 0,
            failures: Vec::new(),
        }
    }

    fn clause(&mut self, label: &str, pass: bool, detail: String) {
        self.n_clauses += 1;
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {}.{label}: {detail}", self.name);
        if !pass {
            self.failures.push(format!("{label}: {detail}"));
        }
    }

    fn finish(self) {
        let verdict = if self.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "acceptance {}: {verdict} ({}/{} clauses)",
            self.name,
            self.n_clauses - self.failures.len(),
            self.n_clauses
        );
        assert!(
            self.failures.is_empty(),
            "{} failed clauses:\n  {}",
            self.name,
            self.failures.join("\n  ")
        );
    }
}

/// Uniform draw in [0, 1) from the deterministic seed tree.
fn unit(path: &[u64]) -> f64 {
    (derive_seed(MASTER_SEED, path) >> 11) as f64 / (1u64 << 53) as f64
}

fn pick_strategy(path: &[u64]) -> Strategy {
    if derive_seed(MASTER_SEED, path) & 1 == 0 {
        Strategy::Eps1
    } else {
        Strategy::Eps2
    }
}

/// Exact-objective strategy maps under the sign-only commutation rule.
struct SignBuild {
    cfg: PipelineConfig,
    maps: MapSet,
    secs: f64,
}

fn sign_build() -> &'static SignBuild {
    static CELL: OnceLock<SignBuild> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = PipelineConfig {
            zvs_criterion: ZvsCriterion::SignOnly,
            ..PipelineConfig::default()
        };
        let t0 = Instant::now();
        let maps = optimize_maps(&CellObjective::direct(&cfg), &cfg).expect("direct map build");
        SignBuild {
            cfg,
            maps,
            secs: t0.elapsed().as_secs_f64(),
        }
    })
}

/// One full pipeline pass under the default config: dataset, surrogates,
/// and both the surrogate-driven and exact strategy maps.
struct ChargeBuild {
    cfg: PipelineConfig,
    rows: Vec<DatasetRow>,
    dataset_secs: f64,
    models: Surrogates,
    report: TrainReport,
    train_secs: f64,
    direct: MapSet,
    direct_secs: f64,
    surrogate: MapSet,
    surrogate_secs: f64,
}

fn charge_build() -> &'static ChargeBuild {
    static CELL: OnceLock<ChargeBuild> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = PipelineConfig::default();

        let t0 = Instant::now();
        let plan = SweepPlan::from_config(&cfg);
        let rows = generate_dataset(&cfg, &plan).expect("dataset generation");
        let dataset_secs = t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let (models, report) =
            heps_pipeline::train_surrogates(&rows, &cfg).expect("surrogate training");
        let train_secs = t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let direct = optimize_maps(&CellObjective::direct(&cfg), &cfg).expect("direct maps");
        let direct_secs = t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let surrogate = optimize_maps(&CellObjective::surrogate(&cfg, &models), &cfg)
            .expect("surrogate maps");
        let surrogate_secs = t0.elapsed().as_secs_f64();

        ChargeBuild {
            cfg,
            rows,
            dataset_secs,
            models,
            report,
            train_secs,
            direct,
            direct_secs,
            surrogate,
            surrogate_secs,
        }
    })
}

/// Solver cross-validation: the closed-form waveform against time-marching
/// integration at 200 random operating points spanning both strategies and
/// the whole modulation envelope, plus exactness of the waveform's own
/// half-wave antisymmetry and periodic closure.
#[test]
fn a1_solver_cross_validation() {
    let spec = ConverterSpec::default();
    let mut log = ClauseLog::new("solver-cross-validation");

    let t0 = Instant::now();
    let dt = spec.ts() / 20_000.0;
    let mut worst_rms: f64 = 0.0;
    let mut worst_anti: f64 = 0.0;
    let mut worst_close: f64 = 0.0;
    for i in 0..200u64 {
        let point = ModulationPoint {
            strategy: pick_strategy(&[1, i, 0]),
            d_inner: unit(&[1, i, 1]),
            d_outer: 0.5 * unit(&[1, i, 2]),
        };
        let v2 = 160.0 + 80.0 * unit(&[1, i, 3]);

        let wf = solve_steady_state(&spec, &point, v2).unwrap();
        let scale = wf.peak_current().max(1e-9);

        let trace = simulate_transient(&spec, &point, v2, dt).unwrap();
        let mean_sq =
            trace.samples.iter().map(|s| s * s).sum::<f64>() / trace.samples.len() as f64;
        worst_rms = worst_rms.max((mean_sq.sqrt() - rms_current(&wf)).abs() / scale);

        let mut anti: f64 = 0.0;
        for k in 0..256 {
            let t = (k as f64 + 0.5) / 256.0 * wf.ts;
            anti = anti.max((wf.current_at(t) + wf.current_at(t + 0.5 * wf.ts)).abs());
        }
        worst_anti = worst_anti.max(anti / scale);

        let first = wf.segments.first().unwrap();
        let last = wf.segments.last().unwrap();
        worst_close = worst_close.max((last.i1() - first.i0).abs() / scale);
    }
    let secs = t0.elapsed().as_secs_f64();

    log.clause(
        "rms-agreement",
        worst_rms <= 0.005,
        format!("worst rms gap {worst_rms:.3e} of peak over 200 points (limit 5.0e-3)"),
    );
    log.clause(
        "antisymmetry",
        worst_anti <= 1e-9,
        format!("worst residual {worst_anti:.3e} of peak (limit 1.0e-9)"),
    );
    log.clause(
        "periodicity",
        worst_close <= 1e-9,
        format!("worst closure gap {worst_close:.3e} of peak (limit 1.0e-9)"),
    );
    log.clause("runtime", secs <= 30.0, format!("{secs:.1} s (limit 30 s)"));
    log.finish();
}

/// Harmonic equivalence: truncated spectral reconstruction converges onto
/// the exact current, and the truncation error shrinks as orders are added.
#[test]
fn a2_harmonic_equivalence() {
    let spec = ConverterSpec::default();
    let mut log = ClauseLog::new("harmonic-equivalence");

    let orders = [1u32, 11, 101, 301];
    let mut worst_top: f64 = 0.0;
    let mut monotone = true;
    for i in 0..50u64 {
        let point = ModulationPoint {
            strategy: pick_strategy(&[2, i, 0]),
            d_inner: unit(&[2, i, 1]),
            d_outer: 0.5 * unit(&[2, i, 2]),
        };
        let v2 = 160.0 + 80.0 * unit(&[2, i, 3]);

        let wf = solve_steady_state(&spec, &point, v2).unwrap();
        let scale = wf.peak_current().max(1e-9);

        let mut errs = [0.0f64; 4];
        for (slot, &k_max) in errs.iter_mut().zip(&orders) {
            let series = harmonic_spectrum(&spec, &point, v2, k_max).unwrap();
            let mut err: f64 = 0.0;
            for s in 0..512 {
                let t = (s as f64 + 0.5) / 512.0 * wf.ts;
                err = err.max((eval_harmonic_current(&series, t) - wf.current_at(t)).abs());
            }
            *slot = err;
        }
        worst_top = worst_top.max(errs[3] / scale);
        monotone &= errs.windows(2).all(|w| w[1] <= w[0] + 1e-9 * scale);
    }

    log.clause(
        "pointwise",
        worst_top <= 0.01,
        format!("301 odd harmonics: worst residual {worst_top:.3e} of peak over 50 points (limit 1.0e-2)"),
    );
    log.clause(
        "order-monotone",
        monotone,
        format!("truncation error non-increasing over orders {orders:?} on every point"),
    );
    log.finish();
}

/// Closed-form anchors: the inductance sizing rule, the full-width power
/// law across the envelope, and the rated-point outer shift.
#[test]
fn a3_closed_form_anchors() {
    let spec = ConverterSpec::default();
    let mut log = ClauseLog::new("closed-form-anchors");

    let bound = design_leakage_inductance(spec.n, spec.v1, 160.0, spec.fs, 1000.0).unwrap();
    log.clause(
        "sizing-bound",
        (bound - 2e-4).abs() <= 1e-12 * 2e-4,
        format!("bound {bound:.6e} H (expected 2.000000e-4 H)"),
    );
    log.clause(
        "built-inductance-inside",
        spec.lr <= bound,
        format!("built {:.3e} H against bound {bound:.3e} H", spec.lr),
    );

    let mut worst_rel: f64 = 0.0;
    for iv in 0..=8 {
        let v2 = 160.0 + 10.0 * iv as f64;
        let k = spec.n * spec.v1 * v2 / (2.0 * spec.fs * spec.lr);
        for id in 1..=24 {
            let d = 0.02 * id as f64;
            let point = ModulationPoint {
                strategy: Strategy::Eps1,
                d_inner: 1.0,
                d_outer: d,
            };
            let wf = solve_steady_state(&spec, &point, v2).unwrap();
            let expect = k * d * (1.0 - d);
            worst_rel =
                worst_rel.max((dab_converter::average_power(&wf) - expect).abs() / expect);
        }
    }
    log.clause(
        "full-width-power-law",
        worst_rel <= 1e-3,
        format!("worst relative gap {worst_rel:.3e} over 9 voltages x 24 shifts (limit 1.0e-3)"),
    );

    let base = ModulationPoint {
        strategy: Strategy::Eps1,
        d_inner: 1.0,
        d_outer: 0.0,
    };
    let d_rated = solve_outer_shift(&spec, &base, 200.0, 1000.0).unwrap();
    log.clause(
        "rated-outer-shift",
        (d_rated - 0.2119).abs() <= 1e-3,
        format!("solved {d_rated:.6} (expected 0.2119 +- 1.0e-3)"),
    );
    log.finish();
}

/// Strategy-map structure on the exact objective under the sign-only
/// commutation rule: buck cells narrow the primary, boost cells the
/// secondary, the matched-voltage column stays at full width, every cell
/// reports all eight devices soft, and the winner never loses to plain
/// full-width modulation.
#[test]
fn a4_design_grid_structure() {
    let b = sign_build();
    let mut log = ClauseLog::new("design-grid-structure");
    let winner = &b.maps.winner;

    let n_boundary = winner
        .cells
        .iter()
        .filter(|cell| (cell.v2 - 200.0).abs() < 1e-9)
        .count();

    let mut partition_bad = 0usize;
    let mut din_bad = 0usize;
    let mut worst_din: f64 = 0.0;
    let mut zvs_bad = 0usize;
    let mut dominance_bad = 0usize;
    let mut worst_gap: f64 = 0.0;
    for cell in &winner.cells {
        assert!(cell.feasible, "winner infeasible at ({}, {})", cell.p, cell.v2);
        if (cell.v2 - 200.0).abs() < 1e-9 {
            worst_din = worst_din.max((cell.d_inner - 1.0).abs());
            if (cell.d_inner - 1.0).abs() > 0.02 {
                din_bad += 1;
            }
        } else {
            let want = if cell.v2 < 200.0 {
                Strategy::Eps1
            } else {
                Strategy::Eps2
            };
            if cell.strategy != want {
                partition_bad += 1;
            }
        }
        if (cell.n_zvs - 8.0).abs() > 1e-9 {
            zvs_bad += 1;
        }
        let sps = evaluate_operating_point(
            &b.cfg.spec,
            Strategy::Eps1,
            1.0,
            cell.v2,
            cell.p,
            ZvsCriterion::SignOnly,
        )
        .unwrap();
        assert!(sps.feasible);
        let gap = cell.p_loss - sps.loss.total;
        if gap > 1e-9 {
            dominance_bad += 1;
            worst_gap = worst_gap.max(gap);
        }
    }

    log.clause(
        "strategy-partition",
        partition_bad == 0,
        format!(
            "{partition_bad} of {} off-boundary cells pick the wrong bridge to narrow",
            winner.cells.len() - n_boundary
        ),
    );
    log.clause(
        "matched-voltage-full-width",
        din_bad == 0,
        format!(
            "{din_bad} of {n_boundary} matched-voltage cells outside inner shift 1 +- 0.02 (worst |Din - 1| = {worst_din:.3})"
        ),
    );
    log.clause(
        "full-zvs",
        zvs_bad == 0,
        format!("{zvs_bad} of {} cells below 8 soft commutations", winner.cells.len()),
    );
    log.clause(
        "hybrid-dominance",
        dominance_bad == 0,
        format!("{dominance_bad} cells above the full-width loss (worst +{worst_gap:.3e} W)"),
    );
    log.clause(
        "runtime",
        b.secs <= 600.0,
        format!("{:.1} s (limit 600 s)", b.secs),
    );
    log.finish();
}

/// Surrogate fidelity: held-out regression quality of both models, and
/// agreement of the surrogate-driven strategy maps with the exact-objective
/// maps on strategy and inner shift.
#[test]
fn a5_surrogate_fidelity() {
    let b = charge_build();
    let mut log = ClauseLog::new("surrogate-fidelity");

    log.clause(
        "loss-r2",
        b.report.loss_r2 >= 0.99,
        format!("test r2 {:.6} (floor 0.99)", b.report.loss_r2),
    );
    log.clause(
        "zvs-accuracy",
        b.report.zvs_accuracy >= 0.97,
        format!(
            "rounded-count test accuracy {:.4} (floor 0.97)",
            b.report.zvs_accuracy
        ),
    );

    let mut considered = 0usize;
    let mut strategy_agree = 0usize;
    let mut din_agree = 0usize;
    let n_cells = b.direct.winner.cells.len();
    for (s, d) in b.surrogate.winner.cells.iter().zip(&b.direct.winner.cells) {
        assert_eq!((s.p, s.v2), (d.p, d.v2));
        if (s.d_inner - d.d_inner).abs() <= 0.05 {
            din_agree += 1;
        }
        // Gain within 2% of unity is a genuine toss-up between the two
        // narrowing directions, so strategy identity is only scored outside
        // that band.
        if (s.v2 - 200.0).abs() <= 4.0 + 1e-9 {
            continue;
        }
        considered += 1;
        if s.strategy == d.strategy {
            strategy_agree += 1;
        }
    }
    let strategy_frac = strategy_agree as f64 / considered as f64;
    log.clause(
        "strategy-agreement",
        strategy_frac >= 0.95,
        format!(
            "{strategy_agree}/{considered} = {strategy_frac:.4} outside the near-unity gain band (floor 0.95)"
        ),
    );
    let din_frac = din_agree as f64 / n_cells as f64;
    log.clause(
        "inner-shift-agreement",
        din_frac >= 0.90,
        format!("{din_agree}/{n_cells} = {din_frac:.4} within 0.05 (floor 0.90)"),
    );

    let total = b.dataset_secs + b.train_secs + b.direct_secs + b.surrogate_secs;
    log.clause(
        "runtime",
        total <= 900.0,
        format!(
            "dataset {:.1} s + training {:.1} s + maps {:.1} s + {:.1} s = {total:.1} s (limit 900 s)",
            b.dataset_secs, b.train_secs, b.direct_secs, b.surrogate_secs
        ),
    );
    log.finish();
}

/// Optimizer quality: the swarm matches a fine grid search on the exact
/// objective, the velocity-limit schedule hits its endpoint identities, and
/// every best-fitness trace is monotone.
#[test]
fn a6_optimizer_quality() {
    let cfg = PipelineConfig::default();
    let objective = CellObjective::direct(&cfg);
    let mut log = ClauseLog::new("optimizer-quality");

    // 988 intervals over [0.0125, 1] give a step just under 1e-3.
    let grid_n = 989;
    let mut matched = 0usize;
    let mut strictly_better = 0usize;
    let mut worst_rel = f64::NEG_INFINITY;
    let mut traces_monotone = true;
    for i in 0..100u64 {
        let strategy = pick_strategy(&[6, i, 0]);
        let p = 100.0 + 900.0 * unit(&[6, i, 1]);
        let v2 = 160.0 + 80.0 * unit(&[6, i, 2]);
        let seed = derive_seed(MASTER_SEED, &[6, i, 3]);

        let swarm = optimize_cell(&objective, strategy, p, v2, &cfg.swarm, cfg.din_min, seed)
            .unwrap();
        let grid = grid_search_cell(&objective, strategy, p, v2, grid_n, cfg.din_min);
        let rel = (swarm.fitness - grid.fitness) / grid.fitness;
        if rel <= 0.005 {
            matched += 1;
        }
        if rel < 0.0 {
            strictly_better += 1;
        }
        worst_rel = worst_rel.max(rel);

        let mut f = |x: &[f64]| objective.fitness(strategy, x[0], p, v2);
        let run = optimize(&mut f, &[(cfg.din_min, 1.0)], &cfg.swarm, seed).unwrap();
        traces_monotone &= run.trace.windows(2).all(|w| w[1] <= w[0]);
    }

    log.clause(
        "grid-match",
        matched >= 95,
        format!(
            "{matched}/100 cells within 0.5% of the 1e-3-step grid optimum (worst relative gap {worst_rel:+.3e}, swarm strictly better on {strictly_better})"
        ),
    );

    let vl0 = velocity_limit_fraction(0.0, &cfg.swarm);
    let vl1 = velocity_limit_fraction(1.0, &cfg.swarm);
    let vl_mid = velocity_limit_fraction(0.5, &cfg.swarm);
    let mid_expect = 14f64.sqrt() / (14f64.sqrt() + 3.0);
    let endpoints_ok = (vl0 - 0.4).abs() <= 1e-12
        && (vl1 - 0.7).abs() <= 1e-12
        && (vl_mid - mid_expect).abs() <= 1e-12;
    log.clause(
        "velocity-limit-identities",
        endpoints_ok,
        format!("vl(0) = {vl0:.15}, vl(1) = {vl1:.15}, vl(0.5) = {vl_mid:.15} (limits 1e-12)"),
    );
    log.clause(
        "trace-monotone",
        traces_monotone,
        "best-fitness trace non-increasing on all 100 runs".to_string(),
    );
    log.finish();
}

/// Loss-model envelope: rated-point efficiency sits in a sane hardware
/// band, efficiency falls off toward light load under full-width
/// modulation, and the hybrid map never loses efficiency to full width
/// away from the matched-voltage column.
#[test]
fn a7_efficiency_envelope() {
    let b = charge_build();
    let spec = &b.cfg.spec;
    let mut log = ClauseLog::new("efficiency-envelope");

    let rated =
        evaluate_operating_point(spec, Strategy::Eps1, 1.0, 200.0, 1000.0, ZvsCriterion::Charge)
            .unwrap();
    log.clause(
        "rated-efficiency",
        (0.94..=0.985).contains(&rated.efficiency),
        format!(
            "{:.4} at 1000 W / 200 V (band [0.94, 0.985])",
            rated.efficiency
        ),
    );

    let mut etas = Vec::new();
    for k in 0..=8 {
        let p = 100.0 + 25.0 * k as f64;
        let point =
            evaluate_operating_point(spec, Strategy::Eps1, 1.0, 240.0, p, ZvsCriterion::Charge)
                .unwrap();
        assert!(point.feasible);
        etas.push(point.efficiency);
    }
    let falling = etas.windows(2).all(|w| w[0] < w[1]);
    log.clause(
        "light-load-falloff",
        falling,
        format!(
            "full-width efficiency strictly rising 100 -> 300 W at 240 V ({:.4} -> {:.4})",
            etas[0],
            etas[etas.len() - 1]
        ),
    );

    let mut dominance_bad = 0usize;
    let mut worst_gap: f64 = 0.0;
    let mut considered = 0usize;
    for cell in &b.direct.winner.cells {
        if (cell.v2 - 200.0).abs() < 1e-9 {
            continue;
        }
        considered += 1;
        let sps = evaluate_operating_point(
            spec,
            Strategy::Eps1,
            1.0,
            cell.v2,
            cell.p,
            ZvsCriterion::Charge,
        )
        .unwrap();
        let gap = cell.p_loss - sps.loss.total;
        if gap > 1e-9 {
            dominance_bad += 1;
            worst_gap = worst_gap.max(gap);
        }
    }
    log.clause(
        "hybrid-dominance",
        dominance_bad == 0,
        format!(
            "{dominance_bad} of {considered} buck/boost cells above the full-width loss (worst +{worst_gap:.3e} W)"
        ),
    );
    log.finish();
}

/// Determinism: a second full pipeline pass from the same config and master
/// seed reproduces every artifact byte for byte.
#[test]
fn a8_deterministic_rebuild() {
    let b = charge_build();
    let mut log = ClauseLog::new("determinism");

    let root = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let dir_a = root.join("rebuild_a");
    let dir_b = root.join("rebuild_b");
    fs::create_dir_all(&dir_a).unwrap();
    fs::create_dir_all(&dir_b).unwrap();

    let write_all = |dir: &Path,
                     rows: &[DatasetRow],
                     models: &Surrogates,
                     maps: &MapSet| {
        write_dataset_csv(&dir.join("dataset.csv"), rows).unwrap();
        models.loss.save_json(&dir.join("model_loss.json")).unwrap();
        models.zvs.save_json(&dir.join("model_zvs.json")).unwrap();
        write_map_csv(&dir.join("map_eps1.csv"), &maps.eps1).unwrap();
        write_map_csv(&dir.join("map_eps2.csv"), &maps.eps2).unwrap();
        write_map_csv(&dir.join("map_winner.csv"), &maps.winner).unwrap();
    };
    write_all(&dir_a, &b.rows, &b.models, &b.surrogate);

    // Independent second pass; nothing reused from the shared build.
    let cfg = PipelineConfig::default();
    let plan = SweepPlan::from_config(&cfg);
    let rows = generate_dataset(&cfg, &plan).unwrap();
    let (models, _) = heps_pipeline::train_surrogates(&rows, &cfg).unwrap();
    let maps = optimize_maps(&CellObjective::surrogate(&cfg, &models), &cfg).unwrap();
    write_all(&dir_b, &rows, &models, &maps);

    for name in [
        "dataset.csv",
        "model_loss.json",
        "model_zvs.json",
        "map_eps1.csv",
        "map_eps2.csv",
        "map_winner.csv",
    ] {
        let xa = fs::read(dir_a.join(name)).unwrap();
        let xb = fs::read(dir_b.join(name)).unwrap();
        let same = xa == xb;
        let detail = if same {
            format!("{} bytes identical", xa.len())
        } else {
            match xa.iter().zip(&xb).position(|(p, q)| p != q) {
                Some(idx) => format!(
                    "first difference at byte {idx} (lengths {} vs {})",
                    xa.len(),
                    xb.len()
                ),
                None => format!("lengths differ: {} vs {}", xa.len(), xb.len()),
            }
        };
        log.clause(name, same, detail);
    }
    log.finish();
}
