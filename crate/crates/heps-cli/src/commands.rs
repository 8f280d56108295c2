//! Implementations of the subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dab_converter::{
    design_leakage_inductance, evaluate_operating_point, solve_outer_shift, solve_steady_state,
    ModulationPoint, Strategy,
};
use gbrt::BoostedEnsemble;
use heps_pipeline::io::{
    fmt_float, read_dataset_csv, read_map_csv, sample_waveform, write_atomic, write_dataset_csv,
    write_map_csv, write_waveform_csv,
};
use heps_pipeline::{
    generate_dataset, linspace, optimize_maps, run_all_checks, select_modulation,
    train_surrogates, CellObjective, MapSet, ModulationMap, PipelineConfig, Surrogates, SweepPlan,
};

use crate::Command;

#[derive(Debug)]
pub enum CliError {
    /// A consistency check failed; exit code 2.
    ChecksFailed,
    /// Everything else; exit code 3.
    Runtime(String),
}

macro_rules! runtime_from {
    ($($ty:ty),* $(,)?) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Runtime(e.to_string())
            }
        }
    )*};
}

runtime_from!(
    heps_pipeline::PipelineError,
    dab_converter::ConverterError,
    gbrt::GbrtError,
    std::io::Error,
    toml::de::Error,
);

type Result<T> = std::result::Result<T, CliError>;

pub fn run(
    command: Command,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: PathBuf,
) -> Result<()> {
    let cfg = load_config(config.as_deref(), seed)?;
    match command {
        Command::DesignLr {
            v1,
            n,
            v2_min,
            fs,
            p_max,
        } => design_lr(v1, n, v2_min, fs, p_max),
        Command::Waveform {
            strategy,
            din,
            v2,
            power,
            samples,
        } => waveform(&cfg, &out, strategy, din, v2, power, samples),
        Command::GenData => gen_data(&cfg, &out),
        Command::Train { dataset } => train(&cfg, &out, dataset),
        Command::DirectMap => {
            build_direct_maps(&cfg, &out)?;
            Ok(())
        }
        Command::Optimize { models } => optimize(&cfg, &out, models),
        Command::Select { map, power, v2 } => select(&cfg, &out, map, power, v2),
        Command::Validate => validate(&cfg),
        Command::Report => report(&cfg, &out),
    }
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<PipelineConfig> {
    let mut cfg: PipelineConfig = match path {
        Some(p) => toml::from_str(&fs::read_to_string(p)?)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn design_lr(v1: f64, n: f64, v2_min: f64, fs: f64, p_max: f64) -> Result<()> {
    let bound = design_leakage_inductance(n, v1, v2_min, fs, p_max)?;
    println!("inductance bound: {} H", fmt_float(bound));
    println!("pick a build value below the bound to keep the rated point reachable with margin");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn waveform(
    cfg: &PipelineConfig,
    out: &Path,
    strategy: u8,
    din: f64,
    v2: f64,
    power: f64,
    samples: usize,
) -> Result<()> {
    let strategy = Strategy::from_code(strategy)?;
    if samples == 0 {
        return Err(CliError::Runtime("samples must be nonzero".into()));
    }
    let base = ModulationPoint {
        strategy,
        d_inner: din,
        d_outer: 0.0,
    };
    let d_outer = solve_outer_shift(&cfg.spec, &base, v2, power)?;
    let point = ModulationPoint {
        strategy,
        d_inner: din,
        d_outer,
    };
    let wf = solve_steady_state(&cfg.spec, &point, v2)?;
    let r = evaluate_operating_point(&cfg.spec, strategy, din, v2, power, cfg.zvs_criterion)?;

    let path = out.join("waveform.csv");
    write_waveform_csv(&path, &sample_waveform(&cfg.spec, &wf, v2, samples))?;
    println!("solved outer shift: {}", fmt_float(d_outer));
    println!(
        "rms {} A, peak {} A, soft devices {}, loss {} W, efficiency {}",
        fmt_float(r.i_rms),
        fmt_float(r.i_peak),
        r.n_zvs,
        fmt_float(r.loss.total),
        fmt_float(r.efficiency),
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn gen_data(cfg: &PipelineConfig, out: &Path) -> Result<()> {
    let plan = SweepPlan::from_config(cfg);
    let rows = generate_dataset(cfg, &plan)?;
    let n_feasible = rows.iter().filter(|r| r.feasible).count();
    let path = out.join("dataset.csv");
    write_dataset_csv(&path, &rows)?;
    println!(
        "wrote {} ({} rows, {} feasible)",
        path.display(),
        rows.len(),
        n_feasible
    );
    Ok(())
}

fn train(cfg: &PipelineConfig, out: &Path, dataset: Option<PathBuf>) -> Result<()> {
    let dataset = dataset.unwrap_or_else(|| out.join("dataset.csv"));
    let rows = read_dataset_csv(&dataset)?;
    let (models, report) = train_surrogates(&rows, cfg)?;

    println!(
        "trained on {} feasible rows ({} train / {} val / {} test)",
        report.n_feasible, report.n_train, report.n_val, report.n_test
    );
    println!(
        "loss model: {} trees, test r2 {:.6}, test rmse {:.4} W",
        report.loss_trees, report.loss_r2, report.loss_rmse
    );
    println!(
        "zvs model: {} trees, test accuracy {:.4}",
        report.zvs_trees, report.zvs_accuracy
    );

    let loss_path = out.join("loss_model.json");
    let zvs_path = out.join("zvs_model.json");
    fs::create_dir_all(out)?;
    models.loss.save_json(&loss_path)?;
    models.zvs.save_json(&zvs_path)?;
    println!("wrote {}", loss_path.display());
    println!("wrote {}", zvs_path.display());
    Ok(())
}

fn write_map_set(out: &Path, maps: &MapSet, backend: &str) -> Result<()> {
    for (map, name) in [
        (&maps.eps1, format!("map_eps1_{backend}.csv")),
        (&maps.eps2, format!("map_eps2_{backend}.csv")),
        (&maps.winner, format!("map_{backend}.csv")),
    ] {
        let path = out.join(name);
        write_map_csv(&path, map)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn build_direct_maps(cfg: &PipelineConfig, out: &Path) -> Result<MapSet> {
    let objective = CellObjective::direct(cfg);
    let maps = optimize_maps(&objective, cfg)?;
    write_map_set(out, &maps, "direct")?;
    Ok(maps)
}

fn optimize(cfg: &PipelineConfig, out: &Path, models: Option<PathBuf>) -> Result<()> {
    let dir = models.unwrap_or_else(|| out.to_path_buf());
    let models = Surrogates {
        loss: BoostedEnsemble::load_json(&dir.join("loss_model.json"))?,
        zvs: BoostedEnsemble::load_json(&dir.join("zvs_model.json"))?,
    };
    let objective = CellObjective::surrogate(cfg, &models);
    let maps = optimize_maps(&objective, cfg)?;
    write_map_set(out, &maps, "surrogate")
}

fn select(
    cfg: &PipelineConfig,
    out: &Path,
    map: Option<PathBuf>,
    power: f64,
    v2: f64,
) -> Result<()> {
    let path = map.unwrap_or_else(|| out.join("map_direct.csv"));
    let map = read_map_csv(&path, cfg.zvs_penalty, cfg.infeasible_fitness)?;
    let s = select_modulation(
        &map,
        cfg.spec.v1,
        cfg.spec.n,
        cfg.unit_gain_band,
        power,
        v2,
    )?;
    println!("strategy: {}", s.strategy);
    println!("d_inner: {}", fmt_float(s.d_inner));
    println!("gain: {}", fmt_float(s.gain));
    println!("unit_gain: {}", s.unit_gain);
    Ok(())
}

fn validate(cfg: &PipelineConfig) -> Result<()> {
    let checks = run_all_checks(&cfg.spec, cfg.seed)?;
    let mut all_pass = true;
    for check in &checks {
        println!("{}", check.verdict_line());
        all_pass &= check.pass;
    }
    if all_pass {
        println!("all checks passed");
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}

/// Plain comma-joined table writer for the report files; fields are always
/// simple numbers, so no quoting is needed.
fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    let _ = writeln!(text, "{}", header.join(","));
    for row in rows {
        let _ = writeln!(text, "{}", row.join(","));
    }
    write_atomic(path, text.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Index of the grid value closest to x.
fn nearest(grid: &[f64], x: f64) -> usize {
    let mut best = 0usize;
    for (i, g) in grid.iter().enumerate() {
        if (g - x).abs() < (grid[best] - x).abs() {
            best = i;
        }
    }
    best
}

fn load_or_build_maps(cfg: &PipelineConfig, out: &Path) -> Result<MapSet> {
    let paths = [
        out.join("map_eps1_direct.csv"),
        out.join("map_eps2_direct.csv"),
        out.join("map_direct.csv"),
    ];
    if paths.iter().all(|p| p.exists()) {
        let read =
            |p: &Path| -> Result<ModulationMap> { Ok(read_map_csv(p, cfg.zvs_penalty, cfg.infeasible_fitness)?) };
        return Ok(MapSet {
            eps1: read(&paths[0])?,
            eps2: read(&paths[1])?,
            winner: read(&paths[2])?,
        });
    }
    build_direct_maps(cfg, out)
}

fn report(cfg: &PipelineConfig, out: &Path) -> Result<()> {
    let maps = load_or_build_maps(cfg, out)?;
    let dir = out.join("report");

    // Optimized inner shift per strategy over the whole grid.
    for (map, name) in [
        (&maps.eps1, "din_opt_eps1.csv"),
        (&maps.eps2, "din_opt_eps2.csv"),
    ] {
        let rows: Vec<Vec<String>> = map
            .cells
            .iter()
            .map(|c| vec![fmt_float(c.p), fmt_float(c.v2), fmt_float(c.d_inner)])
            .collect();
        write_table(&dir.join(name), &["P_W", "V2_V", "Din_opt"], &rows)?;
    }

    // Widest contiguous fully soft inner shift window per voltage at three
    // power levels. Rows without any fully soft shift are omitted.
    let din_scan = linspace(cfg.din_min, 1.0, 400);
    for (strategy, name) in [
        (Strategy::Eps1, "zvs_range_eps1.csv"),
        (Strategy::Eps2, "zvs_range_eps2.csv"),
    ] {
        let mut rows = Vec::new();
        for &v2 in &maps.winner.v2 {
            for p_nominal in [200.0, 600.0, 1000.0] {
                let p = maps.winner.p[nearest(&maps.winner.p, p_nominal)];
                let mut best_run: Option<(f64, f64)> = None;
                let mut run_start: Option<f64> = None;
                let mut prev = 0.0;
                for &d in &din_scan {
                    let r =
                        evaluate_operating_point(&cfg.spec, strategy, d, v2, p, cfg.zvs_criterion)?;
                    let soft = r.feasible && r.n_zvs == 8;
                    if soft && run_start.is_none() {
                        run_start = Some(d);
                    }
                    if !soft {
                        if let Some(start) = run_start.take() {
                            if best_run.is_none_or(|(lo, hi)| prev - start > hi - lo) {
                                best_run = Some((start, prev));
                            }
                        }
                    }
                    prev = d;
                }
                if let Some(start) = run_start {
                    if best_run.is_none_or(|(lo, hi)| prev - start > hi - lo) {
                        best_run = Some((start, prev));
                    }
                }
                if let Some((lo, hi)) = best_run {
                    rows.push(vec![
                        fmt_float(v2),
                        fmt_float(p),
                        fmt_float(lo),
                        fmt_float(hi),
                    ]);
                }
            }
        }
        write_table(&dir.join(name), &["V2_V", "P_W", "Din_lo", "Din_hi"], &rows)?;
    }

    // Efficiency slices: optimized map versus the full-width baseline.
    let eta_sps = |p: f64, v2: f64| -> Result<f64> {
        let r = evaluate_operating_point(&cfg.spec, Strategy::Eps1, 1.0, v2, p, cfg.zvs_criterion)?;
        Ok(r.efficiency)
    };
    for v2_nominal in [160.0, 200.0, 240.0] {
        let iv = nearest(&maps.winner.v2, v2_nominal);
        let v2 = maps.winner.v2[iv];
        let mut rows = Vec::new();
        for (ip, &p) in maps.winner.p.iter().enumerate() {
            let cell = maps.winner.cell(ip, iv);
            if !cell.feasible {
                continue;
            }
            let eta_opt = p / (p + cell.p_loss);
            rows.push(vec![
                fmt_float(p),
                fmt_float(eta_sps(p, v2)?),
                fmt_float(eta_opt),
            ]);
        }
        write_table(
            &dir.join(format!("eta_vs_p_{v2_nominal:.0}V.csv")),
            &["P_W", "eta_sps", "eta_opt"],
            &rows,
        )?;
    }
    for p_nominal in [200.0, 600.0, 1000.0] {
        let ip = nearest(&maps.winner.p, p_nominal);
        let p = maps.winner.p[ip];
        let mut rows = Vec::new();
        for (iv, &v2) in maps.winner.v2.iter().enumerate() {
            let cell = maps.winner.cell(ip, iv);
            if !cell.feasible {
                continue;
            }
            let eta_opt = p / (p + cell.p_loss);
            rows.push(vec![
                fmt_float(v2),
                fmt_float(eta_sps(p, v2)?),
                fmt_float(eta_opt),
            ]);
        }
        write_table(
            &dir.join(format!("eta_vs_v2_{p_nominal:.0}W.csv")),
            &["V2_V", "eta_sps", "eta_opt"],
            &rows,
        )?;
    }
    Ok(())
}
