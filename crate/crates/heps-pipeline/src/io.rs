//! CSV persistence for datasets, maps and waveform traces.
//!
//! Floats are written as `{:.11e}`, which round-trips through parsing back
//! to the identical string; together with deterministic generation this
//! makes repeated runs produce byte-identical files. Writes go through a
//! temporary sibling plus rename, so a crash never leaves a half-written
//! file under the final name.

use std::fs;
use std::path::Path;

use dab_converter::{ConverterSpec, PiecewiseWaveform, Strategy};

use crate::error::{PipelineError, Result};
use crate::maps::{CellChoice, ModulationMap, Provenance};
use crate::sweep::DatasetRow;

pub const DATASET_HEADER: [&str; 10] = [
    "P_W", "V2_V", "S", "Din", "Do", "Ploss_W", "nZVS", "Irms_A", "eta", "feasible",
];
pub const MAP_HEADER: [&str; 7] = [
    "P_W",
    "V2_V",
    "S",
    "Din_opt",
    "Ploss_opt_W",
    "nZVS_opt",
    "provenance",
];
pub const WAVEFORM_HEADER: [&str; 4] = ["t_s", "vp_V", "vs_V", "iL_A"];

/// Canonical float formatting for all emitted files.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Write through a temporary sibling and rename into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>, path: &Path) -> Result<()> {
    let bytes = writer
        .into_inner()
        .map_err(|e| PipelineError::Config(format!("csv buffer error: {e}")))?;
    write_atomic(path, &bytes)
}

fn check_header(record: &csv::StringRecord, expected: &[&str], path: &Path) -> Result<()> {
    let got: Vec<&str> = record.iter().collect();
    if got != expected {
        return Err(PipelineError::Parse {
            line: 1,
            reason: format!("{}: header {got:?}, expected {expected:?}", path.display()),
        });
    }
    Ok(())
}

fn parse_f64(rec: &csv::StringRecord, idx: usize, line: usize) -> Result<f64> {
    let field = rec.get(idx).ok_or(PipelineError::Parse {
        line,
        reason: format!("missing field {idx}"),
    })?;
    field.parse().map_err(|_| PipelineError::Parse {
        line,
        reason: format!("bad float {field:?} in field {idx}"),
    })
}

fn parse_strategy(rec: &csv::StringRecord, idx: usize, line: usize) -> Result<Strategy> {
    let code = parse_f64(rec, idx, line)?;
    Strategy::from_code(code as u8).map_err(|_| PipelineError::Parse {
        line,
        reason: format!("bad strategy code {code}"),
    })
}

/// Persist dataset rows in their generation order.
pub fn write_dataset_csv(path: &Path, rows: &[DatasetRow]) -> Result<()> {
    let mut w = csv_writer();
    w.write_record(DATASET_HEADER)?;
    for r in rows {
        w.write_record([
            fmt_float(r.p),
            fmt_float(r.v2),
            r.strategy.code().to_string(),
            fmt_float(r.d_inner),
            fmt_float(r.d_outer),
            fmt_float(r.p_loss),
            r.n_zvs.to_string(),
            fmt_float(r.i_rms),
            fmt_float(r.eta),
            r.feasible.to_string(),
        ])?;
    }
    finish(w, path)
}

pub fn read_dataset_csv(path: &Path) -> Result<Vec<DatasetRow>> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    check_header(reader.headers()?, &DATASET_HEADER, path)?;

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let rec = record?;
        let line = i + 2;
        let feasible_field = rec.get(9).unwrap_or("");
        let feasible = match feasible_field {
            "true" => true,
            "false" => false,
            other => {
                return Err(PipelineError::Parse {
                    line,
                    reason: format!("bad feasible flag {other:?}"),
                })
            }
        };
        rows.push(DatasetRow {
            p: parse_f64(&rec, 0, line)?,
            v2: parse_f64(&rec, 1, line)?,
            strategy: parse_strategy(&rec, 2, line)?,
            d_inner: parse_f64(&rec, 3, line)?,
            d_outer: parse_f64(&rec, 4, line)?,
            p_loss: parse_f64(&rec, 5, line)?,
            n_zvs: parse_f64(&rec, 6, line)? as u8,
            i_rms: parse_f64(&rec, 7, line)?,
            eta: parse_f64(&rec, 8, line)?,
            feasible,
        });
    }
    Ok(rows)
}

/// Persist a map row-major, voltage fastest. Infeasible cells carry an
/// infinite loss so they cannot be mistaken for real operating points.
pub fn write_map_csv(path: &Path, map: &ModulationMap) -> Result<()> {
    let mut w = csv_writer();
    w.write_record(MAP_HEADER)?;
    for cell in &map.cells {
        let loss = if cell.feasible { cell.p_loss } else { f64::INFINITY };
        w.write_record([
            fmt_float(cell.p),
            fmt_float(cell.v2),
            cell.strategy.code().to_string(),
            fmt_float(cell.d_inner),
            fmt_float(loss),
            fmt_float(cell.n_zvs),
            map.provenance.token().to_string(),
        ])?;
    }
    finish(w, path)
}

/// Read a map back. Fitness is reconstructed from the stored loss and
/// device count with the given penalty weight; the infeasible sentinel is
/// restored for cells stored with an infinite loss.
pub fn read_map_csv(path: &Path, zvs_penalty: f64, infeasible_fitness: f64) -> Result<ModulationMap> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    check_header(reader.headers()?, &MAP_HEADER, path)?;

    let mut cells: Vec<CellChoice> = Vec::new();
    let mut provenance: Option<Provenance> = None;
    for (i, record) in reader.records().enumerate() {
        let rec = record?;
        let line = i + 2;
        let token = rec.get(6).unwrap_or("");
        let prov = Provenance::from_token(token).ok_or_else(|| PipelineError::Parse {
            line,
            reason: format!("bad provenance {token:?}"),
        })?;
        match provenance {
            None => provenance = Some(prov),
            Some(existing) if existing != prov => {
                return Err(PipelineError::Parse {
                    line,
                    reason: "mixed provenance in one map".into(),
                })
            }
            Some(_) => {}
        }

        let p_loss = parse_f64(&rec, 4, line)?;
        let n_zvs = parse_f64(&rec, 5, line)?;
        let feasible = p_loss.is_finite();
        let fitness = if feasible {
            p_loss + zvs_penalty * (8.0 - n_zvs).max(0.0)
        } else {
            infeasible_fitness
        };
        cells.push(CellChoice {
            p: parse_f64(&rec, 0, line)?,
            v2: parse_f64(&rec, 1, line)?,
            strategy: parse_strategy(&rec, 2, line)?,
            d_inner: parse_f64(&rec, 3, line)?,
            fitness,
            p_loss: if feasible { p_loss } else { 0.0 },
            n_zvs,
            feasible,
        });
    }

    let provenance = provenance.ok_or(PipelineError::Parse {
        line: 1,
        reason: "map file has no rows".into(),
    })?;

    // Reconstruct the axes from the row-major layout: the voltage axis is
    // the leading run of rows sharing the first power value.
    let p0 = cells[0].p;
    let n_v2 = cells.iter().take_while(|c| c.p == p0).count();
    if n_v2 == 0 || cells.len() % n_v2 != 0 {
        return Err(PipelineError::Parse {
            line: 1,
            reason: format!("cell count {} is not a full grid", cells.len()),
        });
    }
    let v2: Vec<f64> = cells[..n_v2].iter().map(|c| c.v2).collect();
    let p: Vec<f64> = cells.iter().step_by(n_v2).map(|c| c.p).collect();
    for (idx, cell) in cells.iter().enumerate() {
        if cell.p != p[idx / n_v2] || cell.v2 != v2[idx % n_v2] {
            return Err(PipelineError::Parse {
                line: idx + 2,
                reason: "rows are not in row-major grid order".into(),
            });
        }
    }

    Ok(ModulationMap {
        p,
        v2,
        provenance,
        cells,
    })
}

/// One sampled instant of the three converter waveforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformSample {
    pub t: f64,
    pub vp: f64,
    pub vs: f64,
    pub il: f64,
}

/// Sample the solved waveform uniformly over one period.
pub fn sample_waveform(
    spec: &ConverterSpec,
    wf: &PiecewiseWaveform,
    v2: f64,
    n: usize,
) -> Vec<WaveformSample> {
    let dt = wf.ts / n as f64;
    (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            WaveformSample {
                t,
                vp: spec.v1 * f64::from(wf.schedule.primary_level(t)),
                vs: v2 * f64::from(wf.schedule.secondary_level(t)),
                il: wf.current_at(t),
            }
        })
        .collect()
}

pub fn write_waveform_csv(path: &Path, samples: &[WaveformSample]) -> Result<()> {
    let mut w = csv_writer();
    w.write_record(WAVEFORM_HEADER)?;
    for s in samples {
        w.write_record([
            fmt_float(s.t),
            fmt_float(s.vp),
            fmt_float(s.vs),
            fmt_float(s.il),
        ])?;
    }
    finish(w, path)
}
