//! Scenario execution: evaluates the configured grids, writes one CSV per
//! quantity and a manifest listing every output with its checksum.

pub mod config;
pub mod manifest;
pub mod presets;

use std::fs;
use std::path::Path;
use std::time::Instant;

use crate::diffusive::{diffusive_n1, diffusive_n12, nv_n12};
use crate::error::{Error, Result};
use crate::filters::eval_filter;
use crate::harmonic::{harmonic_n12, harmonic_x12, parametric_occupation};
use crate::map::{compute_map, CellValue, Quantity, SpaceTimeMap};
use crate::markov::{markov_signal, MarkovSpec};
use crate::model::{DispersionSpec, OccupationSpec, ProtocolKind};
use crate::verify::{run_verify, VerifyReport};

pub use config::{Overrides, Scenario, ScenarioConfig, SCHEMA_VERSION};
pub use manifest::{check_outputs, sha256_hex, ConvergenceWarning, OutputRecord, RunManifest, MANIFEST_FILE};
pub use presets::{default_preset, preset, PRESETS};

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub verify_report: Option<VerifyReport>,
}

impl RunOutcome {
    /// False only for a verification run with failed checks.
    pub fn verification_passed(&self) -> bool {
        self.verify_report.as_ref().is_none_or(VerifyReport::all_passed)
    }
}

/// One computed table and the axis names of its CSV header.
struct Table {
    file: String,
    axes: (&'static str, &'static str),
    map: SpaceTimeMap,
}

impl Table {
    fn rt(file: &str, map: SpaceTimeMap) -> Self {
        Self {
            file: file.to_string(),
            axes: ("r", "t"),
            map,
        }
    }
}

fn cell(r: Result<f64>) -> Result<CellValue> {
    CellValue::from_result(r)
}

/// Divides every column of `num` by the matching entry of `den`.
fn normalized(num: &SpaceTimeMap, den: &SpaceTimeMap, quantity: Quantity) -> Result<SpaceTimeMap> {
    let mut out = num.clone();
    out.quantity = quantity;
    for (j, &d) in den.values[0].iter().enumerate() {
        if d == 0.0 {
            return Err(Error::Domain(format!(
                "normalization vanishes at t = {}; use t > 0",
                num.t_values[j]
            )));
        }
        for row in out.values.iter_mut() {
            row[j] /= d;
        }
    }
    let mut unconverged = num.unconverged.clone();
    for &(_, j) in &den.unconverged {
        unconverged.extend((0..num.r_values.len()).map(|i| (i, j)));
    }
    unconverged.sort_unstable();
    unconverged.dedup();
    out.unconverged = unconverged;
    Ok(out)
}

fn filters_tables(cfg: &ScenarioConfig, t: &[f64], meta: &serde_json::Value) -> Result<Vec<Table>> {
    let omega = cfg.filters.omega.values()?;
    let mut out = Vec::new();
    for &kind in &cfg.filters.protocols {
        let map = compute_map(&omega, t, Quantity::Filter, meta.clone(), cfg.workers, |w, t| {
            let v = eval_filter(kind, w, t);
            Ok(CellValue::exact(if kind == ProtocolKind::LocalSpinEcho {
                v.im
            } else {
                v.re
            }))
        })?;
        let name = match kind {
            ProtocolKind::Ramsey => "filter_ramsey.csv",
            ProtocolKind::LocalSpinEcho => "filter_local_spin_echo.csv",
            ProtocolKind::GlobalSpinEcho => "filter_global_spin_echo.csv",
        };
        out.push(Table {
            file: name.into(),
            axes: ("omega", "t"),
            map,
        });
    }
    Ok(out)
}

fn markov_tables(cfg: &ScenarioConfig, r: &[f64], t: &[f64], meta: &serde_json::Value) -> Result<Vec<Table>> {
    let m = cfg.markov;
    let signal = |r: f64, t: f64| {
        markov_signal(
            &MarkovSpec {
                gamma0: m.gamma0,
                gamma_r: m.gamma(r),
            },
            t,
        )
    };
    let n1 = compute_map(r, t, Quantity::N1, meta.clone(), cfg.workers, |r, t| {
        Ok(CellValue::exact(signal(r, t)?.n1))
    })?;
    let n12 = compute_map(r, t, Quantity::N12, meta.clone(), cfg.workers, |r, t| {
        Ok(CellValue::exact(signal(r, t)?.n12))
    })?;
    let coherence = compute_map(r, t, Quantity::Coherence, meta.clone(), cfg.workers, |r, t| {
        Ok(CellValue::exact(signal(r, t)?.coherence))
    })?;
    Ok(vec![
        Table::rt("n1.csv", n1),
        Table::rt("n12.csv", n12),
        Table::rt("coherence.csv", coherence),
    ])
}

fn harmonic_n12_maps(
    cfg: &ScenarioConfig,
    r: &[f64],
    t: &[f64],
    meta: &serde_json::Value,
) -> Result<(SpaceTimeMap, SpaceTimeMap)> {
    let h = &cfg.harmonic;
    let acc = cfg.tolerance;
    let n12 = compute_map(r, t, Quantity::N12, meta.clone(), cfg.workers, |r, t| {
        cell(harmonic_n12(
            &h.dispersion,
            &h.occupation,
            &h.geometry.with_r(r),
            t,
            &h.momentum,
            &acc,
        ))
    })?;
    let n0 = compute_map(&[0.0], t, Quantity::N12, meta.clone(), cfg.workers, |_, t| {
        cell(harmonic_n12(
            &h.dispersion,
            &h.occupation,
            &h.geometry.with_r(0.0),
            t,
            &h.momentum,
            &acc,
        ))
    })?;
    Ok((n12, n0))
}

fn harmonic_tables(cfg: &ScenarioConfig, r: &[f64], t: &[f64], meta: &serde_json::Value) -> Result<Vec<Table>> {
    let h = &cfg.harmonic;
    let acc = cfg.tolerance;
    let (n12, n0) = harmonic_n12_maps(cfg, r, t, meta)?;
    let x12 = compute_map(r, t, Quantity::X12, meta.clone(), cfg.workers, |r, t| {
        cell(harmonic_x12(
            &h.dispersion,
            &h.geometry.with_r(r),
            t,
            &h.momentum,
            h.protocol,
            &acc,
        ))
    })?;
    let f = normalized(&n12, &n0, Quantity::F)?;
    Ok(vec![
        Table::rt("n12.csv", n12),
        Table::rt("x12.csv", x12),
        Table::rt("f.csv", f),
    ])
}

fn gapless_tables(cfg: &ScenarioConfig, r: &[f64], t: &[f64], meta: &serde_json::Value) -> Result<Vec<Table>> {
    let h = &cfg.harmonic;
    let (DispersionSpec::Gapless { alpha, z }, OccupationSpec::Thermal { temperature }) =
        (&h.dispersion, &h.occupation)
    else {
        return Err(Error::Config(
            "gapless-map needs a gapless dispersion and a thermal occupation".into(),
        ));
    };
    let n12 = compute_map(r, t, Quantity::N12, meta.clone(), cfg.workers, |r, t| {
        cell(harmonic_n12(
            &h.dispersion,
            &h.occupation,
            &h.geometry.with_r(r),
            t,
            &h.momentum,
            &cfg.tolerance,
        ))
    })?;
    let d = h.geometry.dim as f64;
    let mut scaled = n12.clone();
    scaled.quantity = Quantity::ScaledN12;
    for row in scaled.values.iter_mut() {
        for (v, &tj) in row.iter_mut().zip(t) {
            *v /= h.geometry.coupling_product() * temperature * tj.powf(3.0 - d / z) * alpha.powf(-d / z);
        }
    }
    Ok(vec![Table::rt("n12.csv", n12), Table::rt("scaled_n12.csv", scaled)])
}

fn diffusive_tables(cfg: &ScenarioConfig, r: &[f64], t: &[f64], meta: &serde_json::Value) -> Result<Vec<Table>> {
    let p = &cfg.diffusive;
    let acc = cfg.tolerance;
    let n12 = compute_map(r, t, Quantity::N12, meta.clone(), cfg.workers, |r, t| {
        cell(diffusive_n12(r, t, p, |_| 1.0, &acc))
    })?;
    let n1 = compute_map(&[0.0], t, Quantity::N1, meta.clone(), cfg.workers, |_, t| {
        cell(diffusive_n1(t, p, |_| 1.0, &acc))
    })?;
    let f = normalized(&n12, &n1, Quantity::F)?;
    Ok(vec![Table::rt("n12.csv", n12), Table::rt("f.csv", f)])
}

fn nv_tables(cfg: &ScenarioConfig, r: &[f64], t: &[f64], meta: &serde_json::Value) -> Result<Vec<Table>> {
    let nv = &cfg.nv;
    let acc = cfg.tolerance;
    let n12 = compute_map(r, t, Quantity::N12, meta.clone(), cfg.workers, |r, t| {
        cell(nv_n12(r, t, nv, &acc))
    })?;
    let n1 = compute_map(&[0.0], t, Quantity::N1, meta.clone(), cfg.workers, |_, t| {
        cell(nv_n12(0.0, t, nv, &acc))
    })?;
    let f = normalized(&n12, &n1, Quantity::F)?;
    Ok(vec![Table::rt("n12.csv", n12), Table::rt("f.csv", f)])
}

fn parametric_tables(cfg: &ScenarioConfig, t: &[f64], meta: &serde_json::Value) -> Result<Vec<Table>> {
    let p = &cfg.parametric;
    let k = p.k.values()?;
    let state = |k: f64, t: f64| {
        let occ = OccupationSpec::ParametricEvolved {
            temperature: p.temperature,
            delta: p.delta,
            drive_frequency: p.drive_frequency,
            t_drive: t,
        };
        parametric_occupation(&occ, &p.dispersion, k)
    };
    let n = compute_map(&k, t, Quantity::Occupation, meta.clone(), cfg.workers, |k, t| {
        Ok(CellValue::exact(state(k, t)?.n))
    })?;
    let m = compute_map(&k, t, Quantity::Anomalous, meta.clone(), cfg.workers, |k, t| {
        Ok(CellValue::exact(state(k, t)?.m))
    })?;
    Ok(vec![
        Table {
            file: "occupation.csv".into(),
            axes: ("k", "t"),
            map: n,
        },
        Table {
            file: "anomalous.csv".into(),
            axes: ("k", "t"),
            map: m,
        },
    ])
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<OutputRecord> {
    fs::write(dir.join(name), contents)?;
    Ok(OutputRecord {
        file: name.to_string(),
        bytes: contents.len() as u64,
        sha256: sha256_hex(contents),
        rows: None,
        quantity: None,
    })
}

/// Runs a validated configuration and writes its outputs and manifest into
/// `cfg.out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let dir = cfg.out_dir.as_path();
    fs::create_dir_all(dir)?;
    let meta = serde_json::json!({
        "scenario": cfg.scenario.name(),
        "preset": cfg.preset,
        "tolerance": cfg.tolerance,
    });
    let mut outputs = Vec::new();
    let mut warnings = Vec::new();
    let mut verify_report = None;
    if cfg.scenario == Scenario::Verify {
        let report = run_verify(&cfg.verify.groups, cfg.verify.tolerance_override, cfg.workers)?;
        let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
        outputs.push(write_file(dir, "verify_report.json", text.as_bytes())?);
        verify_report = Some(report);
    } else {
        let t = cfg.grid.t.values()?;
        let tables = match cfg.scenario {
            Scenario::Filters => filters_tables(cfg, &t, &meta)?,
            Scenario::Parametric => parametric_tables(cfg, &t, &meta)?,
            _ => {
                let r = cfg.grid.r.values()?;
                match cfg.scenario {
                    Scenario::Markov => markov_tables(cfg, &r, &t, &meta)?,
                    Scenario::HarmonicMap => harmonic_tables(cfg, &r, &t, &meta)?,
                    Scenario::GaplessMap => gapless_tables(cfg, &r, &t, &meta)?,
                    Scenario::DiffusiveMap => diffusive_tables(cfg, &r, &t, &meta)?,
                    Scenario::NvMap => nv_tables(cfg, &r, &t, &meta)?,
                    Scenario::Filters | Scenario::Parametric | Scenario::Verify => unreachable!(),
                }
            }
        };
        for table in tables {
            let csv = table.map.to_csv_with_axes(table.axes.0, table.axes.1);
            let mut record = write_file(dir, &table.file, csv.as_bytes())?;
            record.rows = Some(table.map.r_values.len() * table.map.t_values.len());
            record.quantity = Some(table.map.quantity);
            outputs.push(record);
            warnings.extend(table.map.unconverged.iter().map(|&(i, j)| ConvergenceWarning {
                file: table.file.clone(),
                r: table.map.r_values[i],
                t: table.map.t_values[j],
            }));
        }
    }
    let manifest = RunManifest::new(cfg, outputs, warnings, verify_report.as_ref(), start.elapsed());
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(RunOutcome {
        manifest,
        verify_report,
    })
}
