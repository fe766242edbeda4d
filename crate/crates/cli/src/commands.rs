// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context};

use qgrade_core::circuit::{build_full_circuit, export_qasm, QasmVersion};
use qgrade_core::metrics::{self, QGradeReport, QGradeRow};
use qgrade_core::noisy::shot_counts_noisy;
use qgrade_core::{Backend, CalibrationRecord, Error as CoreError, RingConfig, ShotCounts};

use crate::config::Settings;
use crate::formats::{
    calibration_path, write_atomic, write_json, write_report, BranchPair, BranchTraces, CalibrationFile,
    CountsFile, ReportFile, RunRecord, RUN_SCHEMA, VERSION,
};
use crate::UsageError;

/// Seed of one ring size in a sweep, derived from the run seed.
pub fn derived_seed(seed: u64, size: usize) -> u64 {
    seed ^ (size as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn branch_name(vison: bool) -> &'static str {
    if vison {
        "vison"
    } else {
        "novison"
    }
}

fn gamma_tag(gamma: f64) -> String {
    format!("{gamma}")
}

fn stamp(enabled: bool) -> Option<String> {
    enabled.then(|| {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        format!("unix:{secs}")
    })
}

fn surface_capacity(e: CoreError, size: usize) -> anyhow::Error {
    match e {
        e @ CoreError::Capacity { .. } => anyhow::anyhow!("L = {size}: {e}"),
        e => anyhow::Error::from(e).context(format!("L = {size}")),
    }
}

/// Calibrate every requested size and write `calibration_L{L}.json`.
pub fn calibrate(settings: &Settings, out: &Path) -> anyhow::Result<Vec<CalibrationRecord>> {
    let mut records = Vec::new();
    for &size in settings.sizes()? {
        let cfg = settings.ring(size)?;
        let rec = metrics::calibrate(&cfg, settings.delta_threshold).map_err(|e| surface_capacity(e, size))?;
        write_json(&calibration_path(out, size), &CalibrationFile::new(rec.clone()))?;
        records.push(rec);
    }
    Ok(records)
}

/// Explicit file, then `calibration_L{L}.json` in `dir`, then a fresh
/// calibration (written to `dir`).
pub fn load_or_calibrate(
    cfg: &RingConfig,
    settings: &Settings,
    explicit: Option<&Path>,
    dir: &Path,
) -> anyhow::Result<CalibrationRecord> {
    let cached = calibration_path(dir, cfg.size);
    let rec = if let Some(path) = explicit {
        CalibrationFile::load(path)?
    } else if cached.exists() {
        CalibrationFile::load(&cached)?
    } else {
        let rec = metrics::calibrate(cfg, settings.delta_threshold).map_err(|e| surface_capacity(e, cfg.size))?;
        write_json(&cached, &CalibrationFile::new(rec.clone()))?;
        return Ok(rec);
    };
    rec.apply_to(cfg).context("calibration does not match the run configuration")?;
    Ok(rec)
}

#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    pub calibration: Option<PathBuf>,
    pub with_traces: bool,
    pub emit_counts: bool,
    pub stamp: bool,
}

pub fn run_file_name(size: usize, backend: Backend, gamma: f64) -> String {
    format!("run_L{size}_{backend}_gamma{}.json", gamma_tag(gamma))
}

pub fn counts_file_name(size: usize, vison: bool) -> String {
    format!("counts_L{size}_{}.json", branch_name(vison))
}

/// Run both branches of one ring size and write its run record.
pub fn simulate_one(settings: &Settings, size: usize, out: &Path, opts: &SimulateOptions) -> anyhow::Result<RunRecord> {
    let cfg = settings.ring(size)?;
    if settings.backend == Backend::Statevector && cfg.noise_rate != 0.0 {
        return Err(UsageError("the statevector backend is noiseless; pass --gamma 0 or another backend".into()).into());
    }
    let calib = load_or_calibrate(&cfg, settings, opts.calibration.as_deref(), out)?;
    let seed = derived_seed(settings.seed, size);
    let t_max = calib.t_max as f64;
    let (v, nv) = metrics::branch_traces(&cfg, t_max, calib.n_opt, settings.backend, settings.trajectories, seed)
        .map_err(|e| surface_capacity(e, size))?;
    let site = cfg.detection_site();
    let (n_v, n_nov) = (v.occupations[calib.n_opt][site], nv.occupations[calib.n_opt][site]);
    let row = QGradeRow::new(size, n_v, n_nov, calib.n_v0, calib.n_nov0, cfg.shots)?;

    if opts.emit_counts {
        for (vison, offset) in [(true, 1u64), (false, 2)] {
            let counts = shot_counts_noisy(&cfg, t_max, calib.n_opt, vison, cfg.shots, seed.wrapping_add(offset))?;
            let file = CountsFile::from_counts(&format!("qgrade-{}", settings.backend), vison, t_max, calib.n_opt, &counts);
            write_json(&out.join(counts_file_name(size, vison)), &file)?;
        }
    }

    let record = RunRecord {
        schema: RUN_SCHEMA.into(),
        config: cfg,
        backend: settings.backend,
        seed: settings.seed,
        trajectories: (settings.backend == Backend::Trajectory).then_some(settings.trajectories),
        calibration: calib,
        occupations: BranchPair {
            vison: n_v,
            no_vison: n_nov,
        },
        ratio: row.ratio,
        ratio_stderr: row.stderr,
        traces: opts.with_traces.then_some(BranchTraces { vison: v, no_vison: nv }),
        timestamp: stamp(opts.stamp),
        version: VERSION.into(),
    };
    write_json(&out.join(run_file_name(size, settings.backend, cfg.noise_rate)), &record)?;
    Ok(record)
}

fn sweep_label(settings: &Settings) -> String {
    format!("{} gamma={}", settings.backend, settings.noise_rate)
}

/// Simulate every size, then write the report.
pub fn sweep(settings: &Settings, out: &Path, opts: &SimulateOptions, exhaustive: bool) -> anyhow::Result<QGradeReport> {
    let mut rows = Vec::new();
    for &size in settings.sizes()? {
        rows.push(simulate_one(settings, size, out, opts)?.row());
    }
    let report = QGradeReport::new(sweep_label(settings), rows, settings.threshold, exhaustive)?;
    write_report(out, &report, Vec::new())?;
    Ok(report)
}

pub fn qasm_file_name(size: usize, n_steps: usize, vison: bool) -> String {
    format!("qgrade_L{size}_N{n_steps}_{}.qasm", branch_name(vison))
}

/// Write the vison and no-vison circuits with calibrated angles.
pub fn export(
    settings: &Settings,
    version: QasmVersion,
    calibration: Option<&Path>,
    out: &Path,
) -> anyhow::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for &size in settings.sizes()? {
        let cfg = settings.ring(size)?;
        let calib = load_or_calibrate(&cfg, settings, calibration, out)?;
        for vison in [true, false] {
            let circuit = build_full_circuit(&cfg, calib.t_max as f64, calib.n_opt, vison)?;
            let path = out.join(qasm_file_name(size, calib.n_opt, vison));
            write_atomic(&path, export_qasm(&circuit, version).as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Pooled counts of one ring size.
#[derive(Debug, Default)]
struct Pool {
    vison: Option<(ShotCounts, CountsFile)>,
    no_vison: Option<(ShotCounts, CountsFile)>,
}

fn merge(slot: &mut Option<(ShotCounts, CountsFile)>, counts: ShotCounts, file: CountsFile, path: &Path) -> anyhow::Result<()> {
    match slot {
        None => *slot = Some((counts, file)),
        Some((pooled, first)) => {
            if first.t_max != file.t_max || first.n_steps != file.n_steps {
                bail!("{}: circuit parameters differ from earlier files of the same branch", path.display());
            }
            let mut map = pooled.counts().clone();
            for (k, n) in counts.counts() {
                *map.entry(k.clone()).or_insert(0) += n;
            }
            *pooled = ShotCounts::from_counts(pooled.n_qubits(), map)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    pub calibrations: Vec<PathBuf>,
    pub exhaustive: bool,
    pub label: Option<String>,
    pub stamp: bool,
}

/// Turn counts files into report rows. Repeated files of the same branch
/// are pooled before `R` is formed.
pub fn ingest(
    settings: &Settings,
    files: &[PathBuf],
    out: &Path,
    opts: &IngestOptions,
    warn: &mut dyn FnMut(String),
) -> anyhow::Result<QGradeReport> {
    if files.is_empty() {
        return Err(UsageError("ingest needs at least one counts file".into()).into());
    }
    let mut pools: BTreeMap<usize, Pool> = BTreeMap::new();
    for path in files {
        let file = CountsFile::load(path)?;
        let counts = file.to_shot_counts()?;
        let pool = pools.entry(file.size).or_default();
        let slot = if file.with_vison { &mut pool.vison } else { &mut pool.no_vison };
        merge(slot, counts, file, path)?;
    }
    let mut explicit: BTreeMap<usize, CalibrationRecord> = BTreeMap::new();
    for path in &opts.calibrations {
        let rec = CalibrationFile::load(path)?;
        explicit.insert(rec.size, rec);
    }

    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (size, pool) in pools {
        let (Some((cv, fv)), Some((cn, fnv))) = (pool.vison, pool.no_vison) else {
            bail!("L = {size}: need counts for both the vison and the no-vison circuit");
        };
        if fv.t_max != fnv.t_max || fv.n_steps != fnv.n_steps {
            bail!("L = {size}: vison and no-vison counts come from different circuits");
        }
        let calib = match explicit.get(&size) {
            Some(r) => r.clone(),
            None => {
                let path = calibration_path(out, size);
                if !path.exists() {
                    bail!(
                        "L = {size}: no noiseless reference; run `qgrade calibrate --L {size} --out {}` or pass --calibration",
                        out.display()
                    );
                }
                CalibrationFile::load(&path)?
            }
        };
        if calib.t_max as f64 != fv.t_max || calib.n_opt != fv.n_steps {
            bail!(
                "L = {size}: counts were taken at t_max = {}, N = {} but the calibration has t_max = {}, N_opt = {}",
                fv.t_max,
                fv.n_steps,
                calib.t_max,
                calib.n_opt
            );
        }
        let (sv, sn) = (cv.total(), cn.total());
        if sv != sn {
            warn(format!("L = {size}: vison has {sv} shots, no-vison {sn}; using {} for dR", sv.min(sn)));
        }
        let site = size / 2;
        let n_v = cv.occupations()?[site];
        let n_nov = cn.occupations()?[site];
        let shots = sv.min(sn);
        let row = QGradeRow::new(size, n_v, n_nov, calib.n_v0, calib.n_nov0, shots)?;

        let mut cfg = settings.ring(size)?;
        cfg.shots = shots;
        cfg.coupling = calib.coupling;
        cfg.field = calib.field;
        let record = RunRecord {
            schema: RUN_SCHEMA.into(),
            config: cfg,
            backend: Backend::Ingested,
            seed: settings.seed,
            trajectories: None,
            calibration: calib,
            occupations: BranchPair {
                vison: n_v,
                no_vison: n_nov,
            },
            ratio: row.ratio,
            ratio_stderr: row.stderr,
            traces: None,
            timestamp: stamp(opts.stamp),
            version: VERSION.into(),
        };
        write_json(&out.join(format!("run_L{size}_ingested.json")), &record)?;
        notes.push(format!("L = {size}: {sv} + {sn} shots pooled from {} source(s)", fv.backend));
        rows.push(row);
    }
    notes.push("R is formed from pooled occupations, not as a mean of per-file R".into());
    let label = opts.label.clone().unwrap_or_else(|| "ingested".into());
    let report = QGradeReport::new(label, rows, settings.threshold, opts.exhaustive)?;
    write_report(out, &report, notes)?;
    Ok(report)
}

/// Combine run records and reports into one Q-grade report.
pub fn report(
    settings: &Settings,
    inputs: &[PathBuf],
    out: &Path,
    exhaustive: bool,
    label: Option<String>,
) -> anyhow::Result<QGradeReport> {
    if inputs.is_empty() {
        return Err(UsageError("report needs at least one input file".into()).into());
    }
    let mut rows: BTreeMap<usize, QGradeRow> = BTreeMap::new();
    let mut labels = Vec::new();
    for path in inputs {
        let value: serde_json::Value = crate::formats::read_json(path)?;
        let schema = value.get("schema").and_then(|s| s.as_str()).unwrap_or_default().to_string();
        let new_rows = match schema.as_str() {
            crate::formats::RUN_SCHEMA => {
                let r = RunRecord::load(path)?;
                labels.push(format!("{} gamma={}", r.backend, r.config.noise_rate));
                vec![r.row()]
            }
            crate::formats::REPORT_SCHEMA => {
                let r = ReportFile::load(path)?;
                labels.push(r.report.label.clone());
                r.report.rows
            }
            other => bail!("{}: unsupported schema `{other}`", path.display()),
        };
        for row in new_rows {
            let size = row.size;
            if rows.insert(size, row).is_some() {
                bail!("{}: L = {size} appears in more than one input", path.display());
            }
        }
    }
    labels.dedup();
    let label = label.unwrap_or_else(|| labels.join("; "));
    let report = QGradeReport::new(label, rows.into_values().collect(), settings.threshold, exhaustive)?;
    write_report(out, &report, Vec::new())?;
    Ok(report)
}
