// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! On-disk artifacts: run records, counts files, calibration records,
//! reports, CSV tables. All writes are atomic.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qgrade_core::metrics::{QGradeReport, QGradeRow};
use qgrade_core::{Backend, CalibrationRecord, OccupationTrace, RingConfig, ShotCounts};

pub const RUN_SCHEMA: &str = "qgrade-run/1";
pub const COUNTS_SCHEMA: &str = "qgrade-counts/1";
pub const CALIBRATION_SCHEMA: &str = "qgrade-calibration/1";
pub const REPORT_SCHEMA: &str = "qgrade-report/1";
pub const CSV_HEADER: &str = "L,R,dR";
pub const PLOT_HEADER: &str = "L,R,dR,n_v,n_nov,n_v0,n_nov0,shots";

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Write `bytes` to a sibling temp file, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path
        .file_name()
        .with_context(|| format!("{} has no file name", path.display()))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn check_schema(found: &str, expected: &str, path: &Path) -> anyhow::Result<()> {
    if found != expected {
        bail!("{}: schema `{found}`, expected `{expected}`", path.display());
    }
    Ok(())
}

/// Occupations of bond `L/2` at `t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPair {
    pub vison: f64,
    pub no_vison: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchTraces {
    pub vison: OccupationTrace,
    pub no_vison: OccupationTrace,
}

/// One simulated or ingested benchmark instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub config: RingConfig,
    pub backend: Backend,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<usize>,
    pub calibration: CalibrationRecord,
    pub occupations: BranchPair,
    pub ratio: f64,
    pub ratio_stderr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traces: Option<BranchTraces>,
    /// Wall-clock stamp, only with `--stamp`; stamped records are not
    /// byte-reproducible.
    pub timestamp: Option<String>,
    pub version: String,
}

impl RunRecord {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let r: RunRecord = read_json(path)?;
        check_schema(&r.schema, RUN_SCHEMA, path)?;
        Ok(r)
    }

    pub fn row(&self) -> QGradeRow {
        QGradeRow {
            size: self.config.size,
            ratio: self.ratio,
            stderr: self.ratio_stderr,
            n_v: self.occupations.vison,
            n_nov: self.occupations.no_vison,
            n_v0: self.calibration.n_v0,
            n_nov0: self.calibration.n_nov0,
            shots: self.config.shots,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BitOrder {
    /// Character `i` of a key is qubit `i`.
    Q0First,
    /// Character `i` of a key is qubit `L−1−i` (Qiskit-style).
    Q0Last,
}

/// Measurement counts of one circuit, as produced by hardware or by
/// `simulate --emit-counts`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsFile {
    pub schema: String,
    pub backend: String,
    #[serde(rename = "L")]
    pub size: usize,
    pub with_vison: bool,
    pub t_max: f64,
    pub n_steps: usize,
    pub shots: u64,
    pub bit_order: BitOrder,
    pub counts: BTreeMap<String, u64>,
}

impl CountsFile {
    pub fn from_counts(
        backend: &str,
        with_vison: bool,
        t_max: f64,
        n_steps: usize,
        counts: &ShotCounts,
    ) -> Self {
        CountsFile {
            schema: COUNTS_SCHEMA.into(),
            backend: backend.into(),
            size: counts.n_qubits(),
            with_vison,
            t_max,
            n_steps,
            shots: counts.total(),
            bit_order: BitOrder::Q0First,
            counts: counts.counts().clone(),
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let c: CountsFile = read_json(path)?;
        check_schema(&c.schema, COUNTS_SCHEMA, path)?;
        c.to_shot_counts().with_context(|| format!("in {}", path.display()))?;
        Ok(c)
    }

    /// Validate and convert to q0-first counts.
    pub fn to_shot_counts(&self) -> anyhow::Result<ShotCounts> {
        let mut map = BTreeMap::new();
        for (key, &n) in &self.counts {
            if key.len() != self.size || !key.bytes().all(|b| b == b'0' || b == b'1') {
                bail!("counts key `{key}` is not a length-{} bitstring", self.size);
            }
            let key = match self.bit_order {
                BitOrder::Q0First => key.clone(),
                BitOrder::Q0Last => key.chars().rev().collect(),
            };
            *map.entry(key).or_insert(0) += n;
        }
        let counts = ShotCounts::from_counts(self.size, map)?;
        if counts.total() != self.shots {
            bail!("counts sum to {} but shots = {}", counts.total(), self.shots);
        }
        Ok(counts)
    }
}

/// Calibration file: the record plus a schema tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFile {
    pub schema: String,
    #[serde(flatten)]
    pub record: CalibrationRecord,
}

impl CalibrationFile {
    pub fn new(record: CalibrationRecord) -> Self {
        CalibrationFile {
            schema: CALIBRATION_SCHEMA.into(),
            record,
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<CalibrationRecord> {
        let c: CalibrationFile = read_json(path)?;
        check_schema(&c.schema, CALIBRATION_SCHEMA, path)?;
        c.record.validate().with_context(|| format!("in {}", path.display()))?;
        Ok(c.record)
    }
}

pub fn calibration_path(dir: &Path, size: usize) -> PathBuf {
    dir.join(format!("calibration_L{size}.json"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: String,
    #[serde(flatten)]
    pub report: QGradeReport,
    /// How rows were formed, e.g. pooling of repeated counts files.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ReportFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let r: ReportFile = read_json(path)?;
        check_schema(&r.schema, REPORT_SCHEMA, path)?;
        Ok(r)
    }
}

pub fn report_csv(report: &QGradeReport) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in &report.rows {
        out.push_str(&format!("{},{},{}\n", r.size, r.ratio, r.stderr));
    }
    out
}

pub fn plot_csv(report: &QGradeReport) -> String {
    let mut out = format!("{PLOT_HEADER}\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.size, r.ratio, r.stderr, r.n_v, r.n_nov, r.n_v0, r.n_nov0, r.shots
        ));
    }
    out
}

/// Write `report.json`, `report.csv` and `plot_data.csv` under `dir`.
pub fn write_report(dir: &Path, report: &QGradeReport, notes: Vec<String>) -> anyhow::Result<()> {
    let file = ReportFile {
        schema: REPORT_SCHEMA.into(),
        report: report.clone(),
        notes,
    };
    write_json(&dir.join("report.json"), &file)?;
    write_atomic(&dir.join("report.csv"), report_csv(report).as_bytes())?;
    write_atomic(&dir.join("plot_data.csv"), plot_csv(report).as_bytes())
}
