// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Protocol quantities: `t_max`, the Trotter error `δ`, `N_opt`, the
//! coherence ratio `R`, its shot-noise error `ΔR`, and the Q-grade.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::circuit::{build_trotter_step, LayeredStep};
use crate::error::{Error, Result};
use crate::math::{abs, round, sqrt};
use crate::noisy::{lindblad_trotter_trace, trajectory_trace};
use crate::oracles::predict_tmax;
use crate::ring::{spinon_expectations, RingConfig};
use crate::statevector::{exact_trace, run_circuit, trotter_trace};
use crate::trace::{Backend, OccupationTrace};

/// Default Trotter-error threshold for `N_opt`.
pub const DEFAULT_DELTA_THRESHOLD: f64 = 0.15;

/// Consecutive step counts that must all meet the `δ` threshold.
pub const DEFAULT_STABILITY_WINDOW: usize = 2;

/// Fine-Trotter reference resolution, `N_ref = 20·(L+2)`.
pub fn reference_steps(size: usize) -> usize {
    20 * (size + 2)
}

/// Outcome of the `t_max` scan.
#[derive(Debug, Clone, PartialEq)]
pub struct TmaxScan {
    /// Peak time rounded to the nearest integer.
    pub t_max: u32,
    /// Parabola-refined peak time.
    pub t_peak: f64,
    pub peak_height: f64,
    pub step: f64,
    /// `⟨n_{L/2}⟩` on the scan grid `k·step`.
    pub values: Vec<f64>,
}

/// Index of the first qualifying local maximum: `v[k] ≥ v[k−1]`,
/// `v[k] > v[k+1]`, `v[k] ≥ floor` and `k ≥ k_min`.
pub fn first_peak(values: &[f64], floor: f64, k_min: usize) -> Option<usize> {
    (k_min.max(1)..values.len().saturating_sub(1))
        .find(|&k| values[k] >= values[k - 1] && values[k] > values[k + 1] && values[k] >= floor)
}

/// Scan the noiseless no-vison circuit on a fine Trotter grid and locate
/// the first arrival peak of the spinon at bond `L/2`.
///
/// A peak must reach `1/L` (uniform filling by one spinon), which skips the
/// small pair-creation wiggles of the first few time units. The window is
/// `[1, 4L/Γ]`.
pub fn find_tmax_scan(config: &RingConfig) -> Result<TmaxScan> {
    config.validate_for_circuit()?;
    let size = config.size;
    let site = config.detection_site();
    let n_ref = reference_steps(size) as f64;
    let step = (2.0 * predict_tmax(size, config.field) / n_ref).min(0.25 / config.coupling);
    let layered = LayeredStep::compile(&build_trotter_step(config, step, 1)?)?;
    let mut state = run_circuit(&crate::circuit::build_ghz_prep(size, false)?, None)?;
    let window = 4.0 * size as f64 / config.field;
    let floor = 1.0 / size as f64;
    let k_min = crate::math::ceil(1.0 / step) as usize;

    let mut values = Vec::new();
    values.push(spinon_expectations(&state, size)?[site]);
    let mut k = 0usize;
    while (k + 1) as f64 * step <= window {
        state.apply_layered_step(&layered)?;
        values.push(spinon_expectations(&state, size)?[site]);
        k += 1;
        let p = k - 1;
        if p >= k_min.max(1) && first_peak(&values[p - 1..], floor, 1) == Some(1) {
            let (a, b, c) = (values[p - 1], values[p], values[p + 1]);
            let denom = a - 2.0 * b + c;
            let shift = if abs(denom) > 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            let t_peak = (p as f64 + shift) * step;
            return Ok(TmaxScan {
                t_max: round(t_peak) as u32,
                t_peak,
                peak_height: b,
                step,
                values,
            });
        }
    }
    Err(Error::Protocol(format!(
        "no arrival peak of height >= 1/L at bond {site} within t <= {window}; check Gamma"
    )))
}

/// First arrival peak time of the benchmark circuit, rounded to an integer.
pub fn find_tmax(config: &RingConfig) -> Result<u32> {
    Ok(find_tmax_scan(config)?.t_max)
}

fn check_pair(a: &OccupationTrace, b: &OccupationTrace) -> Result<()> {
    if a.labels.size != b.labels.size {
        return Err(Error::GridMismatch(format!(
            "ring sizes {} and {}",
            a.labels.size, b.labels.size
        )));
    }
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} vs {} time points", a.len(), b.len())));
    }
    if a.labels.with_vison != b.labels.with_vison {
        return Err(Error::GridMismatch("vison and no-vison branches are paired".into()));
    }
    for (x, y) in a.times.iter().zip(&b.times) {
        if abs(x - y) > 1e-9 * (1.0 + abs(*x)) {
            return Err(Error::GridMismatch(format!("time {x} vs {y}")));
        }
    }
    Ok(())
}

/// Average Trotter error
/// `δ = sqrt( Σ_{branches} Σ_{s} Σ_{k=1..N} (n_ref − n_trot)² / (2NL) )`.
///
/// Each pair holds the two branches (vison and no-vison, in either order
/// but the same order in both pairs) on the shared grid `k·t_max/N`.
pub fn trotter_error(
    reference: (&OccupationTrace, &OccupationTrace),
    trotter: (&OccupationTrace, &OccupationTrace),
) -> Result<f64> {
    check_pair(reference.0, trotter.0)?;
    check_pair(reference.1, trotter.1)?;
    check_pair(reference.0, reference.1).or_else(|e| match e {
        // The two branches must differ in their vison label.
        Error::GridMismatch(ref m) if m.contains("branches") => Ok(()),
        other => Err(other),
    })?;
    let n = reference.0.len().saturating_sub(1);
    if n == 0 {
        return Err(Error::GridMismatch("traces need at least one step".into()));
    }
    let size = reference.0.labels.size;
    let mut sum = 0.0;
    for (r, t) in [(reference.0, trotter.0), (reference.1, trotter.1)] {
        for (rr, tr) in r.occupations[1..].iter().zip(&t.occupations[1..]) {
            sum += rr.iter().zip(tr).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
    }
    Ok(sqrt(sum / (2.0 * n as f64 * size as f64)))
}

/// `δ(N)` between exact evolution and the `N`-step circuit at fixed `t_max`.
pub fn trotter_error_at(config: &RingConfig, t_max: f64, n_steps: usize) -> Result<f64> {
    let ed_v = exact_trace(config, t_max, n_steps, true)?;
    let ed_n = exact_trace(config, t_max, n_steps, false)?;
    let tr_v = trotter_trace(config, t_max, n_steps, true)?;
    let tr_n = trotter_trace(config, t_max, n_steps, false)?;
    trotter_error((&ed_v, &ed_n), (&tr_v, &tr_n))
}

/// Result of the `N_opt` search.
#[derive(Debug, Clone, PartialEq)]
pub struct NoptSearch {
    pub n_opt: usize,
    pub delta: f64,
    /// `(N, δ(N))` for every step count evaluated.
    pub evaluated: Vec<(usize, f64)>,
}

/// Smallest `N ≥ 2` such that `δ ≤ threshold` holds for `window`
/// consecutive step counts `N, N+1, …`.
///
/// `δ(N)` is not monotone: the ZZ angle `2J·t_max/N` aliases modulo 2π and
/// produces isolated dips well below threshold. `window = 1` gives the
/// plain first-crossing rule.
pub fn find_nopt_with_window(
    config: &RingConfig,
    t_max: f64,
    threshold: f64,
    window: usize,
) -> Result<NoptSearch> {
    if window == 0 {
        return Err(Error::InvalidConfig("stability window must be >= 1".into()));
    }
    let n_max = reference_steps(config.size);
    let mut evaluated: Vec<(usize, f64)> = Vec::new();
    let mut run = 0usize;
    for n in 2..=n_max + window {
        let delta = trotter_error_at(config, t_max, n)?;
        evaluated.push((n, delta));
        if delta <= threshold {
            run += 1;
            if run == window {
                let n_opt = n + 1 - window;
                let delta = evaluated[n_opt - 2].1;
                return Ok(NoptSearch {
                    n_opt,
                    delta,
                    evaluated,
                });
            }
        } else {
            run = 0;
        }
    }
    Err(Error::Protocol(format!(
        "Trotter error stays above {threshold} up to N = {n_max}"
    )))
}

pub fn find_nopt(config: &RingConfig, t_max: f64, threshold: f64) -> Result<NoptSearch> {
    find_nopt_with_window(config, t_max, threshold, DEFAULT_STABILITY_WINDOW)
}

/// Calibrated circuit parameters for one ring size, with the noiseless
/// reference occupations used to normalize `R`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationRecord {
    pub size: usize,
    pub coupling: f64,
    pub field: f64,
    pub t_max: u32,
    pub t_peak: f64,
    pub n_opt: usize,
    pub delta: f64,
    pub delta_threshold: f64,
    /// Method used as the `δ` reference.
    pub reference: Backend,
    /// Noiseless circuit value of `⟨n_{L/2}⟩` at `t_max`, vison branch.
    pub n_v0: f64,
    /// Same, no-vison branch.
    pub n_nov0: f64,
}

impl CalibrationRecord {
    pub fn validate(&self) -> Result<()> {
        if self.t_max < 1 || self.n_opt < 1 {
            return Err(Error::InvalidConfig("calibration needs t_max >= 1 and N_opt >= 1".into()));
        }
        if self.delta > self.delta_threshold {
            return Err(Error::InvalidConfig(format!(
                "calibration delta {} exceeds its threshold {}",
                self.delta, self.delta_threshold
            )));
        }
        Ok(())
    }

    /// Ring configuration matching this record.
    pub fn apply_to(&self, config: &RingConfig) -> Result<()> {
        if config.size != self.size || config.coupling != self.coupling || config.field != self.field {
            return Err(Error::InvalidConfig(format!(
                "calibration is for L = {}, J = {}, Gamma = {}",
                self.size, self.coupling, self.field
            )));
        }
        Ok(())
    }
}

/// `find_tmax`, `find_nopt` and the noiseless reference for one ring.
pub fn calibrate(config: &RingConfig, delta_threshold: f64) -> Result<CalibrationRecord> {
    let scan = find_tmax_scan(config)?;
    let t_max = scan.t_max as f64;
    let nopt = find_nopt(config, t_max, delta_threshold)?;
    let site = config.detection_site();
    let v = trotter_trace(config, t_max, nopt.n_opt, true)?;
    let nv = trotter_trace(config, t_max, nopt.n_opt, false)?;
    Ok(CalibrationRecord {
        size: config.size,
        coupling: config.coupling,
        field: config.field,
        t_max: scan.t_max,
        t_peak: scan.t_peak,
        n_opt: nopt.n_opt,
        delta: nopt.delta,
        delta_threshold,
        reference: Backend::Exact,
        n_v0: v.occupations[nopt.n_opt][site],
        n_nov0: nv.occupations[nopt.n_opt][site],
    })
}

fn reference_gap(n_v0: f64, n_nov0: f64) -> Result<f64> {
    let gap = n_v0 - n_nov0;
    if abs(gap) <= 1e-9 {
        return Err(Error::Protocol(format!(
            "noiseless reference contrast {gap:e} vanishes; R is undefined"
        )));
    }
    Ok(gap)
}

/// `R = (n_v − n_nov)/(n_v0 − n_nov0)`.
pub fn coherence_ratio(n_v: f64, n_nov: f64, n_v0: f64, n_nov0: f64) -> Result<f64> {
    Ok((n_v - n_nov) / reference_gap(n_v0, n_nov0)?)
}

/// `ΔR = sqrt( [(1−n_v)n_v + (1−n_nov)n_nov] / [N_shots (n_v0 − n_nov0)²] )`.
pub fn ratio_stderr(n_v: f64, n_nov: f64, n_v0: f64, n_nov0: f64, shots: u64) -> Result<f64> {
    let gap = reference_gap(n_v0, n_nov0)?;
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be positive".into()));
    }
    let var = (1.0 - n_v) * n_v + (1.0 - n_nov) * n_nov;
    Ok(sqrt(var.max(0.0) / (shots as f64 * gap * gap)))
}

/// Largest passing ring size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(into = "String", try_from = "String"))]
pub enum QGrade {
    None,
    Size(usize),
    Unbounded,
}

impl fmt::Display for QGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QGrade::None => f.write_str("none"),
            QGrade::Size(l) => write!(f, "{l}"),
            QGrade::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl FromStr for QGrade {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(QGrade::None),
            "unbounded" => Ok(QGrade::Unbounded),
            other => other
                .parse()
                .map(QGrade::Size)
                .map_err(|_| Error::InvalidConfig(format!("bad Q-grade `{other}`"))),
        }
    }
}

impl From<QGrade> for String {
    fn from(q: QGrade) -> String {
        q.to_string()
    }
}

impl TryFrom<String> for QGrade {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Q-grade of `(L, R)` rows sorted by even `L` ascending.
///
/// `Unbounded` requires every row to pass and `exhaustive` to be set, i.e.
/// the sweep reached the largest size the caller can run.
pub fn qgrade(rows: &[(usize, f64)], threshold: f64, exhaustive: bool) -> Result<QGrade> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig("Q-grade needs at least one row".into()));
    }
    if rows.iter().any(|(l, _)| l % 2 != 0) {
        return Err(Error::InvalidConfig("Q-grade rows must have even L".into()));
    }
    if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidConfig("Q-grade rows must be sorted by L ascending".into()));
    }
    let passing: Vec<usize> = rows.iter().filter(|(_, r)| *r >= threshold).map(|(l, _)| *l).collect();
    Ok(if passing.len() == rows.len() && exhaustive {
        QGrade::Unbounded
    } else {
        passing.last().map_or(QGrade::None, |&l| QGrade::Size(l))
    })
}

/// One ring size of a Q-grade sweep.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QGradeRow {
    pub size: usize,
    pub ratio: f64,
    pub stderr: f64,
    pub n_v: f64,
    pub n_nov: f64,
    pub n_v0: f64,
    pub n_nov0: f64,
    pub shots: u64,
}

impl QGradeRow {
    pub fn new(size: usize, n_v: f64, n_nov: f64, n_v0: f64, n_nov0: f64, shots: u64) -> Result<Self> {
        Ok(QGradeRow {
            size,
            ratio: coherence_ratio(n_v, n_nov, n_v0, n_nov0)?,
            stderr: ratio_stderr(n_v, n_nov, n_v0, n_nov0, shots)?,
            n_v,
            n_nov,
            n_v0,
            n_nov0,
            shots,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QGradeReport {
    /// Noise rate or backend description of the sweep.
    pub label: String,
    pub threshold: f64,
    pub exhaustive: bool,
    pub rows: Vec<QGradeRow>,
    pub qgrade: QGrade,
}

impl QGradeReport {
    pub fn new(label: String, mut rows: Vec<QGradeRow>, threshold: f64, exhaustive: bool) -> Result<Self> {
        rows.sort_by_key(|r| r.size);
        let pairs: Vec<(usize, f64)> = rows.iter().map(|r| (r.size, r.ratio)).collect();
        let qgrade = qgrade(&pairs, threshold, exhaustive)?;
        Ok(QGradeReport {
            label,
            threshold,
            exhaustive,
            rows,
            qgrade,
        })
    }
}

/// Seed of the no-vison branch derived from the run seed.
const NO_VISON_STREAM: u64 = 0x5eed;

/// Traces of the vison and no-vison circuits on `backend`.
///
/// `n_traj` and `seed` are used by the trajectory backend only; the two
/// branches draw from different seeds.
pub fn branch_traces(
    config: &RingConfig,
    t_max: f64,
    n_steps: usize,
    backend: Backend,
    n_traj: usize,
    seed: u64,
) -> Result<(OccupationTrace, OccupationTrace)> {
    let run = |vison: bool, seed: u64| -> Result<OccupationTrace> {
        match backend {
            Backend::Statevector if config.noise_rate == 0.0 => trotter_trace(config, t_max, n_steps, vison),
            Backend::Statevector => Err(Error::InvalidConfig(
                "the statevector backend is noiseless; use density-matrix or trajectory".into(),
            )),
            Backend::DensityMatrix => lindblad_trotter_trace(config, t_max, n_steps, vison),
            Backend::Trajectory => trajectory_trace(config, t_max, n_steps, vison, n_traj, seed),
            other => Err(Error::InvalidConfig(format!("backend `{other}` cannot run the circuit"))),
        }
    };
    Ok((run(true, seed)?, run(false, seed ^ NO_VISON_STREAM)?))
}

/// Noisy occupations of bond `L/2` at `t_max` for both branches.
pub fn final_occupations(
    config: &RingConfig,
    t_max: f64,
    n_steps: usize,
    backend: Backend,
    n_traj: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let site = config.detection_site();
    let (v, nv) = branch_traces(config, t_max, n_steps, backend, n_traj, seed)?;
    Ok((v.occupations[n_steps][site], nv.occupations[n_steps][site]))
}

/// `R` and `ΔR` for one calibrated ring size.
pub fn ratio_row(
    config: &RingConfig,
    calibration: &CalibrationRecord,
    backend: Backend,
    n_traj: usize,
    seed: u64,
) -> Result<QGradeRow> {
    calibration.apply_to(config)?;
    let (n_v, n_nov) = final_occupations(
        config,
        calibration.t_max as f64,
        calibration.n_opt,
        backend,
        n_traj,
        seed,
    )?;
    QGradeRow::new(config.size, n_v, n_nov, calibration.n_v0, calibration.n_nov0, config.shots)
}
