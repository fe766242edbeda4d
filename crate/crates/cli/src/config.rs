// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Run settings: defaults, flat `key = value` config files, CLI overrides.
//!
//! Recognized keys mirror [`RingConfig`] plus the run controls:
//!
//! ```text
//! # comment
//! size = 4..12          # ring sizes: `6`, `4,6,8` or `4..12` (even, inclusive)
//! coupling = 1.0
//! field = 0.1
//! noise_rate = 0.002
//! threshold = 0.2
//! shots = 1000          # omit for 1000 (L <= 16) / 2000 (L > 16)
//! seed = 7
//! backend = density-matrix
//! trajectories = 500
//! delta_threshold = 0.15
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context};
use qgrade_core::metrics::DEFAULT_DELTA_THRESHOLD;
use qgrade_core::ring::default_shots;
use qgrade_core::{Backend, RingConfig};

use crate::UsageError;

const KEYS: &[&str] = &[
    "size",
    "coupling",
    "field",
    "noise_rate",
    "threshold",
    "shots",
    "seed",
    "backend",
    "trajectories",
    "delta_threshold",
];

/// Parsed config file, kept as raw strings until merged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("config line {}: expected `key = value`", i + 1))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                bail!("config line {}: unknown key `{key}` (known: {})", i + 1, KEYS.join(", "));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                bail!("config line {}: duplicate key `{key}`", i + 1);
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.entries
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow::anyhow!("config key `{key}` = `{v}`: {e}")))
            .transpose()
    }
}

/// Values given on the command line; `None` falls back to the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub sizes: Option<String>,
    pub noise_rate: Option<f64>,
    pub backend: Option<Backend>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub threshold: Option<f64>,
    pub trajectories: Option<usize>,
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub sizes: Option<Vec<usize>>,
    pub coupling: f64,
    pub field: f64,
    pub noise_rate: f64,
    pub threshold: f64,
    pub shots: Option<u64>,
    pub seed: u64,
    pub backend: Backend,
    pub trajectories: usize,
    pub delta_threshold: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            sizes: None,
            coupling: RingConfig::DEFAULT_COUPLING,
            field: RingConfig::DEFAULT_FIELD,
            noise_rate: 0.0,
            threshold: RingConfig::DEFAULT_THRESHOLD,
            shots: None,
            seed: 0,
            backend: Backend::DensityMatrix,
            trajectories: 500,
            delta_threshold: DEFAULT_DELTA_THRESHOLD,
        }
    }
}

impl Settings {
    pub fn resolve(file: &ConfigFile, cli: &Overrides) -> anyhow::Result<Self> {
        let d = Settings::default();
        let sizes = match cli.sizes.clone().or(file.get::<String>("size")?) {
            Some(s) => Some(parse_sizes(&s)?),
            None => None,
        };
        let s = Settings {
            sizes,
            coupling: file.get("coupling")?.unwrap_or(d.coupling),
            field: file.get("field")?.unwrap_or(d.field),
            noise_rate: cli.noise_rate.or(file.get("noise_rate")?).unwrap_or(d.noise_rate),
            threshold: cli.threshold.or(file.get("threshold")?).unwrap_or(d.threshold),
            shots: cli.shots.or(file.get("shots")?),
            seed: cli.seed.or(file.get("seed")?).unwrap_or(d.seed),
            backend: match cli.backend {
                Some(b) => b,
                None => file.get("backend")?.unwrap_or(d.backend),
            },
            trajectories: cli.trajectories.or(file.get("trajectories")?).unwrap_or(d.trajectories),
            delta_threshold: file.get("delta_threshold")?.unwrap_or(d.delta_threshold),
        };
        if !(s.noise_rate >= 0.0 && s.noise_rate.is_finite()) {
            return Err(UsageError(format!("gamma must be a finite non-negative rate, got {}", s.noise_rate)).into());
        }
        if s.shots == Some(0) {
            return Err(UsageError("shots must be positive".into()).into());
        }
        if s.trajectories == 0 {
            return Err(UsageError("trajectories must be positive".into()).into());
        }
        Ok(s)
    }

    pub fn sizes(&self) -> anyhow::Result<&[usize]> {
        match &self.sizes {
            Some(s) => Ok(s),
            None => Err(UsageError("no ring size given; pass --L or set `size` in the config".into()).into()),
        }
    }

    pub fn single_size(&self) -> anyhow::Result<usize> {
        match self.sizes()? {
            [l] => Ok(*l),
            more => Err(UsageError(format!("expected one ring size, got {more:?}")).into()),
        }
    }

    pub fn ring(&self, size: usize) -> anyhow::Result<RingConfig> {
        let cfg = RingConfig {
            size,
            coupling: self.coupling,
            field: self.field,
            noise_rate: self.noise_rate,
            threshold: self.threshold,
            shots: self.shots.unwrap_or_else(|| default_shots(size)),
        };
        cfg.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(cfg)
    }
}

/// Parse `6`, `4,6,8` or `4..12` into even ring sizes ≥ 4.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>, UsageError> {
    let bad = |m: String| UsageError(format!("ring sizes `{text}`: {m}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|e| bad(e.to_string()));
    let sizes: Vec<usize> = if let Some((a, b)) = text.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(bad("empty range".into()));
        }
        if a % 2 != 0 || b % 2 != 0 {
            return Err(bad("range ends must be even".into()));
        }
        (a..=b).step_by(2).collect()
    } else {
        text.split(',').map(num).collect::<Result<_, _>>()?
    };
    if let Some(l) = sizes.iter().find(|&&l| l % 2 != 0 || l < 4) {
        return Err(bad(format!("L = {l} is not an even size >= 4")));
    }
    let mut sorted = sizes.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted != sizes {
        return Err(bad("sizes must be strictly increasing".into()));
    }
    Ok(sizes)
}
