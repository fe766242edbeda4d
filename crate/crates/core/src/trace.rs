// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Time series of spinon occupations produced by every backend.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math::abs;

/// Simulation method that produced a trace or a set of counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Backend {
    Exact,
    Statevector,
    DensityMatrix,
    Trajectory,
    FineLindblad,
    Ingested,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Statevector => "statevector",
            Backend::DensityMatrix => "density-matrix",
            Backend::Trajectory => "trajectory",
            Backend::FineLindblad => "fine-lindblad",
            Backend::Ingested => "ingested",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exact" => Backend::Exact,
            "statevector" => Backend::Statevector,
            "density-matrix" => Backend::DensityMatrix,
            "trajectory" => Backend::Trajectory,
            "fine-lindblad" => Backend::FineLindblad,
            "ingested" => Backend::Ingested,
            other => return Err(Error::InvalidConfig(format!("unknown backend `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceLabels {
    pub with_vison: bool,
    pub backend: Backend,
    pub size: usize,
    pub noise_rate: f64,
    /// Trotter steps, or integration steps for continuous references.
    pub n_steps: usize,
}

/// Per-bond occupations `⟨n_s⟩`, their sum and `⟨B⟩` on a time grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OccupationTrace {
    pub times: Vec<f64>,
    /// `occupations[k][s]` at `times[k]`.
    pub occupations: Vec<Vec<f64>>,
    pub total: Vec<f64>,
    pub vison: Vec<f64>,
    /// Standard errors of `occupations`, for stochastic backends.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub stderr: Option<Vec<Vec<f64>>>,
    pub labels: TraceLabels,
}

impl OccupationTrace {
    pub fn new(labels: TraceLabels) -> Self {
        OccupationTrace {
            times: Vec::new(),
            occupations: Vec::new(),
            total: Vec::new(),
            vison: Vec::new(),
            stderr: None,
            labels,
        }
    }

    pub fn push(&mut self, time: f64, occupations: Vec<f64>, vison: f64) {
        self.total.push(occupations.iter().sum());
        self.times.push(time);
        self.occupations.push(occupations);
        self.vison.push(vison);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Occupation of bond `site` over time.
    pub fn site(&self, site: usize) -> Vec<f64> {
        self.occupations.iter().map(|row| row[site]).collect()
    }

    pub fn final_row(&self) -> Option<&[f64]> {
        self.occupations.last().map(Vec::as_slice)
    }

    /// Check grid, range and row-sum invariants with tolerance `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let size = self.labels.size;
        let n = self.times.len();
        if self.occupations.len() != n || self.total.len() != n || self.vison.len() != n {
            return Err(Error::GridMismatch("trace columns have different lengths".into()));
        }
        if let Some(first) = self.times.first() {
            if *first != 0.0 {
                return Err(Error::GridMismatch(format!("trace starts at t = {first}, not 0")));
            }
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::GridMismatch("times are not strictly increasing".into()));
        }
        for (k, row) in self.occupations.iter().enumerate() {
            if row.len() != size {
                return Err(Error::LengthMismatch {
                    expected: size,
                    got: row.len(),
                });
            }
            if let Some(s) = row.iter().position(|&x| !(x >= -tol && x <= 1.0 + tol)) {
                return Err(Error::Diagnostic {
                    step: k,
                    message: format!("occupation of bond {s} is {}", row[s]),
                });
            }
            let sum: f64 = row.iter().sum();
            if abs(sum - self.total[k]) > tol {
                return Err(Error::Diagnostic {
                    step: k,
                    message: String::from("total differs from the row sum"),
                });
            }
        }
        Ok(())
    }
}
