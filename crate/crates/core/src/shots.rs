// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Z-basis measurement counts.
//!
//! Keys are bitstrings with character `i` holding qubit `i` (q0-first).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ring::excited_bonds;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShotCounts {
    n_qubits: usize,
    counts: BTreeMap<String, u64>,
}

pub(crate) fn index_to_key(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn key_to_index(key: &str, n_qubits: usize) -> Result<usize> {
    if key.len() != n_qubits {
        return Err(Error::InvalidConfig(format!(
            "bitstring `{key}` has length {}, expected {n_qubits}",
            key.len()
        )));
    }
    key.bytes().enumerate().try_fold(0usize, |acc, (q, b)| match b {
        b'0' => Ok(acc),
        b'1' => Ok(acc | 1 << q),
        _ => Err(Error::InvalidConfig(format!("bitstring `{key}` contains non-binary characters"))),
    })
}

impl ShotCounts {
    pub fn new(n_qubits: usize) -> Self {
        ShotCounts {
            n_qubits,
            counts: BTreeMap::new(),
        }
    }

    /// Build from q0-first keys, validating every key.
    pub fn from_counts(n_qubits: usize, counts: BTreeMap<String, u64>) -> Result<Self> {
        for key in counts.keys() {
            key_to_index(key, n_qubits)?;
        }
        Ok(ShotCounts { n_qubits, counts })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn get(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub(crate) fn record(&mut self, index: usize, n: u64) {
        *self.counts.entry(index_to_key(index, self.n_qubits)).or_insert(0) += n;
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Empirical `⟨n_s⟩` per bond.
    pub fn occupations(&self) -> Result<Vec<f64>> {
        let size = self.n_qubits;
        let total = self.total();
        if total == 0 {
            return Err(Error::InvalidConfig("no shots recorded".into()));
        }
        let mut occ = vec![0.0; size];
        for (key, &n) in &self.counts {
            let mut mask = excited_bonds(size, key_to_index(key, size)?);
            while mask != 0 {
                occ[mask.trailing_zeros() as usize] += n as f64;
                mask &= mask - 1;
            }
        }
        for o in &mut occ {
            *o /= total as f64;
        }
        Ok(occ)
    }

    /// Draw `shots` indices from a probability vector of length `2^n_qubits`.
    pub(crate) fn sample(probabilities: &[f64], n_qubits: usize, shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidConfig("shots must be positive".into()));
        }
        let sampler = Sampler::new(probabilities);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hist = BTreeMap::new();
        for _ in 0..shots {
            *hist.entry(sampler.draw(&mut rng)).or_insert(0u64) += 1;
        }
        let mut out = ShotCounts::new(n_qubits);
        for (index, n) in hist {
            out.record(index, n);
        }
        Ok(out)
    }
}

/// Inverse-CDF sampler over basis indices.
#[derive(Debug)]
pub(crate) struct Sampler {
    cdf: Vec<f64>,
    last_nonzero: usize,
}

impl Sampler {
    pub(crate) fn new(probabilities: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf: Vec<f64> = probabilities
            .iter()
            .map(|p| {
                acc += p.max(0.0);
                acc
            })
            .collect();
        let last_nonzero = probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        Sampler { cdf, last_nonzero }
    }

    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        let total = self.cdf.last().copied().unwrap_or(0.0);
        let r = rng.random::<f64>() * total;
        self.cdf.partition_point(|&c| c <= r).min(self.last_nonzero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_q0_first() {
        assert_eq!(index_to_key(0b0001, 4), "1000");
        assert_eq!(key_to_index("0011", 4).unwrap(), 0b1100);
        assert!(key_to_index("001", 4).is_err());
        assert!(key_to_index("0021", 4).is_err());
    }

    #[test]
    fn occupations_from_counts() {
        let mut m = BTreeMap::new();
        m.insert("0000".into(), 3);
        m.insert("0011".into(), 1);
        let c = ShotCounts::from_counts(4, m).unwrap();
        // "0011" = qubits 2,3 set → bonds 0,1,3 excited.
        assert_eq!(c.occupations().unwrap(), [1.0, 0.25, 0.0, 0.25]);
        assert_eq!(c.total(), 4);
    }

    #[test]
    fn sampler_never_returns_zero_probability_states() {
        let probs = [0.0, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0];
        let c = ShotCounts::sample(&probs, 3, 10_000, 7).unwrap();
        assert_eq!(c.total(), 10_000);
        assert_eq!(c.counts().len(), 2);
        let ones = c.get("100") as f64;
        assert!((ones - 5000.0).abs() < 5.0 * 50.0);
    }
}
