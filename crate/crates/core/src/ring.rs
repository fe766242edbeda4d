// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Ring geometry, spinon/vison observables and the twisted Ising Hamiltonian
//!
//! `H = J·A₀ − J·Σ_{s≠0} A_s − Γ·Σ_i σˣ_i` with `A_s = σᶻ_s σᶻ_{s+1 mod L}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::C64;
use crate::statevector::StateVector;

/// Physical and protocol parameters for one benchmark instance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RingConfig {
    /// Ring size `L`: number of qubits and of bonds (spinon sites).
    pub size: usize,
    /// Ising coupling `J`.
    pub coupling: f64,
    /// Transverse field `Γ`.
    pub field: f64,
    /// Lindblad rate `γ` of the isotropic bath.
    pub noise_rate: f64,
    /// Q-grade cutoff on `R_γ(L)`.
    pub threshold: f64,
    /// Samples per circuit.
    pub shots: u64,
}

impl RingConfig {
    pub const DEFAULT_COUPLING: f64 = 1.0;
    pub const DEFAULT_FIELD: f64 = 0.1;
    pub const DEFAULT_THRESHOLD: f64 = 0.2;

    /// Default parameters (`J = 1`, `Γ = 0.1`, `γ = 0`, threshold 0.2) for a
    /// ring of `size` sites.
    pub fn new(size: usize) -> Self {
        RingConfig {
            size,
            coupling: Self::DEFAULT_COUPLING,
            field: Self::DEFAULT_FIELD,
            noise_rate: 0.0,
            threshold: Self::DEFAULT_THRESHOLD,
            shots: default_shots(size),
        }
    }

    pub fn with_noise_rate(mut self, noise_rate: f64) -> Self {
        self.noise_rate = noise_rate;
        self
    }

    pub fn with_field(mut self, field: f64) -> Self {
        self.field = field;
        self
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = shots;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.size < 2 || self.size % 2 != 0 {
            return Err(Error::InvalidConfig(alloc::format!(
                "ring size must be even and >= 2, got {}",
                self.size
            )));
        }
        if !(self.coupling.is_finite() && self.coupling > 0.0) {
            return bad("coupling J must be finite and > 0");
        }
        if !(self.field.is_finite() && self.field > 0.0) {
            return bad("transverse field Gamma must be finite and > 0");
        }
        if !(self.noise_rate.is_finite() && self.noise_rate >= 0.0) {
            return bad("noise rate gamma must be finite and >= 0");
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad("threshold must lie in (0, 1)");
        }
        if self.shots == 0 {
            return bad("shots must be positive");
        }
        Ok(())
    }

    /// Circuit construction additionally needs `L ≥ 4`; `L = 2` is only
    /// reachable through the analytic oracle and direct state preparation.
    pub fn validate_for_circuit(&self) -> Result<()> {
        self.validate()?;
        if self.size < 4 {
            return Err(Error::InvalidConfig(alloc::format!(
                "circuit construction needs an even ring size >= 4, got {}",
                self.size
            )));
        }
        Ok(())
    }

    pub fn detection_site(&self) -> usize {
        BondConvention::detection_site(self.size)
    }
}

/// 1000 shots up to `L = 16`, 2000 above.
pub fn default_shots(size: usize) -> u64 {
    if size <= 16 {
        1000
    } else {
        2000
    }
}

/// Qubit and bond layout shared by every module.
///
/// Qubits are `0..L`. Bond `s` joins qubits `s` and `(s+1) mod L`. Bond 0 is
/// the twisted (antiferromagnetic) one and the detection site `L/2` sits
/// diametrically opposite it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BondConvention;

impl BondConvention {
    pub const TWIST_BOND: usize = 0;

    pub fn bond_qubits(size: usize, bond: usize) -> (usize, usize) {
        (bond, (bond + 1) % size)
    }

    /// `J_s`: −1 on the twisted bond, +1 elsewhere.
    pub fn bond_sign(bond: usize) -> f64 {
        if bond == Self::TWIST_BOND {
            -1.0
        } else {
            1.0
        }
    }

    pub fn detection_site(size: usize) -> usize {
        size / 2
    }
}

/// Bitmask of excited bonds for a Z-basis index (bit `i` = qubit `i`).
///
/// Bond `s` is excited when `J_s·z_s·z_{s+1} = −1`: aligned spins across the
/// twisted bond, anti-aligned elsewhere.
#[inline]
pub(crate) fn excited_bonds(size: usize, index: usize) -> usize {
    let full = (1usize << size) - 1;
    let rotated = (index >> 1) | ((index & 1) << (size - 1));
    (index ^ rotated ^ 1) & full
}

/// Per-bond spinon occupations `n_s = (1 − J_s z_s z_{s+1})/2` of a
/// Z-basis readout with `z = 1 − 2·bit`.
pub fn spinon_occupations(bits: &[u8], size: usize) -> Result<Vec<u8>> {
    if bits.len() != size {
        return Err(Error::LengthMismatch {
            expected: size,
            got: bits.len(),
        });
    }
    if size < 2 {
        return Err(Error::InvalidConfig("ring needs at least two sites".into()));
    }
    let mut index = 0usize;
    for (q, &b) in bits.iter().enumerate() {
        match b {
            0 => {}
            1 => index |= 1 << q,
            other => {
                return Err(Error::InvalidConfig(alloc::format!(
                    "bit values must be 0 or 1, got {other} at position {q}"
                )))
            }
        }
    }
    let mask = excited_bonds(size, index);
    Ok((0..size).map(|s| ((mask >> s) & 1) as u8).collect())
}

/// A register state that exposes Z-basis probabilities and `⟨B⟩`.
pub trait RegisterState {
    fn num_qubits(&self) -> usize;

    /// Probability of Z-basis index `index`.
    fn probability(&self, index: usize) -> f64;

    /// `⟨∏_i σˣ_i⟩`.
    fn vison_expectation(&self) -> f64;
}

/// `⟨n_s⟩` for every bond.
pub fn spinon_expectations<S: RegisterState + ?Sized>(state: &S, size: usize) -> Result<Vec<f64>> {
    if state.num_qubits() != size {
        return Err(Error::DimensionMismatch {
            qubits: size,
            got: 1usize << state.num_qubits(),
        });
    }
    let mut occ = vec![0.0; size];
    for index in 0..(1usize << size) {
        let p = state.probability(index);
        if p == 0.0 {
            continue;
        }
        let mut mask = excited_bonds(size, index);
        while mask != 0 {
            let s = mask.trailing_zeros() as usize;
            occ[s] += p;
            mask &= mask - 1;
        }
    }
    Ok(occ)
}

/// `⟨∏_s (1 − 2n_s)⟩`, which is −1 for every state of the twisted ring.
pub fn spinon_parity<S: RegisterState + ?Sized>(state: &S) -> f64 {
    let size = state.num_qubits();
    (0..(1usize << size))
        .map(|index| {
            let p = state.probability(index);
            if excited_bonds(size, index).count_ones() % 2 == 0 {
                p
            } else {
                -p
            }
        })
        .sum()
}

/// Total spinon number `Σ_s ⟨n_s⟩`.
pub fn total_spinons(occupations: &[f64]) -> f64 {
    occupations.iter().sum()
}

/// Matrix-free twisted Ising Hamiltonian.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    size: usize,
    field: f64,
    diagonal: Vec<f64>,
    norm_bound: f64,
}

impl Hamiltonian {
    /// Largest ring for which [`Hamiltonian::to_dense`] is allowed.
    pub const MAX_DENSE_SIZE: usize = 12;

    pub fn new(config: &RingConfig) -> Result<Self> {
        config.validate()?;
        let size = config.size;
        if size > StateVector::MAX_QUBITS {
            return Err(Error::Capacity {
                what: "matrix-free Hamiltonian",
                limit: StateVector::MAX_QUBITS,
                requested: size,
                hint: "",
            });
        }
        let j = config.coupling;
        let diagonal = (0..(1usize << size))
            .map(|index| {
                // Each excited bond costs +J relative to −J.
                let excited = excited_bonds(size, index).count_ones() as f64;
                -j * (size as f64 - 2.0 * excited)
            })
            .collect();
        Ok(Hamiltonian {
            size,
            field: config.field,
            diagonal,
            norm_bound: size as f64 * (j + config.field),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dimension(&self) -> usize {
        1 << self.size
    }

    /// Ising energies `−J Σ_s J_s z_s z_{s+1}` per basis state.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Upper bound on the spectral norm (sum of term norms).
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// `out = H·input`.
    pub fn apply(&self, input: &[C64], out: &mut [C64]) {
        debug_assert_eq!(input.len(), self.dimension());
        debug_assert_eq!(out.len(), self.dimension());
        let g = self.field;
        for (index, o) in out.iter_mut().enumerate() {
            let mut acc = input[index] * self.diagonal[index];
            let mut flips = C64::new(0.0, 0.0);
            for q in 0..self.size {
                flips += input[index ^ (1 << q)];
            }
            acc -= flips * g;
            *o = acc;
        }
    }

    /// Row-major dense matrix; limited to `L ≤ 12`.
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        if self.size > Self::MAX_DENSE_SIZE {
            return Err(Error::Capacity {
                what: "dense Hamiltonian",
                limit: Self::MAX_DENSE_SIZE,
                requested: self.size,
                hint: "; use the matrix-free apply",
            });
        }
        let dim = self.dimension();
        let mut m = vec![C64::new(0.0, 0.0); dim * dim];
        for index in 0..dim {
            m[index * dim + index] = C64::new(self.diagonal[index], 0.0);
            for q in 0..self.size {
                m[index * dim + (index ^ (1 << q))] -= self.field;
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn commutator_with_vison(h: &[C64], size: usize) -> f64 {
        let dim = 1usize << size;
        let all = dim - 1;
        // (HB)_{ij} = H_{i, j^all}; (BH)_{ij} = H_{i^all, j}
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let d = h[i * dim + (j ^ all)] - h[(i ^ all) * dim + j];
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    #[test]
    fn occupations_of_basis_states() {
        assert_eq!(spinon_occupations(&[0, 0, 0, 0], 4).unwrap(), [1, 0, 0, 0]);
        assert_eq!(spinon_occupations(&[0, 0, 1, 1], 4).unwrap(), [1, 1, 0, 1]);
        assert_eq!(spinon_occupations(&[1; 6], 6).unwrap(), [1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn occupation_length_mismatch() {
        assert_eq!(
            spinon_occupations(&[0, 1, 0], 4),
            Err(Error::LengthMismatch {
                expected: 4,
                got: 3
            })
        );
    }

    #[test]
    fn every_bitstring_has_odd_spinon_number() {
        for size in [2usize, 4, 6, 8] {
            for index in 0..(1usize << size) {
                assert_eq!(excited_bonds(size, index).count_ones() % 2, 1);
            }
        }
    }

    #[test]
    fn all_aligned_reference_energy() {
        let h = Hamiltonian::new(&RingConfig::new(4)).unwrap();
        assert_eq!(h.diagonal()[0], -2.0);
    }

    #[test]
    fn two_site_ring_without_field_is_diagonal_and_degenerate() {
        // J_0 A_0 and J_1 A_1 cancel on two sites.
        let mut cfg = RingConfig::new(2);
        cfg.field = 1e-300;
        let h = Hamiltonian::new(&cfg).unwrap();
        assert!(h.diagonal().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn hamiltonian_is_hermitian_and_commutes_with_vison() {
        for size in [4usize, 6] {
            let h = Hamiltonian::new(&RingConfig::new(size)).unwrap();
            let m = h.to_dense().unwrap();
            let dim = h.dimension();
            let scale: f64 = m.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let mut herm = 0.0f64;
            for i in 0..dim {
                for j in 0..dim {
                    herm = herm.max((m[i * dim + j] - m[j * dim + i].conj()).norm());
                }
            }
            assert!(herm <= 1e-12 * scale);
            assert!(commutator_with_vison(&m, size) <= 1e-12);
        }
    }

    #[test]
    fn dense_capacity_is_enforced() {
        let h = Hamiltonian::new(&RingConfig::new(14)).unwrap();
        assert!(matches!(h.to_dense(), Err(Error::Capacity { limit: 12, .. })));
    }

    #[test]
    fn matrix_free_apply_matches_dense() {
        let h = Hamiltonian::new(&RingConfig::new(6)).unwrap();
        let m = h.to_dense().unwrap();
        let dim = h.dimension();
        let v: Vec<C64> = (0..dim)
            .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut out = vec![C64::new(0.0, 0.0); dim];
        h.apply(&v, &mut out);
        for i in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..dim {
                acc += m[i * dim + j] * v[j];
            }
            assert!((acc - out[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn total_spinon_examples() {
        assert_eq!(total_spinons(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 1.0);
        assert_eq!(total_spinons(&[0.5; 6]), 3.0);
        assert_eq!(total_spinons(&[0.5; 10]), 5.0);
    }

    #[test]
    fn config_validation() {
        assert!(RingConfig::new(6).validate().is_ok());
        assert!(RingConfig::new(5).validate().is_err());
        assert!(RingConfig::new(0).validate().is_err());
        assert!(RingConfig::new(2).validate().is_ok());
        assert!(RingConfig::new(2).validate_for_circuit().is_err());
        assert!(RingConfig::new(6).with_noise_rate(-1.0).validate().is_err());
        let mut c = RingConfig::new(6);
        c.threshold = 1.0;
        assert!(c.validate().is_err());
    }
}
