// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Fast form of a Trotter step: one diagonal phase layer plus a uniform RX
//! layer. The ZZ blocks (`CNOT·RZ·CNOT`) of a step compose to a diagonal
//! unitary, so simulators apply them in a single pass instead of `3L`.

use alloc::format;
use alloc::vec::Vec;

use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::math::{cis, C64};

#[derive(Debug, Clone)]
pub struct LayeredStep {
    n_qubits: usize,
    phases: Vec<C64>,
    rx_theta: f64,
}

impl LayeredStep {
    /// Compile a step fragment made of a diagonal CNOT/RZ/Z block followed by
    /// exactly one `RX(θ)` per qubit, all with the same angle.
    pub fn compile(step: &Circuit) -> Result<Self> {
        let n = step.n_qubits();
        let gates = step.gates();
        let split = gates
            .iter()
            .position(|g| matches!(g, Gate::Rx { .. }))
            .unwrap_or(gates.len());
        let (diag_part, rx_part) = gates.split_at(split);

        let mut rx_theta = None;
        let mut seen = 0usize;
        for g in rx_part {
            match *g {
                Gate::Rx { qubit, theta } => {
                    if seen & (1 << qubit) != 0 {
                        return Err(Error::InvalidGate(format!("RX applied twice to qubit {qubit}")));
                    }
                    seen |= 1 << qubit;
                    match rx_theta {
                        None => rx_theta = Some(theta),
                        Some(t) if t == theta => {}
                        Some(t) => {
                            return Err(Error::InvalidGate(format!(
                                "RX layer mixes angles {t} and {theta}"
                            )))
                        }
                    }
                }
                other => {
                    return Err(Error::InvalidGate(format!(
                        "{other:?} after the RX layer cannot be layered"
                    )))
                }
            }
        }
        if seen != (1usize << n) - 1 {
            return Err(Error::InvalidGate("RX layer must cover every qubit once".into()));
        }

        let dim = 1usize << n;
        let mut phases = Vec::with_capacity(dim);
        for index in 0..dim {
            let mut y = index;
            let mut phase = 0.0;
            for g in diag_part {
                match *g {
                    Gate::Cnot { control, target } => {
                        if y & (1 << control) != 0 {
                            y ^= 1 << target;
                        }
                    }
                    Gate::Rz { qubit, theta } => {
                        phase += if y & (1 << qubit) != 0 { theta / 2.0 } else { -theta / 2.0 };
                    }
                    Gate::Z(qubit) => {
                        if y & (1 << qubit) != 0 {
                            phase += core::f64::consts::PI;
                        }
                    }
                    other => {
                        return Err(Error::InvalidGate(format!(
                            "{other:?} is not diagonal-preserving"
                        )))
                    }
                }
            }
            if y != index {
                return Err(Error::InvalidGate(
                    "CNOTs of the ZZ layer do not cancel to a diagonal".into(),
                ));
            }
            phases.push(cis(phase));
        }

        Ok(LayeredStep {
            n_qubits: n,
            phases,
            rx_theta: rx_theta.unwrap_or(0.0),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Diagonal of the ZZ layer in the computational basis.
    pub fn phases(&self) -> &[C64] {
        &self.phases
    }

    pub fn rx_theta(&self) -> f64 {
        self.rx_theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_trotter_step;
    use crate::ring::{excited_bonds, RingConfig};

    #[test]
    fn zz_layer_phase_counts_excited_bonds() {
        // CNOT·RZ(θ)·CNOT = exp(−iθ Z⊗Z/2); with θ_s = J_s θ_z the layer is
        // exp(−i θ_z/2 Σ_s J_s z_s z_{s+1}) = exp(−i θ_z/2 (L − 2·#excited)).
        let cfg = RingConfig::new(6);
        let step = LayeredStep::compile(&build_trotter_step(&cfg, 21.0, 8).unwrap()).unwrap();
        let theta_z = 2.0 * 21.0 / 8.0;
        for (index, p) in step.phases().iter().enumerate() {
            let excited = excited_bonds(6, index).count_ones() as f64;
            let expect = cis(-theta_z / 2.0 * (6.0 - 2.0 * excited));
            assert!((expect - p).norm() < 1e-12);
        }
        assert_eq!(step.rx_theta(), 2.0 * 0.1 * 21.0 / 8.0);
    }

    #[test]
    fn rejects_non_layered_fragments() {
        let c = Circuit::from_gates(2, alloc::vec![Gate::H(0)]).unwrap();
        assert!(LayeredStep::compile(&c).is_err());
        let c = Circuit::from_gates(
            2,
            alloc::vec![
                Gate::Cnot { control: 0, target: 1 },
                Gate::Rx { qubit: 0, theta: 0.1 },
                Gate::Rx { qubit: 1, theta: 0.1 }
            ],
        )
        .unwrap();
        assert!(LayeredStep::compile(&c).is_err());
        let c = Circuit::from_gates(2, alloc::vec![Gate::Rx { qubit: 0, theta: 0.1 }]).unwrap();
        assert!(LayeredStep::compile(&c).is_err());
    }
}
