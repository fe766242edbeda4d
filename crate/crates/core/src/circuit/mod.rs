// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Gate-level IR and the benchmark circuit builders.
//!
//! One benchmark circuit is a GHZ preparation (optionally injecting a vison)
//! followed by `N` identical Trotter steps. Each step applies
//! `CNOT·RZ(±θ_z)·CNOT` on every bond in two layers (even bonds, then odd
//! bonds) and finishes with `RX(θ_x)` on every qubit, where
//! `θ_z = 2·J·t_max/N` and `θ_x = 2·Γ·t_max/N`. The twisted bond carries
//! `−θ_z`.

mod compiled;
mod qasm;

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ring::{BondConvention, RingConfig};

pub use compiled::LayeredStep;
pub use qasm::{export_qasm, parse_qasm, QasmVersion};

/// A gate from the benchmark's restricted set. Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    Rx { qubit: usize, theta: f64 },
    Rz { qubit: usize, theta: f64 },
    Cnot { control: usize, target: usize },
}

/// Gate kinds, used for counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    X,
    Z,
    Rx,
    Rz,
    Cnot,
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::X(_) => GateKind::X,
            Gate::Z(_) => GateKind::Z,
            Gate::Rx { .. } => GateKind::Rx,
            Gate::Rz { .. } => GateKind::Rz,
            Gate::Cnot { .. } => GateKind::Cnot,
        }
    }

    /// Largest qubit index touched.
    fn max_qubit(&self) -> usize {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) => q,
            Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } => qubit,
            Gate::Cnot { control, target } => control.max(target),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let q = self.max_qubit();
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits,
            });
        }
        match *self {
            Gate::Cnot { control, target } if control == target => Err(Error::InvalidGate(
                format!("CNOT control and target are both qubit {control}"),
            )),
            Gate::Rx { theta, .. } | Gate::Rz { theta, .. } if !theta.is_finite() => {
                Err(Error::InvalidGate(format!("non-finite rotation angle {theta}")))
            }
            _ => Ok(()),
        }
    }
}

/// Descriptive metadata for a builder-generated circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CircuitMeta {
    pub size: usize,
    pub with_vison: bool,
    pub t_max: f64,
    pub n_steps: usize,
    pub theta_z: f64,
    pub theta_x: f64,
}

/// Ordered gate list over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    meta: Option<CircuitMeta>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
            meta: None,
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate(n_qubits)?;
        }
        Ok(Circuit {
            n_qubits,
            gates,
            meta: None,
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::InvalidGate(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn meta(&self) -> Option<&CircuitMeta> {
        self.meta.as_ref()
    }

    pub fn set_meta(&mut self, meta: Option<CircuitMeta>) {
        self.meta = meta;
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind() == kind).count()
    }
}

/// Rotation angles of one Trotter step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterAngles {
    pub theta_z: f64,
    pub theta_x: f64,
}

impl TrotterAngles {
    pub fn new(config: &RingConfig, t_max: f64, n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::InvalidConfig("number of Trotter steps must be >= 1".into()));
        }
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(Error::InvalidConfig(format!("t_max must be finite and >= 0, got {t_max}")));
        }
        let n = n_steps as f64;
        Ok(TrotterAngles {
            theta_z: 2.0 * config.coupling * t_max / n,
            theta_x: 2.0 * config.field * t_max / n,
        })
    }
}

/// GHZ preparation: `H(0)`, an optional `Z(0)` for the vison, then a CNOT
/// chain `(i, i+1)`.
pub fn build_ghz_prep(size: usize, with_vison: bool) -> Result<Circuit> {
    if size < 4 || size % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "GHZ preparation needs an even ring size >= 4, got {size}"
        )));
    }
    let mut c = Circuit::new(size);
    c.push(Gate::H(0))?;
    if with_vison {
        c.push(Gate::Z(0))?;
    }
    for i in 0..size - 1 {
        c.push(Gate::Cnot {
            control: i,
            target: i + 1,
        })?;
    }
    Ok(c)
}

fn push_bond_block(c: &mut Circuit, size: usize, bond: usize, theta_z: f64) -> Result<()> {
    let (a, b) = BondConvention::bond_qubits(size, bond);
    let theta = if bond == BondConvention::TWIST_BOND {
        -theta_z
    } else {
        theta_z
    };
    c.push(Gate::Cnot {
        control: a,
        target: b,
    })?;
    c.push(Gate::Rz { qubit: b, theta })?;
    c.push(Gate::Cnot {
        control: a,
        target: b,
    })
}

/// One Trotter step: even-bond ZZ layer, odd-bond ZZ layer, RX layer.
pub fn build_trotter_step(config: &RingConfig, t_max: f64, n_steps: usize) -> Result<Circuit> {
    config.validate_for_circuit()?;
    let angles = TrotterAngles::new(config, t_max, n_steps)?;
    let size = config.size;
    let mut c = Circuit::new(size);
    for bond in (0..size).step_by(2) {
        push_bond_block(&mut c, size, bond, angles.theta_z)?;
    }
    for bond in (1..size).step_by(2) {
        push_bond_block(&mut c, size, bond, angles.theta_z)?;
    }
    for q in 0..size {
        c.push(Gate::Rx {
            qubit: q,
            theta: angles.theta_x,
        })?;
    }
    Ok(c)
}

/// GHZ preparation followed by `n_steps` Trotter steps, with metadata.
pub fn build_full_circuit(
    config: &RingConfig,
    t_max: f64,
    n_steps: usize,
    with_vison: bool,
) -> Result<Circuit> {
    config.validate_for_circuit()?;
    let angles = TrotterAngles::new(config, t_max, n_steps)?;
    let mut c = build_ghz_prep(config.size, with_vison)?;
    let step = build_trotter_step(config, t_max, n_steps)?;
    c.gates.reserve(step.len() * n_steps);
    for _ in 0..n_steps {
        c.extend(&step)?;
    }
    c.meta = Some(CircuitMeta {
        size: config.size,
        with_vison,
        t_max,
        n_steps,
        theta_z: angles.theta_z,
        theta_x: angles.theta_x,
    });
    Ok(c)
}
