// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Noiseless pure-state simulation.
//!
//! Basis index bit `i` (least significant = qubit 0) is qubit `i`'s Z value.
//! `RX(θ) = e^{−iθX/2}`, `RZ(θ) = e^{−iθZ/2}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{build_ghz_prep, build_trotter_step, Circuit, Gate, LayeredStep};
use crate::error::{Error, Result};
use crate::evolve::{Propagator, Stepper};
use crate::math::{abs, cos, norm_sqr, sin, sqrt, C64};
use crate::ring::{spinon_expectations, Hamiltonian, RegisterState, RingConfig};
use crate::shots::ShotCounts;
use crate::trace::{Backend, OccupationTrace, TraceLabels};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

/// Visit every amplitude pair `(i, i | bit)` with the bit clear in `i`.
#[inline]
fn for_pairs(amps: &mut [C64], qubit: usize, mut f: impl FnMut(&mut C64, &mut C64)) {
    let bit = 1usize << qubit;
    for block in amps.chunks_exact_mut(2 * bit) {
        let (lo, hi) = block.split_at_mut(bit);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a, b);
        }
    }
}

impl StateVector {
    pub const MAX_QUBITS: usize = 24;

    fn check_size(n_qubits: usize) -> Result<()> {
        if n_qubits > Self::MAX_QUBITS {
            return Err(Error::Capacity {
                what: "state vector",
                limit: Self::MAX_QUBITS,
                requested: n_qubits,
                hint: "",
            });
        }
        Ok(())
    }

    /// `|0…0⟩`
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        Self::check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidConfig(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// `(|0…0⟩ ± |1…1⟩)/√2`, minus sign with the vison.
    pub fn ghz(n_qubits: usize, with_vison: bool) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidConfig("GHZ state needs at least one qubit".into()));
        }
        let mut s = Self::zero(n_qubits)?;
        let r = 1.0 / sqrt(2.0);
        s.amps[0] = C64::new(r, 0.0);
        let last = s.amps.len() - 1;
        s.amps[last] = C64::new(if with_vison { -r } else { r }, 0.0);
        Ok(s)
    }

    /// Wrap amplitudes; the length must be a power of two and the norm 1.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "amplitude count {dim} is not a power of two"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        Self::check_size(n_qubits)?;
        let norm = norm_sqr(&amps);
        if abs(norm - 1.0) > 1e-10 {
            return Err(Error::InvalidConfig(format!("state norm² is {norm}, expected 1")));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        sqrt(norm_sqr(&self.amps))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::H(q) => {
                let r = 1.0 / sqrt(2.0);
                for_pairs(&mut self.amps, q, |a, b| {
                    let (x, y) = (*a, *b);
                    *a = (x + y) * r;
                    *b = (x - y) * r;
                });
            }
            Gate::X(q) => self.apply_pauli(q, Pauli::X),
            Gate::Z(q) => self.apply_pauli(q, Pauli::Z),
            Gate::Rx { qubit, theta } => self.apply_rx(qubit, theta),
            Gate::Rz { qubit, theta } => {
                let lo = C64::new(cos(theta / 2.0), -sin(theta / 2.0));
                let hi = lo.conj();
                for_pairs(&mut self.amps, qubit, |a, b| {
                    *a *= lo;
                    *b *= hi;
                });
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (1usize << control, 1usize << target);
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
        }
        Ok(())
    }

    fn apply_rx(&mut self, qubit: usize, theta: f64) {
        let c = cos(theta / 2.0);
        let s = sin(theta / 2.0);
        for_pairs(&mut self.amps, qubit, |a, b| {
            let (x, y) = (*a, *b);
            // [[c, −is], [−is, c]]
            *a = C64::new(c * x.re + s * y.im, c * x.im - s * y.re);
            *b = C64::new(c * y.re + s * x.im, c * y.im - s * x.re);
        });
    }

    /// Apply a Pauli to one qubit. Panics if `qubit` is out of range.
    pub fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        assert!(qubit < self.n_qubits, "qubit {qubit} out of range");
        match pauli {
            Pauli::X => for_pairs(&mut self.amps, qubit, core::mem::swap),
            Pauli::Y => for_pairs(&mut self.amps, qubit, |a, b| {
                let (x, y) = (*a, *b);
                *a = C64::new(y.im, -y.re); // −i·y
                *b = C64::new(-x.im, x.re); // i·x
            }),
            Pauli::Z => for_pairs(&mut self.amps, qubit, |_, b| *b = -*b),
        }
    }

    /// Apply a compiled Trotter step: diagonal ZZ phases, then RX on all
    /// qubits.
    pub fn apply_layered_step(&mut self, step: &LayeredStep) -> Result<()> {
        if step.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                qubits: step.n_qubits(),
                got: self.amps.len(),
            });
        }
        for (a, p) in self.amps.iter_mut().zip(step.phases()) {
            *a *= p;
        }
        for q in 0..self.n_qubits {
            self.apply_rx(q, step.rx_theta());
        }
        Ok(())
    }
}

impl RegisterState for StateVector {
    fn num_qubits(&self) -> usize {
        self.n_qubits
    }

    fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    fn vison_expectation(&self) -> f64 {
        let all = self.amps.len() - 1;
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| (a.conj() * self.amps[i ^ all]).re)
            .sum()
    }
}

/// Apply `circuit` to `initial` (default `|0…0⟩`).
pub fn run_circuit(circuit: &Circuit, initial: Option<StateVector>) -> Result<StateVector> {
    let mut state = match initial {
        Some(s) => {
            if s.n_qubits != circuit.n_qubits() {
                return Err(Error::DimensionMismatch {
                    qubits: circuit.n_qubits(),
                    got: s.dimension(),
                });
            }
            s
        }
        None => StateVector::zero(circuit.n_qubits())?,
    };
    for g in circuit.gates() {
        state.apply_gate(g)?;
    }
    Ok(state)
}

/// `e^{−iHt}|ψ⟩` for the ring Hamiltonian of `config`.
pub fn exact_evolve(config: &RingConfig, state: &StateVector, t: f64) -> Result<StateVector> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let h = Hamiltonian::new(config)?;
    if state.n_qubits != config.size {
        return Err(Error::DimensionMismatch {
            qubits: config.size,
            got: state.dimension(),
        });
    }
    let mut out = state.clone();
    Propagator::new(&h).evolve(&mut out.amps, t);
    Ok(out)
}

fn check_grid(t_max: f64, n_steps: usize) -> Result<f64> {
    if n_steps == 0 {
        return Err(Error::InvalidConfig("number of steps must be >= 1".into()));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidConfig(format!("t_max must be finite and > 0, got {t_max}")));
    }
    Ok(t_max / n_steps as f64)
}

pub(crate) fn record<S: RegisterState>(trace: &mut OccupationTrace, time: f64, state: &S) -> Result<()> {
    let occ = spinon_expectations(state, trace.labels.size)?;
    trace.push(time, occ, state.vison_expectation());
    Ok(())
}

/// Exact (continuous-time) evolution of the GHZ state, recorded on the grid
/// `k·t_max/N`, `k = 0..N`.
pub fn exact_trace(
    config: &RingConfig,
    t_max: f64,
    n_steps: usize,
    with_vison: bool,
) -> Result<OccupationTrace> {
    let dt = check_grid(t_max, n_steps)?;
    let h = Hamiltonian::new(config)?;
    let mut state = StateVector::ghz(config.size, with_vison)?;
    let mut trace = OccupationTrace::new(TraceLabels {
        with_vison,
        backend: Backend::Exact,
        size: config.size,
        noise_rate: 0.0,
        n_steps,
    });
    record(&mut trace, 0.0, &state)?;
    let mut stepper = Stepper::new(&h, dt);
    for k in 1..=n_steps {
        stepper.step(&mut state.amps);
        record(&mut trace, k as f64 * dt, &state)?;
    }
    Ok(trace)
}

/// The benchmark circuit's state after GHZ preparation, and its compiled
/// Trotter step.
pub(crate) fn prepare(
    config: &RingConfig,
    t_max: f64,
    n_steps: usize,
    with_vison: bool,
) -> Result<(StateVector, LayeredStep)> {
    config.validate_for_circuit()?;
    check_grid(t_max, n_steps)?;
    let state = run_circuit(&build_ghz_prep(config.size, with_vison)?, None)?;
    let step = LayeredStep::compile(&build_trotter_step(config, t_max, n_steps)?)?;
    Ok((state, step))
}

/// Noiseless Trotter circuit: GHZ preparation then `N` steps, recorded after
/// each step at `k·t_max/N`.
pub fn trotter_trace(
    config: &RingConfig,
    t_max: f64,
    n_steps: usize,
    with_vison: bool,
) -> Result<OccupationTrace> {
    let (mut state, step) = prepare(config, t_max, n_steps, with_vison)?;
    let dt = t_max / n_steps as f64;
    let mut trace = OccupationTrace::new(TraceLabels {
        with_vison,
        backend: Backend::Statevector,
        size: config.size,
        noise_rate: 0.0,
        n_steps,
    });
    record(&mut trace, 0.0, &state)?;
    for k in 1..=n_steps {
        state.apply_layered_step(&step)?;
        record(&mut trace, k as f64 * dt, &state)?;
    }
    Ok(trace)
}

/// Draw `n_shots` Z-basis bitstrings by the Born rule with a seeded
/// ChaCha8 generator.
pub fn sample_shots(state: &StateVector, n_shots: u64, seed: u64) -> Result<ShotCounts> {
    ShotCounts::sample(&state.probabilities(), state.n_qubits, n_shots, seed)
}
