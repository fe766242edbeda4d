// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Many-body coherence benchmark built on a twisted transverse-field Ising
//! ring.
//!
//! A single spinon (domain wall) is launched at the antiferromagnetic bond
//! and allowed to hop around the ring. With a vison threading the ring
//! (`B = ∏σˣ = −1`) the two paths to the opposite site interfere
//! destructively; without it they add up. The contrast between the two
//! initial states, normalized by its noiseless value, is the coherence ratio
//! `R_γ(L)`, and the largest ring passing a threshold is the Q-grade.
//!
//! The crate is `no_std` + `alloc`. It contains:
//!
//! * [`ring`]: ring geometry, spinon/vison observables, the Hamiltonian.
//! * [`circuit`]: gate IR, the benchmark circuit builders and OpenQASM I/O.
//! * [`statevector`]: noiseless simulation, exact evolution, shot sampling.
//! * [`noisy`]: density-matrix and Pauli-trajectory simulation of isotropic
//!   depolarizing noise.
//! * [`oracles`]: closed-form references (two-qubit decoherence, tight-binding
//!   ring).
//! * [`metrics`]: `t_max`/`N_opt` calibration, Trotter error, `R`, `ΔR`, and
//!   the Q-grade.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![deny(missing_debug_implementations)]

extern crate alloc;

pub mod circuit;
mod error;
mod evolve;
mod linalg;
mod math;
pub mod metrics;
pub mod noisy;
pub mod oracles;
pub mod ring;
pub mod shots;
pub mod statevector;
pub mod trace;

pub use crate::circuit::{Circuit, CircuitMeta, Gate};
pub use crate::error::{Error, Result};
pub use crate::math::C64;
pub use crate::metrics::{CalibrationRecord, QGrade};
pub use crate::noisy::DensityMatrix;
pub use crate::ring::{BondConvention, Hamiltonian, RegisterState, RingConfig};
pub use crate::shots::ShotCounts;
pub use crate::statevector::StateVector;
pub use crate::trace::{Backend, OccupationTrace};
