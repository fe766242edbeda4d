// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Open-system simulation with an isotropic, uniform depolarizing bath.
//!
//! The dissipator `γ Σ_i (XρX + YρY + ZρZ − 3ρ)` integrates over a time `dt`
//! to the per-qubit channel `ρ → (1−λ)ρ + λ·Tr_i(ρ)⊗I/2` with
//! `λ = 1 − e^{−4γ·dt}`. The Trotter backends apply that channel to every
//! qubit after each step. The fine reference alternates exact `e^{−iH·dt}`
//! with the channel on a small `dt`.

mod density;
mod trajectory;

pub use density::DensityMatrix;
pub use trajectory::{shot_counts_noisy, trajectory_trace};

use alloc::format;

use crate::error::{Error, Result};
use crate::evolve::DenseUnitary;
use crate::math::{ceil, exp};
use crate::ring::{Hamiltonian, RingConfig};
use crate::statevector::{prepare, record, StateVector};
use crate::trace::{Backend, OccupationTrace, TraceLabels};

/// Isotropic depolarizing noise of Lindblad rate `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub gamma: f64,
}

impl NoiseModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidConfig(format!("noise rate must be finite and >= 0, got {gamma}")));
        }
        Ok(NoiseModel { gamma })
    }

    /// Channel strength for an interval `dt`.
    pub fn lambda(&self, dt: f64) -> f64 {
        1.0 - exp(-4.0 * self.gamma * dt)
    }
}

/// Registers up to this size get the eigenvalue check after every step.
const EIGEN_EVERY_STEP_QUBITS: usize = 4;

/// Density-matrix run of the benchmark circuit with one depolarizing
/// channel per qubit after each Trotter step.
pub fn lindblad_trotter_trace(
    config: &RingConfig,
    t_max: f64,
    n_steps: usize,
    with_vison: bool,
) -> Result<OccupationTrace> {
    config.validate_for_circuit()?;
    if config.size > DensityMatrix::MAX_QUBITS {
        return Err(Error::Capacity {
            what: "density-matrix backend",
            limit: DensityMatrix::MAX_QUBITS,
            requested: config.size,
            hint: "; use the trajectory backend",
        });
    }
    let (state, step) = prepare(config, t_max, n_steps, with_vison)?;
    let dt = t_max / n_steps as f64;
    let lambda = NoiseModel::new(config.noise_rate)?.lambda(dt);
    let mut rho = DensityMatrix::from_pure(&state)?;
    let mut trace = OccupationTrace::new(TraceLabels {
        with_vison,
        backend: Backend::DensityMatrix,
        size: config.size,
        noise_rate: config.noise_rate,
        n_steps,
    });
    record(&mut trace, 0.0, &rho)?;
    for k in 1..=n_steps {
        rho.apply_layered_step(&step, lambda)?;
        rho.check_physical(k, config.size <= DensityMatrix::EIGEN_MAX_QUBITS)?;
        record(&mut trace, k as f64 * dt, &rho)?;
    }
    Ok(trace)
}

/// Continuous-time reference: exact `e^{−iH·dt}` then the channel with
/// `λ(dt)`, repeated up to `t_total`. First order in `dt`.
///
/// Works down to `L = 2`, where the GHZ state is prepared directly. The step
/// is shrunk so that it divides `t_total` exactly.
pub fn fine_lindblad_trace(
    config: &RingConfig,
    t_total: f64,
    dt: f64,
    with_vison: bool,
) -> Result<OccupationTrace> {
    config.validate()?;
    if config.size > DenseUnitary::MAX_QUBITS {
        return Err(Error::Capacity {
            what: "fine Lindblad reference",
            limit: DenseUnitary::MAX_QUBITS,
            requested: config.size,
            hint: "; use lindblad_trotter_trace",
        });
    }
    if !(t_total.is_finite() && t_total > 0.0) {
        return Err(Error::InvalidConfig(format!("total time must be finite and > 0, got {t_total}")));
    }
    if !(dt > 0.0 && dt <= 0.1 / config.field) {
        return Err(Error::InvalidConfig(format!(
            "dt must lie in (0, 0.1/Gamma] = (0, {}], got {dt}",
            0.1 / config.field
        )));
    }
    let n_steps = ceil(t_total / dt - 1e-9).max(1.0) as usize;
    let dt = t_total / n_steps as f64;
    let lambda = NoiseModel::new(config.noise_rate)?.lambda(dt);
    let h = Hamiltonian::new(config)?;
    let u = DenseUnitary::new(&h, dt);
    let mut rho = DensityMatrix::from_pure(&StateVector::ghz(config.size, with_vison)?)?;
    let mut trace = OccupationTrace::new(TraceLabels {
        with_vison,
        backend: Backend::FineLindblad,
        size: config.size,
        noise_rate: config.noise_rate,
        n_steps,
    });
    record(&mut trace, 0.0, &rho)?;
    // The eigenvalue check is thinned out on mid-size registers.
    let eigen_stride = if config.size <= EIGEN_EVERY_STEP_QUBITS { 1 } else { 16 };
    for k in 1..=n_steps {
        rho.apply_dense(&u);
        rho.depolarize_all(lambda)?;
        let eigen = k % eigen_stride == 0 || k == n_steps;
        rho.check_physical(k, eigen)?;
        record(&mut trace, k as f64 * dt, &rho)?;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests;
