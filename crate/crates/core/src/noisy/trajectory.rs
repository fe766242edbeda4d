// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Pauli-trajectory unraveling of the depolarizing channel.
//!
//! `(1−λ)ρ + λI/2 = (1 − 3λ/4)ρ + (λ/4)(XρX + YρY + ZρZ)`, so each qubit
//! suffers a uniformly chosen Pauli with probability `3λ/4` after every
//! step. Trajectory `k` draws from ChaCha8 seeded with the base seed on
//! stream `k`, so results do not depend on execution order.
//!
//! Every qubit-step consumes the same two draws whether or not an error
//! fires. Runs with the same seed at different `γ` therefore share their
//! random numbers, and the error locations at a larger `γ` are a superset
//! of those at a smaller one.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DensityMatrix, NoiseModel};
use crate::circuit::LayeredStep;
use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::ring::{spinon_expectations, RegisterState, RingConfig};
use crate::shots::{Sampler, ShotCounts};
use crate::statevector::{prepare, Pauli, StateVector};
use crate::trace::{Backend, OccupationTrace, TraceLabels};

fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Run one trajectory, calling `visit(k, state)` after step `k = 1..=N`.
fn run_trajectory(
    start: &StateVector,
    step: &LayeredStep,
    n_steps: usize,
    p_error: f64,
    rng: &mut ChaCha8Rng,
    mut visit: impl FnMut(usize, &StateVector) -> Result<()>,
) -> Result<StateVector> {
    const PAULIS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut state = start.clone();
    for k in 1..=n_steps {
        state.apply_layered_step(step)?;
        for q in 0..state.n_qubits() {
            let u = rng.random::<f64>();
            let pauli = PAULIS[rng.random_range(0..3)];
            if u < p_error {
                state.apply_pauli(q, pauli);
            }
        }
        visit(k, &state)?;
    }
    Ok(state)
}

/// Mean occupations over `n_traj` stochastic trajectories, with standard
/// errors of the mean.
pub fn trajectory_trace(
    config: &RingConfig,
    t_max: f64,
    n_steps: usize,
    with_vison: bool,
    n_traj: usize,
    seed: u64,
) -> Result<OccupationTrace> {
    if n_traj == 0 {
        return Err(Error::InvalidConfig("need at least one trajectory".into()));
    }
    let (start, step) = prepare(config, t_max, n_steps, with_vison)?;
    let size = config.size;
    let dt = t_max / n_steps as f64;
    let p_error = 0.75 * NoiseModel::new(config.noise_rate)?.lambda(dt);

    let rows = n_steps + 1;
    let mut sum = vec![vec![0.0; size]; rows];
    let mut sum_sq = vec![vec![0.0; size]; rows];
    let mut vison = vec![0.0; rows];
    let first = spinon_expectations(&start, size)?;
    for traj in 0..n_traj {
        let mut rng = trajectory_rng(seed, traj as u64);
        let mut add = |k: usize, occ: &[f64], b: f64| {
            for s in 0..size {
                sum[k][s] += occ[s];
                sum_sq[k][s] += occ[s] * occ[s];
            }
            vison[k] += b;
        };
        add(0, &first, start.vison_expectation());
        run_trajectory(&start, &step, n_steps, p_error, &mut rng, |k, state| {
            add(k, &spinon_expectations(state, size)?, state.vison_expectation());
            Ok(())
        })?;
    }

    let n = n_traj as f64;
    let mut trace = OccupationTrace::new(TraceLabels {
        with_vison,
        backend: Backend::Trajectory,
        size,
        noise_rate: config.noise_rate,
        n_steps,
    });
    let mut stderr = Vec::with_capacity(rows);
    for k in 0..rows {
        let mean: Vec<f64> = sum[k].iter().map(|x| x / n).collect();
        let err = sum_sq[k]
            .iter()
            .zip(&mean)
            .map(|(sq, m)| {
                if n_traj < 2 {
                    0.0
                } else {
                    let var = (sq / n - m * m).max(0.0) * n / (n - 1.0);
                    sqrt(var / n)
                }
            })
            .collect();
        trace.push(k as f64 * dt, mean, vison[k] / n);
        stderr.push(err);
    }
    trace.stderr = Some(stderr);
    Ok(trace)
}

/// Final-state bitstrings of the noisy circuit.
///
/// Up to [`DensityMatrix::MAX_QUBITS`] the density-matrix diagonal is
/// sampled directly. Larger rings draw one bitstring from each of `shots`
/// independent trajectories.
pub fn shot_counts_noisy(
    config: &RingConfig,
    t_max: f64,
    n_steps: usize,
    with_vison: bool,
    shots: u64,
    seed: u64,
) -> Result<ShotCounts> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be positive".into()));
    }
    let size = config.size;
    if size <= DensityMatrix::MAX_QUBITS {
        let trace_probs = {
            let (state, step) = prepare(config, t_max, n_steps, with_vison)?;
            let lambda = NoiseModel::new(config.noise_rate)?.lambda(t_max / n_steps as f64);
            let mut rho = DensityMatrix::from_pure(&state)?;
            for k in 1..=n_steps {
                rho.apply_layered_step(&step, lambda)?;
                rho.check_physical(k, false)?;
            }
            rho.diagonal()
        };
        return ShotCounts::sample(&trace_probs, size, shots, seed);
    }
    let (start, step) = prepare(config, t_max, n_steps, with_vison)?;
    let p_error = 0.75 * NoiseModel::new(config.noise_rate)?.lambda(t_max / n_steps as f64);
    let mut counts = ShotCounts::new(size);
    for shot in 0..shots {
        let mut rng = trajectory_rng(seed, shot);
        let last = run_trajectory(&start, &step, n_steps, p_error, &mut rng, |_, _| Ok(()))?;
        let index = Sampler::new(&last.probabilities()).draw(&mut rng);
        counts.record(index, 1);
    }
    Ok(counts)
}
