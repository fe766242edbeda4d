// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

use super::*;
use crate::circuit::{build_full_circuit, build_trotter_step, LayeredStep};
use crate::math::C64;
use crate::oracles::two_qubit_occupations;
use crate::ring::RegisterState;
use crate::statevector::{exact_trace, run_circuit, trotter_trace};
use alloc::vec::Vec;

fn single_qubit_bloch(rho: &DensityMatrix) -> [f64; 3] {
    let (r01, r00, r11) = (rho.get(0, 1), rho.get(0, 0).re, rho.get(1, 1).re);
    [2.0 * r01.re, -2.0 * r01.im, r00 - r11]
}

fn plus_state() -> DensityMatrix {
    let mut s = StateVector::zero(1).unwrap();
    s.apply_gate(&crate::Gate::H(0)).unwrap();
    DensityMatrix::from_pure(&s).unwrap()
}

#[test]
fn lambda_mapping() {
    let m = NoiseModel::new(0.01).unwrap();
    assert_eq!(m.lambda(0.0), 0.0);
    assert!((m.lambda(2.0) - (1.0 - (-0.08f64).exp())).abs() < 1e-15);
    assert!(m.lambda(1e6) < 1.0 + 1e-15);
    assert!(NoiseModel::new(-0.1).is_err());
}

#[test]
fn depolarize_examples() {
    let mut rho = plus_state();
    let before = rho.clone();
    rho.depolarize_qubit(0, 0.0).unwrap();
    assert_eq!(rho, before);

    let mut zero = DensityMatrix::from_pure(&StateVector::zero(1).unwrap()).unwrap();
    zero.depolarize_qubit(0, 1.0).unwrap();
    assert_eq!(zero, DensityMatrix::maximally_mixed(1).unwrap());

    let mut rho = plus_state();
    rho.depolarize_qubit(0, 0.3).unwrap();
    let b = single_qubit_bloch(&rho);
    assert!((b[0] - 0.7).abs() < 1e-15 && b[1].abs() < 1e-15 && b[2].abs() < 1e-15);
    assert!(rho.depolarize_qubit(1, 0.1).is_err());
    assert!(rho.depolarize_qubit(0, 1.5).is_err());
}

/// RK4 integration of `dρ/dt = γ(XρX + YρY + ZρZ − 3ρ)` for one qubit.
fn lindblad_single_qubit(rho0: [[C64; 2]; 2], gamma: f64, t: f64) -> [[C64; 2]; 2] {
    let i = C64::new(0.0, 1.0);
    let o = C64::new(0.0, 0.0);
    let paulis = [
        [[o, C64::new(1.0, 0.0)], [C64::new(1.0, 0.0), o]],
        [[o, -i], [i, o]],
        [[C64::new(1.0, 0.0), o], [o, C64::new(-1.0, 0.0)]],
    ];
    let mul = |a: [[C64; 2]; 2], b: [[C64; 2]; 2]| {
        let mut c = [[o; 2]; 2];
        for r in 0..2 {
            for k in 0..2 {
                c[r][k] = a[r][0] * b[0][k] + a[r][1] * b[1][k];
            }
        }
        c
    };
    let deriv = |r: [[C64; 2]; 2]| {
        let mut d = [[o; 2]; 2];
        for p in paulis {
            let prp = mul(mul(p, r), p);
            for a in 0..2 {
                for b in 0..2 {
                    d[a][b] += prp[a][b] * gamma;
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                d[a][b] -= r[a][b] * (3.0 * gamma);
            }
        }
        d
    };
    let axpy = |r: [[C64; 2]; 2], k: [[C64; 2]; 2], h: f64| {
        let mut out = r;
        for a in 0..2 {
            for b in 0..2 {
                out[a][b] += k[a][b] * h;
            }
        }
        out
    };
    let steps = 2000;
    let h = t / steps as f64;
    let mut r = rho0;
    for _ in 0..steps {
        let k1 = deriv(r);
        let k2 = deriv(axpy(r, k1, h / 2.0));
        let k3 = deriv(axpy(r, k2, h / 2.0));
        let k4 = deriv(axpy(r, k3, h));
        for a in 0..2 {
            for b in 0..2 {
                r[a][b] += (k1[a][b] + k2[a][b] * 2.0 + k3[a][b] * 2.0 + k4[a][b]) * (h / 6.0);
            }
        }
    }
    r
}

#[test]
fn channel_matches_integrated_dissipator() {
    let gamma = 0.02;
    let t = 7.0;
    let rho = plus_state();
    let rho0 = [[rho.get(0, 0), rho.get(0, 1)], [rho.get(1, 0), rho.get(1, 1)]];
    let integrated = lindblad_single_qubit(rho0, gamma, t);
    let mut channel = rho;
    channel.depolarize_qubit(0, NoiseModel::new(gamma).unwrap().lambda(t)).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            assert!((channel.get(a, b) - integrated[a][b]).norm() < 1e-12);
        }
    }
    // Bloch norm decays as e^{−4γt}.
    let bloch = single_qubit_bloch(&channel);
    assert!((bloch[0] - (-4.0 * gamma * t).exp()).abs() < 1e-12);
}

#[test]
fn gates_on_density_matrix_match_pure_states() {
    let cfg = RingConfig::new(4);
    let c = build_full_circuit(&cfg, 9.0, 3, true).unwrap();
    let psi = run_circuit(&c, None).unwrap();
    let mut rho = DensityMatrix::from_pure(&StateVector::zero(4).unwrap()).unwrap();
    for g in c.gates() {
        rho.apply_gate(g).unwrap();
    }
    let expect = DensityMatrix::from_pure(&psi).unwrap();
    for (a, b) in rho.as_slice().iter().zip(expect.as_slice()) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn layered_channel_matches_gatewise_channel() {
    let cfg = RingConfig::new(4);
    let step = build_trotter_step(&cfg, 16.0, 6).unwrap();
    let layered = LayeredStep::compile(&step).unwrap();
    let start = DensityMatrix::from_pure(&StateVector::ghz(4, false).unwrap()).unwrap();
    let mut fast = start.clone();
    fast.apply_layered_step(&layered, 0.2).unwrap();
    let mut slow = start;
    for g in step.gates() {
        slow.apply_gate(g).unwrap();
    }
    slow.depolarize_all(0.2).unwrap();
    for (a, b) in fast.as_slice().iter().zip(slow.as_slice()) {
        assert!((a - b).norm() < 1e-13);
    }
}

#[test]
fn physical_checks() {
    let mixed = DensityMatrix::maximally_mixed(3).unwrap();
    assert!((mixed.min_eigenvalue().unwrap() - 0.125).abs() < 1e-14);
    assert!(mixed.check_physical(0, true).is_ok());
    assert_eq!(mixed.vison_expectation(), 0.0);
    let big = DensityMatrix::maximally_mixed(7).unwrap();
    assert!(big.min_eigenvalue().is_err());
    assert!(DensityMatrix::maximally_mixed(13).is_err());
}

#[test]
fn noiseless_density_matrix_equals_statevector() {
    let cfg = RingConfig::new(6);
    for vison in [false, true] {
        let dm = lindblad_trotter_trace(&cfg, 21.0, 8, vison).unwrap();
        let sv = trotter_trace(&cfg, 21.0, 8, vison).unwrap();
        for (a, b) in dm.occupations.iter().flatten().zip(sv.occupations.iter().flatten()) {
            assert!((a - b).abs() <= 1e-10);
        }
        for (a, b) in dm.vison.iter().zip(&sv.vison) {
            assert!((a - b).abs() <= 1e-10);
        }
    }
}

#[test]
fn strong_noise_drives_ring_to_half_filling() {
    let cfg = RingConfig::new(6).with_noise_rate(0.05);
    let tr = lindblad_trotter_trace(&cfg, 100.0, 40, false).unwrap();
    assert!((tr.total.last().unwrap() - 3.0).abs() < 0.05);
    tr.validate(1e-10).unwrap();
}

#[test]
fn weak_noise_keeps_contrast() {
    let cfg = RingConfig::new(6).with_noise_rate(0.002);
    let v = lindblad_trotter_trace(&cfg, 21.0, 8, true).unwrap();
    let nv = lindblad_trotter_trace(&cfg, 21.0, 8, false).unwrap();
    assert!((v.site(3)[8] - nv.site(3)[8]).abs() > 0.2);
}

#[test]
fn capacity_errors_point_to_trajectories() {
    let cfg = RingConfig::new(14);
    match lindblad_trotter_trace(&cfg, 40.0, 16, false) {
        Err(Error::Capacity { limit: 12, hint, .. }) => assert!(hint.contains("trajectory")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn fine_reference_on_two_sites_matches_closed_form() {
    let cfg = RingConfig::new(2).with_noise_rate(0.008);
    for vison in [false, true] {
        let tr = fine_lindblad_trace(&cfg, 30.0, 0.01, vison).unwrap();
        for (k, &t) in tr.times.iter().enumerate().step_by(50) {
            let (left, right) = two_qubit_occupations(0.1, 0.008, t, vison).unwrap();
            assert!((tr.occupations[k][0] - left).abs() <= 1e-3);
            assert!((tr.occupations[k][1] - right).abs() <= 1e-3);
        }
    }
}

#[test]
fn noiseless_fine_reference_equals_exact_evolution() {
    let cfg = RingConfig::new(4);
    let fine = fine_lindblad_trace(&cfg, 16.0, 0.5, false).unwrap();
    let exact = exact_trace(&cfg, 16.0, 32, false).unwrap();
    for (a, b) in fine.occupations.iter().flatten().zip(exact.occupations.iter().flatten()) {
        assert!((a - b).abs() <= 1e-8);
    }
    assert!(fine_lindblad_trace(&cfg, 16.0, 2.0, false).is_err());
}

#[test]
fn fine_reference_converges_first_order() {
    // Splitting e^{−iH·dt} from the channel is inexact once ZZ terms are
    // present, so the error at fixed t shrinks linearly in dt.
    let cfg = RingConfig::new(4).with_noise_rate(0.05);
    let t = 8.0;
    let site = |dt: f64| fine_lindblad_trace(&cfg, t, dt, false).unwrap().site(2).pop().unwrap();
    let reference = site(0.0025);
    let e1 = (site(0.04) - reference).abs();
    let e2 = (site(0.02) - reference).abs();
    let e3 = (site(0.01) - reference).abs();
    // Halving dt roughly halves the error.
    let r1 = e1 / e2;
    let r2 = e2 / e3;
    assert!(r1 > 1.6 && r1 < 2.6, "ratios {r1} {r2} ({e1:e} {e2:e} {e3:e})");
    assert!(r2 > 1.4 && r2 < 2.8, "ratios {r1} {r2} ({e1:e} {e2:e} {e3:e})");
}

#[test]
fn trajectories_without_noise_are_the_noiseless_run() {
    let cfg = RingConfig::new(6);
    let traj = trajectory_trace(&cfg, 21.0, 8, false, 3, 5).unwrap();
    let sv = trotter_trace(&cfg, 21.0, 8, false).unwrap();
    for (a, b) in traj.occupations.iter().flatten().zip(sv.occupations.iter().flatten()) {
        assert!((a - b).abs() <= 1e-12);
    }
    assert!(traj.stderr.unwrap().iter().flatten().all(|&e| e <= 1e-7));
}

#[test]
fn trajectories_are_deterministic() {
    let cfg = RingConfig::new(4).with_noise_rate(0.01);
    let a = trajectory_trace(&cfg, 16.0, 6, true, 50, 11).unwrap();
    let b = trajectory_trace(&cfg, 16.0, 6, true, 50, 11).unwrap();
    assert_eq!(a, b);
    let c = trajectory_trace(&cfg, 16.0, 6, true, 50, 12).unwrap();
    assert_ne!(a, c);
}

#[test]
fn trajectory_estimator_is_unbiased() {
    let cfg = RingConfig::new(4).with_noise_rate(0.01);
    let dm = lindblad_trotter_trace(&cfg, 16.0, 6, false).unwrap();
    let tj = trajectory_trace(&cfg, 16.0, 6, false, 10_000, 3).unwrap();
    let se = tj.stderr.as_ref().unwrap();
    for k in 1..dm.len() {
        for s in 0..4 {
            let diff = (dm.occupations[k][s] - tj.occupations[k][s]).abs();
            assert!(diff <= 4.0 * se[k][s] + 1e-12, "k={k} s={s} diff={diff} se={}", se[k][s]);
        }
    }
}

#[test]
fn noisy_shot_counts() {
    let cfg = RingConfig::new(6);
    let shots = 1000;
    let v = shot_counts_noisy(&cfg, 21.0, 8, true, shots, 1).unwrap();
    assert_eq!(v.total(), shots);
    assert!(v.occupations().unwrap()[3] <= 3.0 / (shots as f64).sqrt());

    let nv = shot_counts_noisy(&cfg, 21.0, 8, false, shots, 2).unwrap();
    let exact = trotter_trace(&cfg, 21.0, 8, false).unwrap();
    let row = exact.final_row().unwrap();
    for (p, q) in nv.occupations().unwrap().iter().zip(row) {
        let sigma = (q * (1.0 - q) / shots as f64).sqrt().max(1e-3);
        assert!((p - q).abs() <= 5.0 * sigma);
    }
}

#[test]
fn noisy_shot_counts_beyond_density_matrix_capacity() {
    let cfg = RingConfig::new(14).with_noise_rate(0.002);
    let counts = shot_counts_noisy(&cfg, 43.0, 4, false, 8, 3).unwrap();
    assert_eq!(counts.total(), 8);
    let keys: Vec<_> = counts.counts().keys().collect();
    assert!(keys.iter().all(|k| k.len() == 14));
}
