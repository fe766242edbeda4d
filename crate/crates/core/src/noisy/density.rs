// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{Gate, LayeredStep};
use crate::error::{Error, Result};
use crate::evolve::DenseUnitary;
use crate::linalg::hermitian_min_eigenvalue;
use crate::math::{abs, cos, sin, sqrt, C64};
use crate::ring::RegisterState;
use crate::statevector::StateVector;

type Mat2 = [[C64; 2]; 2];

const Z0: C64 = C64 { re: 0.0, im: 0.0 };
const O1: C64 = C64 { re: 1.0, im: 0.0 };

fn rx_matrix(theta: f64) -> Mat2 {
    let (c, s) = (cos(theta / 2.0), sin(theta / 2.0));
    [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]]
}

/// `ρ` on `n ≤ 12` qubits, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    dim: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub const MAX_QUBITS: usize = 12;
    /// Largest register whose minimum eigenvalue is computed on request.
    pub const EIGEN_MAX_QUBITS: usize = 6;

    fn check_size(n_qubits: usize) -> Result<()> {
        if n_qubits > Self::MAX_QUBITS {
            return Err(Error::Capacity {
                what: "density-matrix backend",
                limit: Self::MAX_QUBITS,
                requested: n_qubits,
                hint: "; use the trajectory backend",
            });
        }
        Ok(())
    }

    /// `|ψ⟩⟨ψ|`
    pub fn from_pure(state: &StateVector) -> Result<Self> {
        let n_qubits = state.n_qubits();
        Self::check_size(n_qubits)?;
        let a = state.amplitudes();
        let dim = a.len();
        let mut data = Vec::with_capacity(dim * dim);
        for ai in a {
            data.extend(a.iter().map(|aj| ai * aj.conj()));
        }
        Ok(DensityMatrix { n_qubits, dim, data })
    }

    /// `I/2^n`
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        Self::check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut data = vec![Z0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        Ok(DensityMatrix { n_qubits, dim, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).collect()
    }

    /// `max_ij |ρ_ij − ρ̄_ji|`
    pub fn hermiticity_error(&self) -> f64 {
        const TILE: usize = 64;
        let n = self.dim;
        let mut worst = 0.0f64;
        for bi in (0..n).step_by(TILE) {
            for bj in (bi..n).step_by(TILE) {
                for i in bi..(bi + TILE).min(n) {
                    for j in bj.max(i)..(bj + TILE).min(n) {
                        let d = self.data[i * n + j] - self.data[j * n + i].conj();
                        worst = worst.max(d.norm());
                    }
                }
            }
        }
        worst
    }

    /// Smallest eigenvalue, for registers up to
    /// [`DensityMatrix::EIGEN_MAX_QUBITS`].
    pub fn min_eigenvalue(&self) -> Result<f64> {
        if self.n_qubits > Self::EIGEN_MAX_QUBITS {
            return Err(Error::Capacity {
                what: "density-matrix eigenvalue check",
                limit: Self::EIGEN_MAX_QUBITS,
                requested: self.n_qubits,
                hint: "",
            });
        }
        Ok(hermitian_min_eigenvalue(&self.data, self.dim))
    }

    /// `ρ_ij ← d_i ρ_ij d̄_j` for a diagonal unitary `d`.
    pub fn apply_diagonal(&mut self, d: &[C64]) {
        debug_assert_eq!(d.len(), self.dim);
        for (row, di) in self.data.chunks_exact_mut(self.dim).zip(d) {
            for (x, dj) in row.iter_mut().zip(d) {
                *x *= di * dj.conj();
            }
        }
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// `ρ ← D_λ(u ρ u†)` on one qubit, where `D_λ` is the depolarizing
    /// channel. Both act on the same 2×2 blocks, so one pass does both.
    fn local_channel(&mut self, qubit: usize, u: &Mat2, lambda: f64) {
        let n = self.dim;
        let b = 1usize << qubit;
        let keep = 1.0 - lambda;
        let (stay, swap) = (1.0 - lambda / 2.0, lambda / 2.0);
        let ud = [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]];
        for i0 in (0..n).filter(|i| i & b == 0) {
            let i1 = i0 | b;
            for j0 in (0..n).filter(|j| j & b == 0) {
                let j1 = j0 | b;
                let m = [
                    [self.data[i0 * n + j0], self.data[i0 * n + j1]],
                    [self.data[i1 * n + j0], self.data[i1 * n + j1]],
                ];
                // u·m·u†
                let mut um = [[Z0; 2]; 2];
                for r in 0..2 {
                    for c in 0..2 {
                        um[r][c] = u[r][0] * m[0][c] + u[r][1] * m[1][c];
                    }
                }
                let mut out = [[Z0; 2]; 2];
                for r in 0..2 {
                    for c in 0..2 {
                        out[r][c] = um[r][0] * ud[0][c] + um[r][1] * ud[1][c];
                    }
                }
                let (a, d) = (out[0][0], out[1][1]);
                self.data[i0 * n + j0] = a * stay + d * swap;
                self.data[i1 * n + j1] = d * stay + a * swap;
                self.data[i0 * n + j1] = out[0][1] * keep;
                self.data[i1 * n + j0] = out[1][0] * keep;
            }
        }
    }

    /// [`Self::local_channel`] specialized to `u = RX(θ) = c − is·X`:
    /// `uMu† = c²M + s²·XMX + ics·(MX − XM)`, all real-scalar products.
    fn rx_channel(&mut self, qubit: usize, theta: f64, lambda: f64) {
        let n = self.dim;
        let b = 1usize << qubit;
        let (c, s) = (cos(theta / 2.0), sin(theta / 2.0));
        let (cc, ss, cs) = (c * c, s * s, c * s);
        let keep = 1.0 - lambda;
        let (stay, swap) = (1.0 - lambda / 2.0, lambda / 2.0);
        let i_cs = |z: C64| C64::new(-cs * z.im, cs * z.re);
        for i0 in (0..n).filter(|i| i & b == 0) {
            let i1 = i0 | b;
            for j0 in (0..n).filter(|j| j & b == 0) {
                let j1 = j0 | b;
                let m00 = self.data[i0 * n + j0];
                let m01 = self.data[i0 * n + j1];
                let m10 = self.data[i1 * n + j0];
                let m11 = self.data[i1 * n + j1];
                let a = m00 * cc + m11 * ss + i_cs(m01 - m10);
                let d = m11 * cc + m00 * ss + i_cs(m10 - m01);
                let o01 = m01 * cc + m10 * ss + i_cs(m00 - m11);
                let o10 = m10 * cc + m01 * ss + i_cs(m11 - m00);
                self.data[i0 * n + j0] = a * stay + d * swap;
                self.data[i1 * n + j1] = d * stay + a * swap;
                self.data[i0 * n + j1] = o01 * keep;
                self.data[i1 * n + j0] = o10 * keep;
            }
        }
    }

    /// `ρ → (1−λ)ρ + λ·Tr_q(ρ)⊗I/2` on qubit `qubit`.
    pub fn depolarize_qubit(&mut self, qubit: usize, lambda: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidConfig(format!("depolarizing strength {lambda} outside [0, 1]")));
        }
        self.local_channel(qubit, &[[O1, Z0], [Z0, O1]], lambda);
        Ok(())
    }

    /// Conjugate by a single-qubit unitary.
    pub fn apply_single_qubit(&mut self, qubit: usize, u: &Mat2) -> Result<()> {
        self.check_qubit(qubit)?;
        self.local_channel(qubit, u, 0.0);
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let r = 1.0 / sqrt(2.0);
        let u = match *gate {
            Gate::H(_) => [[C64::new(r, 0.0), C64::new(r, 0.0)], [C64::new(r, 0.0), C64::new(-r, 0.0)]],
            Gate::X(_) => [[Z0, O1], [O1, Z0]],
            Gate::Z(_) => [[O1, Z0], [Z0, -O1]],
            Gate::Rx { theta, .. } => rx_matrix(theta),
            Gate::Rz { theta, .. } => {
                let p = C64::new(cos(theta / 2.0), -sin(theta / 2.0));
                [[p, Z0], [Z0, p.conj()]]
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (1usize << control, 1usize << target);
                let n = self.dim;
                for i in (0..n).filter(|i| i & c != 0 && i & t == 0) {
                    for col in 0..n {
                        self.data.swap(i * n + col, (i | t) * n + col);
                    }
                }
                for row in self.data.chunks_exact_mut(n) {
                    for j in (0..n).filter(|j| j & c != 0 && j & t == 0) {
                        row.swap(j, j | t);
                    }
                }
                return Ok(());
            }
        };
        let q = match *gate {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) => q,
            Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } => qubit,
            Gate::Cnot { .. } => unreachable!(),
        };
        self.local_channel(q, &u, 0.0);
        Ok(())
    }

    /// One compiled Trotter step followed by depolarizing every qubit with
    /// strength `lambda`.
    pub fn apply_layered_step(&mut self, step: &LayeredStep, lambda: f64) -> Result<()> {
        if step.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                qubits: step.n_qubits(),
                got: self.dim,
            });
        }
        self.apply_diagonal(step.phases());
        for q in 0..self.n_qubits {
            self.rx_channel(q, step.rx_theta(), lambda);
        }
        Ok(())
    }

    /// `ρ ← UρU†` for a dense unitary of matching size.
    pub(crate) fn apply_dense(&mut self, u: &DenseUnitary) {
        let n = self.dim;
        let m = u.matrix();
        // T = U·ρ
        let mut t = vec![Z0; n * n];
        for i in 0..n {
            for k in 0..n {
                let uik = m[i * n + k];
                let src = &self.data[k * n..(k + 1) * n];
                for (dst, s) in t[i * n..(i + 1) * n].iter_mut().zip(src) {
                    *dst += uik * s;
                }
            }
        }
        // ρ = T·U†, (T U†)_ij = Σ_k T_ik conj(U_jk)
        for i in 0..n {
            let ti = &t[i * n..(i + 1) * n];
            for j in 0..n {
                let uj = &m[j * n..(j + 1) * n];
                self.data[i * n + j] = ti.iter().zip(uj).map(|(a, b)| a * b.conj()).sum();
            }
        }
    }

    /// Depolarize every qubit with strength `lambda`.
    pub fn depolarize_all(&mut self, lambda: f64) -> Result<()> {
        for q in 0..self.n_qubits {
            self.depolarize_qubit(q, lambda)?;
        }
        Ok(())
    }

    /// Trace, Hermiticity and positivity checks; `with_eigen` adds the
    /// eigenvalue check (small registers only).
    pub fn check_physical(&self, step: usize, with_eigen: bool) -> Result<()> {
        let diag = |message| Err(Error::Diagnostic { step, message });
        let tr = self.trace();
        if abs(tr.re - 1.0) > 1e-10 || abs(tr.im) > 1e-10 {
            return diag(format!("trace is {tr}"));
        }
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return diag(format!("Hermiticity error {herm:e}"));
        }
        if let Some(p) = self.diagonal().into_iter().find(|&p| p < -1e-8) {
            return diag(format!("negative population {p:e}"));
        }
        if with_eigen && self.n_qubits <= Self::EIGEN_MAX_QUBITS {
            let e = self.min_eigenvalue()?;
            if e < -1e-8 {
                return diag(format!("minimum eigenvalue {e:e}"));
            }
        }
        Ok(())
    }
}

impl RegisterState for DensityMatrix {
    fn num_qubits(&self) -> usize {
        self.n_qubits
    }

    fn probability(&self, index: usize) -> f64 {
        self.data[index * self.dim + index].re
    }

    fn vison_expectation(&self) -> f64 {
        let all = self.dim - 1;
        (0..self.dim).map(|i| self.data[i * self.dim + (i ^ all)].re).sum()
    }
}
