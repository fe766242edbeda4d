// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! `e^{−iHt}` by a truncated Taylor series applied matrix-free.
//!
//! The interval is cut into segments with `‖H‖·h ≤ 3`, so the series
//! terms decay like `3^k/k!` and truncation at `1e−16` relative to the
//! state norm is far below the `1e−8` accuracy budget.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, ceil, norm_sqr, C64};
use crate::ring::Hamiltonian;

const TERM_TOL: f64 = 1e-16;
const MAX_TERMS: usize = 80;
const SEGMENT_NORM: f64 = 3.0;

/// Scratch buffers reused across segments.
#[derive(Debug)]
pub(crate) struct Propagator<'h> {
    h: &'h Hamiltonian,
    term: Vec<C64>,
    next: Vec<C64>,
}

impl<'h> Propagator<'h> {
    pub(crate) fn new(h: &'h Hamiltonian) -> Self {
        let dim = h.dimension();
        Propagator {
            h,
            term: vec![C64::new(0.0, 0.0); dim],
            next: vec![C64::new(0.0, 0.0); dim],
        }
    }

    fn segment(&mut self, psi: &mut [C64], dt: f64) {
        self.term.copy_from_slice(psi);
        let scale = norm_sqr(psi).max(f64::MIN_POSITIVE);
        for k in 1..=MAX_TERMS {
            self.h.apply(&self.term, &mut self.next);
            // term_k = (−i·dt/k)·H·term_{k−1}
            let factor = C64::new(0.0, -dt / k as f64);
            for (t, n) in self.term.iter_mut().zip(&self.next) {
                *t = n * factor;
            }
            for (p, t) in psi.iter_mut().zip(&self.term) {
                *p += t;
            }
            // Past k = 3 the terms shrink monotonically.
            if k > 3 && norm_sqr(&self.term) <= TERM_TOL * TERM_TOL * scale {
                break;
            }
        }
    }

    /// `psi ← e^{−iHt}·psi`. Negative `t` runs backwards.
    pub(crate) fn evolve(&mut self, psi: &mut [C64], t: f64) {
        if t == 0.0 {
            return;
        }
        let segments = ceil(abs(t) * self.h.norm_bound() / SEGMENT_NORM).max(1.0) as usize;
        let dt = t / segments as f64;
        for _ in 0..segments {
            self.segment(psi, dt);
        }
    }
}

/// Dense `U = e^{−iH·dt}`, row-major. Worth it when the same step is
/// applied many times to a small register.
#[derive(Debug, Clone)]
pub(crate) struct DenseUnitary {
    dim: usize,
    matrix: Vec<C64>,
}

impl DenseUnitary {
    /// Largest register for which callers build a dense propagator.
    pub(crate) const MAX_QUBITS: usize = 8;

    pub(crate) fn new(h: &Hamiltonian, dt: f64) -> Self {
        let dim = h.dimension();
        let mut matrix = vec![C64::new(0.0, 0.0); dim * dim];
        let mut prop = Propagator::new(h);
        let mut column = vec![C64::new(0.0, 0.0); dim];
        for j in 0..dim {
            column.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
            column[j] = C64::new(1.0, 0.0);
            prop.evolve(&mut column, dt);
            for (i, a) in column.iter().enumerate() {
                matrix[i * dim + j] = *a;
            }
        }
        DenseUnitary { dim, matrix }
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn matrix(&self) -> &[C64] {
        &self.matrix
    }

    /// `out = U·psi`.
    pub(crate) fn apply(&self, psi: &[C64], out: &mut [C64]) {
        for (row, o) in self.matrix.chunks_exact(self.dim).zip(out.iter_mut()) {
            *o = row.iter().zip(psi).map(|(u, p)| u * p).sum();
        }
    }
}

/// Time evolution that picks the dense or matrix-free path by size.
#[derive(Debug)]
pub(crate) enum Stepper<'h> {
    Dense(DenseUnitary, Vec<C64>),
    Taylor(Propagator<'h>, f64),
}

impl<'h> Stepper<'h> {
    pub(crate) fn new(h: &'h Hamiltonian, dt: f64) -> Self {
        if h.size() <= DenseUnitary::MAX_QUBITS {
            let u = DenseUnitary::new(h, dt);
            let buf = vec![C64::new(0.0, 0.0); u.dim()];
            Stepper::Dense(u, buf)
        } else {
            Stepper::Taylor(Propagator::new(h), dt)
        }
    }

    pub(crate) fn step(&mut self, psi: &mut [C64]) {
        match self {
            Stepper::Dense(u, buf) => {
                u.apply(psi, buf);
                psi.copy_from_slice(buf);
            }
            Stepper::Taylor(p, dt) => {
                let dt = *dt;
                p.evolve(psi, dt);
            }
        }
    }
}
