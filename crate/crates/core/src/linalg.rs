// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Cyclic Jacobi eigenvalues for the small symmetric matrices used in
//! positivity checks.

use alloc::vec::Vec;

use crate::math::{abs, sqrt, C64};

/// Eigenvalues of a real symmetric `n × n` row-major matrix, ascending.
pub(crate) fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    debug_assert_eq!(a.len(), n * n);
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if abs(apq) < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (abs(theta) + sqrt(theta * theta + 1.0));
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Smallest eigenvalue of a Hermitian `n × n` row-major matrix.
///
/// `A + iB` is embedded as the real symmetric `[[A, −B], [B, A]]`, whose
/// spectrum is that of the original with every eigenvalue doubled.
pub(crate) fn hermitian_min_eigenvalue(m: &[C64], n: usize) -> f64 {
    let w = 2 * n;
    let mut real = alloc::vec![0.0; w * w];
    for i in 0..n {
        for j in 0..n {
            // Symmetrize to remove roundoff-level anti-Hermitian parts.
            let z = (m[i * n + j] + m[j * n + i].conj()) * 0.5;
            real[i * w + j] = z.re;
            real[(i + n) * w + (j + n)] = z.re;
            real[i * w + (j + n)] = -z.im;
            real[(i + n) * w + j] = z.im;
        }
    }
    symmetric_eigenvalues(real, w)[0]
}
