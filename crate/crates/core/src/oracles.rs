// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form references.
//!
//! * Two sites under `H = −Γ(X₀+X₁)` with isotropic depolarizing noise. The
//!   spinon sits on the left bond (twisted, `n_L = (1 + z₀z₁)/2`) or the
//!   right one. States are labelled by bond and by the sector of
//!   `B = X₀X₁`: unprimed for `B = −1` (vison present), primed for `B = +1`.
//!   Every two-body Pauli correlator decays as `e^{−8γt}`; the field rotates
//!   `ZZ` into `YY` in the `B = +1` sector only.
//! * A free particle hopping on a ring of `L` sites with flux `φ`.

use alloc::format;

use crate::error::{Error, Result};
use crate::math::{abs, cis, cos, exp, C64};

/// Populations of the four two-site states at a given time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorPopulations {
    /// Left spinon, `B = −1`.
    pub rho_00: f64,
    /// Right spinon, `B = −1`.
    pub rho_11: f64,
    /// Left spinon, `B = +1`.
    pub rho_0p0p: f64,
    /// Right spinon, `B = +1`.
    pub rho_1p1p: f64,
}

impl SectorPopulations {
    pub fn sum(&self) -> f64 {
        self.rho_00 + self.rho_11 + self.rho_0p0p + self.rho_1p1p
    }

    /// `(n_left, n_right)`
    pub fn occupations(&self) -> (f64, f64) {
        (self.rho_00 + self.rho_0p0p, self.rho_11 + self.rho_1p1p)
    }
}

/// Two-site open-system solution, starting with the spinon on the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitSolution {
    pub field: f64,
    pub noise_rate: f64,
    pub with_vison: bool,
}

impl TwoQubitSolution {
    pub fn new(field: f64, noise_rate: f64, with_vison: bool) -> Result<Self> {
        if !(field.is_finite() && noise_rate.is_finite() && noise_rate >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "need finite Gamma and gamma >= 0, got Gamma = {field}, gamma = {noise_rate}"
            )));
        }
        Ok(TwoQubitSolution {
            field,
            noise_rate,
            with_vison,
        })
    }

    pub fn populations(&self, t: f64) -> Result<SectorPopulations> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        let e = exp(-8.0 * self.noise_rate * t);
        // Correlators ⟨ZZ⟩, ⟨XX⟩, ⟨YY⟩ of the evolved GHZ state.
        let (zz, xx, yy) = if self.with_vison {
            (e, -e, e)
        } else {
            let c = cos(4.0 * self.field * t);
            (e * c, e, -e * c)
        };
        Ok(SectorPopulations {
            rho_00: 0.25 * (1.0 + zz - xx + yy),
            rho_11: 0.25 * (1.0 - zz - xx - yy),
            rho_0p0p: 0.25 * (1.0 + zz + xx - yy),
            rho_1p1p: 0.25 * (1.0 - zz + xx + yy),
        })
    }
}

/// Left and right spinon occupations of the two-site system.
pub fn two_qubit_occupations(field: f64, noise_rate: f64, t: f64, with_vison: bool) -> Result<(f64, f64)> {
    Ok(TwoQubitSolution::new(field, noise_rate, with_vison)?
        .populations(t)?
        .occupations())
}

/// Particle on an `L`-site ring with hopping `Γ` and flux `φ`, launched from
/// site 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingWavefunction {
    pub size: usize,
    pub field: f64,
    pub flux: f64,
}

impl RingWavefunction {
    pub fn new(size: usize, field: f64, flux: f64) -> Result<Self> {
        if size < 2 || size % 2 != 0 {
            return Err(Error::InvalidConfig(format!("ring size must be even and >= 2, got {size}")));
        }
        Ok(RingWavefunction { size, field, flux })
    }

    /// `Ψ_φ(x, t) = (1/L) Σ_j e^{−2iΓt·cos k_j} e^{i k_j x}`,
    /// `k_j = (2π/L)(j + φ/2π)`, `j = −L/2 … L/2−1`.
    pub fn amplitude(&self, x: usize, t: f64) -> Result<C64> {
        if x >= self.size {
            return Err(Error::InvalidConfig(format!(
                "site {x} outside a ring of {} sites",
                self.size
            )));
        }
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        let l = self.size as f64;
        let half = (self.size / 2) as i64;
        let sum: C64 = (-half..half)
            .map(|j| {
                let k = core::f64::consts::TAU / l * (j as f64 + self.flux / core::f64::consts::TAU);
                cis(-2.0 * self.field * t * cos(k) + k * x as f64)
            })
            .sum();
        Ok(sum / l)
    }
}

pub fn ring_wavefunction(size: usize, field: f64, flux: f64, x: usize, t: f64) -> Result<C64> {
    RingWavefunction::new(size, field, flux)?.amplitude(x, t)
}

/// `|Ψ_φ(L/2, t)|²`
pub fn arrival_probability(size: usize, field: f64, flux: f64, t: f64) -> Result<f64> {
    Ok(ring_wavefunction(size, field, flux, size / 2, t)?.norm_sqr())
}

/// `L/(4Γ)`: wavefront arrival time, used to bracket `t_max`.
pub fn predict_tmax(size: usize, field: f64) -> f64 {
    size as f64 / (4.0 * field)
}

/// Time of the first local maximum of the flux-free arrival probability,
/// scanned on a grid of `0.01/Γ` and refined by a parabola.
///
/// Maxima below `1/L` are ignored; before the wavefront arrives the
/// amplitude is at roundoff level and not monotone.
pub fn first_arrival_peak(size: usize, field: f64) -> Result<f64> {
    let wf = RingWavefunction::new(size, field, 0.0)?;
    let dt = 0.01 / field;
    let limit = 4.0 * size as f64 / field;
    let p = |t: f64| wf.amplitude(size / 2, t).map(|a| a.norm_sqr());
    let (mut a, mut b) = (p(0.0)?, p(dt)?);
    let mut k = 2usize;
    while (k as f64) * dt <= limit {
        let c = p(k as f64 * dt)?;
        if b >= a && b > c && b >= 1.0 / size as f64 {
            let denom = a - 2.0 * b + c;
            let shift = if abs(denom) > 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            return Ok((k as f64 - 1.0 + shift) * dt);
        }
        a = b;
        b = c;
        k += 1;
    }
    Err(Error::Protocol(format!("no arrival peak before t = {limit}")))
}
