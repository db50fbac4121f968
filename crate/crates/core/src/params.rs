//! Physical parameters of the model and the closed-form scalars built from them.
//!
//! Branch states are indexed `q = 1..=M`; the `q`-th branch is the coherent
//! state with amplitude `α·exp(-2πiq/M)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Full experiment configuration: coherent amplitude, branch count and surviving fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    alpha: Complex64,
    m: usize,
    eta: f64,
}

impl SystemParams {
    pub fn new(alpha: Complex64, m: usize, eta: f64) -> Result<Self> {
        if m < 2 {
            return Err(invalid("m", format!("must be >= 2, got {m}")));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(invalid("eta", format!("must lie in (0, 1], got {eta}")));
        }
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(invalid("alpha", "must be finite"));
        }
        Ok(Self { alpha, m, eta })
    }

    /// Real non-negative amplitude chosen so that `|α|² = alpha2`.
    pub fn from_alpha2(alpha2: f64, m: usize, eta: f64) -> Result<Self> {
        if !(alpha2 >= 0.0) || !alpha2.is_finite() {
            return Err(invalid("alpha2", format!("must be finite and >= 0, got {alpha2}")));
        }
        Self::new(Complex64::new(alpha2.sqrt(), 0.0), m, eta)
    }

    /// Amplitude fixed through the nearest-neighbour overlap `δ`.
    pub fn from_delta(delta: f64, m: usize, eta: f64) -> Result<Self> {
        let alpha2 = alpha_from_delta(delta, m)?;
        Self::from_alpha2(alpha2, m, eta)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Mean photon number per mode, `|α|²`.
    pub fn alpha2(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn epsilon(&self) -> f64 {
        1.0 - self.eta
    }

    /// Kerr interaction time `1/M`; carried as metadata only.
    pub fn tau(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// Same state, different loss.
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.alpha, self.m, eta)
    }

    pub fn derived(&self) -> DerivedScalars {
        DerivedScalars {
            delta: delta_from_alpha(self),
            delta_n: photons_absorbed(self),
        }
    }

    /// Amplitude of branch `q` (1-based) after scaling by `scale`.
    pub(crate) fn branch_amplitude(&self, q: usize, scale: f64) -> Complex64 {
        let phase = Complex64::from_polar(1.0, -2.0 * PI * q as f64 / self.m as f64);
        self.alpha * phase * scale
    }
}

/// Scalars derived from a [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScalars {
    /// `|⟨Φ_q|Φ_{q+1}⟩|²` for the lossless branches.
    pub delta: f64,
    /// Mean photons absorbed per mode, `ε|α|²`.
    pub delta_n: f64,
}

/// The branch coefficients `f_q`, `q = 1..=M`, each of modulus `1/√M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCoefficients {
    f: Vec<Complex64>,
}

impl PhaseCoefficients {
    pub fn as_slice(&self) -> &[Complex64] {
        &self.f
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// `f_q` with a 1-based index.
    pub fn get(&self, q: usize) -> Complex64 {
        self.f[q - 1]
    }

    /// Multiply every coefficient by a common unit phase.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let u = Complex64::from_polar(1.0, phase);
        Self {
            f: self.f.iter().map(|z| z * u).collect(),
        }
    }
}

/// `⟨a|b⟩` for coherent states with complex amplitudes `a`, `b`.
pub fn coherent_overlap(a: Complex64, b: Complex64) -> Complex64 {
    (a.conj() * b - 0.5 * a.norm_sqr() - 0.5 * b.norm_sqr()).exp()
}

/// `|exp(2πik/M) - 1|²`, evaluated as `4 sin²(πk/M)` to avoid cancellation.
pub fn chord_sq(k: usize, m: usize) -> f64 {
    let s = (PI * k as f64 / m as f64).sin();
    4.0 * s * s
}

pub fn coefficients(m: usize) -> Result<PhaseCoefficients> {
    if m < 2 {
        return Err(invalid("m", format!("must be >= 2, got {m}")));
    }
    Ok(coefficients_unchecked(m))
}

/// Also valid for `m = 1` (a single product branch), which the Fock oracle uses.
pub(crate) fn coefficients_unchecked(m: usize) -> PhaseCoefficients {
    let norm = 1.0 / (m as f64).sqrt();
    let f = (1..=m)
        .map(|q| {
            // Reduce the exponent mod 2M before scaling so the phase stays exact for large M.
            let qq = q as u128;
            let num = if m % 2 == 1 { qq * (qq + 1) } else { qq * qq };
            let r = (num % (2 * m as u128)) as f64;
            Complex64::from_polar(norm, PI * r / m as f64)
        })
        .collect();
    PhaseCoefficients { f }
}

pub fn delta_from_alpha(params: &SystemParams) -> f64 {
    (-params.alpha2() * chord_sq(1, params.m())).exp()
}

/// Exact inverse of [`delta_from_alpha`]: returns `|α|²`.
pub fn alpha_from_delta(delta: f64, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(invalid("m", format!("must be >= 2, got {m}")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("delta", format!("must lie in (0, 1], got {delta}")));
    }
    Ok(-delta.ln() / chord_sq(1, m))
}

/// Large-M asymptote `|α|² ≈ ln(1/δ)·M²/(4π²)`, kept as a cross-check only.
pub fn alpha_from_delta_asymptotic(delta: f64, m: usize) -> f64 {
    -delta.ln() * (m * m) as f64 / (4.0 * PI * PI)
}

pub fn photons_absorbed(params: &SystemParams) -> f64 {
    params.epsilon() * params.alpha2()
}
