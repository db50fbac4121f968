//! Closed-form approximations for nearly orthogonal branches.
//!
//! With orthogonal branches the partial transpose has `M` eigenvalues `1/M`
//! and `M(M-1)/2` pairs `±exp(-ΔN·c_{k-m})/M`, so the trace norm is `1 + F`
//! with `F = Σ_{k=1}^{M-1} exp(-ΔN·c_k)` and `c_k = |e^{2πik/M} - 1|²`.
//! `F` depends on `(M, ΔN)` only.

use std::f64::consts::{LN_2, PI};

use crate::error::{invalid, Error, Result};
use crate::exact::{Method, NegativityResult};
use crate::params::{alpha_from_delta, chord_sq};
use crate::search::golden_section_max;

/// `D'` as determined numerically in the literature.
pub const D_PRIME_DEFAULT: f64 = PI;

pub fn f_sum(m: usize, delta_n: f64) -> f64 {
    (1..m).map(|k| (-delta_n * chord_sq(k, m)).exp()).sum()
}

/// `log₂(1 + F)`.
pub fn log_negativity_approx(m: usize, delta_n: f64) -> NegativityResult {
    NegativityResult::analytic(f_sum(m, delta_n).ln_1p() / LN_2, Method::ApproxF)
}

/// `log₂M - ε|α|²·(2/ln 2)·(M-1)/M`, floored at zero.
///
/// This is the expansion as usually printed. The exact first-order slope in
/// `ΔN` is `-2/ln 2` (because `Σ_k c_k = 2M`), so this form overestimates
/// `E_N` by `ΔN·2/(M ln 2)` at first order.
pub fn small_loss_expansion(m: usize, alpha2: f64, epsilon: f64) -> f64 {
    let mf = m as f64;
    (mf.log2() - epsilon * alpha2 * (2.0 / LN_2) * (mf - 1.0) / mf).max(0.0)
}

/// `log₂(1 + √(D'/(ε·|ln δ|)))`.
pub fn cutoff_estimate(epsilon: f64, delta: f64, d_prime: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid("epsilon", format!("must be > 0, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("must lie in (0, 1), got {delta}")));
    }
    if !(d_prime > 0.0) {
        return Err(invalid("d_prime", format!("must be > 0, got {d_prime}")));
    }
    Ok((d_prime / (epsilon * delta.ln().abs())).sqrt().ln_1p() / LN_2)
}

/// One point of a `D'` fit: loss `epsilon`, overlap `delta`, branch count `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPoint {
    pub epsilon: f64,
    pub delta: f64,
    pub m: usize,
}

impl FitPoint {
    /// `log₂(1+F)` at `ΔN = ε·|α|²(δ, M)`.
    pub fn approx_target(&self) -> Result<f64> {
        let alpha2 = alpha_from_delta(self.delta, self.m)?;
        Ok(log_negativity_approx(self.m, self.epsilon * alpha2).e_n)
    }
}

/// The large-loss regime: `δ ∈ {1e-2, 1e-4}`, 21 log-spaced `ε ∈ [1e-3, 0.5]`,
/// `M ∈ {20, 200, 2000, 20000}`.
pub fn d_prime_regime_grid() -> Vec<FitPoint> {
    let eps: Vec<f64> = (0..21)
        .map(|i| 10f64.powf(-3.0 + (0.5f64.log10() + 3.0) * i as f64 / 20.0))
        .collect();
    let mut grid = Vec::new();
    for &delta in &[1e-2, 1e-4] {
        for &m in &[20, 200, 2000, 20000] {
            for &epsilon in &eps {
                grid.push(FitPoint { epsilon, delta, m });
            }
        }
    }
    grid
}

/// Least-squares `D'` (in ebits) of the cutoff form against `log₂(1+F)` on `grid`.
pub fn fit_d_prime(grid: &[FitPoint]) -> Result<f64> {
    let targets = grid
        .iter()
        .map(|p| p.approx_target().map(|t| (p, t)))
        .collect::<Result<Vec<_>>>()?;
    fit_d_prime_to(&targets.iter().map(|(p, t)| (**p, *t)).collect::<Vec<_>>())
}

/// Least-squares `D'` against arbitrary target values.
pub fn fit_d_prime_to(points: &[(FitPoint, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::DegenerateGrid {
            points: points.len(),
        });
    }
    for (p, _) in points {
        cutoff_estimate(p.epsilon, p.delta, 1.0)?;
    }
    let neg_sse = |log_d: f64| -> Result<f64> {
        let d = log_d.exp();
        let mut sse = 0.0;
        for (p, target) in points {
            let r = cutoff_estimate(p.epsilon, p.delta, d)? - target;
            sse += r * r;
        }
        Ok(-sse)
    };
    let best = golden_section_max(neg_sse, (1e-4f64).ln(), (1e4f64).ln(), 1e-12)?;
    Ok(best.x.exp())
}

/// `d/dΔN` of [`log_negativity_approx`]: `-(Σ_k c_k e^{-ΔN c_k}) / ((1+F) ln 2)`.
pub fn entanglement_rate(m: usize, delta_n: f64) -> f64 {
    let (mut weighted, mut f) = (0.0, 0.0);
    for k in 1..m {
        let c = chord_sq(k, m);
        let e = (-delta_n * c).exp();
        weighted += c * e;
        f += e;
    }
    -weighted / ((1.0 + f) * LN_2)
}
