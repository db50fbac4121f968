//! Parameter sweeps, figure datasets and the photon-number optimizer.
//!
//! Every [`SweepRecord`] is produced by [`evaluate_point`] from its own stored
//! `(m, alpha2, eta)`, so re-evaluating a record reproduces it bit for bit.
//! Grid points are evaluated in parallel and returned in grid order.

use std::f64::consts::{LN_10, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{entanglement_rate, log_negativity_approx};
use crate::error::{invalid, Error, Result};
use crate::exact::{log_negativity_exact, pure_state_negativity, ExactConfig, Method};
use crate::params::{alpha_from_delta, delta_from_alpha, photons_absorbed, SystemParams};
use crate::search::golden_section_max;

/// Default number of points per curve.
pub const DEFAULT_POINTS: usize = 101;

/// How a sweep picks its evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Exact,
    Approx,
    /// Exact whenever `M` is within the exact-method limit.
    Auto,
}

impl MethodChoice {
    pub fn resolve(&self, m: usize, cfg: &ExactConfig) -> Result<Method> {
        match self {
            MethodChoice::Exact if !cfg.admits(m) => Err(Error::SizeLimit { m, limit: cfg.max_m }),
            MethodChoice::Exact => Ok(Method::Exact),
            MethodChoice::Approx => Ok(Method::ApproxF),
            MethodChoice::Auto if cfg.admits(m) => Ok(Method::Exact),
            MethodChoice::Auto => Ok(Method::ApproxF),
        }
    }
}

/// One fully self-describing row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub m: usize,
    pub alpha2: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub delta_n: f64,
    pub e_n: f64,
    /// `E_N(ρ) - E_N(|Φ⟩⟨Φ|)` by the same method, when requested.
    pub delta_e_n: Option<f64>,
    /// `dE_N/dΔN` of the F-sum approximation; approximate records only.
    pub rate: Option<f64>,
    pub method: Method,
}

/// Evaluates one parameter point. `reference` adds the pure-state comparison.
pub fn evaluate_point(
    m: usize,
    alpha2: f64,
    eta: f64,
    method: Method,
    reference: bool,
    cfg: &ExactConfig,
) -> Result<SweepRecord> {
    let p = SystemParams::from_alpha2(alpha2, m, eta)?;
    let delta_n = photons_absorbed(&p);
    let (e_n, delta_e_n, rate) = match method {
        Method::Exact => {
            let e = log_negativity_exact(&p, cfg)?.e_n;
            let de = if reference {
                Some(e - pure_state_negativity(&p, cfg)?.e_n)
            } else {
                None
            };
            (e, de, None)
        }
        Method::ApproxF => {
            let e = log_negativity_approx(m, delta_n).e_n;
            let de = reference.then(|| e - log_negativity_approx(m, 0.0).e_n);
            (e, de, Some(entanglement_rate(m, delta_n)))
        }
        other => {
            return Err(invalid(
                "method",
                format!("{other} is not a sweep method; use exact or approx_f"),
            ))
        }
    };
    Ok(SweepRecord {
        m,
        alpha2,
        eta,
        epsilon: p.epsilon(),
        delta: delta_from_alpha(&p),
        delta_n,
        e_n,
        delta_e_n,
        rate,
        method,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Epsilon,
    DeltaN,
    Alpha2,
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log10,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepRange {
    pub fn linear(lo: f64, hi: f64, points: usize) -> Self {
        Self { lo, hi, points, scale: Scale::Linear }
    }

    pub fn log10(lo: f64, hi: f64, points: usize) -> Self {
        Self { lo, hi, points, scale: Scale::Log10 }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.lo < self.hi) {
            return Err(invalid("range", format!("need lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.points < 2 {
            return Err(invalid("points", format!("need at least 2, got {}", self.points)));
        }
        let n = (self.points - 1) as f64;
        match self.scale {
            Scale::Linear => Ok((0..self.points)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / n)
                .collect()),
            Scale::Log10 => {
                if !(self.lo > 0.0) {
                    return Err(invalid("range", "log10 scale needs lo > 0"));
                }
                let (a, b) = (self.lo.log10(), self.hi.log10());
                Ok((0..self.points)
                    .map(|i| 10f64.powf(a + (b - a) * i as f64 / n))
                    .collect())
            }
        }
    }
}

/// Parameters held fixed during a sweep; the swept one is ignored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    pub m: Option<usize>,
    pub alpha2: Option<f64>,
    /// Alternative to `alpha2`, resolved per `M`.
    pub delta: Option<f64>,
    pub eta: Option<f64>,
}

impl FixedParams {
    fn m(&self) -> Result<usize> {
        self.m.ok_or_else(|| invalid("m", "required for this sweep"))
    }

    fn eta(&self) -> Result<f64> {
        self.eta.ok_or_else(|| invalid("eta", "required for this sweep"))
    }

    fn alpha2_for(&self, m: usize) -> Result<f64> {
        match (self.alpha2, self.delta) {
            (Some(_), Some(_)) => Err(invalid("alpha2", "give either alpha2 or delta, not both")),
            (Some(a2), None) => Ok(a2),
            (None, Some(d)) => alpha_from_delta(d, m),
            (None, None) => Err(invalid("alpha2", "alpha2 or delta required for this sweep")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub range: SweepRange,
    pub fixed: FixedParams,
    pub method: MethodChoice,
    /// Also compute `ΔE_N` against the lossless state.
    pub reference: bool,
}

pub fn run_sweep(spec: &SweepSpec, cfg: &ExactConfig) -> Result<Vec<SweepRecord>> {
    let grid = spec.range.values()?;
    let points: Vec<(usize, f64, f64)> = grid
        .iter()
        .map(|&x| -> Result<(usize, f64, f64)> {
            let f = &spec.fixed;
            match spec.variable {
                SweepVariable::Epsilon => {
                    let m = f.m()?;
                    Ok((m, f.alpha2_for(m)?, 1.0 - x))
                }
                SweepVariable::DeltaN => {
                    let m = f.m()?;
                    let a2 = f.alpha2_for(m)?;
                    if !(a2 > 0.0) || x >= a2 {
                        return Err(invalid("delta_n", format!("ΔN = {x} needs ΔN < |α|² = {a2}")));
                    }
                    Ok((m, a2, 1.0 - x / a2))
                }
                SweepVariable::Alpha2 => Ok((f.m()?, x, f.eta()?)),
                SweepVariable::M => {
                    let m = x.round() as usize;
                    Ok((m, f.alpha2_for(m)?, f.eta()?))
                }
            }
        })
        .collect::<Result<_>>()?;
    points
        .into_par_iter()
        .map(|(m, a2, eta)| {
            let method = spec.method.resolve(m, cfg)?;
            evaluate_point(m, a2, eta, method, spec.reference, cfg)
        })
        .collect()
}

/// `dE_N/dΔN` against `ε` for each `(M, δ)`, via the F-sum.
pub fn fig1_rate_vs_epsilon(m_list: &[usize], delta_list: &[f64], epsilon: SweepRange) -> Result<Vec<SweepRecord>> {
    let cfg = ExactConfig::default();
    let mut out = Vec::new();
    for &m in m_list {
        for &delta in delta_list {
            let spec = SweepSpec {
                variable: SweepVariable::Epsilon,
                range: epsilon,
                fixed: FixedParams { m: Some(m), delta: Some(delta), ..Default::default() },
                method: MethodChoice::Approx,
                reference: true,
            };
            out.extend(run_sweep(&spec, &cfg)?);
        }
    }
    Ok(out)
}

/// A `fig2` curve: `ΔE_N(ΔN)` at fixed `(M, δ)` with the given route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig2Curve {
    pub m: usize,
    pub delta: f64,
    pub method: MethodChoice,
}

/// The five default configurations.
pub fn fig2_default_curves() -> Vec<Fig2Curve> {
    vec![
        Fig2Curve { m: 20, delta: 0.2, method: MethodChoice::Exact },
        Fig2Curve { m: 20, delta: 1e-2, method: MethodChoice::Exact },
        Fig2Curve { m: 20, delta: 1e-4, method: MethodChoice::Exact },
        Fig2Curve { m: 200, delta: 1e-4, method: MethodChoice::Approx },
        Fig2Curve { m: 2000, delta: 1e-4, method: MethodChoice::Approx },
    ]
}

pub fn fig2_delta_en_vs_delta_n(curves: &[Fig2Curve], delta_n: SweepRange, cfg: &ExactConfig) -> Result<Vec<SweepRecord>> {
    let mut out = Vec::new();
    for c in curves {
        let m = c.m;
        let a2 = alpha_from_delta(c.delta, m)?;
        let method = c.method.resolve(m, cfg)?;
        // One pure-state reference per curve.
        let pure = match method {
            Method::Exact => log_negativity_exact(&SystemParams::from_alpha2(a2, m, 1.0)?, cfg)?.e_n,
            _ => log_negativity_approx(m, 0.0).e_n,
        };
        let grid = delta_n.values()?;
        if grid.iter().any(|&dn| dn >= a2) {
            return Err(invalid("delta_n", format!("ΔN grid reaches |α|² = {a2} for M = {m}")));
        }
        let rows: Vec<SweepRecord> = grid
            .into_par_iter()
            .map(|dn| {
                let mut r = evaluate_point(m, a2, 1.0 - dn / a2, method, false, cfg)?;
                r.delta_e_n = Some(r.e_n - pure);
                Ok(r)
            })
            .collect::<Result<_>>()?;
        out.extend(rows);
    }
    Ok(out)
}

/// `E_N(ε)` at fixed `δ`; exact where admissible.
pub fn fig3_en_vs_epsilon(m_list: &[usize], delta: f64, epsilon: SweepRange, cfg: &ExactConfig) -> Result<Vec<SweepRecord>> {
    let mut out = Vec::new();
    for &m in m_list {
        let spec = SweepSpec {
            variable: SweepVariable::Epsilon,
            range: epsilon,
            fixed: FixedParams { m: Some(m), delta: Some(delta), ..Default::default() },
            method: MethodChoice::Auto,
            reference: false,
        };
        out.extend(run_sweep(&spec, cfg)?);
    }
    Ok(out)
}

/// `E_N(|α|²)` per `(M, η)`, exact method only.
pub fn fig45_en_vs_alpha2(m_list: &[usize], eta_list: &[f64], alpha2: SweepRange, cfg: &ExactConfig) -> Result<Vec<SweepRecord>> {
    let mut out = Vec::new();
    for &m in m_list {
        for &eta in eta_list {
            let spec = SweepSpec {
                variable: SweepVariable::Alpha2,
                range: alpha2,
                fixed: FixedParams { m: Some(m), eta: Some(eta), ..Default::default() },
                method: MethodChoice::Exact,
                reference: false,
            };
            out.extend(run_sweep(&spec, cfg)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 5] = [Figure::Fig1, Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5];

    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }

    /// Dataset with the default curve set and `points` samples per curve.
    pub fn records(&self, points: usize, cfg: &ExactConfig) -> Result<Vec<SweepRecord>> {
        match self {
            Figure::Fig1 => fig1_rate_vs_epsilon(&[200, 2000], &[1e-2, 1e-4], SweepRange::log10(1e-6, 10f64.powf(-0.3), points)),
            Figure::Fig2 => fig2_delta_en_vs_delta_n(&fig2_default_curves(), SweepRange::linear(0.0, 3.0, points), cfg),
            Figure::Fig3 => fig3_en_vs_epsilon(&[2, 3, 5, 20, 20000], 1e-4, SweepRange::log10(1e-3, 0.9, points), cfg),
            Figure::Fig4 => fig45_en_vs_alpha2(&[20, 30, 40], &[0.7, 0.49], SweepRange::linear(0.5, 100.0, points), cfg),
            Figure::Fig5 => fig45_en_vs_alpha2(&(2..=10).collect::<Vec<_>>(), &[0.7], SweepRange::linear(0.05, 8.0, points), cfg),
        }
    }
}

/// Maximizer of `E_N` over `|α|²` at fixed `(M, η)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaOptimum {
    pub m: usize,
    pub eta: f64,
    pub alpha2: f64,
    pub e_n: f64,
    /// `δ` at the optimum.
    pub delta: f64,
}

pub const COARSE_POINTS: usize = 64;
pub const ALPHA2_RESOLUTION: f64 = 1e-3;

/// `[0.05, 4M²·ln10/(4π²)]`; the upper end is where `δ ≈ 1e-4`.
pub fn default_alpha2_bracket(m: usize) -> (f64, f64) {
    (0.05, 4.0 * (m * m) as f64 * LN_10 / (4.0 * PI * PI))
}

/// Coarse log-spaced scan followed by golden-section refinement.
pub fn optimize_alpha(m: usize, eta: f64, bracket: Option<(f64, f64)>, cfg: &ExactConfig) -> Result<AlphaOptimum> {
    if !cfg.admits(m) {
        return Err(Error::SizeLimit { m, limit: cfg.max_m });
    }
    let (lo, hi) = bracket.unwrap_or_else(|| default_alpha2_bracket(m));
    let grid = SweepRange::log10(lo, hi, COARSE_POINTS).values()?;
    let e_n = |a2: f64| -> Result<f64> {
        Ok(log_negativity_exact(&SystemParams::from_alpha2(a2, m, eta)?, cfg)?.e_n)
    };
    let coarse: Vec<f64> = grid.par_iter().map(|&a2| e_n(a2)).collect::<Result<_>>()?;

    let mut best = 0;
    for (i, &v) in coarse.iter().enumerate() {
        if v > coarse[best] {
            best = i;
        }
    }
    if best == 0 {
        return Err(Error::MonotoneEdge { edge: "lower", lo, hi });
    }
    if best == COARSE_POINTS - 1 {
        return Err(Error::MonotoneEdge { edge: "upper", lo, hi });
    }
    let refined = golden_section_max(e_n, grid[best - 1], grid[best + 1], ALPHA2_RESOLUTION)?;
    let (alpha2, value) = if refined.value >= coarse[best] {
        (refined.x, refined.value)
    } else {
        (grid[best], coarse[best])
    };
    let p = SystemParams::from_alpha2(alpha2, m, eta)?;
    Ok(AlphaOptimum {
        m,
        eta,
        alpha2,
        e_n: value,
        delta: delta_from_alpha(&p),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalOptimum {
    pub best: AlphaOptimum,
    pub per_m: Vec<AlphaOptimum>,
}

/// [`optimize_alpha`] for every `M` in range; ties go to the smaller `M`.
pub fn optimize_global(eta: f64, m_range: std::ops::RangeInclusive<usize>, cfg: &ExactConfig) -> Result<GlobalOptimum> {
    if m_range.is_empty() {
        return Err(invalid("m_range", "empty range"));
    }
    let per_m: Vec<AlphaOptimum> = m_range
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|m| optimize_alpha(m, eta, None, cfg))
        .collect::<Result<_>>()?;
    let mut best = per_m[0];
    for o in &per_m[1..] {
        if o.e_n > best.e_n {
            best = *o;
        }
    }
    Ok(GlobalOptimum { best, per_m })
}
