//! Exact logarithmic negativity of the decohered state.
//!
//! The attenuated branch states `|Φ̃_q⟩` are expanded in an orthonormal basis
//! `|x_i⟩` through `A = √(Gᵀ)`, giving `ρ = C·W·C†` on the `M²`-dimensional
//! span, with `C[(m,n), q] = f_q A_qm A_qn` and `W_qp = ⟨Ψ_p|Ψ_q⟩²`.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermiticity_error, hermitian_sqrt_outcome, partial_transpose_first, trace_norm_hermitian,
    HermitianMatrix, DEFAULT_CLAMP_TOL,
};
use crate::params::{coefficients, coherent_overlap, PhaseCoefficients, SystemParams};

/// Largest `M` handled by the exact method unless overridden (`M² = 2500`).
pub const DEFAULT_EXACT_LIMIT: usize = 50;

const TRACE_SILENT: f64 = 1e-12;
const TRACE_RENORMALIZE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactConfig {
    /// Largest admissible `M`.
    pub max_m: usize,
    /// Eigenvalue clamp for `√(Gᵀ)`, relative to the largest eigenvalue.
    pub clamp_tol: f64,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            max_m: DEFAULT_EXACT_LIMIT,
            clamp_tol: DEFAULT_CLAMP_TOL,
        }
    }
}

impl ExactConfig {
    pub fn with_max_m(max_m: usize) -> Self {
        Self {
            max_m,
            ..Self::default()
        }
    }

    pub fn admits(&self, m: usize) -> bool {
        m <= self.max_m
    }
}

/// Which route produced an entanglement value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    ApproxF,
    SmallLoss,
    Cutoff,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::ApproxF => "approx_f",
            Method::SmallLoss => "small_loss",
            Method::Cutoff => "cutoff",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Numerical health of an exact evaluation. All zero for the analytic methods.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Smallest eigenvalue of `Gᵀ` before clamping.
    pub min_gram_eigenvalue: f64,
    /// Eigenvalues of `Gᵀ` that were clamped to zero.
    pub clamped_eigenvalues: usize,
    /// `λ_max / λ_min` of `G`; infinite when singular.
    pub gram_condition: f64,
    /// `trace(ρ) - 1` before renormalization.
    pub trace_error: f64,
    /// Largest `|ρ_ij - conj(ρ_ji)|` before symmetrization.
    pub hermiticity_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativityResult {
    /// Logarithmic negativity in ebits, never negative.
    pub e_n: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl NegativityResult {
    pub(crate) fn analytic(e_n: f64, method: Method) -> Self {
        Self {
            e_n,
            method,
            diagnostics: Diagnostics::default(),
        }
    }
}

/// Gram matrices of the attenuated system branches and the environment branches.
#[derive(Debug, Clone)]
pub struct DecoherenceModel {
    pub params: SystemParams,
    /// `G[p][q] = ⟨Φ̃_p|Φ̃_q⟩`.
    pub g: HermitianMatrix,
    /// `G₂[p][q] = ⟨Ψ_p|Ψ_q⟩²`.
    pub g2: HermitianMatrix,
}

pub fn build_decoherence_model(params: &SystemParams) -> DecoherenceModel {
    let m = params.m();
    let sys_scale = params.eta().sqrt();
    let env_scale = params.epsilon().sqrt();
    let sys: Vec<Complex64> = (1..=m).map(|q| params.branch_amplitude(q, sys_scale)).collect();
    let env: Vec<Complex64> = (1..=m).map(|q| params.branch_amplitude(q, env_scale)).collect();
    let g = HermitianMatrix::from_fn(m, |p, q| coherent_overlap(sys[p], sys[q]));
    let g2 = HermitianMatrix::from_fn(m, |p, q| {
        let o = coherent_overlap(env[p], env[q]);
        o * o
    });
    DecoherenceModel {
        params: *params,
        g,
        g2,
    }
}

/// `ρ` in the basis `|x_i⟩⊗|x_k⟩`, row index `i·M + k`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub rho: HermitianMatrix,
    pub m: usize,
    pub diagnostics: Diagnostics,
}

pub fn build_density_matrix(model: &DecoherenceModel, clamp_tol: f64) -> Result<DensityMatrix> {
    let f = coefficients(model.params.m())?;
    build_density_matrix_with(model, &f, clamp_tol)
}

/// As [`build_density_matrix`] with caller-supplied branch coefficients.
pub fn build_density_matrix_with(
    model: &DecoherenceModel,
    f: &PhaseCoefficients,
    clamp_tol: f64,
) -> Result<DensityMatrix> {
    let m = model.params.m();
    if f.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for M = {m}",
            f.len()
        )));
    }
    let sqrt = hermitian_sqrt_outcome(&model.g.transpose(), clamp_tol)?;
    let a = sqrt.root.as_mat();
    let f = f.as_slice();

    let c = Mat::from_fn(m * m, m, |row, q| {
        let (i, k) = (row / m, row % m);
        f[q] * a[(q, i)] * a[(q, k)]
    });
    let w = Mat::from_fn(m, m, |q, p| model.g2.get(p, q));
    let cw = &c * &w;
    let raw = &cw * c.adjoint();

    let herm_err = hermiticity_error(raw.as_ref());
    let rho = HermitianMatrix::new(raw)?;
    let trace = rho.trace().re;
    let trace_error = trace - 1.0;
    let rho = if trace_error.abs() <= TRACE_SILENT {
        rho
    } else if trace_error.abs() < TRACE_RENORMALIZE {
        rho.scale(1.0 / trace)
    } else {
        return Err(Error::TraceDeviation {
            trace,
            tolerance: TRACE_RENORMALIZE,
        });
    };

    let gram_condition = if sqrt.min_eigenvalue > 0.0 {
        sqrt.max_eigenvalue / sqrt.min_eigenvalue
    } else {
        f64::INFINITY
    };
    Ok(DensityMatrix {
        rho,
        m,
        diagnostics: Diagnostics {
            min_gram_eigenvalue: sqrt.min_eigenvalue,
            clamped_eigenvalues: sqrt.clamped,
            gram_condition,
            trace_error,
            hermiticity_error: herm_err,
        },
    })
}

/// `log₂‖ρ^{T₁}‖₁` floored at zero.
pub fn log_negativity_of(density: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose_first(&density.rho, density.m)?;
    Ok(trace_norm_hermitian(&pt)?.log2().max(0.0))
}

pub fn log_negativity_exact(params: &SystemParams, cfg: &ExactConfig) -> Result<NegativityResult> {
    if !cfg.admits(params.m()) {
        return Err(Error::SizeLimit {
            m: params.m(),
            limit: cfg.max_m,
        });
    }
    let model = build_decoherence_model(params);
    let density = build_density_matrix(&model, cfg.clamp_tol)?;
    Ok(NegativityResult {
        e_n: log_negativity_of(&density)?,
        method: Method::Exact,
        diagnostics: density.diagnostics,
    })
}

/// Exact negativity of the lossless state `|Φ⟩⟨Φ|` with the same `α` and `M`.
pub fn pure_state_negativity(params: &SystemParams, cfg: &ExactConfig) -> Result<NegativityResult> {
    log_negativity_exact(&params.with_eta(1.0)?, cfg)
}

/// `E_N(ρ) - E_N(|Φ⟩⟨Φ|)`; non-positive up to rounding.
pub fn entanglement_change(params: &SystemParams, cfg: &ExactConfig) -> Result<f64> {
    let mixed = log_negativity_exact(params, cfg)?.e_n;
    let pure = pure_state_negativity(params, cfg)?.e_n;
    Ok(mixed - pure)
}
