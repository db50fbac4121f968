//! Brute-force verification in a truncated photon-number basis.
//!
//! Nothing here is used by the production pipeline. Two-mode vectors and
//! matrices use the composite index `n1·(n_max+1) + n2`, first mode slow, so
//! the partial transpose of [`crate::linalg`] applies unchanged.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::exact::{log_negativity_exact, ExactConfig};
use crate::linalg::{partial_transpose_first, trace_norm_hermitian, HermitianMatrix};
use crate::params::{coefficients_unchecked, coherent_overlap, SystemParams};

/// Probability that may be lost to truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Truncation that keeps the Poisson tail of the pre-beamsplitter mode
/// (mean `2|α|²`) below [`DEFAULT_TAIL_TOL`].
pub fn default_n_max(alpha2: f64) -> usize {
    let pumped = 2.0 * alpha2;
    (pumped + 8.0 * pumped.sqrt() + 10.0).ceil() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub n_max: usize,
    pub amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Pure two-mode state, length `(n_max+1)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeVector {
    pub n_max: usize,
    pub amplitudes: Vec<Complex64>,
}

impl TwoModeVector {
    pub fn product(a: &FockVector, b: &FockVector) -> Result<Self> {
        if a.n_max != b.n_max {
            return Err(Error::DimensionMismatch(format!(
                "mode truncations differ: {} vs {}",
                a.n_max, b.n_max
            )));
        }
        let amplitudes = a
            .amplitudes
            .iter()
            .flat_map(|x| b.amplitudes.iter().map(move |y| x * y))
            .collect();
        Ok(Self {
            n_max: a.n_max,
            amplitudes,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &TwoModeVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²` for normalized inputs; insensitive to global phase.
    pub fn fidelity(&self, other: &TwoModeVector) -> f64 {
        self.inner(other).norm_sqr()
    }
}

#[derive(Debug, Clone)]
pub struct TwoModeDensity {
    pub n_max: usize,
    pub entries: HermitianMatrix,
}

impl TwoModeDensity {
    pub fn from_pure(v: &TwoModeVector) -> Self {
        let a = &v.amplitudes;
        Self {
            n_max: v.n_max,
            entries: HermitianMatrix::from_fn(a.len(), |i, j| a[i] * a[j].conj()),
        }
    }

    fn local_dim(&self) -> usize {
        self.n_max + 1
    }

    /// `⟨v|ρ|v⟩`.
    pub fn expectation(&self, v: &TwoModeVector) -> f64 {
        let m = self.entries.as_mat();
        let d = v.amplitudes.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..d {
            let mut col = Complex64::new(0.0, 0.0);
            for i in 0..d {
                col += v.amplitudes[i].conj() * m[(i, j)];
            }
            acc += col * v.amplitudes[j];
        }
        acc.re
    }

    /// Mean photon number of the first or second mode.
    pub fn mean_photons(&self, first_mode: bool) -> f64 {
        let d = self.local_dim();
        (0..d * d)
            .map(|r| {
                let n = if first_mode { r / d } else { r % d };
                n as f64 * self.entries.get(r, r).re
            })
            .sum()
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

pub fn coherent_fock(alpha: Complex64, n_max: usize) -> Result<FockVector> {
    coherent_fock_with_tol(alpha, n_max, DEFAULT_TAIL_TOL)
}

pub fn coherent_fock_with_tol(alpha: Complex64, n_max: usize, tail_tol: f64) -> Result<FockVector> {
    let mut amplitudes = Vec::with_capacity(n_max + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amplitudes.push(c);
    for n in 1..=n_max {
        c = c * alpha / (n as f64).sqrt();
        amplitudes.push(c);
    }
    let v = FockVector { n_max, amplitudes };
    let deficit = (1.0 - v.norm_sqr()).max(0.0);
    if deficit > tail_tol {
        return Err(Error::Truncation {
            n_max,
            deficit,
            budget: tail_tol,
        });
    }
    Ok(v)
}

/// `Σ_q f_q |α_q⟩⊗|α_q⟩`, normalized with the analytic Gram norm.
///
/// Accepts `m = 1`, the single-branch product state.
pub fn assemble_state_closed_form(alpha: Complex64, m: usize, n_max: usize) -> Result<TwoModeVector> {
    if m == 0 {
        return Err(invalid("m", "must be >= 1"));
    }
    let f = coefficients_unchecked(m);
    let branches: Vec<Complex64> = (1..=m)
        .map(|q| alpha * Complex64::from_polar(1.0, -2.0 * PI * q as f64 / m as f64))
        .collect();

    let dim = (n_max + 1) * (n_max + 1);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    for (q, &b) in branches.iter().enumerate() {
        let single = coherent_fock(b, n_max)?;
        let prod = TwoModeVector::product(&single, &single)?;
        let fq = f.as_slice()[q];
        for (acc, z) in amplitudes.iter_mut().zip(&prod.amplitudes) {
            *acc += fq * z;
        }
    }

    let mut norm2 = Complex64::new(0.0, 0.0);
    for p in 0..m {
        for q in 0..m {
            let o = coherent_overlap(branches[p], branches[q]);
            norm2 += f.as_slice()[p].conj() * f.as_slice()[q] * o * o;
        }
    }
    let scale = 1.0 / norm2.re.sqrt();
    amplitudes.iter_mut().for_each(|z| *z *= scale);
    Ok(TwoModeVector { n_max, amplitudes })
}

/// Number-state phase of the Kerr step: `exp(-iπ n(n-1)/M)` for odd `M`,
/// `exp(-iπ n²/M)` for even `M` (the same evolution plus a linear phase).
pub fn kerr_phase(n: usize, m: usize) -> Complex64 {
    let n = n as u128;
    let two_m = 2 * m as u128;
    let k = if m % 2 == 1 { n * (n.max(1) - 1) } else { n * n } % two_m;
    Complex64::from_polar(1.0, -PI * k as f64 / m as f64)
}

/// `|√2·α⟩` through the Kerr step, then a 50/50 beamsplitter with vacuum.
///
/// `n_max` truncates the input mode, so both outputs fit in `n_max` as well.
pub fn kerr_beamsplitter_state(alpha: Complex64, m: usize, n_max: usize) -> Result<TwoModeVector> {
    if m == 0 {
        return Err(invalid("m", "must be >= 1"));
    }
    let input = coherent_fock(alpha * std::f64::consts::SQRT_2, n_max)?;
    let lf = ln_factorials(n_max);
    let d = n_max + 1;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); d * d];
    for (n, &c) in input.amplitudes.iter().enumerate() {
        let c = c * kerr_phase(n, m);
        for k in 0..=n {
            // a†ⁿ|0⟩/√n! → ((a† + b†)/√2)ⁿ|0,0⟩/√n!
            let w = (0.5 * (lf[n] - lf[k] - lf[n - k]) - 0.5 * n as f64 * std::f64::consts::LN_2).exp();
            amplitudes[k * d + (n - k)] += c * w;
        }
    }
    Ok(TwoModeVector { n_max, amplitudes })
}

/// Single-mode Kraus operator `K_j = Σ_n √C(n,j) η^{(n-j)/2} (1-η)^{j/2} |n-j⟩⟨n|`.
pub fn kraus_operator(j: usize, eta: f64, n_max: usize) -> Mat<Complex64> {
    let lf = ln_factorials(n_max);
    let d = n_max + 1;
    Mat::from_fn(d, d, |r, c| {
        if c < j || r != c - j {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(damping_weight(c, j, eta, &lf), 0.0)
    })
}

fn damping_weight(n: usize, j: usize, eta: f64, lf: &[f64]) -> f64 {
    let binom = (lf[n] - lf[j] - lf[n - j]).exp();
    let eps = 1.0 - eta;
    let loss = if j == 0 { 1.0 } else { eps.powf(0.5 * j as f64) };
    binom.sqrt() * eta.powf(0.5 * (n - j) as f64) * loss
}

/// Independent amplitude damping with surviving fraction `eta` on both modes.
pub fn loss_channel(rho: &TwoModeDensity, eta: f64) -> Result<TwoModeDensity> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid("eta", format!("must lie in (0, 1], got {eta}")));
    }
    if eta == 1.0 {
        return Ok(rho.clone());
    }
    let d = rho.local_dim();
    let lf = ln_factorials(d - 1);
    // weights[n][j] = ⟨n-j|K_j|n⟩
    let weights: Vec<Vec<f64>> = (0..d)
        .map(|n| (0..=n).map(|j| damping_weight(n, j, eta, &lf)).collect())
        .collect();

    let src = rho.entries.as_mat();
    let mut a: Vec<Complex64> = (0..d.pow(4))
        .map(|idx| src[(idx / (d * d), idx % (d * d))])
        .collect();
    // Flat layout: ((n1·d + n2)·d + m1)·d + m2.
    let at = |n1: usize, n2: usize, m1: usize, m2: usize| ((n1 * d + n2) * d + m1) * d + m2;

    let mut out = vec![Complex64::new(0.0, 0.0); d.pow(4)];
    for n1 in 0..d {
        for m1 in 0..d {
            for j in 0..=n1.min(m1) {
                let w = weights[n1][j] * weights[m1][j];
                for n2 in 0..d {
                    for m2 in 0..d {
                        out[at(n1 - j, n2, m1 - j, m2)] += a[at(n1, n2, m1, m2)] * w;
                    }
                }
            }
        }
    }
    std::mem::swap(&mut a, &mut out);
    out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
    for n2 in 0..d {
        for m2 in 0..d {
            for j in 0..=n2.min(m2) {
                let w = weights[n2][j] * weights[m2][j];
                for n1 in 0..d {
                    for m1 in 0..d {
                        out[at(n1, n2 - j, m1, m2 - j)] += a[at(n1, n2, m1, m2)] * w;
                    }
                }
            }
        }
    }
    let dd = d * d;
    Ok(TwoModeDensity {
        n_max: rho.n_max,
        entries: HermitianMatrix::from_fn(dd, |r, c| out[r * dd + c]),
    })
}

pub fn log_negativity_fock(rho: &TwoModeDensity) -> Result<f64> {
    let pt = partial_transpose_first(&rho.entries, rho.local_dim())?;
    Ok(trace_norm_hermitian(&pt)?.log2().max(0.0))
}

/// Negativity of the decohered state computed entirely in the number basis.
pub fn oracle_negativity(params: &SystemParams, n_max: usize) -> Result<f64> {
    let psi = assemble_state_closed_form(params.alpha(), params.m(), n_max)?;
    let rho = loss_channel(&TwoModeDensity::from_pure(&psi), params.eta())?;
    log_negativity_fock(&rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub exact: f64,
    pub oracle: f64,
    pub n_max: usize,
}

impl OracleComparison {
    pub fn difference(&self) -> f64 {
        (self.exact - self.oracle).abs()
    }
}

pub fn compare_with_exact(params: &SystemParams, n_max: Option<usize>, cfg: &ExactConfig) -> Result<OracleComparison> {
    let n_max = n_max.unwrap_or_else(|| default_n_max(params.alpha2()));
    let oracle = oracle_negativity(params, n_max)?;
    let exact = log_negativity_exact(params, cfg)?.e_n;
    Ok(OracleComparison { exact, oracle, n_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvalsh;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                worst = worst.max((a.get(i, j) - b.get(i, j)).norm());
            }
        }
        worst
    }

    /// Σ_{j,k} (K_j⊗K_k) ρ (K_j⊗K_k)†, built from dense Kraus matrices.
    fn loss_by_kraus_sum(rho: &TwoModeDensity, eta: f64) -> HermitianMatrix {
        let d = rho.n_max + 1;
        let ks: Vec<Mat<Complex64>> = (0..d).map(|j| kraus_operator(j, eta, rho.n_max)).collect();
        let mut acc = Mat::<Complex64>::zeros(d * d, d * d);
        for kj in &ks {
            for kk in &ks {
                let big = Mat::from_fn(d * d, d * d, |r, col| kj[(r / d, col / d)] * kk[(r % d, col % d)]);
                let term = &(&big * rho.entries.as_mat()) * big.adjoint();
                acc += &term;
            }
        }
        HermitianMatrix::new(acc).unwrap()
    }

    fn random_density(rng: &mut ChaCha8Rng, n_max: usize) -> TwoModeDensity {
        let d = (n_max + 1) * (n_max + 1);
        let b = Mat::from_fn(d, 3, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = HermitianMatrix::new(&b * b.adjoint()).unwrap();
        let t = h.trace().re;
        TwoModeDensity {
            n_max,
            entries: h.scale(1.0 / t),
        }
    }

    #[test]
    fn coherent_fock_examples() {
        let v = coherent_fock(c(0.0, 0.0), 5).unwrap();
        assert_eq!(v.amplitudes[0], c(1.0, 0.0));
        assert!(v.amplitudes[1..].iter().all(|z| z.norm() == 0.0));
        let v = coherent_fock(c(1.0, 0.0), 20).unwrap();
        assert!(1.0 - v.norm_sqr() < 1e-12);
        assert!(matches!(coherent_fock(c(3.0, 0.0), 5), Err(Error::Truncation { .. })));
    }

    #[test]
    fn fock_overlap_matches_closed_form() {
        let pairs = [(c(0.3, -1.1), c(-0.7, 0.4)), (c(1.5, 0.0), c(1.4, 0.2)), (c(0.0, 2.0), c(0.0, -2.0))];
        for (a, b) in pairs {
            let va = coherent_fock(a, 60).unwrap();
            let vb = coherent_fock(b, 60).unwrap();
            assert!((va.inner(&vb) - coherent_overlap(a, b)).norm() < 1e-10);
        }
    }

    #[test]
    fn single_branch_is_product() {
        let alpha = c(1.2, 0.3);
        let n = default_n_max(alpha.norm_sqr());
        let psi = assemble_state_closed_form(alpha, 1, n).unwrap();
        let rho = TwoModeDensity::from_pure(&psi);
        assert!(log_negativity_fock(&rho).unwrap() < 1e-9);
        let kerr = kerr_beamsplitter_state(alpha, 1, n).unwrap();
        let single = coherent_fock(alpha, n).unwrap();
        let prod = TwoModeVector::product(&single, &single).unwrap();
        assert!(kerr.fidelity(&prod) > 1.0 - 1e-10);
    }

    #[test]
    fn kerr_output_marginal_is_poisson_for_one_branch() {
        let alpha = c(1.3, 0.0);
        let n = default_n_max(alpha.norm_sqr());
        let rho = TwoModeDensity::from_pure(&kerr_beamsplitter_state(alpha, 1, n).unwrap());
        let d = n + 1;
        let lam = alpha.norm_sqr();
        for k in 0..8 {
            let p: f64 = (0..d).map(|j| rho.entries.get(k * d + j, k * d + j).re).sum();
            let poisson = (-lam).exp() * lam.powi(k as i32) / (1..=k).map(|x| x as f64).product::<f64>();
            assert!((p - poisson).abs() < 1e-10);
        }
        assert!((rho.mean_photons(true) - lam).abs() < 1e-9);
        assert!((rho.mean_photons(false) - lam).abs() < 1e-9);
    }

    #[test]
    fn kerr_state_matches_closed_form() {
        for m in 2..=5 {
            for a2 in [0.5f64, 2.0, 4.0] {
                let alpha = c(a2.sqrt(), 0.0);
                let n = default_n_max(a2);
                let closed = assemble_state_closed_form(alpha, m, n).unwrap();
                let kerr = kerr_beamsplitter_state(alpha, m, n).unwrap();
                assert!((closed.norm_sqr() - 1.0).abs() < 1e-9);
                assert!(kerr.fidelity(&closed) >= 1.0 - 1e-8, "m={m} a2={a2}");
            }
        }
    }

    #[test]
    fn two_branch_state_has_one_ebit() {
        let n = default_n_max(4.0);
        let psi = assemble_state_closed_form(c(2.0, 0.0), 2, n).unwrap();
        let e = log_negativity_fock(&TwoModeDensity::from_pure(&psi)).unwrap();
        assert!((e - 1.0).abs() < 1e-3, "{e}");
    }

    #[test]
    fn loss_channel_examples() {
        let n = 20;
        let a = coherent_fock(c(1.1, -0.4), n).unwrap();
        let b = coherent_fock(c(-0.3, 0.9), n).unwrap();
        let rho = TwoModeDensity::from_pure(&TwoModeVector::product(&a, &b).unwrap());
        let same = loss_channel(&rho, 1.0).unwrap();
        assert!(max_diff(&same.entries, &rho.entries) == 0.0);

        let out = loss_channel(&rho, 0.7).unwrap();
        let s = 0.7f64.sqrt();
        let target = TwoModeVector::product(
            &coherent_fock(c(1.1, -0.4) * s, n).unwrap(),
            &coherent_fock(c(-0.3, 0.9) * s, n).unwrap(),
        )
        .unwrap();
        assert!(out.expectation(&target) >= 1.0 - 1e-9);
        assert!((out.mean_photons(true) - 0.7 * rho.mean_photons(true)).abs() < 1e-10);
        assert!((out.mean_photons(false) - 0.7 * rho.mean_photons(false)).abs() < 1e-10);
        assert!((out.entries.trace().re - rho.entries.trace().re).abs() < 1e-10);

        assert!(loss_channel(&rho, 0.0).is_err());
        assert!(loss_channel(&rho, 1.1).is_err());
    }

    #[test]
    fn loss_channel_matches_kraus_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_density(&mut rng, 4);
        let fast = loss_channel(&rho, 0.63).unwrap();
        let slow = loss_by_kraus_sum(&rho, 0.63);
        assert!(max_diff(&fast.entries, &slow) < 1e-12);
    }

    #[test]
    fn decohered_state_is_valid_density() {
        let p = SystemParams::from_alpha2(2.0, 3, 0.7).unwrap();
        let n = default_n_max(2.0);
        let psi = assemble_state_closed_form(p.alpha(), 3, n).unwrap();
        let rho = loss_channel(&TwoModeDensity::from_pure(&psi), 0.7).unwrap();
        assert!((rho.entries.trace().re - 1.0).abs() < 1e-8);
        assert!(eigvalsh(&rho.entries).unwrap()[0] > -1e-9);
    }

    #[test]
    fn oracle_agrees_with_exact() {
        let cfg = ExactConfig::default();
        for (a2, m, eta) in [(2.0, 3, 0.7), (4.0, 2, 0.7), (2.0, 3, 1.0), (1.0, 3, 0.5)] {
            let p = SystemParams::from_alpha2(a2, m, eta).unwrap();
            let cmp = compare_with_exact(&p, None, &cfg).unwrap();
            assert!(cmp.difference() <= 1e-3, "{cmp:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn kraus_completeness(eta in 0.01f64..=1.0, n_max in 0usize..25) {
            let d = n_max + 1;
            let mut acc = Mat::<Complex64>::zeros(d, d);
            for j in 0..d {
                let k = kraus_operator(j, eta, n_max);
                acc += &(k.adjoint() * &k);
            }
            for i in 0..d {
                for j in 0..d {
                    let target = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((acc[(i, j)] - target).norm() < 1e-12);
                }
            }
        }

        #[test]
        fn channel_composition(seed in any::<u64>(), e1 in 0.05f64..1.0, e2 in 0.05f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density(&mut rng, 3);
            let twice = loss_channel(&loss_channel(&rho, e1).unwrap(), e2).unwrap();
            let once = loss_channel(&rho, e1 * e2).unwrap();
            prop_assert!(max_diff(&twice.entries, &once.entries) < 1e-9);
        }
    }
}
