//! Dense Hermitian linear algebra: eigendecomposition, principal square root,
//! trace norm, partial transpose and circulant spectra.
//!
//! Composite indices of a bipartite `m × m` system are row-major with the first
//! mode slow: basis vector `|x_i⟩⊗|x_k⟩` (0-based) sits at row `i·m + k`.

use std::f64::consts::PI;

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default eigenvalue clamp for square roots, relative to the largest eigenvalue.
pub const DEFAULT_CLAMP_TOL: f64 = 1e-10;

/// A square complex matrix that is Hermitian by construction.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    entries: Mat<Complex64>,
}

impl HermitianMatrix {
    /// Symmetrizes `(a + a†)/2`. Fails on non-square input.
    pub fn new(a: Mat<Complex64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        let entries = Mat::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
        Ok(Self { entries })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let a = Mat::from_fn(dim, dim, f);
        Self::new(a).expect("square by construction")
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: Mat::identity(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn as_mat(&self) -> MatRef<'_, Complex64> {
        self.entries.as_ref()
    }

    pub fn into_mat(self) -> Mat<Complex64> {
        self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entries[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(self.entries.as_ref())
    }

    /// Entry-wise transpose, which for a Hermitian matrix is its complex conjugate.
    pub fn transpose(&self) -> Self {
        let n = self.dim();
        Self {
            entries: Mat::from_fn(n, n, |i, j| self.entries[(j, i)]),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let n = self.dim();
        Self {
            entries: Mat::from_fn(n, n, |i, j| self.entries[(i, j)] * s),
        }
    }
}

/// Largest `|a_ij - conj(a_ji)|`.
pub fn hermiticity_error(a: MatRef<'_, Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(a: MatRef<'_, Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max(a[(i, j)].norm());
        }
    }
    worst
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Mat<Complex64>,
}

impl EigenSystem {
    /// `V·diag(f(λ))·V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let scaled = Mat::from_fn(n, n, |i, j| self.vectors[(i, j)] * fv[j]);
        let out = &scaled * self.vectors.adjoint();
        HermitianMatrix::new(out).expect("square")
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map_values(|x| x)
    }
}

pub fn eigh(h: &HermitianMatrix) -> Result<EigenSystem> {
    let dim = h.dim();
    let evd = h
        .entries
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenNoConvergence { dim })?;
    let s = evd.S();
    let values: Vec<f64> = (0..dim).map(|i| s[i].re).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenNoConvergence { dim });
    }
    Ok(EigenSystem {
        values,
        vectors: evd.U().to_owned(),
    })
}

/// Ascending eigenvalues only; several times cheaper than [`eigh`].
pub fn eigvalsh(h: &HermitianMatrix) -> Result<Vec<f64>> {
    let dim = h.dim();
    let values = h
        .entries
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenNoConvergence { dim })?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenNoConvergence { dim });
    }
    Ok(values)
}

/// Principal square root together with what had to be clamped to get it.
#[derive(Debug, Clone)]
pub struct SqrtOutcome {
    pub root: HermitianMatrix,
    /// Smallest eigenvalue of the input, before clamping.
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Number of eigenvalues set to zero.
    pub clamped: usize,
}

pub fn hermitian_sqrt(h: &HermitianMatrix, clamp_tol: f64) -> Result<HermitianMatrix> {
    hermitian_sqrt_outcome(h, clamp_tol).map(|o| o.root)
}

pub fn hermitian_sqrt_outcome(h: &HermitianMatrix, clamp_tol: f64) -> Result<SqrtOutcome> {
    let es = eigh(h)?;
    let min = es.values.first().copied().unwrap_or(0.0);
    let max = es.values.last().copied().unwrap_or(0.0);
    let scale = max.max(0.0);
    let floor = -clamp_tol * scale;
    if min < floor || (scale == 0.0 && min < 0.0) {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
            tolerance: clamp_tol,
        });
    }
    let clamped = es.values.iter().filter(|&&v| v < 0.0).count();
    let root = es.map_values(|v| v.max(0.0).sqrt());
    Ok(SqrtOutcome {
        root,
        min_eigenvalue: min,
        max_eigenvalue: max,
        clamped,
    })
}

/// Sum of absolute eigenvalues.
pub fn trace_norm_hermitian(h: &HermitianMatrix) -> Result<f64> {
    Ok(eigvalsh(h)?.iter().map(|v| v.abs()).sum())
}

/// Transpose over the first (slow-index) factor of an `m² × m²` matrix:
/// `out[(i,k),(j,l)] = rho[(j,k),(i,l)]`.
pub fn partial_transpose_first(rho: &HermitianMatrix, m: usize) -> Result<HermitianMatrix> {
    let dim = rho.dim();
    if m == 0 || m.checked_mul(m) != Some(dim) {
        return Err(Error::DimensionMismatch(format!(
            "partial transpose needs dim = m² = {}, got {dim}",
            m.saturating_mul(m)
        )));
    }
    let src = &rho.entries;
    let entries = Mat::from_fn(dim, dim, |r, c| {
        let (i, k) = (r / m, r % m);
        let (j, l) = (c / m, c % m);
        src[(j * m + k, i * m + l)]
    });
    // Already Hermitian; skip the symmetrizing pass.
    Ok(HermitianMatrix { entries })
}

/// Spectrum of the circulant matrix `C[j][k] = c[(k - j) mod n]` by direct DFT.
pub fn circulant_eigenvalues(first_row: &[Complex64]) -> Vec<Complex64> {
    let n = first_row.len();
    (0..n)
        .map(|l| {
            first_row
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    let angle = 2.0 * PI * ((k * l) % n) as f64 / n as f64;
                    c * Complex64::from_polar(1.0, angle)
                })
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::coherent_overlap;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat<Complex64> {
        Mat::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
        HermitianMatrix::new(random_matrix(rng, n, n)).unwrap()
    }

    /// B·B† with B of the given rank: PSD, possibly singular.
    fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> HermitianMatrix {
        let b = random_matrix(rng, n, rank);
        HermitianMatrix::new(&b * b.adjoint()).unwrap()
    }

    fn max_diff(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..a.ncols() {
            for i in 0..a.nrows() {
                worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
            }
        }
        worst
    }

    #[test]
    fn eigh_examples() {
        assert_eq!(eigh(&HermitianMatrix::identity(3)).unwrap().values, vec![1.0; 3]);
        let v = eigh(&HermitianMatrix::from_real_diagonal(&[2.0, -1.0])).unwrap().values;
        assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 2.0).abs() < 1e-15);
        let x = HermitianMatrix::from_fn(2, |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let v = eigh(&x).unwrap().values;
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_reconstructs_and_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 5, 17, 40] {
            let h = random_hermitian(&mut rng, n);
            let es = eigh(&h).unwrap();
            assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
            let err = max_diff(es.reconstruct().as_mat(), h.as_mat());
            assert!(err <= 1e-10 * h.max_abs(), "n={n} err={err}");
            let gram = es.vectors.adjoint() * &es.vectors;
            let id = Mat::<Complex64>::identity(n, n);
            assert!(max_diff(gram.as_ref(), id.as_ref()) < 1e-10);
            let vals = eigvalsh(&h).unwrap();
            for (a, b) in vals.iter().zip(&es.values) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn new_symmetrizes_and_rejects_rectangles() {
        let a = Mat::from_fn(2, 2, |i, j| c((i * 2 + j) as f64, 0.0));
        let h = HermitianMatrix::new(a).unwrap();
        assert!(hermiticity_error(h.as_mat()) == 0.0);
        assert_eq!(h.get(0, 1), c(1.5, 0.0));
        assert!(HermitianMatrix::new(Mat::zeros(2, 3)).is_err());
    }

    #[test]
    fn sqrt_examples() {
        let id = HermitianMatrix::identity(4);
        let r = hermitian_sqrt(&id, DEFAULT_CLAMP_TOL).unwrap();
        assert!(max_diff(r.as_mat(), id.as_mat()) < 1e-14);

        let r = hermitian_sqrt(&HermitianMatrix::from_real_diagonal(&[4.0, 9.0]), DEFAULT_CLAMP_TOL).unwrap();
        assert!((r.get(0, 0).re - 2.0).abs() < 1e-14 && (r.get(1, 1).re - 3.0).abs() < 1e-14);
        assert!(r.get(0, 1).norm() < 1e-14);

        // Gram matrix of |0.5⟩ and |-0.5⟩.
        let amps = [c(0.5, 0.0), c(-0.5, 0.0)];
        let g = HermitianMatrix::from_fn(2, |p, q| coherent_overlap(amps[p], amps[q]));
        let a = hermitian_sqrt(&g.transpose(), DEFAULT_CLAMP_TOL).unwrap();
        let sq = a.as_mat() * a.as_mat();
        assert!(max_diff(sq.as_ref(), g.transpose().as_mat()) < 1e-10);
    }

    #[test]
    fn sqrt_rejects_indefinite_and_clamps_noise() {
        let h = HermitianMatrix::from_real_diagonal(&[1.0, -0.5]);
        assert!(matches!(
            hermitian_sqrt(&h, DEFAULT_CLAMP_TOL),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        let h = HermitianMatrix::from_real_diagonal(&[1.0, -1e-13]);
        let out = hermitian_sqrt_outcome(&h, DEFAULT_CLAMP_TOL).unwrap();
        assert_eq!(out.clamped, 1);
        assert_eq!(out.root.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn trace_norm_examples() {
        let h = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!((trace_norm_hermitian(&h).unwrap() - 2.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_psd(&mut rng, 6, 3);
        let rho = p.scale(1.0 / p.trace().re);
        assert!((trace_norm_hermitian(&rho).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_examples() {
        let id = HermitianMatrix::identity(9);
        let pt = partial_transpose_first(&id, 3).unwrap();
        assert!(max_diff(pt.as_mat(), id.as_mat()) == 0.0);
        assert!(partial_transpose_first(&id, 2).is_err());
        assert!(partial_transpose_first(&HermitianMatrix::identity(8), 3).is_err());
    }

    #[test]
    fn partial_transpose_of_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = 3;
        let ra = random_psd(&mut rng, m, 2);
        let rb = random_psd(&mut rng, m, 3);
        let kron = |a: &HermitianMatrix, b: &HermitianMatrix| {
            HermitianMatrix::from_fn(m * m, |r, c| a.get(r / m, c / m) * b.get(r % m, c % m))
        };
        let prod = kron(&ra, &rb);
        let pt = partial_transpose_first(&prod, m).unwrap();
        let expected = kron(&ra.transpose(), &rb);
        assert!(max_diff(pt.as_mat(), expected.as_mat()) < 1e-14);
        let a = eigvalsh(&prod).unwrap();
        let b = eigvalsh(&pt).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(b[0] > -1e-12);
    }

    #[test]
    fn circulant_examples() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let v = circulant_eigenvalues(&[one, zero, zero]);
        assert!(v.iter().all(|z| (z - one).norm() < 1e-15));
        let v = circulant_eigenvalues(&[one, one]);
        assert!((v[0] - 2.0).norm() < 1e-15 && v[1].norm() < 1e-15);
    }

    #[test]
    fn circulant_matches_eigh_for_gram_matrix() {
        // G for M=8, |α|²=2.86, η=0.7.
        let m = 8;
        let amp = (0.7f64 * 2.86).sqrt();
        let states: Vec<Complex64> = (1..=m)
            .map(|q| Complex64::from_polar(amp, -2.0 * PI * q as f64 / m as f64))
            .collect();
        let g = HermitianMatrix::from_fn(m, |p, q| coherent_overlap(states[p], states[q]));
        let row: Vec<Complex64> = (0..m).map(|q| g.get(0, q)).collect();
        let mut dft: Vec<f64> = circulant_eigenvalues(&row)
            .iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-12);
                z.re
            })
            .collect();
        dft.sort_by(f64::total_cmp);
        let vals = eigh(&g).unwrap().values;
        for (a, b) in dft.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    fn hermitian_circulant(row_half: &[f64], n: usize) -> (Vec<Complex64>, HermitianMatrix) {
        // c_k = conj(c_{n-k}) makes the circulant Hermitian.
        let mut row = vec![c(0.0, 0.0); n];
        row[0] = c(row_half[0], 0.0);
        for k in 1..n {
            let kk = k.min(n - k);
            let z = c(row_half[2 * kk - 1], row_half[2 * kk]);
            row[k] = if k <= n / 2 { z } else { z.conj() };
        }
        if n % 2 == 0 {
            row[n / 2] = c(row[n / 2].re, 0.0);
        }
        let h = HermitianMatrix::from_fn(n, |j, k| row[(k + n - j) % n]);
        (row, h)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn sqrt_squares_back(seed in any::<u64>(), n in 1usize..100, rank_frac in 0.2f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rank = ((n as f64 * rank_frac).ceil() as usize).max(1);
            let h = random_psd(&mut rng, n, rank);
            let out = hermitian_sqrt_outcome(&h, DEFAULT_CLAMP_TOL).unwrap();
            let sq = out.root.as_mat() * out.root.as_mat();
            prop_assert!(max_diff(sq.as_ref(), h.as_mat()) <= 1e-8 * out.max_eigenvalue);
            prop_assert!(eigvalsh(&out.root).unwrap()[0] >= -1e-10 * out.max_eigenvalue.sqrt());
        }

        #[test]
        fn trace_norm_bounds_trace(seed in any::<u64>(), n in 1usize..30) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(&mut rng, n);
            prop_assert!(trace_norm_hermitian(&h).unwrap() + 1e-12 >= h.trace().re.abs());
        }

        #[test]
        fn partial_transpose_involution(seed in any::<u64>(), m in 1usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(&mut rng, m * m);
            let pt = partial_transpose_first(&h, m).unwrap();
            prop_assert!((pt.trace() - h.trace()).norm() < 1e-12);
            prop_assert!(hermiticity_error(pt.as_mat()) < 1e-14);
            let back = partial_transpose_first(&pt, m).unwrap();
            prop_assert!(max_diff(back.as_mat(), h.as_mat()) == 0.0);
        }

        #[test]
        fn circulant_spectrum_equals_eigh(half in proptest::collection::vec(-1.0f64..1.0, 41), n in 1usize..40) {
            let (row, h) = hermitian_circulant(&half, n);
            let mut dft: Vec<f64> = circulant_eigenvalues(&row).iter().map(|z| z.re).collect();
            dft.sort_by(f64::total_cmp);
            let vals = eigvalsh(&h).unwrap();
            for (a, b) in dft.iter().zip(&vals) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
