//! Implicit Toeplitz matrices: circulant-embedding FFT matvec, symbol-based
//! generators, exact norms, and dense materialization for oracles.
//!
//! An n-by-n Toeplitz matrix is stored as its first column `t_0..t_{n-1}` and
//! first row `t_0, t_{-1}, .., t_{1-n}`. A matrix-vector product embeds the
//! matrix in an L-point circulant (L = smallest power of two >= 2n-1) and
//! costs three FFTs of length L; the embedding spectrum is cached on first
//! use.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::fft::{next_pow2, FftPlan};

/// Default guard against accidental O(n^2) dense materialization.
pub const DENSE_CAP_DEFAULT: usize = 4096;

/// Column sums are computed directly (matching dense-oracle arithmetic) up to
/// this dimension; beyond it an O(n) prefix-sum sweep takes over.
const ONE_NORM_DIRECT_MAX: usize = 4096;

/// Test-matrix generator symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    /// f(theta) = theta^2 on [-pi, pi]; real symmetric matrix.
    ThetaSquared,
    /// f(theta) = theta^2 + i*theta^3; real non-symmetric matrix.
    ThetaSquaredPlusICubed,
    /// Entries 1/(i - j + 1/2); singular values cluster near pi.
    Parter,
}

/// Symbol plus quadrature resolution for the Fourier-coefficient generators.
#[derive(Debug, Clone, Copy)]
pub struct SymbolSpec {
    pub kind: SymbolKind,
    /// FFT grid size for the coefficient quadrature; `None` means `8 n`.
    /// Ignored by `Parter`, which has a closed-form entry. The effective size
    /// is rounded up to a power of two and never below `4 n`.
    pub quadrature_size: Option<usize>,
}

impl SymbolSpec {
    pub fn new(kind: SymbolKind) -> Self {
        Self {
            kind,
            quadrature_size: None,
        }
    }

    pub fn with_quadrature(kind: SymbolKind, quadrature_size: usize) -> Self {
        Self {
            kind,
            quadrature_size: Some(quadrature_size),
        }
    }

    fn effective_grid(&self, n: usize) -> usize {
        let requested = self.quadrature_size.unwrap_or(8 * n);
        next_pow2(requested.max(4 * n).max(8))
    }
}

#[derive(Debug, Clone)]
struct Embedding {
    plan: Arc<FftPlan>,
    spectrum: Vec<Complex64>,
}

/// Implicit complex Toeplitz matrix.
#[derive(Debug)]
pub struct ToeplitzMatrix {
    n: usize,
    first_col: Vec<Complex64>,
    first_row: Vec<Complex64>,
    embedding: OnceLock<Embedding>,
}

impl Clone for ToeplitzMatrix {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            first_col: self.first_col.clone(),
            first_row: self.first_row.clone(),
            embedding: OnceLock::new(),
        }
    }
}

impl ToeplitzMatrix {
    /// Build from the first column and first row. The shared corner entry
    /// must agree to 1e-14 (absolute).
    pub fn from_columns(first_col: Vec<Complex64>, first_row: Vec<Complex64>) -> Result<Self> {
        if first_col.is_empty() || first_col.len() != first_row.len() {
            return Err(Error::DimensionMismatch {
                op: "toeplitz::from_columns",
                expected: first_col.len().max(1),
                got: first_row.len(),
            });
        }
        let diff = (first_col[0] - first_row[0]).norm();
        if diff > 1e-14 {
            return Err(Error::DiagonalMismatch { diff });
        }
        Ok(Self {
            n: first_col.len(),
            first_col,
            first_row,
            embedding: OnceLock::new(),
        })
    }

    /// Generate the n-by-n matrix whose k-th diagonal entry is the k-th
    /// Fourier coefficient `a_k = (1/2pi) \int f(theta) e^{-ik theta} dtheta`
    /// of the symbol, by FFT quadrature on a uniform grid. `Parter` bypasses
    /// quadrature entirely.
    pub fn from_symbol(spec: &SymbolSpec, n: usize) -> Self {
        assert!(n >= 1);
        match spec.kind {
            SymbolKind::Parter => {
                let first_col = (0..n)
                    .map(|k| Complex64::new(1.0 / (k as f64 + 0.5), 0.0))
                    .collect();
                let first_row = (0..n)
                    .map(|k| Complex64::new(1.0 / (0.5 - k as f64), 0.0))
                    .collect();
                Self {
                    n,
                    first_col,
                    first_row,
                    embedding: OnceLock::new(),
                }
            }
            SymbolKind::ThetaSquared | SymbolKind::ThetaSquaredPlusICubed => {
                let grid = spec.effective_grid(n);
                let plan = FftPlan::new(grid);
                let mut samples: Vec<Complex64> = (0..grid)
                    .map(|j| {
                        let theta = -std::f64::consts::PI
                            + 2.0 * std::f64::consts::PI * j as f64 / grid as f64;
                        let re = theta * theta;
                        match spec.kind {
                            SymbolKind::ThetaSquared => Complex64::new(re, 0.0),
                            SymbolKind::ThetaSquaredPlusICubed => {
                                // theta^3 jumps at the wrap point; the grid
                                // node theta = -pi must carry the periodic
                                // midpoint value (zero), or every
                                // coefficient picks up an O(pi^3/N) bias.
                                let im = if j == 0 { 0.0 } else { theta * theta * theta };
                                Complex64::new(re, im)
                            }
                            SymbolKind::Parter => unreachable!(),
                        }
                    })
                    .collect();
                plan.forward(&mut samples);
                let scale = 1.0 / grid as f64;
                let coeff = |k: isize| -> Complex64 {
                    let bin = k.rem_euclid(grid as isize) as usize;
                    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    samples[bin] * (sign * scale)
                };
                let first_col = (0..n).map(|k| coeff(k as isize)).collect();
                let first_row = (0..n).map(|k| coeff(-(k as isize))).collect();
                Self {
                    n,
                    first_col,
                    first_row,
                    embedding: OnceLock::new(),
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn first_col(&self) -> &[Complex64] {
        &self.first_col
    }

    pub fn first_row(&self) -> &[Complex64] {
        &self.first_row
    }

    /// Entry (i, j).
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        if i >= j {
            self.first_col[i - j]
        } else {
            self.first_row[j - i]
        }
    }

    /// `I + gamma * self`.
    pub fn shifted(&self, gamma: f64) -> ToeplitzMatrix {
        let mut col: Vec<Complex64> = self.first_col.iter().map(|t| gamma * t).collect();
        let mut row: Vec<Complex64> = self.first_row.iter().map(|t| gamma * t).collect();
        col[0] += 1.0;
        row[0] += 1.0;
        ToeplitzMatrix {
            n: self.n,
            first_col: col,
            first_row: row,
            embedding: OnceLock::new(),
        }
    }

    /// `alpha * self`.
    pub fn scaled(&self, alpha: Complex64) -> ToeplitzMatrix {
        ToeplitzMatrix {
            n: self.n,
            first_col: self.first_col.iter().map(|t| alpha * t).collect(),
            first_row: self.first_row.iter().map(|t| alpha * t).collect(),
            embedding: OnceLock::new(),
        }
    }

    fn embedding(&self) -> &Embedding {
        self.embedding.get_or_init(|| {
            let n = self.n;
            let l = next_pow2(2 * n - 1);
            let plan = Arc::new(FftPlan::new(l));
            let mut col = vec![Complex64::new(0.0, 0.0); l];
            col[..n].copy_from_slice(&self.first_col);
            for k in 1..n {
                col[l - k] = self.first_row[k];
            }
            plan.forward(&mut col);
            Embedding {
                plan,
                spectrum: col,
            }
        })
    }

    /// FFT matvec via the cached circulant embedding.
    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                op: "toeplitz::matvec",
                expected: self.n,
                got: v.len(),
            });
        }
        let emb = self.embedding();
        let l = emb.plan.len();
        let mut work = vec![Complex64::new(0.0, 0.0); l];
        work[..self.n].copy_from_slice(v);
        emb.plan.forward(&mut work);
        for (w, s) in work.iter_mut().zip(&emb.spectrum) {
            *w *= s;
        }
        emb.plan.inverse(&mut work);
        work.truncate(self.n);
        Ok(work)
    }

    /// Explicit dense form, guarded by `cap`.
    pub fn to_dense(&self, cap: usize) -> Result<DenseMatrix> {
        if self.n > cap {
            return Err(Error::DenseCapExceeded { n: self.n, cap });
        }
        Ok(DenseMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j)))
    }

    /// Exact induced 1-norm (max column modulus sum).
    pub fn one_norm(&self) -> f64 {
        let n = self.n;
        if n <= ONE_NORM_DIRECT_MAX {
            // Same summation order as a dense column sweep.
            let mut best = 0.0f64;
            for j in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += self.entry(i, j).norm();
                }
                best = best.max(acc);
            }
            best
        } else {
            self.one_norm_prefix()
        }
    }

    /// O(n) column sums via prefix sums over the diagonal index; summation
    /// order differs from the dense sweep by one subtraction per column.
    pub(crate) fn one_norm_prefix(&self) -> f64 {
        let n = self.n;
        // s[d] = |t_{d - (n-1)}| for d in 0..2n-1.
        let mut prefix = Vec::with_capacity(2 * n - 1);
        let mut acc = 0.0f64;
        for d in 0..(2 * n - 1) {
            let mag = if d < n - 1 {
                self.first_row[n - 1 - d].norm()
            } else {
                self.first_col[d - (n - 1)].norm()
            };
            acc += mag;
            prefix.push(acc);
        }
        let p = |d: isize| -> f64 {
            if d < 0 {
                0.0
            } else {
                prefix[d as usize]
            }
        };
        let mut best = 0.0f64;
        for j in 0..n {
            let hi = (2 * n - 2 - j) as isize;
            let lo = (n as isize - 2) - j as isize;
            best = best.max(p(hi) - p(lo));
        }
        best
    }

    /// The column/row proxy `max(||fcol||_1, ||frow||_1)` used in condition
    /// tables where the exact 1-norm is not worth a dense pass.
    pub fn one_norm_proxy(&self) -> f64 {
        let c = crate::dense::one_norm_vec(&self.first_col);
        let r = crate::dense::one_norm_vec(&self.first_row);
        c.max(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{one_norm_vec, two_norm};
    
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    use crate::testing::{random_complex_vec, random_toeplitz};

    #[test]
    fn from_columns_scalar_and_identity() {
        let t = ToeplitzMatrix::from_columns(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        assert_eq!(t.n(), 1);
        let id = ToeplitzMatrix::from_columns(
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let d = id.to_dense(16).unwrap();
        assert_eq!(d.at(0, 0), c(1.0, 0.0));
        assert_eq!(d.at(1, 1), c(1.0, 0.0));
        assert_eq!(d.at(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn from_columns_rejects_corner_mismatch() {
        let err = ToeplitzMatrix::from_columns(
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(3.0, 0.0), c(4.0, 0.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DiagonalMismatch { .. }));
    }

    #[test]
    fn from_columns_rejects_length_mismatch() {
        let err =
            ToeplitzMatrix::from_columns(vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(1.0, 0.0)])
                .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn theta_squared_coefficients_match_closed_form() {
        // a_0 = pi^2/3, a_k = 2 (-1)^k / k^2 by two integrations by parts.
        // Aliasing of the 1/k^2 tail is ~ 4 zeta(2) / N^2, so a 2^16-point
        // grid puts the quadrature well below the 1e-8 gate.
        let spec = SymbolSpec::with_quadrature(SymbolKind::ThetaSquared, 1 << 16);
        let t = ToeplitzMatrix::from_symbol(&spec, 64);
        let a0 = t.first_col()[0];
        assert!((a0.re - PI * PI / 3.0).abs() < 1e-8, "a0 = {a0}");
        assert!(a0.im.abs() < 1e-12);
        for k in 1..8usize {
            let want = 2.0 * if k % 2 == 0 { 1.0 } else { -1.0 } / (k * k) as f64;
            let got = t.first_col()[k];
            assert!((got.re - want).abs() < 1e-8, "k = {k}: {} vs {want}", got.re);
            assert!(got.im.abs() < 1e-10);
        }
        // a_1 = -2 specifically.
        assert!((t.first_col()[1].re + 2.0).abs() < 1e-8);

        // Default 8n grid carries O(1/N^2) aliasing; keep it pinned loosely.
        let coarse = ToeplitzMatrix::from_symbol(&SymbolSpec::new(SymbolKind::ThetaSquared), 64);
        assert!((coarse.first_col()[0].re - PI * PI / 3.0).abs() < 1e-4);
    }

    #[test]
    fn theta_squared_is_real_symmetric() {
        let t = ToeplitzMatrix::from_symbol(&SymbolSpec::new(SymbolKind::ThetaSquared), 48);
        for k in 0..48 {
            assert!((t.first_col()[k] - t.first_row()[k]).norm() < 1e-12);
            assert!(t.first_col()[k].im.abs() < 1e-12);
        }
    }

    #[test]
    fn theta_squared_plus_icubed_coefficients_match_closed_form() {
        // With f = theta^2 + i theta^3 the coefficients are real:
        //   a_k    = (-1)^k (2/k^2 - pi^2/k + 6/k^3)   (k > 0)
        //   a_{-k} = (-1)^k (2/k^2 + pi^2/k - 6/k^3)
        // Verified against a high-resolution grid to keep aliasing negligible.
        let n = 16;
        let spec = SymbolSpec::with_quadrature(SymbolKind::ThetaSquaredPlusICubed, 1 << 16);
        let t = ToeplitzMatrix::from_symbol(&spec, n);
        for k in 1..n {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            let kf = k as f64;
            let want_col = s * (2.0 / (kf * kf) - PI * PI / kf + 6.0 / (kf * kf * kf));
            let want_row = s * (2.0 / (kf * kf) + PI * PI / kf - 6.0 / (kf * kf * kf));
            assert!(
                (t.first_col()[k].re - want_col).abs() < 1e-6,
                "col k = {k}: {} vs {want_col}",
                t.first_col()[k].re
            );
            assert!(
                (t.first_row()[k].re - want_row).abs() < 1e-6,
                "row k = {k}: {} vs {want_row}",
                t.first_row()[k].re
            );
            assert!(t.first_col()[k].im.abs() < 1e-9);
            assert!(t.first_row()[k].im.abs() < 1e-9);
        }
    }

    #[test]
    fn theta_squared_plus_icubed_symmetric_part_is_theta_squared() {
        let n = 32;
        let a = ToeplitzMatrix::from_symbol(&SymbolSpec::new(SymbolKind::ThetaSquaredPlusICubed), n);
        let b = ToeplitzMatrix::from_symbol(&SymbolSpec::new(SymbolKind::ThetaSquared), n);
        for k in 1..n {
            let sym = 0.5 * (a.first_col()[k] + a.first_row()[k]);
            assert!(
                (sym - b.first_col()[k]).norm() < 1e-8,
                "k = {k}: {sym} vs {}",
                b.first_col()[k]
            );
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)] // entrywise comparison against a table
    fn parter_small_cases() {
        let t2 = ToeplitzMatrix::from_symbol(&SymbolSpec::new(SymbolKind::Parter), 2);
        assert_eq!(t2.first_col()[0], c(2.0, 0.0));
        assert_eq!(t2.first_col()[1], c(2.0 / 3.0, 0.0));
        assert_eq!(t2.first_row()[1], c(-2.0, 0.0));

        let t3 = ToeplitzMatrix::from_symbol(&SymbolSpec::new(SymbolKind::Parter), 3);
        let d = t3.to_dense(16).unwrap();
        let want = [
            [2.0, -2.0, -2.0 / 3.0],
            [2.0 / 3.0, 2.0, -2.0],
            [0.4, 2.0 / 3.0, 2.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((d.at(i, j).re - want[i][j]).abs() < 1e-15);
                assert_eq!(d.at(i, j).im, 0.0);
            }
        }
    }

    #[test]
    fn matvec_identity_and_ones() {
        let id = ToeplitzMatrix::from_columns(
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let v: Vec<Complex64> = (1..=4).map(|i| c(i as f64, 0.0)).collect();
        let got = id.matvec(&v).unwrap();
        for (g, w) in got.iter().zip(&v) {
            assert!((g - w).norm() < 1e-14);
        }

        let ones = ToeplitzMatrix::from_columns(vec![c(1.0, 0.0); 3], vec![c(1.0, 0.0); 3]).unwrap();
        let got = ones.matvec(&[c(1.0, 0.0); 3]).unwrap();
        for g in got {
            assert!((g - c(3.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn matvec_matches_dense_oracle() {
        let n = 64;
        let t = random_toeplitz(n, 1234);
        let v = random_complex_vec(n, 99);
        let fast = t.matvec(&v).unwrap();
        let dense = t.to_dense(DENSE_CAP_DEFAULT).unwrap().matvec(&v);
        let mut diff = 0.0;
        for (a, b) in fast.iter().zip(&dense) {
            diff += (a - b).norm_sqr();
        }
        let rel = diff.sqrt() / two_norm(&dense);
        assert!(rel < 1e-12, "rel = {rel:e}");
    }

    #[test]
    fn matvec_rejects_bad_length() {
        let t = random_toeplitz(8, 5);
        assert!(matches!(
            t.matvec(&[c(0.0, 0.0); 7]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn to_dense_small_cases() {
        let t = ToeplitzMatrix::from_columns(vec![c(5.0, 0.0)], vec![c(5.0, 0.0)]).unwrap();
        assert_eq!(t.to_dense(4).unwrap().at(0, 0), c(5.0, 0.0));

        let t = ToeplitzMatrix::from_columns(
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(1.0, 0.0), c(3.0, 0.0)],
        )
        .unwrap();
        let d = t.to_dense(4).unwrap();
        assert_eq!(d.at(0, 0), c(1.0, 0.0));
        assert_eq!(d.at(0, 1), c(3.0, 0.0));
        assert_eq!(d.at(1, 0), c(2.0, 0.0));
        assert_eq!(d.at(1, 1), c(1.0, 0.0));
    }

    #[test]
    fn to_dense_respects_cap() {
        let t = random_toeplitz(10, 3);
        assert!(matches!(
            t.to_dense(9),
            Err(Error::DenseCapExceeded { n: 10, cap: 9 })
        ));
    }

    #[test]
    fn one_norm_trivial_and_oracle() {
        let mut e1 = vec![c(0.0, 0.0); 10];
        e1[0] = c(1.0, 0.0);
        let id = ToeplitzMatrix::from_columns(e1.clone(), e1).unwrap();
        assert_eq!(id.one_norm(), 1.0);

        let ones = ToeplitzMatrix::from_columns(vec![c(1.0, 0.0); 5], vec![c(1.0, 0.0); 5]).unwrap();
        assert_eq!(ones.one_norm(), 5.0);

        let parter = ToeplitzMatrix::from_symbol(&SymbolSpec::new(SymbolKind::Parter), 4);
        assert_eq!(
            parter.one_norm(),
            parter.to_dense(16).unwrap().one_norm(),
            "column sweep must match the dense oracle bit for bit"
        );
    }

    #[test]
    fn one_norm_prefix_path_agrees() {
        for seed in [1u64, 2, 3] {
            let t = random_toeplitz(200, seed);
            let direct = t.one_norm();
            let prefix = t.one_norm_prefix();
            assert!(
                (direct - prefix).abs() <= 1e-12 * direct.max(1.0),
                "direct {direct} vs prefix {prefix}"
            );
        }
    }

    #[test]
    fn vector_norm_equivalence() {
        for seed in 0..10u64 {
            let n = 16 + (seed as usize) * 7;
            let v = random_complex_vec(n, seed);
            let n1 = one_norm_vec(&v);
            let n2 = two_norm(&v);
            assert!(n2 <= n1 + 1e-12);
            assert!(n1 <= (n as f64).sqrt() * n2 + 1e-12);
        }
    }

    #[test]
    fn concurrent_matvecs_share_one_cached_embedding() {
        // The lazily built embedding spectrum must be race-free: hammer the
        // first matvec from several threads and compare everything to a
        // sequential result.
        let n = 96;
        let t = random_toeplitz(n, 77);
        let v = random_complex_vec(n, 78);
        let want = t.clone().matvec(&v).unwrap();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..4)
                .map(|_| scope.spawn(|| t.matvec(&v).unwrap()))
                .collect();
            for h in handles {
                let got = h.join().unwrap();
                for (a, b) in got.iter().zip(&want) {
                    assert!((a - b).norm() < 1e-13);
                }
            }
        });
    }

    #[test]
    fn matvec_is_linear() {
        let n = 48;
        let t = random_toeplitz(n, 21);
        let u = random_complex_vec(n, 22);
        let v = random_complex_vec(n, 23);
        let alpha = c(0.7, -1.3);
        let beta = c(-0.4, 0.9);
        let combo: Vec<Complex64> = u
            .iter()
            .zip(&v)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        let lhs = t.matvec(&combo).unwrap();
        let tu = t.matvec(&u).unwrap();
        let tv = t.matvec(&v).unwrap();
        let rhs: Vec<Complex64> = tu
            .iter()
            .zip(&tv)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        let num: f64 = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(num / two_norm(&rhs) < 1e-12);
    }
}
