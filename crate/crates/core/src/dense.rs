//! Dense complex linear algebra: the oracle side of every dual-route check,
//! plus the small m-by-m workhorse for the Krylov coefficient problems.
//!
//! Matrices are row-major `Vec<Complex64>`. The LU path uses partial
//! pivoting; inversion solves all right-hand sides at once with row-axpy
//! sweeps so the inner loops stay contiguous (and parallelizable).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;
use crate::rng::SplitMix64;

/// 2-norm of a complex vector, summed left to right.
pub fn two_norm(v: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for x in v {
        acc += x.norm_sqr();
    }
    acc.sqrt()
}

/// 1-norm (sum of moduli), summed left to right.
pub fn one_norm_vec(v: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for x in v {
        acc += x.norm();
    }
    acc
}

/// Conjugated dot product `sum conj(a_i) * b_i`.
pub fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

/// `y += alpha * x`.
pub fn axpy(y: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![Complex64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                data.push(f(i, j));
            }
        }
        Self {
            n_rows,
            n_cols,
            data,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n_cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n_cols, "dense matvec dimension mismatch");
        par::map_indexed_sized(self.n_rows, self.n_cols, |i| {
            let row = self.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, x) in row.iter().zip(v) {
                acc += a * x;
            }
            acc
        })
    }

    /// `A^H v` (conjugate transpose apply).
    pub fn matvec_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n_rows, "dense adjoint matvec dimension mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_cols];
        for (i, vi) in v.iter().enumerate() {
            let row = self.row(i);
            let vi = vi.conj();
            for (o, a) in out.iter_mut().zip(row) {
                *o += (a * vi).conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n_cols, other.n_rows, "dense matmul dimension mismatch");
        let n = self.n_rows;
        let p = other.n_cols;
        let mut out = DenseMatrix::zeros(n, p);
        let lhs = &self.data;
        let k_len = self.n_cols;
        par::for_each_row_mut(&mut out.data, p, |i, out_row| {
            for k in 0..k_len {
                let a = lhs[i * k_len + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = other.row(k);
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        });
        out
    }

    /// `self + other`, entrywise.
    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data,
        }
    }

    /// `self += alpha * other`, entrywise.
    pub fn axpy_matrix(&mut self, alpha: Complex64, other: &DenseMatrix) {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// `self - other`, entrywise.
    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data,
        }
    }

    pub fn scale(&mut self, alpha: Complex64) {
        for v in self.data.iter_mut() {
            *v *= alpha;
        }
    }

    pub fn add_scaled_identity(&mut self, alpha: Complex64) {
        assert_eq!(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            self.data[i * self.n_cols + i] += alpha;
        }
    }

    /// Induced 1-norm: max over columns of the column's modulus sum.
    pub fn one_norm(&self) -> f64 {
        let mut sums = vec![0.0; self.n_cols];
        for i in 0..self.n_rows {
            for (s, a) in sums.iter_mut().zip(self.row(i)) {
                *s += a.norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value, estimated by power iteration on `A^H A`.
    ///
    /// The estimate approaches the true norm from below, so callers that use
    /// it as a "true error" cannot spuriously break an upper bound.
    pub fn spectral_norm_est(&self, rel_tol: f64, max_iter: usize) -> f64 {
        if self.data.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
            return 0.0;
        }
        let mut g = SplitMix64::new(0x5EED_CAFE);
        let mut v: Vec<Complex64> = (0..self.n_cols)
            .map(|_| Complex64::new(g.next_normal(), 0.0))
            .collect();
        let nv = two_norm(&v);
        for x in v.iter_mut() {
            *x /= nv;
        }
        let mut sigma = 0.0;
        for _ in 0..max_iter {
            let w = self.matvec(&v);
            let s = two_norm(&w);
            if s == 0.0 {
                return 0.0;
            }
            let mut u = self.matvec_adjoint(&w);
            let nu = two_norm(&u);
            if nu == 0.0 {
                return s;
            }
            for x in u.iter_mut() {
                *x /= nu;
            }
            v = u;
            if (s - sigma).abs() <= rel_tol * s {
                return s;
            }
            sigma = s;
        }
        sigma
    }

    pub fn lu(&self) -> Result<LuFactors> {
        assert_eq!(self.n_rows, self.n_cols, "LU requires a square matrix");
        let n = self.n_rows;
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_mag = lu[k * n + k].norm();
            for i in (k + 1)..n {
                let mag = lu[i * n + k].norm();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = i;
                }
            }
            if pivot_mag < 1e-300 {
                return Err(Error::SingularMatrix {
                    pivot: pivot_mag,
                    col: k,
                });
            }
            if pivot_row != k {
                perm.swap(k, pivot_row);
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let l = lu[i * n + k] / pivot;
                lu[i * n + k] = l;
                if l.re == 0.0 && l.im == 0.0 {
                    continue;
                }
                let (head, tail) = lu.split_at_mut((i) * n);
                let row_k = &head[k * n + k + 1..(k + 1) * n];
                let row_i = &mut tail[k + 1..n];
                for (a, b) in row_i.iter_mut().zip(row_k) {
                    *a -= l * b;
                }
            }
        }
        Ok(LuFactors {
            n,
            lu: DenseMatrix {
                n_rows: n,
                n_cols: n,
                data: lu,
            },
            perm,
        })
    }
}

/// Partial-pivoting LU factorization `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn n(&self) -> usize {
        self.n
    }

    /// min |u_ii| / max |u_ii| — a crude reciprocal condition estimate.
    pub fn diag_ratio(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..self.n {
            let d = self.lu.at(i, i).norm();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(b.len(), self.n, "LU solve dimension mismatch");
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut acc = x[i];
            let row = self.lu.row(i);
            for (k, xk) in x[..i].iter().enumerate() {
                acc -= row[k] * xk;
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for k in (i + 1)..n {
                acc -= row[k] * x[k];
            }
            x[i] = acc / row[i];
        }
        x
    }

    /// Full inverse via simultaneous solves on all columns of the identity.
    pub fn inverse(&self) -> DenseMatrix {
        let n = self.n;
        let mut x = DenseMatrix::zeros(n, n);
        for (i, &p) in self.perm.iter().enumerate() {
            x.set(i, p, Complex64::new(1.0, 0.0));
        }
        // Forward sweep: X <- L^{-1} X, row-axpy with full rows.
        for k in 0..n {
            let xk = x.row(k).to_vec();
            let lu = &self.lu;
            let below = &mut x.data[(k + 1) * n..];
            par::for_each_row_mut(below, n, |off, row| {
                let i = k + 1 + off;
                let l = lu.at(i, k);
                if l.re != 0.0 || l.im != 0.0 {
                    for (a, b) in row.iter_mut().zip(&xk) {
                        *a -= l * b;
                    }
                }
            });
        }
        // Backward sweep: X <- U^{-1} X.
        for k in (0..n).rev() {
            let ukk = self.lu.at(k, k);
            {
                let row_k = x.row_mut(k);
                for v in row_k.iter_mut() {
                    *v /= ukk;
                }
            }
            let xk = x.row(k).to_vec();
            let lu = &self.lu;
            let above = &mut x.data[..k * n];
            par::for_each_row_mut(above, n, |i, row| {
                let u = lu.at(i, k);
                if u.re != 0.0 || u.im != 0.0 {
                    for (a, b) in row.iter_mut().zip(&xk) {
                        *a -= u * b;
                    }
                }
            });
        }
        x
    }
}
