//! T. Chan's optimal circulant preconditioner, diagonalized by the DFT.
//!
//! For a Toeplitz matrix T the Frobenius-closest circulant has first column
//! `c_k = ((n-k) t_k + k t_{k-n}) / n`; its eigenvalues are the DFT of that
//! column, so both apply and solve cost two length-n transforms.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Dft;
use crate::toeplitz::ToeplitzMatrix;

/// Eigenvalue magnitudes below this are treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-300;

/// Circulant operator stored by its eigenvalues.
#[derive(Debug, Clone)]
pub struct CirculantOperator {
    n: usize,
    eigenvalues: Vec<Complex64>,
    dft: Arc<Dft>,
}

impl CirculantOperator {
    /// Build from an explicit first column.
    pub fn from_first_column(col: &[Complex64]) -> Result<Self> {
        assert!(!col.is_empty());
        let dft = Arc::new(Dft::new(col.len()));
        let eigenvalues = dft.forward(col);
        Self::from_eigenvalues(eigenvalues, dft)
    }

    fn from_eigenvalues(eigenvalues: Vec<Complex64>, dft: Arc<Dft>) -> Result<Self> {
        let min_abs = eigenvalues.iter().map(|e| e.norm()).fold(f64::INFINITY, f64::min);
        if min_abs < SINGULARITY_THRESHOLD {
            return Err(Error::SingularPreconditioner { min_abs });
        }
        Ok(Self {
            n: eigenvalues.len(),
            eigenvalues,
            dft,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// First column of the circulant (inverse DFT of the eigenvalues).
    pub fn first_column(&self) -> Vec<Complex64> {
        self.dft.inverse(&self.eigenvalues)
    }

    /// `C v` by pointwise multiplication in the Fourier basis.
    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                op: "circulant::matvec",
                expected: self.n,
                got: v.len(),
            });
        }
        let mut hat = self.dft.forward(v);
        for (h, e) in hat.iter_mut().zip(&self.eigenvalues) {
            *h *= e;
        }
        Ok(self.dft.inverse(&hat))
    }

    /// Solve `C x = b` by pointwise division in the Fourier basis.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                op: "circulant::solve",
                expected: self.n,
                got: b.len(),
            });
        }
        let mut hat = self.dft.forward(b);
        for (h, e) in hat.iter_mut().zip(&self.eigenvalues) {
            *h /= e;
        }
        Ok(self.dft.inverse(&hat))
    }
}

/// Frobenius-optimal (T. Chan) circulant preconditioner of a Toeplitz matrix.
pub fn chan_preconditioner(t: &ToeplitzMatrix) -> Result<CirculantOperator> {
    let n = t.n();
    let col: Vec<Complex64> = (0..n)
        .map(|k| {
            if k == 0 {
                t.first_col()[0]
            } else {
                ((n - k) as f64 * t.first_col()[k] + k as f64 * t.first_row()[n - k]) / n as f64
            }
        })
        .collect();
    CirculantOperator::from_first_column(&col)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{two_norm, DenseMatrix};
    use crate::rng::SplitMix64;
    use crate::toeplitz::{SymbolKind, SymbolSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dense_circulant(col: &[Complex64]) -> DenseMatrix {
        let n = col.len();
        DenseMatrix::from_fn(n, n, |i, j| col[(i + n - j) % n])
    }

    #[test]
    fn identity_is_its_own_preconditioner() {
        let mut col = vec![c(0.0, 0.0); 6];
        col[0] = c(1.0, 0.0);
        let t = ToeplitzMatrix::from_columns(col.clone(), col).unwrap();
        let m = chan_preconditioner(&t).unwrap();
        for e in m.eigenvalues() {
            assert!((e - c(1.0, 0.0)).norm() < 1e-12);
        }
        let b = vec![c(2.5, -1.0); 6];
        let x = m.solve(&b).unwrap();
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).norm() < 1e-12);
        }
    }

    #[test]
    fn circulant_toeplitz_is_fixed_point() {
        // first_row[k] = first_col[n-k] makes T itself circulant.
        let n = 8;
        let mut g = SplitMix64::new(40);
        let col: Vec<Complex64> = (0..n)
            .map(|_| c(g.next_normal(), g.next_normal()))
            .collect();
        let mut row = vec![col[0]];
        for k in 1..n {
            row.push(col[n - k]);
        }
        let t = ToeplitzMatrix::from_columns(col.clone(), row).unwrap();
        let m = chan_preconditioner(&t).unwrap();
        let got = m.first_column();
        for (a, b) in got.iter().zip(&col) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn scalar_circulant_solve() {
        let col = vec![c(2.0, 0.0), c(0.0, 0.0)];
        let m = CirculantOperator::from_first_column(&col).unwrap();
        let x = m.solve(&[c(4.0, 0.0), c(6.0, 0.0)]).unwrap();
        assert!((x[0] - c(2.0, 0.0)).norm() < 1e-13);
        assert!((x[1] - c(3.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn chan_matches_frobenius_least_squares_oracle() {
        // Independent route: for each circulant diagonal offset k, the
        // Frobenius-optimal coefficient is the mean of the n dense entries
        // that a circulant places at that offset.
        let n = 8;
        let t = crate::testing::random_toeplitz(n, 314);
        let dense = t.to_dense(64).unwrap();
        let mut want = vec![c(0.0, 0.0); n];
        for (k, w) in want.iter_mut().enumerate() {
            let mut acc = c(0.0, 0.0);
            for j in 0..n {
                let i = (j + k) % n;
                acc += dense.at(i, j);
            }
            *w = acc / n as f64;
        }
        let got = chan_preconditioner(&t).unwrap().first_column();
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn matvec_scalar_and_dense_oracle() {
        // All eigenvalues 3 is the circulant 3I: matvec triples the input.
        let col = vec![c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let m = CirculantOperator::from_first_column(&col).unwrap();
        let v = vec![c(1.0, -2.0), c(0.5, 0.0), c(0.0, 4.0)];
        for (a, b) in m.matvec(&v).unwrap().iter().zip(&v) {
            assert!((a - 3.0 * b).norm() < 1e-13);
        }

        let n = 16;
        let mut g = SplitMix64::new(21);
        let col: Vec<Complex64> = (0..n)
            .map(|_| c(g.next_normal(), g.next_normal()))
            .collect();
        let m = CirculantOperator::from_first_column(&col).unwrap();
        let v: Vec<Complex64> = (0..n)
            .map(|_| c(g.next_normal(), g.next_normal()))
            .collect();
        let fast = m.matvec(&v).unwrap();
        let want = dense_circulant(&col).matvec(&v);
        let mut diff = 0.0;
        for (a, b) in fast.iter().zip(&want) {
            diff += (a - b).norm_sqr();
        }
        assert!(diff.sqrt() / two_norm(&want) < 1e-12);
    }

    #[test]
    fn solve_round_trip_random_circulant() {
        let n = 32;
        let mut g = SplitMix64::new(7);
        let mut col: Vec<Complex64> = (0..n)
            .map(|_| c(g.next_normal() * 0.1, g.next_normal() * 0.1))
            .collect();
        col[0] += 4.0;
        let m = CirculantOperator::from_first_column(&col).unwrap();
        let b: Vec<Complex64> = (0..n)
            .map(|_| c(g.next_normal(), g.next_normal()))
            .collect();
        let x = m.solve(&b).unwrap();
        let back = m.matvec(&x).unwrap();
        let mut diff = 0.0;
        for (p, q) in back.iter().zip(&b) {
            diff += (p - q).norm_sqr();
        }
        assert!(diff.sqrt() / two_norm(&b) < 1e-12);
    }

    #[test]
    fn chan_beats_strang_in_frobenius_norm() {
        for n in [8usize, 16, 33, 64] {
            let t = crate::testing::random_toeplitz(n, 1000 + n as u64);
            let dense = t.to_dense(128).unwrap();
            let chan = dense_circulant(&chan_preconditioner(&t).unwrap().first_column());
            // Strang-style circulant from the first column alone.
            let mut strang_col = vec![c(0.0, 0.0); n];
            for (k, sc) in strang_col.iter_mut().enumerate() {
                *sc = if k <= n / 2 {
                    t.first_col()[k]
                } else {
                    t.first_row()[n - k]
                };
            }
            let strang = dense_circulant(&strang_col);
            let fro = |m: &DenseMatrix| -> f64 {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += m.at(i, j).norm_sqr();
                    }
                }
                acc.sqrt()
            };
            let chan_dist = fro(&chan.sub(&dense));
            let strang_dist = fro(&strang.sub(&dense));
            assert!(
                chan_dist <= strang_dist + 1e-12,
                "n = {n}: chan {chan_dist} vs strang {strang_dist}"
            );
        }
    }

    #[test]
    fn singular_preconditioner_is_detected() {
        // Column sums to zero in every row: eigenvalue at frequency zero vanishes.
        let col = vec![c(1.0, 0.0), c(-1.0, 0.0)];
        match CirculantOperator::from_first_column(&col) {
            Err(Error::SingularPreconditioner { min_abs }) => {
                assert!(min_abs < 1e-300);
            }
            other => panic!("expected SingularPreconditioner, got {other:?}"),
        }
    }

    #[test]
    fn chan_of_theta_squared_is_well_conditioned() {
        let t = ToeplitzMatrix::from_symbol(&SymbolSpec::new(SymbolKind::ThetaSquared), 64)
            .shifted(0.1);
        let m = chan_preconditioner(&t).unwrap();
        let min = m.eigenvalues().iter().map(|e| e.norm()).fold(f64::INFINITY, f64::min);
        assert!(min > 0.5, "min eigenvalue magnitude {min}");
    }
}
