//! Seeded fixtures shared by unit, property, and acceptance tests.

use num_complex::Complex64;

use crate::rng::SplitMix64;
use crate::toeplitz::ToeplitzMatrix;

/// Well-conditioned random complex Toeplitz matrix: a heavy diagonal with
/// off-diagonals decaying like 1/k^2.
pub fn random_toeplitz(n: usize, seed: u64) -> ToeplitzMatrix {
    let mut g = SplitMix64::new(seed);
    let mut col = Vec::with_capacity(n);
    let mut row = Vec::with_capacity(n);
    let diag = Complex64::new(4.0 + g.next_f64(), g.next_normal() * 0.2);
    col.push(diag);
    row.push(diag);
    for k in 1..n {
        let damp = 1.0 / ((k * k) as f64 + 1.0);
        col.push(Complex64::new(
            g.next_normal() * damp,
            g.next_normal() * damp,
        ));
        row.push(Complex64::new(
            g.next_normal() * damp,
            g.next_normal() * damp,
        ));
    }
    ToeplitzMatrix::from_columns(col, row).expect("corner entries agree by construction")
}

/// Seeded vector with standard-normal real and imaginary parts.
pub fn random_complex_vec(n: usize, seed: u64) -> Vec<Complex64> {
    let mut g = SplitMix64::new(seed);
    (0..n)
        .map(|_| Complex64::new(g.next_normal(), g.next_normal()))
        .collect()
}

/// The all-ones starting vector used throughout the experiment tables.
pub fn ones_vector(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0); n]
}
