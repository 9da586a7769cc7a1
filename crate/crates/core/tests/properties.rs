//! Property-based invariants over randomly generated inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use toeplitz_expm::circulant::CirculantOperator;
use toeplitz_expm::dense::{one_norm_vec, two_norm};
use toeplitz_expm::driver::{relative_error, tolerance_budget};
use toeplitz_expm::gsf::GsfInverse;
use toeplitz_expm::toeplitz::ToeplitzMatrix;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n..=n)
        .prop_map(|v| v.into_iter().map(|(re, im)| c(re, im)).collect())
}

/// Toeplitz matrix with a heavy diagonal (keeps the solves well posed).
fn toeplitz_strategy(n: usize) -> impl Strategy<Value = ToeplitzMatrix> {
    (complex_vec(n), complex_vec(n), 2.0f64..6.0).prop_map(move |(mut col, mut row, d)| {
        for (k, v) in col.iter_mut().enumerate().skip(1) {
            *v *= 1.0 / ((k * k) as f64 + 1.0);
        }
        for (k, v) in row.iter_mut().enumerate().skip(1) {
            *v *= 1.0 / ((k * k) as f64 + 1.0);
        }
        col[0] = c(d, 0.0);
        row[0] = col[0];
        ToeplitzMatrix::from_columns(col, row).unwrap()
    })
}

fn rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    num / two_norm(b).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fft_matvec_matches_dense(
        dim in 1usize..64,
        seed_t in toeplitz_strategy(64),
        v in complex_vec(64),
    ) {
        // Truncate a fixed-size draw to the sampled dimension.
        let col = seed_t.first_col()[..dim].to_vec();
        let row = seed_t.first_row()[..dim].to_vec();
        let t = ToeplitzMatrix::from_columns(col, row).unwrap();
        let v = &v[..dim];
        let fast = t.matvec(v).unwrap();
        let dense = t.to_dense(128).unwrap().matvec(v);
        prop_assert!(rel_diff(&fast, &dense) <= 1e-12);
    }

    #[test]
    fn matvec_linearity(
        t in toeplitz_strategy(48),
        u in complex_vec(48),
        v in complex_vec(48),
        are in -2.0f64..2.0, aim in -2.0f64..2.0,
        bre in -2.0f64..2.0, bim in -2.0f64..2.0,
    ) {
        let alpha = c(are, aim);
        let beta = c(bre, bim);
        let combo: Vec<Complex64> = u.iter().zip(&v).map(|(a, b)| alpha * a + beta * b).collect();
        let lhs = t.matvec(&combo).unwrap();
        let tu = t.matvec(&u).unwrap();
        let tv = t.matvec(&v).unwrap();
        let rhs: Vec<Complex64> = tu.iter().zip(&tv).map(|(a, b)| alpha * a + beta * b).collect();
        let scale = two_norm(&rhs).max(two_norm(&lhs)).max(1e-12);
        prop_assert!(rel_diff(&lhs, &rhs) <= 1e-12 || two_norm(&lhs) / scale <= 1e-12);
    }

    #[test]
    fn vector_norm_equivalence(v in complex_vec(40)) {
        let n1 = one_norm_vec(&v);
        let n2 = two_norm(&v);
        prop_assert!(n2 <= n1 + 1e-12);
        prop_assert!(n1 <= (v.len() as f64).sqrt() * n2 + 1e-12);
    }

    #[test]
    fn circulant_solve_round_trip(
        mut col in complex_vec(32),
        b in complex_vec(32),
        d in 4.0f64..8.0,
    ) {
        for (k, v) in col.iter_mut().enumerate().skip(1) {
            *v *= 0.5 / (k as f64 + 1.0);
        }
        col[0] = c(d, 0.0);
        let m = CirculantOperator::from_first_column(&col).unwrap();
        let x = m.solve(&b).unwrap();
        let back = m.matvec(&x).unwrap();
        prop_assert!(rel_diff(&back, &b) <= 1e-12);
    }

    #[test]
    fn gsf_apply_matches_dense_inverse(t in toeplitz_strategy(48)) {
        let n = t.n();
        let lu = t.to_dense(128).unwrap().lu().unwrap();
        let mut e1 = vec![c(0.0, 0.0); n];
        e1[0] = c(1.0, 0.0);
        let mut en = vec![c(0.0, 0.0); n];
        en[n - 1] = c(1.0, 0.0);
        let g = GsfInverse::from_solutions(lu.solve_vec(&e1), lu.solve_vec(&en)).unwrap();
        let v: Vec<Complex64> = (0..n).map(|i| c(1.0 / (i + 1) as f64, 0.3)).collect();
        let got = g.apply(&v).unwrap();
        let want = lu.solve_vec(&v);
        prop_assert!(rel_diff(&got, &want) <= 1e-10);
    }

    #[test]
    fn budget_is_linear_in_tol_exp(
        t in toeplitz_strategy(32),
        gamma in 0.01f64..2.0,
        tol_exp in 1e-12f64..1e-2,
    ) {
        // Doubling tol_exp doubles tol_sys exactly (both are one fp scale).
        let b1 = tolerance_budget(&t, gamma, tol_exp, 100);
        let b2 = tolerance_budget(&t, gamma, 2.0 * tol_exp, 100);
        prop_assert_eq!(b2.tol_sys, 2.0 * b1.tol_sys);
    }

    #[test]
    fn relative_error_is_scale_invariant_for_pow2(
        a in complex_vec(24),
        b in complex_vec(24),
    ) {
        prop_assume!(two_norm(&a) > 1e-6);
        let base = relative_error(&a, &b).unwrap();
        let a2: Vec<Complex64> = a.iter().map(|v| 8.0 * v).collect();
        let b2: Vec<Complex64> = b.iter().map(|v| 8.0 * v).collect();
        prop_assert_eq!(relative_error(&a2, &b2).unwrap(), base);
    }
}
