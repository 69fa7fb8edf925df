//! Small dense helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Orthonormal basis of the column space of `m` by Gram–Schmidt with column
/// pivoting and one reorthogonalization pass. Columns whose residual norm falls
/// to `tol` or below are treated as dependent.
///
/// Used instead of an SVD: nalgebra's complex SVD occasionally returns
/// inaccurate singular vectors for strongly rank-deficient inputs.
pub fn orthonormal_range(m: &DMatrix<Complex64>, tol: f64) -> DMatrix<Complex64> {
    let rows = m.nrows();
    let mut residual: Vec<DVector<Complex64>> = m.column_iter().map(|c| c.into_owned()).collect();
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    while basis.len() < rows {
        let Some((best, norm)) = residual
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        else {
            break;
        };
        if norm <= tol {
            break;
        }
        let mut q = residual[best].clone();
        for _ in 0..2 {
            for b in &basis {
                let coeff = b.dotc(&q);
                q -= b * coeff;
            }
        }
        let qn = q.norm();
        if qn <= tol {
            residual[best].fill(Complex64::new(0.0, 0.0));
            continue;
        }
        q /= Complex64::new(qn, 0.0);
        for c in residual.iter_mut() {
            let coeff = q.dotc(c);
            *c -= &q * coeff;
        }
        basis.push(q);
    }
    if basis.is_empty() {
        DMatrix::zeros(rows, 0)
    } else {
        DMatrix::from_columns(&basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rank_and_span() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(2.0, 0.0),
                c(0.0, 1.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 1.0),
                c(2.0, 2.0),
                c(-1.0, 1.0),
            ],
        );
        let q = orthonormal_range(&m, 1e-10);
        assert_eq!(q.ncols(), 1);
        let proj = &q * q.adjoint();
        assert!((proj * &m - &m).norm() < 1e-12);
        assert_eq!(orthonormal_range(&DMatrix::zeros(4, 2), 1e-10).ncols(), 0);
    }

    proptest! {
        #[test]
        fn range_of_low_rank_products(seed in 0u64..500, r in 2usize..9, k in 0usize..9) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = k.min(r);
            let mut g = |a: usize, b: usize| DMatrix::from_fn(a, b, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let m = g(r, k) * g(k, r);
            let q = orthonormal_range(&m, 1e-9);
            prop_assert_eq!(q.ncols(), k);
            prop_assert!((q.adjoint() * &q - DMatrix::identity(k, k)).norm() < 1e-10);
            prop_assert!((&q * q.adjoint() * &m - &m).norm() < 1e-9 * (1.0 + m.norm()));
        }
    }
}
