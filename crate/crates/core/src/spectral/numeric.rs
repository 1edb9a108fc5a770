//! Floating-point helpers on small complex matrices (nalgebra backed).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numeric_rank(m: &DMatrix<Complex64>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&max) = s.first() else { return 0 };
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * max).count()
}

/// Orthonormal vectors spanning the `k`-dimensional (numeric) null space of a
/// square matrix: right singular vectors of the `k` smallest singular values.
pub fn null_vectors(m: &DMatrix<Complex64>, k: usize) -> Vec<DVector<Complex64>> {
    let n = m.ncols();
    // pad to square so that v_t carries a full basis
    let sq = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    idx.into_iter()
        .take(k)
        .map(|r| DVector::from_iterator(n, v_t.row(r).iter().map(|z| z.conj())))
        .collect()
}

/// Smallest singular value divided by the largest.
pub fn relative_gap(m: &DMatrix<Complex64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rank_of_rank_one() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(4.0)]);
        assert_eq!(numeric_rank(&m, 1e-8), 1);
        let v = &null_vectors(&m, 1)[0];
        assert!((&m * v).norm() < 1e-12);
    }

    #[test]
    fn wide_matrix_null_space() {
        let m = DMatrix::from_row_slice(1, 3, &[c(1.0), c(1.0), c(1.0)]);
        let vs = null_vectors(&m, 2);
        for v in vs {
            assert!((&m * &v).norm() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }
}
