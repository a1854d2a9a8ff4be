//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::Real;

/// Eigen-decomposition of a symmetric matrix with eigenvalues in ascending
/// order; column `i` of the returned matrix belongs to eigenvalue `i`.
pub fn sym_eigen<T: Real>(m: &DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (m + m.transpose()) * T::lit(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn sym_eigenvalues<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    sym_eigen(m).0
}

/// Columns of `vectors` (an `n x k` matrix) selected by `keep`.
pub fn select_columns<T: Real>(m: &DMatrix<T>, keep: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), keep.len(), |r, c| m[(r, keep[c])])
}

pub fn hstack<T: Real>(parts: &[&DMatrix<T>]) -> DMatrix<T> {
    let rows = parts.first().map_or(0, |p| p.nrows());
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        assert_eq!(p.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, at), (rows, p.ncols())).copy_from(*p);
        at += p.ncols();
    }
    out
}

pub fn columns_to_matrix<T: Real>(n: usize, cols: &[DVector<T>]) -> DMatrix<T> {
    let mut out = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Orthonormal basis of the orthogonal complement of the column span of an
/// orthonormal `n x k` matrix.
pub fn orthogonal_complement<T: Real>(basis: &DMatrix<T>) -> DMatrix<T> {
    let n = basis.nrows();
    let k = basis.ncols();
    let aug = hstack(&[basis, &DMatrix::identity(n, n)]);
    let q = aug.qr().q();
    q.columns(k, n - k).into_owned()
}

/// Orthonormal basis of the column span of `m`, keeping left singular
/// vectors whose singular value exceeds `rel_tol * max_singular_value`.
pub fn column_space<T: Real>(m: &DMatrix<T>, rel_tol: f64) -> DMatrix<T> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().fold(T::zero(), |a, &b| a.max(b));
    let thr = smax * T::lit(rel_tol);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > thr && smax > T::zero())
        .collect();
    select_columns(&u, &keep)
}

/// Numerical rank with relative singular-value threshold.
pub fn numerical_rank<T: Real>(m: &DMatrix<T>, rel_tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let smax = sv.iter().fold(T::zero(), |a, &b| a.max(b));
    if smax == T::zero() {
        return 0;
    }
    let thr = smax * T::lit(rel_tol);
    sv.iter().filter(|&&s| s > thr).count()
}

/// Orthonormal basis of the null space of `m` (right singular vectors with
/// singular value below `abs_tol`).
pub fn null_space<T: Real>(m: &DMatrix<T>, abs_tol: f64) -> DMatrix<T> {
    let n = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    // Work with the Gram matrix so tall and wide inputs behave the same.
    let gram = m.tr_mul(m);
    let (vals, vecs) = sym_eigen(&gram);
    let thr = T::lit(abs_tol * abs_tol);
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] < thr).collect();
    select_columns(&vecs, &keep)
}

/// Sine of the largest principal angle between the spans of two
/// orthonormal bases. Returns 1 when the dimensions differ.
pub fn max_principal_angle_sin<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    if a.ncols() != b.ncols() || a.nrows() != b.nrows() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let residual = b - a * a.tr_mul(b);
    let sv = residual.singular_values();
    sv.iter()
        .fold(0.0f64, |acc, &s| acc.max(s.as_f64()))
        .min(1.0)
}

/// `max |G - I|` entrywise for the Gram matrix of the columns.
pub fn gram_identity_residual<T: Real>(m: &DMatrix<T>) -> f64 {
    let g = m.tr_mul(m);
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((g[(i, j)] - target).abs().as_f64());
        }
    }
    worst
}

pub fn symmetry_residual<T: Real>(m: &DMatrix<T>) -> f64 {
    max_abs(&(m - m.transpose()))
}

pub fn max_abs<T: Real>(m: &DMatrix<T>) -> f64 {
    m.iter().fold(0.0f64, |acc, &v| acc.max(v.abs().as_f64()))
}

/// Compression `basisᵀ · m · basis`.
pub fn compress<T: Real>(m: &DMatrix<T>, basis: &DMatrix<T>) -> DMatrix<T> {
    basis.tr_mul(&(m * basis))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_is_sorted_and_reconstructs() {
        let m: DMatrix<f64> =
            DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, -1.0]);
        let (vals, vecs) = sym_eigen(&m);
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        assert!((vals[2] - 3.0).abs() < 1e-12);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vals));
        let back = &vecs * d * vecs.transpose();
        assert!(max_abs(&(back - m)) < 1e-12);
    }

    #[test]
    fn complement_is_orthonormal_and_orthogonal() {
        let v = DVector::from_vec(vec![1.0, 2.0, 2.0]) / 3.0;
        let b = columns_to_matrix(3, std::slice::from_ref(&v));
        let c = orthogonal_complement(&b);
        assert_eq!(c.ncols(), 2);
        assert!(gram_identity_residual(&c) < 1e-12);
        assert!(max_abs(&c.tr_mul(&b)) < 1e-12);
    }

    #[test]
    fn rank_and_null_space() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 2.0, 0.0, 2.0]);
        assert_eq!(numerical_rank(&m, 1e-8), 1);
        let ns = null_space(&m, 1e-7);
        assert_eq!(ns.ncols(), 2);
        assert!(max_abs(&(&m * &ns)) < 1e-12);
        assert_eq!(column_space(&m, 1e-8).ncols(), 1);
    }

    #[test]
    fn principal_angle_detects_equal_and_different_spans() {
        let a = DMatrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
        let b = DMatrix::from_row_slice(3, 1, &[-1.0, 0.0, 0.0]);
        let c = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 0.0]);
        assert!(max_principal_angle_sin(&a, &b) < 1e-15);
        assert!((max_principal_angle_sin(&a, &c) - 1.0).abs() < 1e-15);
    }
}
