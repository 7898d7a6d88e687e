//! Thin helpers over `sprs` compressed-row matrices.

use sprs::{CsMat, TriMat};

/// Compressed sparse row matrix used for every assembled operator.
pub type SparseMatrix = CsMat<f64>;

pub fn diag(values: &[f64]) -> SparseMatrix {
    let n = values.len();
    CsMat::new((n, n), (0..=n).collect(), (0..n).collect(), values.to_vec())
}

pub fn identity(n: usize) -> SparseMatrix {
    CsMat::eye(n)
}

pub fn kron(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    sprs::kronecker_product(a.view(), b.view())
}

pub fn transpose(a: &SparseMatrix) -> SparseMatrix {
    a.transpose_view().to_csr()
}

/// `diag(s) * a`
pub fn scale_rows(a: &SparseMatrix, s: &[f64]) -> SparseMatrix {
    let mut out = a.clone();
    for (i, mut row) in out.outer_iterator_mut().enumerate() {
        for (_, v) in row.iter_mut() {
            *v *= s[i];
        }
    }
    out
}

/// `a * diag(s)`
pub fn scale_cols(a: &SparseMatrix, s: &[f64]) -> SparseMatrix {
    let mut out = a.clone();
    for mut row in out.outer_iterator_mut() {
        for (j, v) in row.iter_mut() {
            *v *= s[j];
        }
    }
    out
}

pub fn matvec(a: &SparseMatrix, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.rows()];
    matvec_acc(a, x, 1.0, &mut y);
    y
}

/// `y += alpha * a * x`
pub fn matvec_acc(a: &SparseMatrix, x: &[f64], alpha: f64, y: &mut [f64]) {
    debug_assert_eq!(a.cols(), x.len());
    debug_assert_eq!(a.rows(), y.len());
    for (i, row) in a.outer_iterator().enumerate() {
        let s: f64 = row.iter().map(|(j, &v)| v * x[j]).sum();
        y[i] += alpha * s;
    }
}

/// `y += alpha * a^T * x`
pub fn matvec_transpose_acc(a: &SparseMatrix, x: &[f64], alpha: f64, y: &mut [f64]) {
    debug_assert_eq!(a.rows(), x.len());
    debug_assert_eq!(a.cols(), y.len());
    for (i, row) in a.outer_iterator().enumerate() {
        let xi = alpha * x[i];
        if xi != 0.0 {
            for (j, &v) in row.iter() {
                y[j] += v * xi;
            }
        }
    }
}

/// Builds a CSR matrix from dense rows, dropping exact zeros.
pub fn from_dense(rows: &[Vec<f64>]) -> SparseMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    let mut tri = TriMat::new((n, m));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                tri.add_triplet(i, j, v);
            }
        }
    }
    tri.to_csr()
}

pub fn to_dense(a: &SparseMatrix) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; a.cols()]; a.rows()];
    for (i, row) in a.outer_iterator().enumerate() {
        for (j, &v) in row.iter() {
            out[i][j] += v;
        }
    }
    out
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &SparseMatrix, b: &SparseMatrix) -> f64 {
    let d = a - b;
    d.data().iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_matches_diagonal_products() {
        let a = from_dense(&[vec![1.0, 2.0], vec![0.0, 3.0]]);
        let s = [2.0, -1.0];
        let left = &diag(&s) * &a;
        let right = &a * &diag(&s);
        assert_eq!(max_abs_diff(&scale_rows(&a, &s), &left), 0.0);
        assert_eq!(max_abs_diff(&scale_cols(&a, &s), &right), 0.0);
    }

    #[test]
    fn transpose_product_matches_explicit_transpose() {
        let a = from_dense(&[vec![1.0, 2.0, 0.0], vec![0.0, 3.0, 4.0]]);
        let x = [1.0, -2.0];
        let mut y = vec![0.0; 3];
        matvec_transpose_acc(&a, &x, 1.0, &mut y);
        assert_eq!(y, matvec(&transpose(&a), &x));
    }
}
