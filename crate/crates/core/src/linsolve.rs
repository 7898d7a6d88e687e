//! Sparse direct solves for the Newton updates.
//!
//! Matrices are assembled as triplets, converted to compressed columns and
//! factorized with faer's sparse LU. The symbolic analysis is kept while
//! the sparsity pattern stays the same, which it does for a fixed system.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::MatMut;
use sprs::{CsMat, TriMat};

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("matrix is structurally singular")]
    StructurallySingular,
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("solution is not finite")]
    NonFinite,
    #[error("relative solve residual {0:.3e} indicates a numerically singular matrix")]
    Inaccurate(f64),
    #[error("no factorization available")]
    NotFactorized,
}

/// Relative residual above which a solve is treated as singular.
const ACCURACY_LIMIT: f64 = 1e-6;

#[derive(Default)]
pub struct SparseLu {
    symbolic: Option<(Vec<usize>, Vec<usize>, SymbolicLu<usize>)>,
    matrix: Option<CsMat<f64>>,
    lu: Option<Lu<usize, f64>>,
    factorizations: usize,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu")
            .field("factorized", &self.lu.is_some())
            .field("factorizations", &self.factorizations)
            .finish()
    }
}

impl SparseLu {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn factorizations(&self) -> usize {
        self.factorizations
    }

    pub fn is_factorized(&self) -> bool {
        self.lu.is_some()
    }

    /// Factorizes the square matrix given by `tri`.
    pub fn factorize(&mut self, tri: &TriMat<f64>) -> Result<(), SolveError> {
        let csc: CsMat<f64> = tri.to_csc();
        let n = csc.rows();
        let indptr = csc.indptr().into_raw_storage().to_vec();
        let indices = csc.indices();
        let same_pattern = matches!(&self.symbolic, Some((p, i, _)) if p.as_slice() == indptr.as_slice() && i.as_slice() == indices);
        if !same_pattern {
            let sym = SymbolicSparseColMatRef::new_checked(n, n, &indptr, None, indices);
            let symbolic = SymbolicLu::try_new(sym).map_err(|e| SolveError::Factorization(format!("{e:?}")))?;
            self.symbolic = Some((indptr, indices.to_vec(), symbolic));
        }
        let (p, i, symbolic) = self.symbolic.as_ref().expect("set above");
        let mat = SparseColMatRef::new(SymbolicSparseColMatRef::new_checked(n, n, p, None, i), csc.data());
        let lu = Lu::try_new_with_symbolic(symbolic.clone(), mat).map_err(|e| match e {
            faer::sparse::linalg::LuError::SymbolicSingular { .. } => SolveError::StructurallySingular,
            other => SolveError::Factorization(format!("{other:?}")),
        })?;
        self.lu = Some(lu);
        self.matrix = Some(csc);
        self.factorizations += 1;
        Ok(())
    }

    /// Solves in place and rejects results that do not reproduce the
    /// right-hand side.
    pub fn solve(&self, rhs: &mut [f64]) -> Result<(), SolveError> {
        let lu = self.lu.as_ref().ok_or(SolveError::NotFactorized)?;
        let mat = self.matrix.as_ref().ok_or(SolveError::NotFactorized)?;
        let b = rhs.to_vec();
        let n = rhs.len();
        lu.solve_in_place(MatMut::from_column_major_slice_mut(rhs, n, 1));
        if !rhs.iter().all(|v| v.is_finite()) {
            return Err(SolveError::NonFinite);
        }
        let mut ax = vec![0.0; n];
        let mut scale = vec![0.0; n];
        for (j, col) in mat.outer_iterator().enumerate() {
            for (i, &a) in col.iter() {
                ax[i] += a * rhs[j];
                scale[i] += (a * rhs[j]).abs();
            }
        }
        let num = ax.iter().zip(&b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let den = scale
            .iter()
            .zip(&b)
            .map(|(s, b)| s + b.abs())
            .fold(0.0, f64::max);
        if den > 0.0 && num / den > ACCURACY_LIMIT {
            return Err(SolveError::Inaccurate(num / den));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system_and_reuses_pattern() {
        let mut tri = TriMat::new((3, 3));
        for (i, j, v) in [(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0), (2, 2, 2.0), (1, 2, 0.0)] {
            tri.add_triplet(i, j, v);
        }
        let mut lu = SparseLu::new();
        lu.factorize(&tri).unwrap();
        let mut x = vec![5.0, 4.0, 2.0];
        lu.solve(&mut x).unwrap();
        for (a, b) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        lu.factorize(&tri).unwrap();
        assert_eq!(lu.factorizations(), 2);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut tri = TriMat::new((2, 2));
        for (i, j, v) in [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)] {
            tri.add_triplet(i, j, v);
        }
        let mut lu = SparseLu::new();
        let outcome = lu.factorize(&tri).and_then(|_| lu.solve(&mut [1.0, 0.0]));
        assert!(outcome.is_err());
    }
}
