//! Thin wrappers over `nalgebra` for the dense kernels used throughout.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Row-major `Vec<Vec<f64>>` to a dense matrix.
pub fn from_rows(rows: &[Vec<f64>]) -> Matrix {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(r, c, |i, j| rows[i][j])
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Solves `a x = b` by LU with partial pivoting; `None` if singular.
pub fn solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let lu = a.clone().lu();
    let rhs = DVector::from_column_slice(b);
    let x = lu.solve(&rhs)?;
    x.iter().all(|v| v.is_finite()).then(|| x.iter().copied().collect())
}

/// Numerical rank from singular values relative to the largest one.
pub fn rank(a: &Matrix, rel_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().singular_values();
    let top = sv.iter().fold(0.0_f64, |m, &s| m.max(s));
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Complex eigenvalues of a real square matrix via the real Schur form.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex<f64>>> {
    if a.nrows() != a.ncols() {
        return Err(Error::input("eigenvalues need a square matrix"));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::degenerate("matrix has non-finite entries"));
    }
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::degenerate("Schur iteration did not converge"))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

pub fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_rotation() {
        let r = from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        let ev = eigenvalues(&r).unwrap();
        assert_eq!(ev.len(), 2);
        for e in ev {
            assert!((e.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_solve_is_none() {
        let a = from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(solve(&a, &[1.0, 1.0]).is_none());
        assert_eq!(rank(&a, 1e-10), 1);
    }
}
