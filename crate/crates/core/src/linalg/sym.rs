use std::ops::Index;

use super::{LinalgError, Matrix};

/// Square matrix whose entries satisfy `a(i,j) == a(j,i)` bit-for-bit.
#[derive(Clone, PartialEq, Debug)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    /// Wraps `m`, rejecting it unless it is square, non-empty and exactly symmetric.
    pub fn new(m: Matrix) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(LinalgError::Empty);
        }
        for i in 0..m.rows() {
            for j in (i + 1)..m.cols() {
                if m[(i, j)].to_bits() != m[(j, i)].to_bits() {
                    return Err(LinalgError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(SymMatrix(m))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, LinalgError> {
        SymMatrix::new(Matrix::from_rows(rows)?)
    }

    /// `(m + mᵀ) / 2`, total on square input.
    pub fn symmetrize(m: &Matrix) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(LinalgError::Empty);
        }
        let n = m.rows();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = m[(i, i)];
            for j in (i + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Ok(SymMatrix(out))
    }

    /// Builds from the upper triangle produced by `f(i, j)` with `i <= j`.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix(m)
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Matrix::identity(n))
    }

    pub fn diagonal(d: &[f64]) -> Self {
        SymMatrix(Matrix::diagonal(d))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)]).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.0.mul_vec(x)
    }

    /// `xᵀ A x`
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        super::dot(x, &self.0.mul_vec(x))
    }

    pub fn scale(&self, k: f64) -> SymMatrix {
        SymMatrix(self.0.scale(k))
    }

    pub fn is_finite(&self) -> bool {
        self.0.as_slice().iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}
