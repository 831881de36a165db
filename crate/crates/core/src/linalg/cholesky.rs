use super::{dot, LinalgError, Matrix, SymMatrix};

/// Upper-triangular factor `R` with `C = RᵀR`.
#[derive(Clone, Debug, PartialEq)]
pub struct CholFactor {
    upper: Matrix,
}

/// Cholesky factorization `C = RᵀR`, column by column.
///
/// Fails with [`LinalgError::NotPositiveDefinite`] at the first pivot that is
/// not strictly positive; callers holding an estimated covariance should run
/// [`super::nearest_psd`] first.
pub fn cholesky(c: &SymMatrix) -> Result<CholFactor, LinalgError> {
    let n = c.dim();
    let mut r = Matrix::zeros(n, n);
    // Column j of R lives in rows 0..=j; work on the transpose (lower L = Rᵀ)
    // so that inner products run over contiguous rows.
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let lj = l.row(j)[..j].to_vec();
        let pivot = c[(j, j)] - dot(&lj, &lj);
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(LinalgError::NotPositiveDefinite { pivot: j });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let s = c[(i, j)] - dot(&l.row(i)[..j], &lj);
            l[(i, j)] = s / d;
        }
    }
    for i in 0..n {
        for j in i..n {
            r[(i, j)] = l[(j, i)];
        }
    }
    Ok(CholFactor { upper: r })
}

impl CholFactor {
    pub fn dim(&self) -> usize {
        self.upper.rows()
    }

    pub fn upper(&self) -> &Matrix {
        &self.upper
    }

    /// `R x`
    pub fn mul_upper(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| dot(&self.upper.row(i)[i..], &x[i..]))
            .collect()
    }

    /// Solves `RᵀR x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let r = &self.upper;
        // Rᵀ y = b (forward)
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= r[(k, i)] * y[k];
            }
            y[i] = s / r[(i, i)];
        }
        // R x = y (backward)
        for i in (0..n).rev() {
            let s = y[i] - dot(&r.row(i)[i + 1..], &y[i + 1..]);
            y[i] = s / r[(i, i)];
        }
        y
    }

    /// `RᵀR`
    pub fn reconstruct(&self) -> SymMatrix {
        let r = &self.upper;
        let n = self.dim();
        SymMatrix::from_upper_fn(n, |i, j| {
            (0..=i.min(j)).map(|k| r[(k, i)] * r[(k, j)]).sum()
        })
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| self.upper[(i, i)].ln()).sum::<f64>()
    }
}
