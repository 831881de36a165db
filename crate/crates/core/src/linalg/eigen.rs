use super::{Matrix, SymMatrix};

/// Stopping rule for the cyclic Jacobi sweeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiOptions {
    /// Sweeps stop once the off-diagonal Frobenius norm falls below
    /// `tol * ‖A‖_F`.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        JacobiOptions {
            tol: 1e-12,
            max_sweeps: 100,
        }
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
    pub sweeps: usize,
}

impl SymEigen {
    /// `V · diag(f(λ)) · Vᵀ`
    pub fn rebuild(&self, mut f: impl FnMut(f64) -> f64) -> SymMatrix {
        let v = &self.vectors;
        let n = v.rows();
        let d: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        SymMatrix::from_upper_fn(n, |i, j| {
            let (vi, vj) = (v.row(i), v.row(j));
            (0..n).map(|k| vi[k] * d[k] * vj[k]).sum()
        })
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition with default tolerances.
pub fn sym_eigen(a: &SymMatrix) -> SymEigen {
    sym_eigen_with(a, JacobiOptions::default())
}

pub fn sym_eigen_with(a: &SymMatrix, opts: JacobiOptions) -> SymEigen {
    let n = a.dim();
    let mut m = a.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let scale = m.frobenius_norm();
    let mut sweeps = 0;

    while sweeps < opts.max_sweeps {
        if scale == 0.0 || off_diagonal_norm(&m) <= opts.tol * scale {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    let np = c * akp - s * akq;
                    let nq = s * akp + c * akq;
                    m[(k, p)] = np;
                    m[(p, k)] = np;
                    m[(k, q)] = nq;
                    m[(q, k)] = nq;
                }
                m[(p, p)] = app - t * apq;
                m[(q, q)] = aqq + t * apq;
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    SymEigen {
        values,
        vectors,
        sweeps,
    }
}
