use super::{sym_eigen, LinalgError, Matrix, SymMatrix};

/// Frobenius-nearest positive semi-definite matrix to `c`, with eigenvalues
/// floored at `eps`.
///
/// The input is symmetrized as `B = (C + Cᵀ)/2`. With `B = VΛVᵀ` the symmetric
/// polar factor is `H = V|Λ|Vᵀ`, so `(B + H)/2 = V·max(Λ, 0)·Vᵀ`; the floor
/// then lifts every eigenvalue below `eps` up to `eps`.
pub fn nearest_psd(c: &Matrix, eps: f64) -> Result<SymMatrix, LinalgError> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    if c.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let b = SymMatrix::symmetrize(c)?;
    let eig = sym_eigen(&b);
    if eig.min_value() >= eps {
        return Ok(b);
    }
    Ok(eig.rebuild(|l| l.max(eps)))
}

/// Eigenvalue floor used for covariance repair: `1e-8 ×` mean diagonal.
pub fn default_psd_eps(c: &Matrix) -> f64 {
    let n = c.rows().min(c.cols());
    if n == 0 {
        return 0.0;
    }
    let mean = (0..n).map(|i| c[(i, i)].abs()).sum::<f64>() / n as f64;
    1e-8 * mean
}
