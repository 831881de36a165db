use super::{LinalgError, SymMatrix};

/// Sample covariance (denominator `T − 1`) of `observations`, one row per
/// period and one column per asset.
///
/// Accumulates co-moments in a single streaming pass so that an expanding
/// window can be extended without revisiting history.
pub fn covariance<R: AsRef<[f64]>>(observations: &[R]) -> Result<SymMatrix, LinalgError> {
    let t = observations.len();
    if t < 2 {
        return Err(LinalgError::InsufficientHistory { observations: t });
    }
    let n = observations[0].as_ref().len();
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    let mut mean = vec![0.0; n];
    let mut comoment = vec![0.0; n * n];
    let mut delta = vec![0.0; n];
    for (k, row) in observations.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let count = (k + 1) as f64;
        for i in 0..n {
            delta[i] = row[i] - mean[i];
            mean[i] += delta[i] / count;
        }
        // M_ij += (x_i − mean_old_i)(x_j − mean_new_j)
        for i in 0..n {
            for j in i..n {
                comoment[i * n + j] += delta[i] * (row[j] - mean[j]);
            }
        }
    }
    let denom = (t - 1) as f64;
    Ok(SymMatrix::from_upper_fn(n, |i, j| comoment[i * n + j] / denom))
}
