use crate::error::{Error, Result};

use super::matrix::{norm, Matrix};

/// Orthonormal basis of the complement of `z`, as the columns of an
/// `n x (n-1)` matrix.
///
/// Uses the Householder reflection `H = I - 2vvᵀ/vᵀv` with `v = ẑ + sign(ẑ₀)e₀`,
/// which maps `ẑ` to `∓e₀`; columns `1..n` of `H` are then orthogonal to `z`.
/// `z` is normalised first; a zero or non-finite vector is rejected.
pub fn complement_basis(z: &[f64]) -> Result<Matrix> {
    let n = z.len();
    let len = norm(z);
    if n == 0 || len == 0.0 || !len.is_finite() {
        return Err(Error::InvalidInput(
            "coupling vector must be nonzero and finite".into(),
        ));
    }
    let zhat: Vec<f64> = z.iter().map(|v| v / len).collect();
    let sigma = if zhat[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = zhat;
    v[0] += sigma;
    let vtv: f64 = v.iter().map(|x| x * x).sum();
    Ok(Matrix::from_fn(n, n - 1, |i, j| {
        let col = j + 1;
        let id = if i == col { 1.0 } else { 0.0 };
        id - 2.0 * v[i] * v[col] / vtv
    }))
}
