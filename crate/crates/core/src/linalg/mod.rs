//! Dense numerical kernel: symmetric eigendecomposition, complement bases,
//! characteristic polynomials, polynomial roots and complex determinants.
//!
//! Everything here is sized for desk-scale problems (dimension up to 64).

mod det;
mod householder;
mod jacobi;
mod matrix;
mod poly;

pub use det::{complex_det, ComplexMatrix};
pub use householder::complement_basis;
pub use jacobi::{jacobi_eig, EigDecomp};
pub use matrix::{dot, lu_solve, norm, Matrix, SymMatrix};
pub use poly::{char_poly, poly_roots, ComplexPolynomial, Root};

/// Groups sorted values into runs whose consecutive gaps are at most `tol`.
/// Returns index ranges into `values`.
pub(crate) fn cluster_sorted(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}
