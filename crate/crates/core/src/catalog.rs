//! The five worked examples shipped with the CLI.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};
use crate::structure::ProblemDef;

/// Tridiagonal matrix with zero diagonal and unit off-diagonals.
pub fn path_matrix(n: usize) -> SymMatrix {
    let m = Matrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 });
    SymMatrix::new(m, &Tolerances::default()).expect("symmetric by construction")
}

/// The 4x4 block-diagonal `B` of examples 4 and 5.
pub fn block_b() -> SymMatrix {
    let m = Matrix::from_rows(&[
        [-2.0, 1.0, 0.0, 0.0],
        [1.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, 2.0, 1.0],
        [0.0, 0.0, 1.0, 3.0],
    ])
    .expect("constant shape");
    SymMatrix::new(m, &Tolerances::default()).expect("symmetric by construction")
}

/// Example `k` (1 to 5). `kappa` overrides the default coupling and `n`
/// sets the dimension of example 1 (default 4; at least 2).
pub fn example(k: u8, kappa: Option<f64>, n: Option<usize>, tol: &Tolerances) -> Result<ProblemDef> {
    if n.is_some() && k != 1 {
        return Err(Error::InvalidInput("only example 1 has a variable dimension".into()));
    }
    let s5 = 5f64.sqrt();
    let h = 0.5f64.sqrt();
    let (a, b, z, default_kappa) = match k {
        1 => {
            let n = n.unwrap_or(4);
            if n < 2 {
                return Err(Error::InvalidInput("example 1 needs n >= 2".into()));
            }
            let mut z = vec![0.0; n];
            z[n - 1] = 1.0;
            (path_matrix(n), path_matrix(n), z, 1.0)
        }
        2 => (
            SymMatrix::from_diag(&[-1.0, 1.0]),
            SymMatrix::from_diag(&[1.0, 3.0]),
            vec![1.0 / s5, 2.0 / s5],
            2.0 / 3.0,
        ),
        3 => (
            SymMatrix::from_diag(&[-1.0, -1.0]),
            SymMatrix::from_diag(&[1.0, 3.0]),
            vec![1.0, 0.0],
            0.5,
        ),
        4 => (
            SymMatrix::from_diag(&[1.0, 1.0, 3.0, 3.0]),
            block_b(),
            vec![0.0, 0.0, 0.0, 1.0],
            1.0,
        ),
        5 => (
            SymMatrix::from_diag(&[1.0, 2.0, 2.0, 3.0]),
            block_b(),
            vec![h, 0.0, 0.0, h],
            1.0,
        ),
        _ => return Err(Error::InvalidInput(format!("unknown example {k}; expected 1 to 5"))),
    };
    ProblemDef::new(a, b, z, kappa.unwrap_or(default_kappa), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_defaults() {
        let tol = Tolerances::default();
        assert_eq!(example(1, None, Some(6), &tol).unwrap().dim(), 6);
        assert_eq!(example(2, None, None, &tol).unwrap().kappa(), 2.0 / 3.0);
        assert_eq!(example(5, Some(2.0), None, &tol).unwrap().kappa(), 2.0);
        assert!(example(6, None, None, &tol).is_err());
        assert!(example(3, None, Some(3), &tol).is_err());
        assert!(example(1, None, Some(1), &tol).is_err());
    }
}
