use crate::config::Tolerances;
use crate::error::{Error, Result};

use super::matrix::{Matrix, SymMatrix};

/// Eigenvalues in ascending order, with column `j` of `vectors` paired with
/// `values[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigDecomp {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigDecomp {
    pub fn empty() -> Self {
        Self {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.vectors.column(j)
    }

    /// `max(values) - min(values)`, zero for an empty decomposition.
    pub fn diameter(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }
}

/// Cyclic Jacobi eigensolver for dense symmetric matrices. A zero
/// `jacobi_rel` runs until every off-diagonal entry is exactly zero.
pub fn jacobi_eig(s: &SymMatrix, tol: &Tolerances) -> Result<EigDecomp> {
    let n = s.dim();
    let mut a = s.matrix().clone();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius();
    let target = tol.jacobi_rel * scale;

    let off_norm = |a: &Matrix| -> f64 {
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    sum += a[(i, j)] * a[(i, j)];
                }
            }
        }
        sum.sqrt()
    };

    let mut off = off_norm(&a);
    let mut sweeps = 0;
    while off > target {
        if sweeps == tol.jacobi_max_sweeps {
            return Err(Error::NumericalFailure {
                what: "jacobi_eig",
                residual: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                // negligible against both diagonal entries: dropping it moves
                // the eigenvalues by a relative rounding error only
                if apq.abs() <= 0.5 * f64::EPSILON * (a[(p, p)] * a[(q, q)]).abs().sqrt() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let sn = t * c;
                rotate(&mut a, &mut v, p, q, c, sn);
            }
        }
        sweeps += 1;
        off = off_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigDecomp { values, vectors })
}

/// Applies the rotation `Jᵀ A J` in the (p, q) plane and accumulates `V J`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}
