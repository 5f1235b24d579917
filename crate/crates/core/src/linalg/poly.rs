use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};

use super::matrix::Matrix;

/// Polynomial with complex coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPolynomial {
    coefs: Vec<Complex64>,
}

/// A root cluster returned by [`poly_roots`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

impl ComplexPolynomial {
    /// Trailing coefficients below `1e-14 * max|coef|` are dropped.
    pub fn new(mut coefs: Vec<Complex64>) -> Self {
        let scale = coefs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        while coefs.len() > 1 && coefs.last().unwrap().norm() <= 1e-14 * scale {
            coefs.pop();
        }
        if coefs.is_empty() {
            coefs.push(Complex64::new(0.0, 0.0));
        }
        Self { coefs }
    }

    pub fn from_real(coefs: &[f64]) -> Self {
        Self::new(coefs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: f64) -> Self {
        Self::from_real(&[c])
    }

    /// `c0 + c1 λ`.
    pub fn linear(c0: f64, c1: f64) -> Self {
        Self::from_real(&[c0, c1])
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefs
    }

    pub fn degree(&self) -> usize {
        self.coefs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coefs.last().unwrap()
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coefs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coefs.iter().map(|c| c * s).collect())
    }
}

impl Add for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn add(self, rhs: Self) -> ComplexPolynomial {
        let len = self.coefs.len().max(rhs.coefs.len());
        let zero = Complex64::new(0.0, 0.0);
        ComplexPolynomial::new(
            (0..len)
                .map(|k| {
                    self.coefs.get(k).copied().unwrap_or(zero)
                        + rhs.coefs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl Sub for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn sub(self, rhs: Self) -> ComplexPolynomial {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn mul(self, rhs: Self) -> ComplexPolynomial {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coefs.len() + rhs.coefs.len() - 1];
        for (i, a) in self.coefs.iter().enumerate() {
            for (j, b) in rhs.coefs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial::new(out)
    }
}

/// Characteristic polynomial `det(λI - M)` via the Faddeev-LeVerrier
/// trace recursion. Monic, degree `n`.
pub fn char_poly(m: &Matrix) -> Result<ComplexPolynomial> {
    const MAX_DIM: usize = 64;
    let n = m.rows();
    if !m.is_square() || n == 0 || n > MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "char_poly needs a square matrix of size 1..={MAX_DIM}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    // c[k] is the coefficient of λ^k
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = m.matmul(&mk);
        for i in 0..n {
            next[(i, i)] += c[n - k + 1];
        }
        mk = next;
        let am = m.matmul(&mk);
        let trace: f64 = (0..n).map(|i| am[(i, i)]).sum();
        c[n - k] = -trace / k as f64;
    }
    Ok(ComplexPolynomial::from_real(&c))
}

/// All roots of `p` by Durand-Kerner iteration, merged into clusters.
///
/// Iteration stops when the largest correction falls below
/// `root_step_rel * (1 + max|root|)`, or when every iterate is a root to
/// working precision (`|p(x)|` within rounding error of Horner's scheme).
/// The second test is what terminates on multiple roots, where the
/// corrections stall at the `sqrt(eps)` level.
pub fn poly_roots(p: &ComplexPolynomial, tol: &Tolerances) -> Result<Vec<Root>> {
    let d = p.degree();
    if d == 0 {
        return Err(Error::InvalidInput(
            "poly_roots needs degree at least 1".into(),
        ));
    }
    let lead = p.leading();
    let monic: Vec<Complex64> = p.coefficients().iter().map(|c| c / lead).collect();
    let max_lower = monic[..d].iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let radius = 1.0 + max_lower;

    let mut x: Vec<Complex64> = (0..d)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4 + 0.05 * k as f64 / d as f64;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    let horner = |z: Complex64| -> (Complex64, f64) {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut bound = 0.0;
        let az = z.norm();
        for c in monic.iter().rev() {
            acc = acc * z + c;
            bound = bound * az + c.norm();
        }
        (acc, bound)
    };

    let mut converged = false;
    let mut last_step = f64::INFINITY;
    for _ in 0..tol.root_max_iter {
        let mut max_step: f64 = 0.0;
        for i in 0..d {
            let (num, _) = horner(x[i]);
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if j != i {
                    den *= x[i] - x[j];
                }
            }
            if den.norm() == 0.0 {
                // coincident iterates: nudge apart
                x[i] += Complex64::new(1e-10 * radius, 1e-10 * radius);
                max_step = f64::INFINITY;
                continue;
            }
            let step = num / den;
            x[i] -= step;
            max_step = max_step.max(step.norm());
        }
        last_step = max_step;
        let max_root = x.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if max_step <= tol.root_step_rel * (1.0 + max_root) {
            converged = true;
            break;
        }
        let at_noise = x.iter().all(|&z| {
            let (val, bound) = horner(z);
            val.norm() <= 8.0 * (d as f64 + 1.0) * f64::EPSILON * bound
        });
        if at_noise {
            converged = true;
            break;
        }
    }
    if !converged || x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalFailure {
            what: "poly_roots",
            residual: last_step,
        });
    }
    Ok(cluster_roots(&x, tol.root_merge))
}

/// Single-linkage clustering; each cluster is reported by its centroid.
pub(crate) fn cluster_roots(x: &[Complex64], merge: f64) -> Vec<Root> {
    let n = x.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (x[i] - x[j]).norm() <= merge {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut roots: Vec<Root> = Vec::new();
    let mut sums: Vec<(usize, Complex64, usize)> = Vec::new();
    for (i, &xi) in x.iter().enumerate() {
        let r = find(&mut parent, i);
        match sums.iter_mut().find(|s| s.0 == r) {
            Some(s) => {
                s.1 += xi;
                s.2 += 1;
            }
            None => sums.push((r, xi, 1)),
        }
    }
    for (_, sum, count) in sums {
        roots.push(Root {
            value: sum / count as f64,
            multiplicity: count,
        });
    }
    roots.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn char_poly_of_small_matrices() {
        let p = char_poly(&Matrix::identity(2)).unwrap();
        let c: Vec<f64> = p.coefficients().iter().map(|c| c.re).collect();
        assert_eq!(c, vec![1.0, -2.0, 1.0]);
        let p = char_poly(&Matrix::from_diag(&[2.0, 5.0])).unwrap();
        let c: Vec<f64> = p.coefficients().iter().map(|c| c.re).collect();
        assert_eq!(c, vec![10.0, -7.0, 1.0]);
    }

    #[test]
    fn roots_of_unit_circle_quadratic() {
        let roots = poly_roots(&ComplexPolynomial::from_real(&[1.0, 0.0, 1.0]), &tol()).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].value - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((roots[1].value - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn double_root_is_clustered() {
        // (λ-1)²(λ+2) = λ³ - 3λ + 2
        let p = ComplexPolynomial::from_real(&[2.0, -3.0, 0.0, 1.0]);
        let roots = poly_roots(&p, &tol()).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].multiplicity, 1);
        assert!((roots[0].value.re + 2.0).abs() < 1e-9);
        assert_eq!(roots[1].multiplicity, 2);
        for r in &roots {
            assert!(p.eval(r.value).norm() <= 1e-9);
        }
    }

    #[test]
    fn lower_block_of_b2() {
        let m = Matrix::from_rows(&[[-2.0, 1.0], [1.0, -1.0]]).unwrap();
        let roots = poly_roots(&char_poly(&m).unwrap(), &tol()).unwrap();
        let s5 = 5f64.sqrt();
        assert!((roots[0].value.re + (3.0 + s5) / 2.0).abs() < 1e-12);
        assert!((roots[1].value.re + (3.0 - s5) / 2.0).abs() < 1e-12);
        assert!(roots.iter().all(|r| r.value.im.abs() < 1e-12));
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(poly_roots(&ComplexPolynomial::constant(3.0), &tol()).is_err());
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = ComplexPolynomial::from_real(&[1.0, 2.0, 1e-20]);
        assert_eq!(p.degree(), 1);
    }
}
