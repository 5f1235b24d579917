//! Brute-force checks that avoid the solvers' code paths: dense
//! diagonalisation instead of secular bisection, determinants and smallest
//! eigenvalues instead of the characteristic equation, and the
//! Faddeev–LeVerrier polynomial of the explicit block matrix.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    char_poly, complex_det, dot, jacobi_eig, lu_solve, poly_roots, ComplexMatrix, Matrix, SymMatrix,
};
use crate::structure::ProblemDef;

/// Largest dimension accepted by [`nsa_matrix_spectrum`].
pub const MAX_NSA_DIM: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipResult {
    pub is_pair_eigenvalue: bool,
    /// Smallest |eigenvalue| of `M(α, β)` for real input, otherwise
    /// `|det M|` divided by the product of the row max-norms.
    pub residual: f64,
    /// Null vector `(u, v)` for real input.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// `R_A(α)` from a linear solve with `A - α`.
fn resolvent_by_solve(problem: &ProblemDef, alpha: f64, tol: &Tolerances) -> Result<f64> {
    let a = problem.a().matrix();
    let n = problem.dim();
    let eig = jacobi_eig(problem.a(), tol)?;
    let radius = tol.pole_rel * (1.0 + eig.diameter());
    if let Some(&pole) = eig.values.iter().find(|&&v| (v - alpha).abs() <= radius) {
        return Err(Error::PoleProximity { pole, t: alpha });
    }
    let shifted = Matrix::from_fn(n, n, |i, j| a[(i, j)] - if i == j { alpha } else { 0.0 });
    let x = lu_solve(&shifted, problem.z())?;
    Ok(dot(&x, problem.z()))
}

/// Eigenvalues of `B - κ² R_A(α) zzᵀ` together with the squared `z`-component
/// of each eigenvector.
fn rank_one_update(problem: &ProblemDef, alpha: f64, tol: &Tolerances) -> Result<Vec<(f64, f64)>> {
    let r = resolvent_by_solve(problem, alpha, tol)?;
    let k2 = problem.kappa().powi(2);
    let z = problem.z();
    let b = problem.b().matrix();
    let n = problem.dim();
    let m = Matrix::from_fn(n, n, |i, j| b[(i, j)] - k2 * r * z[i] * z[j]);
    let e = jacobi_eig(&SymMatrix::new(m, tol)?, tol)?;
    Ok((0..n).map(|j| (e.values[j], dot(&e.vector(j), z).powi(2))).collect())
}

/// All `n` eigenvalues `β` with `M(α, β)` singular, ascending.
pub fn direct_beta(problem: &ProblemDef, alpha: f64, tol: &Tolerances) -> Result<Vec<f64>> {
    Ok(rank_one_update(problem, alpha, tol)?.into_iter().map(|(v, _)| v).collect())
}

/// Eigenvalues of the rank-one update whose eigenvectors see `z`: groups of
/// nearly equal eigenvalues are kept once if their total `z`-weight exceeds
/// `min_weight` and dropped otherwise.
pub fn direct_beta_filtered(problem: &ProblemDef, alpha: f64, min_weight: f64, tol: &Tolerances) -> Result<Vec<f64>> {
    let pairs = rank_one_update(problem, alpha, tol)?;
    let span = pairs.last().map_or(0.0, |p| p.0) - pairs.first().map_or(0.0, |p| p.0);
    let gap = tol.cluster_rel * (1.0 + span);
    let mut out = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i + 1;
        while j < pairs.len() && pairs[j].0 - pairs[j - 1].0 <= gap {
            j += 1;
        }
        let weight: f64 = pairs[i..j].iter().map(|p| p.1).sum();
        if weight > min_weight {
            out.push(pairs[i..j].iter().map(|p| p.0).sum::<f64>() / (j - i) as f64);
        }
        i = j;
    }
    Ok(out)
}

/// Membership of `(α, β)` in the pair spectrum, decided on the full
/// `2n x 2n` matrix `M(α, β)`.
pub fn check_membership(problem: &ProblemDef, alpha: Complex64, beta: Complex64, tol: &Tolerances) -> Result<MembershipResult> {
    let n = problem.dim();
    let (a, b, z, k) = (problem.a(), problem.b(), problem.z(), problem.kappa());
    let entry = |i: usize, j: usize| -> f64 {
        match (i < n, j < n) {
            (true, true) => a[(i, j)],
            (false, false) => b[(i - n, j - n)],
            (true, false) => k * z[i] * z[j - n],
            (false, true) => k * z[i - n] * z[j],
        }
    };
    if alpha.im == 0.0 && beta.im == 0.0 {
        let (al, be) = (alpha.re, beta.re);
        let m = Matrix::from_fn(2 * n, 2 * n, |i, j| {
            let shift = match (i == j, i < n) {
                (true, true) => al,
                (true, false) => be,
                _ => 0.0,
            };
            entry(i, j) - shift
        });
        let scale = m.inf_norm();
        // the residual is an absolute quantity, so iterate to exhaustion
        let full = Tolerances {
            jacobi_rel: 0.0,
            ..tol.clone()
        };
        let e = jacobi_eig(&SymMatrix::new(m, tol)?, &full)?;
        let (idx, residual) = e
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.abs()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .ok_or_else(|| Error::InvalidInput("empty problem".into()))?;
        let w = e.vector(idx);
        return Ok(MembershipResult {
            is_pair_eigenvalue: residual <= tol.membership_rel * scale.max(1.0),
            residual,
            witness: Some((w[..n].to_vec(), w[n..].to_vec())),
        });
    }
    let mut m = ComplexMatrix::zeros(2 * n);
    for i in 0..2 * n {
        for j in 0..2 * n {
            let mut v = Complex64::new(entry(i, j), 0.0);
            if i == j {
                v -= if i < n { alpha } else { beta };
            }
            m.set(i, j, v);
        }
    }
    let row_scale: f64 = (0..2 * n)
        .map(|i| (0..2 * n).map(|j| m.get(i, j).norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE))
        .product();
    let residual = complex_det(&m, tol).norm() / row_scale;
    Ok(MembershipResult {
        is_pair_eigenvalue: residual <= tol.membership_rel,
        residual,
        witness: None,
    })
}

/// `[[A + γ, κ zzᵀ], [-κ zzᵀ, -B - γ]]`.
pub fn nsa_matrix(problem: &ProblemDef, gamma: f64) -> Matrix {
    let n = problem.dim();
    let (a, b, z, k) = (problem.a(), problem.b(), problem.z(), problem.kappa());
    Matrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => a[(i, j)] + if i == j { gamma } else { 0.0 },
        (false, false) => -b[(i - n, j - n)] - if i == j { gamma } else { 0.0 },
        (true, false) => k * z[i] * z[j - n],
        (false, true) => -k * z[i - n] * z[j],
    })
}

/// Eigenvalues of [`nsa_matrix`] with multiplicity, sorted by `(re, im)`.
pub fn nsa_matrix_spectrum(problem: &ProblemDef, gamma: f64, tol: &Tolerances) -> Result<Vec<Complex64>> {
    if problem.dim() > MAX_NSA_DIM {
        return Err(Error::InvalidInput(format!(
            "dimension {} exceeds the oracle limit {MAX_NSA_DIM}",
            problem.dim()
        )));
    }
    let p = char_poly(&nsa_matrix(problem, gamma))?;
    let mut out = Vec::with_capacity(p.degree());
    for r in poly_roots(&p, tol)? {
        out.extend(std::iter::repeat_n(r.value, r.multiplicity));
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Largest distance under a greedy nearest-neighbour matching of two
/// multisets; `∞` when the sizes differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pool: Vec<Complex64> = b.to_vec();
    let mut worst: f64 = 0.0;
    for x in a {
        let (i, d) = pool
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("sizes match");
        worst = worst.max(d);
        pool.swap_remove(i);
    }
    worst
}
