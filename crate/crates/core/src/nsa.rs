//! The one-parameter non-self-adjoint problem
//!
//! ```text
//! [ A + γ     κ zzᵀ  ]
//! [ -κ zzᵀ   -B - γ  ]  w = λ w
//! ```
//!
//! obtained from the pair problem by `α = λ - γ`, `β = -λ - γ`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{poly_roots, ComplexPolynomial};
use crate::tracer::PairProblem;

#[derive(Clone, Debug, PartialEq)]
pub struct NsaSpectrum {
    pub gamma: f64,
    /// All `2n` eigenvalues with multiplicity, sorted by `(re, im)`.
    pub eigenvalues: Vec<Complex64>,
    /// Parallel to `eigenvalues`: whether the value comes from a straight line.
    pub from_line: Vec<bool>,
    /// Eigenvalues contributed by straight-line components, with multiplicity.
    pub line_eigenvalues: Vec<f64>,
    /// Number of real eigenvalues counted with multiplicity.
    pub real_count: usize,
}

impl NsaSpectrum {
    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().filter(|l| l.im == 0.0).map(|l| l.re).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CollisionType {
    /// Two real eigenvalues merge into a complex-conjugate pair as `γ` increases.
    A,
    /// A complex-conjugate pair merges into two real eigenvalues as `γ` increases.
    B,
}

impl CollisionType {
    pub fn label(self) -> &'static str {
        match self {
            CollisionType::A => "A",
            CollisionType::B => "B",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionRecord {
    pub gamma_star: f64,
    pub lambda_star: Complex64,
    pub kind: CollisionType,
    pub alpha_star: f64,
    pub beta_star: f64,
    /// Curve slope at `(α*, β*)`; a tangency with `β = -α - 2γ` gives `-1`.
    pub dbeta_dalpha: f64,
}

fn d_poly(poles: &[f64], gamma: f64, sign: f64) -> ComplexPolynomial {
    poles.iter().fold(ComplexPolynomial::constant(1.0), |acc, &p| {
        &acc * &ComplexPolynomial::linear(p + gamma, sign)
    })
}

fn n_poly(poles: &[f64], weights: &[f64], gamma: f64, sign: f64) -> ComplexPolynomial {
    let mut acc = ComplexPolynomial::constant(0.0);
    for (k, &w) in weights.iter().enumerate() {
        let mut term = ComplexPolynomial::constant(w);
        for (q, &p) in poles.iter().enumerate() {
            if q != k {
                term = &term * &ComplexPolynomial::linear(p + gamma, sign);
            }
        }
        acc = &acc + &term;
    }
    acc
}

/// `D_A(λ-γ) D_B(-λ-γ) - κ² N_A(λ-γ) N_B(-λ-γ)` with `R = N / D` over the
/// effective poles.
fn curve_poly(pp: &PairProblem, gamma: f64) -> ComplexPolynomial {
    let (ra, rb) = (&pp.ra, &pp.rb);
    let k2 = pp.kappa().powi(2);
    let d = &d_poly(&ra.poles, gamma, -1.0) * &d_poly(&rb.poles, gamma, 1.0);
    let n = &n_poly(&ra.poles, &ra.pole_weights, gamma, -1.0) * &n_poly(&rb.poles, &rb.pole_weights, gamma, 1.0);
    &d - &n.scale(k2)
}

/// Eigenvalues contributed by the straight lines, with multiplicity equal
/// to the dimension of the `z`-orthogonal part of each eigenspace.
pub fn line_eigenvalues(pp: &PairProblem, gamma: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for c in &pp.sa.clusters {
        let k = pp.sa.orthogonal_multiplicity(c);
        out.extend(std::iter::repeat_n(c.value + gamma, k));
    }
    for c in &pp.sb.clusters {
        let k = pp.sb.orthogonal_multiplicity(c);
        out.extend(std::iter::repeat_n(-(c.value + gamma), k));
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Characteristic polynomial in `λ`, of degree `2n` with leading
/// coefficient `±1`.
pub fn nsa_char_poly(pp: &PairProblem, gamma: f64) -> ComplexPolynomial {
    line_eigenvalues(pp, gamma)
        .into_iter()
        .fold(curve_poly(pp, gamma), |acc, l| &acc * &ComplexPolynomial::linear(-l, 1.0))
}

/// Snaps nearly real values onto the axis and makes non-real values come in
/// exact conjugate pairs.
fn conjugate_pairs(values: &mut Vec<Complex64>, snap: f64) {
    for v in values.iter_mut() {
        if v.im.abs() <= snap {
            v.im = 0.0;
        }
    }
    let (mut upper, mut lower): (Vec<Complex64>, Vec<Complex64>) =
        values.iter().filter(|v| v.im != 0.0).partition(|v| v.im > 0.0);
    let mut out: Vec<Complex64> = values.iter().copied().filter(|v| v.im == 0.0).collect();
    upper.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    for u in upper {
        let partner = lower
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - u.conj()).norm().total_cmp(&(b.1 - u.conj()).norm()))
            .map(|(i, _)| i);
        match partner {
            Some(i) => {
                let l = lower.swap_remove(i);
                let re = 0.5 * (u.re + l.re);
                let im = 0.5 * (u.im - l.im);
                out.push(Complex64::new(re, im));
                out.push(Complex64::new(re, -im));
            }
            // an unmatched value cannot come from a real polynomial; keep it
            None => out.push(u),
        }
    }
    out.extend(lower);
    *values = out;
}

pub fn nsa_spectrum(pp: &PairProblem, gamma: f64) -> Result<NsaSpectrum> {
    let tol = pp.tolerances();
    let mut curve: Vec<Complex64> = Vec::new();
    let cp = curve_poly(pp, gamma);
    if cp.degree() > 0 {
        for r in poly_roots(&cp, tol)? {
            curve.extend(std::iter::repeat_n(r.value, r.multiplicity));
        }
    }
    conjugate_pairs(&mut curve, tol.imag_snap);
    let lines = line_eigenvalues(pp, gamma);
    let mut tagged: Vec<(Complex64, bool)> = curve.into_iter().map(|c| (c, false)).collect();
    tagged.extend(lines.iter().map(|&l| (Complex64::new(l, 0.0), true)));
    tagged.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let real_count = tagged.iter().filter(|t| t.0.im == 0.0).count();
    Ok(NsaSpectrum {
        gamma,
        eigenvalues: tagged.iter().map(|t| t.0).collect(),
        from_line: tagged.iter().map(|t| t.1).collect(),
        line_eigenvalues: lines,
        real_count,
    })
}

/// Real eigenvalues found geometrically: intersections of the traced curves
/// with the line `β = -α - 2γ`, mapped back by `λ = α + γ`.
pub fn real_lambda_via_curves(pp: &PairProblem, gamma: f64) -> Result<Vec<f64>> {
    if !pp.sa.gamma.is_empty() || !pp.sb.gamma.is_empty() {
        return Err(Error::Precondition(
            "straight-line components present; use nsa_spectrum".into(),
        ));
    }
    // every eigenvalue satisfies |λ| <= max(‖A + γ‖, ‖B + γ‖) + |κ|
    let bound = pp
        .sa
        .eig
        .values
        .iter()
        .chain(&pp.sb.eig.values)
        .map(|v| (v + gamma).abs())
        .fold(0.0, f64::max)
        + pp.kappa().abs();
    let grid = pp.grid(-bound - gamma - 1.0, bound - gamma + 1.0, crate::tracer::DEFAULT_SAMPLES);
    let trace = pp.trace_branches(&grid);
    let g = |alpha: f64, beta: f64| beta + alpha + 2.0 * gamma;
    let mut out = Vec::new();
    for branch in &trace.branches {
        for w in branch.points.windows(2) {
            let (p, q) = (w[0], w[1]);
            let (gp, gq) = (g(p.alpha, p.beta), g(q.alpha, q.beta));
            if gp == 0.0 {
                out.push(p.alpha + gamma);
                continue;
            }
            if gp.signum() == gq.signum() {
                continue;
            }
            if let Some(alpha) = bisect_on_branch(pp, branch.interval, p.alpha, q.alpha, gp, &g)? {
                out.push(alpha + gamma);
            }
        }
        if let Some(last) = branch.points.last() {
            if g(last.alpha, last.beta) == 0.0 {
                out.push(last.alpha + gamma);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

fn bisect_on_branch(
    pp: &PairProblem,
    interval: usize,
    mut lo: f64,
    mut hi: f64,
    g_lo: f64,
    g: &impl Fn(f64, f64) -> f64,
) -> Result<Option<f64>> {
    let target = 1e-10;
    let mut best = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let beta = match pp.beta_in_interval(mid, interval)? {
            Some(b) => b,
            None => return Ok(None),
        };
        let v = g(mid, beta);
        best = Some(mid);
        if v.abs() <= target || mid <= lo || mid >= hi {
            break;
        }
        if v.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Collisions of eigenvalue trajectories `λ(γ)` over a range of `γ`.
/// The range may be given in either order; the result is sorted by `γ*`
/// and does not depend on the sweep direction.
pub fn find_collisions(pp: &PairProblem, gamma_range: (f64, f64), samples: usize) -> Result<Vec<CollisionRecord>> {
    if samples < 10 {
        return Err(Error::InvalidInput("collision search needs at least 10 samples".into()));
    }
    let (g0, g1) = gamma_range;
    if !g0.is_finite() || !g1.is_finite() || g0 == g1 {
        return Err(Error::InvalidInput("gamma range must be finite and non-empty".into()));
    }
    let (lo, hi) = (g0.min(g1), g0.max(g1));
    let mut grid: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    if g0 > g1 {
        grid.reverse();
    }
    let counts = grid
        .iter()
        .map(|&g| nsa_spectrum(pp, g).map(|s| s.real_count as i64))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..grid.len() - 1 {
        let (a, b, ca, cb) = if grid[i] < grid[i + 1] {
            (grid[i], grid[i + 1], counts[i], counts[i + 1])
        } else {
            (grid[i + 1], grid[i], counts[i + 1], counts[i])
        };
        refine(pp, a, b, ca, cb, &mut out)?;
    }
    out.sort_by(|a, b| {
        a.gamma_star
            .total_cmp(&b.gamma_star)
            .then(a.lambda_star.re.total_cmp(&b.lambda_star.re))
    });
    Ok(out)
}

const GAMMA_TOL: f64 = 1e-8;

/// Splits `[lo, hi]` until every sub-interval changes the real count by 0
/// or 2. Changes by a larger even amount that survive down to the `γ`
/// tolerance are simultaneous collisions at one `γ`.
fn refine(pp: &PairProblem, lo: f64, hi: f64, c_lo: i64, c_hi: i64, out: &mut Vec<CollisionRecord>) -> Result<()> {
    let change = c_hi - c_lo;
    if change == 0 {
        return Ok(());
    }
    let narrow = hi - lo <= GAMMA_TOL * (1.0 + lo.abs().max(hi.abs()));
    if change.abs() == 2 || narrow {
        if change % 2 != 0 {
            return Err(Error::AmbiguousCollision {
                gamma_lo: lo,
                gamma_hi: hi,
                change,
            });
        }
        if !narrow {
            return bisect_collision(pp, lo, hi, c_lo, c_hi, out);
        }
        return record(pp, lo, hi, c_lo, c_hi, out);
    }
    let mid = 0.5 * (lo + hi);
    let c_mid = nsa_spectrum(pp, mid)?.real_count as i64;
    refine(pp, lo, mid, c_lo, c_mid, out)?;
    refine(pp, mid, hi, c_mid, c_hi, out)
}

fn bisect_collision(
    pp: &PairProblem,
    mut lo: f64,
    mut hi: f64,
    c_lo: i64,
    c_hi: i64,
    out: &mut Vec<CollisionRecord>,
) -> Result<()> {
    while hi - lo > GAMMA_TOL * (1.0 + lo.abs().max(hi.abs())) {
        let mid = 0.5 * (lo + hi);
        let c = nsa_spectrum(pp, mid)?.real_count as i64;
        if c == c_lo {
            lo = mid;
        } else if c == c_hi {
            hi = mid;
        } else {
            // a third count inside a ±2 bracket: resolve each half separately
            refine(pp, lo, mid, c_lo, c, out)?;
            return refine(pp, mid, hi, c, c_hi, out);
        }
    }
    record(pp, lo, hi, c_lo, c_hi, out)
}

fn record(pp: &PairProblem, lo: f64, hi: f64, c_lo: i64, c_hi: i64, out: &mut Vec<CollisionRecord>) -> Result<()> {
    let kind = if c_hi < c_lo { CollisionType::A } else { CollisionType::B };
    let pairs = ((c_hi - c_lo).abs() / 2) as usize;
    let complex_side = if c_hi < c_lo { hi } else { lo };
    let gamma_star = 0.5 * (lo + hi);
    let spec = nsa_spectrum(pp, complex_side)?;
    let mut upper: Vec<Complex64> = spec.eigenvalues.iter().copied().filter(|l| l.im > 0.0).collect();
    upper.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    for l in upper.into_iter().take(pairs) {
        let lambda = l.re;
        let alpha = lambda - gamma_star;
        let target = -lambda - gamma_star;
        let nearest = |roots: Vec<f64>| {
            roots
                .into_iter()
                .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
                .ok_or(Error::NumericalFailure {
                    what: "collision point lies on no curve",
                    residual: alpha,
                })
        };
        let (alpha, beta, slope) = match pp.beta_roots(alpha) {
            Ok(roots) => {
                let beta = nearest(roots)?;
                match pp.curve_derivative(alpha, beta) {
                    Ok(slope) => (alpha, beta, slope),
                    Err(Error::PoleProximity { .. }) => through_b_corner(pp, alpha, beta)?,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::PoleProximity { .. }) => through_corner(pp, alpha, &nearest)?,
            Err(e) => return Err(e),
        };
        out.push(CollisionRecord {
            gamma_star,
            lambda_star: Complex64::new(lambda, 0.0),
            kind,
            alpha_star: alpha,
            beta_star: beta,
            dbeta_dalpha: slope,
        });
    }
    Ok(())
}

/// A branch crossing a pole `α_j` of `R_A` passes through `(α_j, β̂)` with
/// `R_B(β̂) = 0`; there the slope tends to `-1 / (κ² w_j R_B'(β̂))`.
fn through_corner(
    pp: &PairProblem,
    alpha: f64,
    nearest: &impl Fn(Vec<f64>) -> Result<f64>,
) -> Result<(f64, f64, f64)> {
    let (j, _) = pp.ra.nearest_pole(alpha).ok_or(Error::NumericalFailure {
        what: "pole lookup",
        residual: alpha,
    })?;
    let zeros: Vec<f64> = pp
        .sb
        .compressed_eig
        .values
        .iter()
        .copied()
        .filter(|&b| pp.rb.nearest_pole(b).is_none_or(|(_, d)| d > pp.rb.pole_tol))
        .collect();
    let beta = nearest(zeros)?;
    let slope = -1.0 / (pp.kappa().powi(2) * pp.ra.pole_weights[j] * pp.rb.eval_prime(beta)?);
    Ok((pp.ra.poles[j], beta, slope))
}

/// Mirror image of [`through_corner`]: near a pole `β_k` of `R_B` the branch
/// passes through `(α̂, β_k)` with `R_A(α̂) = 0` and slope
/// `-κ² w_k R_A'(α̂)`.
fn through_b_corner(pp: &PairProblem, alpha: f64, beta: f64) -> Result<(f64, f64, f64)> {
    let (k, _) = pp.rb.nearest_pole(beta).ok_or(Error::NumericalFailure {
        what: "pole lookup",
        residual: beta,
    })?;
    let alpha_hat = pp
        .sa
        .compressed_eig
        .values
        .iter()
        .copied()
        .filter(|&a| pp.ra.nearest_pole(a).is_none_or(|(_, d)| d > pp.ra.pole_tol))
        .min_by(|a, b| (a - alpha).abs().total_cmp(&(b - alpha).abs()))
        .ok_or(Error::NumericalFailure {
            what: "collision point lies on no curve",
            residual: beta,
        })?;
    let slope = -pp.kappa().powi(2) * pp.rb.pole_weights[k] * pp.ra.eval_prime(alpha_hat)?;
    Ok((alpha_hat, pp.rb.poles[k], slope))
}
