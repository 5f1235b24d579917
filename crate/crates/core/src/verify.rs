//! Invariant checks run by `pairspec verify`, each cross-checking a solver
//! against an oracle or a structural property.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::Result;
use crate::nsa::nsa_spectrum;
use crate::oracle::{check_membership, direct_beta_filtered, nsa_matrix_spectrum, MAX_NSA_DIM};
use crate::structure::{interlaces, ProblemDef};
use crate::tracer::{PairProblem, PairSpectrum};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Deterministic points of `[lo, hi]` from the golden-ratio sequence.
pub fn golden_samples(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    (1..=count).map(|k| lo + (hi - lo) * (k as f64 * phi).fract()).collect()
}

/// Centered finite difference of `β(α)` on one pole interval. The step is
/// a thousandth of the distance over which the branch can change shape:
/// the gap to the nearest α mesh point, or the α-extent of the gap from
/// `β` to the nearest β mesh point, estimated with a pilot difference.
pub fn finite_difference(pp: &PairProblem, alpha: f64, interval: usize) -> Result<Option<f64>> {
    let nearest = |points: &[crate::structure::MeshPoint], t: f64| {
        points.iter().map(|x| (x.value - t).abs()).fold(f64::INFINITY, f64::min)
    };
    let Some(beta) = pp.beta_in_interval(alpha, interval)? else { return Ok(None) };
    let da = nearest(&pp.mesh.x_points, alpha).min(1.0 + alpha.abs());
    let db = nearest(&pp.mesh.y_points, beta).min(1.0 + beta.abs());
    let central = |h: f64| -> Result<Option<f64>> {
        let plus = pp.beta_in_interval(alpha + h, interval)?;
        let minus = pp.beta_in_interval(alpha - h, interval)?;
        Ok(match (plus, minus) {
            (Some(p), Some(m)) => Some((p - m) / (2.0 * h)),
            _ => None,
        })
    };
    let Some(pilot) = central(1e-3 * da)? else { return Ok(None) };
    let scale = da.min(db / pilot.abs().max(f64::MIN_POSITIVE));
    central(1e-3 * scale)
}

fn check(name: &'static str, failures: usize, total: usize, worst: f64) -> CheckResult {
    CheckResult {
        name,
        passed: failures == 0,
        detail: format!("{} of {total} failed; worst {worst:.3e}", failures),
    }
}

const SAMPLES: usize = 200;

pub fn run_suite(problem: &ProblemDef, tol: &Tolerances) -> Result<Vec<CheckResult>> {
    let pp = PairProblem::new(problem.clone(), tol.clone())?;
    let spectrum = pp.assemble_spectrum()?;
    let xs = pp.mesh.x_values();
    let (lo, hi) = (xs[0] - 1.0, xs[xs.len() - 1] + 1.0);
    let alphas: Vec<f64> = golden_samples(lo, hi, SAMPLES)
        .into_iter()
        .filter(|&a| pp.ra.nearest_pole(a).is_none_or(|(_, d)| d > 1e-6))
        .collect();

    let mut out = Vec::new();
    let ok = interlaces(&pp.sa, 1e-9) && interlaces(&pp.sb, 1e-9);
    out.push(CheckResult {
        name: "interlacing",
        passed: ok,
        detail: if ok { "both operators interlace".into() } else { "interlacing violated".into() },
    });
    out.push(parity(&spectrum));
    out.push(monotonicity(&spectrum));
    out.push(derivative_vs_fd(&pp, &alphas)?);
    out.push(oracle_roots(&pp, problem, &alphas, tol)?);
    out.push(membership(&pp, &spectrum, problem, tol)?);
    out.push(blowups(&pp, &spectrum));
    out.push(mirror(&pp, &spectrum, tol)?);
    if problem.dim() <= MAX_NSA_DIM {
        out.push(nsa_agreement(&pp, problem, tol)?);
    }
    Ok(out)
}

fn parity(s: &PairSpectrum) -> CheckResult {
    let mut bad = 0;
    let mut total = 0;
    for p in s.curve_points() {
        total += 1;
        let ok = match p.rect {
            Some(r) => r.is_even(),
            None => s.mesh.in_even_closure(p.alpha, p.beta),
        };
        if !ok {
            bad += 1;
        }
    }
    check("chess-board parity", bad, total, bad as f64)
}

fn monotonicity(s: &PairSpectrum) -> CheckResult {
    let mut bad = 0;
    let mut total = 0;
    let mut worst = f64::NEG_INFINITY;
    for b in &s.branches {
        for (i, p) in b.points.iter().enumerate() {
            total += 1;
            worst = worst.max(p.dbeta_dalpha);
            let decreasing = i == 0 || p.beta < b.points[i - 1].beta;
            if !(p.dbeta_dalpha < 0.0) || !decreasing {
                bad += 1;
            }
        }
    }
    check("monotone decreasing branches", bad, total, worst)
}

fn derivative_vs_fd(pp: &PairProblem, alphas: &[f64]) -> Result<CheckResult> {
    let (mut bad, mut total, mut worst) = (0, 0, 0.0f64);
    for &a in alphas {
        for r in pp.beta_roots_indexed(a)? {
            let Some(fd) = finite_difference(pp, a, r.interval)? else { continue };
            let d = pp.curve_derivative(a, r.beta)?;
            let rel = (d - fd).abs() / d.abs().max(f64::MIN_POSITIVE);
            total += 1;
            worst = worst.max(rel);
            if rel > 1e-4 {
                bad += 1;
            }
        }
    }
    Ok(check("derivative formula vs finite differences", bad, total, worst))
}

fn oracle_roots(pp: &PairProblem, problem: &ProblemDef, alphas: &[f64], tol: &Tolerances) -> Result<CheckResult> {
    let (mut bad, mut worst) = (0, 0.0f64);
    for &a in alphas {
        let mine = pp.beta_roots(a)?;
        let theirs = direct_beta_filtered(problem, a, tol.zero_weight, tol)?;
        let err = if mine.len() == theirs.len() {
            mine.iter().zip(&theirs).map(|(x, y)| (x - y).abs() / (1.0 + y.abs())).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        worst = worst.max(err);
        if err > 1e-9 {
            bad += 1;
        }
    }
    Ok(check("secular roots vs dense rank-one update", bad, alphas.len(), worst))
}

fn membership(pp: &PairProblem, s: &PairSpectrum, problem: &ProblemDef, tol: &Tolerances) -> Result<CheckResult> {
    let mut points: Vec<(f64, f64)> = Vec::new();
    let curve: Vec<_> = s.curve_points().collect();
    let stride = (curve.len() / SAMPLES).max(1);
    points.extend(curve.iter().step_by(stride).map(|p| (p.alpha, p.beta)));
    let ys = pp.mesh.y_values();
    for &line in &s.vertical_lines {
        points.extend(golden_samples(ys[0] - 1.0, ys[ys.len() - 1] + 1.0, 5).into_iter().map(|b| (line, b)));
    }
    let xs = pp.mesh.x_values();
    for &line in &s.horizontal_lines {
        points.extend(golden_samples(xs[0] - 1.0, xs[xs.len() - 1] + 1.0, 5).into_iter().map(|a| (a, line)));
    }
    points.extend(s.corner_points.iter().map(|c| (c.alpha, c.beta)));
    let (mut bad, mut worst) = (0, 0.0f64);
    for &(a, b) in &points {
        let m = check_membership(problem, Complex64::new(a, 0.0), Complex64::new(b, 0.0), tol)?;
        worst = worst.max(m.residual);
        if m.residual > 1e-7 {
            bad += 1;
        }
    }
    Ok(check("membership of assembled points", bad, points.len(), worst))
}

fn blowups(pp: &PairProblem, s: &PairSpectrum) -> CheckResult {
    let mut bad = 0;
    for &pole in &pp.ra.poles {
        let left = s
            .branches
            .iter()
            .filter(|b| b.end_blowup.is_some_and(|u| u.pole == pole && !u.to_plus_infinity))
            .count();
        let right = s
            .branches
            .iter()
            .filter(|b| b.start_blowup.is_some_and(|u| u.pole == pole && u.to_plus_infinity))
            .count();
        if left != 1 || right != 1 {
            bad += 1;
        }
    }
    check("one blow-up per side of each pole", bad, pp.ra.poles.len(), bad as f64)
}

fn mirror(pp: &PairProblem, s: &PairSpectrum, tol: &Tolerances) -> Result<CheckResult> {
    let swapped = PairProblem::new(pp.problem().swapped(), tol.clone())?;
    let curve: Vec<_> = s.curve_points().collect();
    let stride = (curve.len() / SAMPLES).max(1);
    let (mut bad, mut total, mut worst) = (0, 0, 0.0f64);
    for p in curve.iter().step_by(stride) {
        let Ok(alphas) = swapped.beta_roots(p.beta) else { continue };
        let err = alphas.iter().map(|a| (a - p.alpha).abs()).fold(f64::INFINITY, f64::min);
        let scale = (1.0 + p.alpha.abs()) * (1.0 / p.dbeta_dalpha.abs()).max(1.0);
        total += 1;
        worst = worst.max(err / scale);
        if err > 1e-8 * scale {
            bad += 1;
        }
    }
    let lines_ok = swapped.sa.gamma == s.horizontal_lines && swapped.sb.gamma == s.vertical_lines;
    if !lines_ok {
        bad += 1;
    }
    Ok(check("mirror symmetry under swapping A and B", bad, total, worst))
}

fn nsa_agreement(pp: &PairProblem, problem: &ProblemDef, tol: &Tolerances) -> Result<CheckResult> {
    let gammas = golden_samples(-2.0, 2.0, 5);
    let (mut bad, mut worst) = (0, 0.0f64);
    for &g in &gammas {
        let a = nsa_spectrum(pp, g)?.eigenvalues;
        let b = nsa_matrix_spectrum(problem, g, tol)?;
        let d = match_with_multiplicity(&a, &b);
        worst = worst.max(d);
        if d > 1.0 {
            bad += 1;
        }
    }
    Ok(check("non-self-adjoint spectrum vs explicit matrix", bad, gammas.len(), worst))
}

/// Greedy matching of `ours` against oracle roots, returning the largest
/// error relative to its allowance. The oracle's polynomial pins a cluster
/// of `k` roots only to about `1e-9^(1/k)`, so a root gets that allowance
/// for the largest `k` such that `k` of `ours` lie within that radius of it,
/// and `1e-6` when it is isolated.
pub fn match_with_multiplicity(ours: &[Complex64], oracle: &[Complex64]) -> f64 {
    if ours.len() != oracle.len() {
        return f64::INFINITY;
    }
    let allowance = |x: &Complex64| {
        (2..=ours.len())
            .rev()
            .map(|k| 1e-9f64.powf(1.0 / k as f64))
            .zip((2..=ours.len()).rev())
            .find(|&(radius, k)| ours.iter().filter(|y| (*y - x).norm() <= radius).count() >= k)
            .map_or(1e-6, |(radius, _)| radius)
    };
    let mut pool = oracle.to_vec();
    let mut worst: f64 = 0.0;
    for x in ours {
        let (i, d) = pool
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("sizes match");
        pool.swap_remove(i);
        worst = worst.max(d / allowance(x));
    }
    worst
}
