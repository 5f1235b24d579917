//! End-to-end acceptance run. Every criterion is evaluated, one status line
//! is printed for each, and the test fails afterwards if any did not pass.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use pairspec::catalog::{example, path_matrix};
use pairspec::cli::output::{render_svg, Window};
use pairspec::linalg::jacobi_eig;
use pairspec::nsa::{find_collisions, nsa_spectrum};
use pairspec::oracle::{check_membership, direct_beta_filtered, multiset_distance, nsa_matrix_spectrum};
use pairspec::structure::{analyze_operator, compress, interlaces, ProblemDef};
use pairspec::tracer::{limit_sweep, LimitWindow, PairProblem, PairSpectrum, DEFAULT_SAMPLES};
use pairspec::verify::{finite_difference, golden_samples};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_operator, random_problem, tol};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn max_err(got: &[f64], want: &[f64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    let mut want = want.to_vec();
    want.sort_by(f64::total_cmp);
    got.iter().zip(&want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max)
}

fn contains(values: &[f64], x: f64) -> bool {
    values.iter().any(|v| (v - x).abs() < 1e-9)
}

fn example_kappas() -> Vec<ProblemDef> {
    let mut out = Vec::new();
    for k in 1..=5 {
        for kappa in [0.4, 1.0, 2.0] {
            out.push(example(k, Some(kappa), None, &tol()).unwrap());
        }
    }
    out
}

fn c1_example1_eigenvalues() -> Outcome {
    let a = path_matrix(4);
    let e = jacobi_eig(&a, &tol()).unwrap();
    let c = jacobi_eig(&compress(&a, &[0.0, 0.0, 0.0, 1.0]).unwrap(), &tol()).unwrap();
    let want_a: Vec<f64> = (1..=4).map(|j| 2.0 * (PI * j as f64 / 5.0).cos()).collect();
    let want_c: Vec<f64> = (1..=3).map(|j| 2.0 * (PI * j as f64 / 4.0).cos()).collect();
    let err = max_err(&e.values, &want_a).max(max_err(&c.values, &want_c));
    outcome(err <= 1e-10, format!("max error {err:.2e}"))
}

fn c2_example2_compressions() -> Outcome {
    let p = example(2, None, None, &tol()).unwrap();
    let ca = jacobi_eig(&compress(p.a(), p.z()).unwrap(), &tol()).unwrap().values;
    let cb = jacobi_eig(&compress(p.b(), p.z()).unwrap(), &tol()).unwrap().values;
    let err = max_err(&ca, &[-0.6]).max(max_err(&cb, &[1.4]));
    outcome(err <= 1e-12, format!("compressions {ca:?} and {cb:?}, max error {err:.2e}"))
}

fn c3_example4_spectra() -> Outcome {
    let pp = PairProblem::new(example(4, None, None, &tol()).unwrap(), tol()).unwrap();
    let s5 = 5f64.sqrt();
    let want = [-(3.0 + s5) / 2.0, -(3.0 - s5) / 2.0, (5.0 - s5) / 2.0, (5.0 + s5) / 2.0];
    let err = max_err(&pp.sb.eig.values, &want);
    let gamma_ok = max_err(&pp.sa.gamma, &[1.0, 3.0]) <= 1e-12;
    let tilde_ok = max_err(&pp.sa.gamma_tilde, &[1.0]) <= 1e-12;
    let xs = pp.mesh.x_values();
    let mesh_ok = contains(&xs, 3.0) && !contains(&xs, 1.0);
    outcome(
        err <= 1e-10 && gamma_ok && tilde_ok && mesh_ok,
        format!(
            "Spec(B) error {err:.2e}, Gamma {:?}, Gamma-tilde {:?}, mesh x {xs:?}",
            pp.sa.gamma, pp.sa.gamma_tilde
        ),
    )
}

fn c4_example5_degenerate() -> Outcome {
    let pp = PairProblem::new(example(5, None, None, &tol()).unwrap(), tol()).unwrap();
    let s13 = 13f64.sqrt();
    let err = max_err(&pp.sb.compressed_eig.values, &[(1.0 - s13) / 2.0, 0.5, (1.0 + s13) / 2.0]);
    let delta_ok = max_err(&pp.sa.delta, &[2.0]) <= 1e-12;
    let mesh_ok = contains(&pp.mesh.x_values(), 2.0);
    let spectrum = pp.assemble_spectrum().unwrap();
    let blowups_at_2 = spectrum
        .branches
        .iter()
        .flat_map(|b| [b.start_blowup, b.end_blowup])
        .flatten()
        .filter(|u| (u.pole - 2.0).abs() < 1e-9)
        .count();
    outcome(
        err <= 1e-10 && delta_ok && mesh_ok && blowups_at_2 == 0,
        format!(
            "Delta {:?}, Spec(B⊥⊥) error {err:.2e}, blow-ups at 2: {blowups_at_2}",
            pp.sa.delta
        ),
    )
}

fn odd_points(s: &PairSpectrum) -> usize {
    s.curve_points()
        .filter(|p| match p.rect {
            Some(r) => !r.is_even(),
            // on a mesh line: the closure of an even rectangle must contain it
            None => !s.mesh.in_even_closure(p.alpha, p.beta),
        })
        .count()
}

fn c5_parity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut problems = example_kappas();
    problems.extend((0..200).map(|_| random_problem(&mut rng, 8)));
    let (mut points, mut odd, mut short_grids, mut bad_problems) = (0usize, 0usize, 0usize, 0usize);
    for p in &problems {
        let pp = PairProblem::new(p.clone(), tol()).unwrap();
        let grid = pp.default_grid();
        if grid.len() < DEFAULT_SAMPLES {
            short_grids += 1;
        }
        let s = pp.assemble_on(&grid).unwrap();
        let o = odd_points(&s);
        points += s.curve_points().count();
        odd += o;
        bad_problems += usize::from(o > 0);
    }
    outcome(
        odd == 0 && short_grids == 0,
        format!(
            "{} problems, {points} points, {odd} in odd rectangles ({bad_problems} problems affected)",
            problems.len()
        ),
    )
}

fn c6_monotonicity() -> Outcome {
    let mut positive = 0usize;
    let mut traced = 0usize;
    for p in example_kappas() {
        let s = PairProblem::new(p, tol()).unwrap().assemble_spectrum().unwrap();
        for pt in s.curve_points() {
            traced += 1;
            positive += usize::from(!(pt.dbeta_dalpha < 0.0));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut checked, mut bad, mut worst) = (0usize, 0usize, 0.0f64);
    while checked < 10_000 {
        let pp = PairProblem::new(random_problem(&mut rng, 8), tol()).unwrap();
        let xs = pp.mesh.x_values();
        let (lo, hi) = (xs.first().copied().unwrap_or(-1.0) - 1.0, xs.last().copied().unwrap_or(1.0) + 1.0);
        for _ in 0..50 {
            let a = rng.gen_range(lo..hi);
            let Ok(roots) = pp.beta_roots_indexed(a) else { continue };
            for r in roots {
                let Some(fd) = finite_difference(&pp, a, r.interval).unwrap() else { continue };
                let d = pp.curve_derivative(a, r.beta).unwrap();
                let rel = (d - fd).abs() / d.abs();
                checked += 1;
                worst = worst.max(rel);
                bad += usize::from(!(rel <= 1e-4) || !(d < 0.0));
            }
        }
    }
    outcome(
        positive == 0 && bad == 0,
        format!(
            "{traced} traced points, {positive} non-negative slopes; {checked} difference checks, worst relative error {worst:.2e}"
        ),
    )
}

fn c7_interlacing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = 0;
    for _ in 0..1000 {
        let (x, z) = random_operator(&mut rng, 10);
        let s = analyze_operator(&x, &z, &tol()).unwrap();
        failures += usize::from(!interlaces(&s, 1e-9));
    }
    outcome(failures == 0, format!("{failures} of 1000 pairs violate interlacing"))
}

fn assembled_points(pp: &PairProblem, s: &PairSpectrum) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = s.curve_points().map(|p| (p.alpha, p.beta)).collect();
    let xs = pp.mesh.x_values();
    let ys = pp.mesh.y_values();
    for &a in &s.vertical_lines {
        pts.extend(golden_samples(ys[0] - 2.0, ys[ys.len() - 1] + 2.0, 20).into_iter().map(|b| (a, b)));
    }
    for &b in &s.horizontal_lines {
        pts.extend(golden_samples(xs[0] - 2.0, xs[xs.len() - 1] + 2.0, 20).into_iter().map(|a| (a, b)));
    }
    pts.extend(s.corner_points.iter().map(|c| (c.alpha, c.beta)));
    pts
}

fn c8_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut worst_root, mut root_failures) = (0.0f64, 0usize);
    for _ in 0..1000 {
        let p = random_problem(&mut rng, 8);
        let pp = PairProblem::new(p.clone(), tol()).unwrap();
        let ev = &pp.sa.eig.values;
        let a = rng.gen_range(ev[0] - 1.0..ev[ev.len() - 1] + 1.0);
        let (Ok(mine), Ok(theirs)) = (pp.beta_roots(a), direct_beta_filtered(&p, a, tol().zero_weight, &tol())) else {
            continue;
        };
        // relative to 1 + |β|: roots next to a pole of R_A are arbitrarily large
        let err = if mine.len() == theirs.len() {
            mine.iter().zip(&theirs).map(|(x, y)| (x - y).abs() / (1.0 + y.abs())).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        worst_root = worst_root.max(err);
        root_failures += usize::from(!(err <= 1e-9));
    }
    let mut problems = example_kappas();
    problems.extend((0..10).map(|_| random_problem(&mut rng, 6)));
    let (mut points, mut member_failures, mut worst_res) = (0usize, 0usize, 0.0f64);
    for p in &problems {
        let pp = PairProblem::new(p.clone(), tol()).unwrap();
        let s = pp.assemble_spectrum().unwrap();
        for (a, b) in assembled_points(&pp, &s) {
            let m = check_membership(p, Complex64::new(a, 0.0), Complex64::new(b, 0.0), &tol()).unwrap();
            points += 1;
            worst_res = worst_res.max(m.residual);
            member_failures += usize::from(!(m.residual <= 1e-7));
        }
    }
    outcome(
        root_failures == 0 && member_failures == 0,
        format!(
            "root mismatches {root_failures}/1000 (worst {worst_root:.2e}); membership failures {member_failures}/{points} (worst residual {worst_res:.2e})"
        ),
    )
}

fn c9_limits() -> Outcome {
    let p = example(2, None, None, &tol()).unwrap();
    let window = LimitWindow {
        alpha: (-2.0, 2.0),
        beta: (0.0, 4.0),
        strip_margin: 0.1,
        samples: 2000,
    };
    let small = limit_sweep(&p, &[1e-1, 1e-2, 1e-3], &window, &tol()).unwrap();
    let large = limit_sweep(&p, &[1e1, 1e2, 1e3], &window, &tol()).unwrap();
    let ds: Vec<f64> = small.entries.iter().map(|e| e.d_small).collect();
    let dl: Vec<f64> = large.entries.iter().map(|e| e.d_large).collect();
    let us: Vec<f64> = small.entries.iter().map(|e| e.d_small_unrestricted).collect();
    let ul: Vec<f64> = large.entries.iter().map(|e| e.d_large_unrestricted).collect();
    let passed = small.small_decreasing && large.large_decreasing && ds[2] < 1e-4 && dl[2] < 1e-4;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>().join(", ");
    outcome(
        passed,
        format!(
            "d_small [{}], d_large [{}] (whole rectangle: [{}], [{}])",
            fmt(&ds),
            fmt(&dl),
            fmt(&us),
            fmt(&ul)
        ),
    )
}

fn c10_nsa_bridge() -> Outcome {
    let gammas = golden_samples(-3.0, 3.0, 20);
    let (mut worst_oracle, mut worst_sym, mut worst_slope) = (0.0f64, 0.0f64, 0.0f64);
    let (mut collisions, mut unconfirmed) = (0usize, 0usize);
    for n in 2..=5 {
        let a = path_matrix(n);
        let mut z = vec![0.0; n];
        z[n - 1] = 1.0;
        let p = ProblemDef::new(a.clone(), a, z, 1.0, &tol()).unwrap();
        let pp = PairProblem::new(p.clone(), tol()).unwrap();
        for &g in &gammas {
            let ours = nsa_spectrum(&pp, g).unwrap().eigenvalues;
            let oracle = nsa_matrix_spectrum(&p, g, &tol()).unwrap();
            worst_oracle = worst_oracle.max(multiset_distance(&ours, &oracle));
            let mirrored: Vec<Complex64> = ours.iter().map(|l| -l.conj()).collect();
            let conjugated: Vec<Complex64> = ours.iter().map(|l| l.conj()).collect();
            worst_sym = worst_sym
                .max(multiset_distance(&ours, &mirrored))
                .max(multiset_distance(&ours, &conjugated));
        }
        let records = find_collisions(&pp, (0.0, 3.0), 200).unwrap();
        collisions += records.len();
        let real_count = |g: f64| {
            nsa_matrix_spectrum(&p, g, &tol())
                .unwrap()
                .iter()
                .filter(|l| l.im.abs() <= 1e-7)
                .count()
        };
        for r in &records {
            worst_slope = worst_slope.max((r.dbeta_dalpha + 1.0).abs());
            let h = 1e-4 * (1.0 + r.gamma_star.abs());
            unconfirmed += usize::from(real_count(r.gamma_star - h) == real_count(r.gamma_star + h));
        }
    }
    outcome(
        worst_oracle <= 1e-6 && worst_sym <= 1e-8 && worst_slope <= 1e-4 && collisions > 0 && unconfirmed == 0,
        format!(
            "oracle distance {worst_oracle:.2e}, symmetry {worst_sym:.2e}, {collisions} collisions with max |dβ/dα+1| {worst_slope:.2e}, {unconfirmed} not confirmed by the matrix"
        ),
    )
}

fn c11_straight_lines() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p3 = example(3, None, None, &tol()).unwrap();
    let member = |p: &ProblemDef, a: Complex64, b: Complex64| check_membership(p, a, b, &tol()).unwrap();
    let mut failures = 0;
    let mut worst = 0.0f64;
    let mut test = |p: &ProblemDef, a: Complex64, b: Complex64| {
        let m = member(p, a, b);
        worst = worst.max(m.residual);
        failures += usize::from(!m.is_pair_eigenvalue);
    };
    for _ in 0..20 {
        let b = rng.gen_range(-5.0..5.0);
        test(&p3, Complex64::new(-1.0, 0.0), Complex64::new(b, 0.0));
        let bc = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(0.1..3.0));
        test(&p3, Complex64::new(-1.0, 0.0), bc);
        let a = rng.gen_range(-5.0..5.0);
        test(&p3, Complex64::new(a, 0.0), Complex64::new(3.0, 0.0));
    }
    let p2 = example(2, None, None, &tol()).unwrap();
    let corners = PairProblem::new(p2.clone(), tol()).unwrap().corner_points();
    for c in &corners {
        test(&p2, Complex64::new(c.alpha, 0.0), Complex64::new(c.beta, 0.0));
    }
    let negative = member(&p2, Complex64::new(-1.0, 0.0), Complex64::new(0.5, 0.0));
    let passed = failures == 0 && corners.len() == 4 && negative.residual > 1e-4;
    outcome(
        passed,
        format!(
            "{failures} rejected line or corner points (worst residual {worst:.2e}), {} corners, negative case residual {:.2e}",
            corners.len(),
            negative.residual
        ),
    )
}

fn c12_figure() -> Outcome {
    let mut problems_ok = 0;
    let mut notes = Vec::new();
    for kappa in [0.4, 1.0, 2.0] {
        let pp = PairProblem::new(example(1, Some(kappa), Some(4), &tol()).unwrap(), tol()).unwrap();
        let s = pp.assemble_spectrum().unwrap();
        let strips = pp.mesh.x_points.len() + 1;
        let per_strip: Vec<usize> = (1..=strips).map(|p| s.branches.iter().filter(|b| b.strip == p).count()).collect();
        let counts_ok = per_strip.iter().all(|&c| c == 4);
        let mut sides_ok = true;
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
            sides_ok &= left == 1 && right == 1;
        }
        let total_blowups: usize = s
            .branches
            .iter()
            .map(|b| usize::from(b.start_blowup.is_some()) + usize::from(b.end_blowup.is_some()))
            .sum();
        sides_ok &= total_blowups == 2 * pp.ra.poles.len();
        let window = Window::around(&s);
        let svg_ok = render_svg(&s, window).unwrap() == render_svg(&s, window).unwrap();
        if counts_ok && sides_ok && svg_ok {
            problems_ok += 1;
        }
        notes.push(format!("κ={kappa}: branches per strip {per_strip:?}, blow-ups {total_blowups}"));
    }
    outcome(problems_ok == 3, notes.join("; "))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("example 1 eigenvalues", Duration::from_millis(10), c1_example1_eigenvalues),
        ("example 2 compressions", Duration::from_millis(10), c2_example2_compressions),
        ("example 4 spectra", Duration::from_millis(50), c3_example4_spectra),
        ("example 5 degenerate case", Duration::from_millis(50), c4_example5_degenerate),
        ("chess-board parity", Duration::from_secs(20), c5_parity),
        ("monotonicity and slope formula", Duration::from_secs(5), c6_monotonicity),
        ("interlacing", Duration::from_secs(2), c7_interlacing),
        ("oracle equivalence", Duration::from_secs(10), c8_oracle_equivalence),
        ("limit behaviour", Duration::from_secs(2), c9_limits),
        ("non-self-adjoint bridge", Duration::from_secs(15), c10_nsa_bridge),
        ("straight-line spectrum", Duration::from_secs(1), c11_straight_lines),
        ("figure-level structure", Duration::from_secs(5), c12_figure),
    ];
    let mut failed = Vec::new();
    let mut stderr = std::io::stderr();
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let ok = o.passed && elapsed <= *budget;
        let line = format!(
            "criterion {:>2} {}: {name}: {} [{:.1} ms, budget {} ms]\n",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64() * 1e3,
            budget.as_millis()
        );
        let _ = stderr.write_all(line.as_bytes());
        if !ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
