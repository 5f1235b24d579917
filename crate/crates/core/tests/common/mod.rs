#![allow(dead_code)]

use pairspec::linalg::{Matrix, SymMatrix};
use pairspec::structure::ProblemDef;
use pairspec::Tolerances;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn dense_sym(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-2.0..2.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    SymMatrix::new(m, &tol()).expect("symmetric")
}

/// Diagonal matrix drawn from a few integers, so eigenvalues repeat.
pub fn repeated_diag(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix {
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-2..=2) as f64).collect();
    SymMatrix::from_diag(&d)
}

pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize, zero_prob: f64) -> Vec<f64> {
    loop {
        let z: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(zero_prob) { 0.0 } else { rng.gen_range(-1.0..1.0) })
            .collect();
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 {
            return z.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Random operator for interlacing tests: dense or with repeated eigenvalues.
pub fn random_operator(rng: &mut ChaCha8Rng, max_n: usize) -> (SymMatrix, Vec<f64>) {
    let n = rng.gen_range(1..=max_n);
    if rng.gen_bool(0.3) {
        (repeated_diag(rng, n), unit_vector(rng, n, 0.3))
    } else {
        (dense_sym(rng, n), unit_vector(rng, n, 0.0))
    }
}

/// Random problem of dimension at most `max_n`. About a third are
/// structured: diagonal blocks with repeated eigenvalues and zeros in `z`,
/// which exercise the exceptional sets.
pub fn random_problem(rng: &mut ChaCha8Rng, max_n: usize) -> ProblemDef {
    let n = rng.gen_range(1..=max_n);
    let kappa = rng.gen_range(0.2..3.0);
    let kind = *[0, 0, 1, 2].choose(rng).expect("non-empty");
    let (a, b, z) = match kind {
        0 => (dense_sym(rng, n), dense_sym(rng, n), unit_vector(rng, n, 0.0)),
        1 => (repeated_diag(rng, n), dense_sym(rng, n), unit_vector(rng, n, 0.3)),
        _ => (repeated_diag(rng, n), repeated_diag(rng, n), unit_vector(rng, n, 0.3)),
    };
    ProblemDef::new(a, b, z, kappa, &tol()).expect("valid problem")
}
