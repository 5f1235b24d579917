//! The scalar resolvent `R(t) = ⟨(X - t)⁻¹ z, z⟩ = Σ w_p / (pole_p - t)`.
//!
//! `R` is always evaluated from its pole/weight decomposition, never through
//! a linear solve. Eigenvalue clusters whose eigenspace is orthogonal to `z`
//! contribute nothing and are kept as neutral points.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{cluster_sorted, EigDecomp};
use crate::structure::OperatorStructure;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeutralPoint {
    pub value: f64,
    pub weight: f64,
    pub in_delta: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolventProfile {
    /// Effective poles, ascending.
    pub poles: Vec<f64>,
    /// Total weight per pole, strictly positive.
    pub pole_weights: Vec<f64>,
    pub neutral_points: Vec<NeutralPoint>,
    /// Exclusion radius around each pole for real arguments.
    pub pole_tol: f64,
    pub cluster_tol: f64,
    pub diameter: f64,
}

impl ResolventProfile {
    pub fn from_structure(s: &OperatorStructure, tol: &Tolerances) -> Self {
        let mut poles = Vec::new();
        let mut pole_weights = Vec::new();
        let mut neutral_points = Vec::new();
        for c in &s.clusters {
            if c.is_pole() {
                poles.push(c.value);
                pole_weights.push(c.weight);
            } else {
                neutral_points.push(NeutralPoint {
                    value: c.value,
                    weight: c.weight,
                    in_delta: c.in_delta,
                });
            }
        }
        let diameter = s.diameter();
        Self {
            poles,
            pole_weights,
            neutral_points,
            pole_tol: tol.pole_rel * (1.0 + diameter),
            cluster_tol: s.cluster_tol,
            diameter,
        }
    }

    pub fn num_poles(&self) -> usize {
        self.poles.len()
    }

    /// Sum of all weights including neutral clusters; equals `‖z‖²`.
    pub fn total_weight(&self) -> f64 {
        self.pole_weights.iter().sum::<f64>() + self.neutral_points.iter().map(|p| p.weight).sum::<f64>()
    }

    /// Index of the pole nearest to `t`, if any.
    pub fn nearest_pole(&self, t: f64) -> Option<(usize, f64)> {
        self.poles
            .iter()
            .enumerate()
            .map(|(i, &p)| (i, (p - t).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    fn check(&self, t: f64) -> Result<()> {
        match self.nearest_pole(t) {
            Some((i, d)) if d <= self.pole_tol => Err(Error::PoleProximity {
                pole: self.poles[i],
                t,
            }),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.eval_unchecked(t))
    }

    pub fn eval_prime(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.eval_prime_unchecked(t))
    }

    /// Complex arguments off the real axis are always accepted.
    pub fn eval_complex(&self, t: Complex64) -> Result<Complex64> {
        if t.im == 0.0 {
            return self.eval(t.re).map(|v| Complex64::new(v, 0.0));
        }
        Ok(self
            .poles
            .iter()
            .zip(&self.pole_weights)
            .map(|(&p, &w)| w / (p - t))
            .sum())
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        self.poles
            .iter()
            .zip(&self.pole_weights)
            .map(|(&p, &w)| w / (p - t))
            .sum()
    }

    pub(crate) fn eval_prime_unchecked(&self, t: f64) -> f64 {
        self.poles
            .iter()
            .zip(&self.pole_weights)
            .map(|(&p, &w)| {
                let d = p - t;
                w / (d * d)
            })
            .sum()
    }

    /// Leading term `w_p / (pole_p - t)` of `R` near pole `index`, usable
    /// inside the exclusion zone.
    pub fn pole_asymptote(&self, index: usize, t: f64) -> f64 {
        self.pole_weights[index] / (self.poles[index] - t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignChangeKind {
    /// `R → +∞` from the left and `-∞` from the right.
    Pole,
    /// Simple zero at an eigenvalue of the compression.
    Zero,
    /// Eigenvalue with zero coupling weight. `R` is continuous there and
    /// changes sign only when the point is in Δ.
    Neutral { changes_sign: bool },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignChange {
    pub point: f64,
    pub kind: SignChangeKind,
}

impl SignChange {
    pub fn changes_sign(&self) -> bool {
        !matches!(self.kind, SignChangeKind::Neutral { changes_sign: false })
    }
}

/// Poles, zeros and neutral points of `R`, ascending.
pub fn sign_changes(profile: &ResolventProfile, compressed: &EigDecomp) -> Vec<SignChange> {
    let tol = profile.cluster_tol;
    let mut out: Vec<SignChange> = profile
        .poles
        .iter()
        .map(|&p| SignChange {
            point: p,
            kind: SignChangeKind::Pole,
        })
        .collect();
    out.extend(profile.neutral_points.iter().map(|n| SignChange {
        point: n.value,
        kind: SignChangeKind::Neutral {
            changes_sign: n.in_delta,
        },
    }));
    for r in cluster_sorted(&compressed.values, tol) {
        let v = compressed.values[r.clone()].iter().sum::<f64>() / r.len() as f64;
        let shadowed = profile.poles.iter().any(|p| (p - v).abs() <= tol)
            || profile.neutral_points.iter().any(|n| (n.value - v).abs() <= tol);
        if !shadowed {
            out.push(SignChange {
                point: v,
                kind: SignChangeKind::Zero,
            });
        }
    }
    out.sort_by(|a, b| a.point.total_cmp(&b.point));
    out
}
