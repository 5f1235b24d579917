//! Spectral scaffolding of a single operator relative to the coupling vector,
//! and the chess-board mesh built from two of them.

use std::ops::Range;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, complement_basis, jacobi_eig, norm, EigDecomp, SymMatrix};

/// The quadruple `(A, B, z, κ)` of the rank-one coupled problem
/// `[[A - α, κ zzᵀ], [κ zzᵀ, B - β]] (u, v)ᵀ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemDef {
    a: SymMatrix,
    b: SymMatrix,
    z: Vec<f64>,
    kappa: f64,
}

impl ProblemDef {
    /// `z` is renormalised when its length is off by more than the unit-norm
    /// tolerance.
    pub fn new(a: SymMatrix, b: SymMatrix, z: Vec<f64>, kappa: f64, tol: &Tolerances) -> Result<Self> {
        let n = a.dim();
        if b.dim() != n || z.len() != n {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: A is {n}x{n}, B is {0}x{0}, z has {1} entries",
                b.dim(),
                z.len()
            )));
        }
        if !kappa.is_finite() || z.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite kappa or z".into()));
        }
        let len = norm(&z);
        if len == 0.0 {
            return Err(Error::InvalidInput("coupling vector z is zero".into()));
        }
        let z = if (len - 1.0).abs() > tol.unit_norm {
            z.iter().map(|v| v / len).collect()
        } else {
            z
        };
        Ok(Self { a, b, z, kappa })
    }

    pub fn a(&self) -> &SymMatrix {
        &self.a
    }

    pub fn b(&self) -> &SymMatrix {
        &self.b
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// With `κ = 0` the pair spectrum is `Spec(A) x ℝ ∪ ℝ x Spec(B)`.
    pub fn is_uncoupled(&self) -> bool {
        self.kappa == 0.0
    }

    pub fn with_kappa(&self, kappa: f64) -> Self {
        Self {
            kappa,
            ..self.clone()
        }
    }

    /// The problem with the roles of `A` and `B` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
            ..self.clone()
        }
    }
}

/// A group of numerically coincident eigenvalues of one operator.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenCluster {
    pub value: f64,
    /// Positions in the ascending eigenvalue list.
    pub indices: Range<usize>,
    /// Total coupling weight `Σ ⟨z, φ_j⟩²` over the eigenspace.
    pub weight: f64,
    pub in_gamma: bool,
    pub in_gamma_tilde: bool,
    pub in_delta: bool,
}

impl EigenCluster {
    pub fn multiplicity(&self) -> usize {
        self.indices.len()
    }

    /// Carries nonzero coupling weight, hence a pole of the resolvent.
    pub fn is_pole(&self) -> bool {
        !self.in_gamma_tilde
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompressedCluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// Eigen-structure of one operator `X` relative to `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorStructure {
    pub eig: EigDecomp,
    /// `⟨z, φ_j⟩²` for each eigenvector column.
    pub weights: Vec<f64>,
    /// Eigendecomposition of the compression to `z⊥`.
    pub compressed_eig: EigDecomp,
    pub clusters: Vec<EigenCluster>,
    pub compressed_clusters: Vec<CompressedCluster>,
    /// Eigenvalues whose eigenspace contains a nonzero vector orthogonal to `z`.
    pub gamma: Vec<f64>,
    /// Eigenvalues whose whole eigenspace is orthogonal to `z`.
    pub gamma_tilde: Vec<f64>,
    /// Common eigenvalues of `X` and its compression where the compressed
    /// eigenspace is strictly larger.
    pub delta: Vec<f64>,
    pub cluster_tol: f64,
    pub weight_tol: f64,
    /// Inputs that sit close to a classification threshold.
    pub warnings: Vec<String>,
}

impl OperatorStructure {
    pub fn dim(&self) -> usize {
        self.eig.len()
    }

    pub fn diameter(&self) -> f64 {
        self.eig.diameter()
    }

    pub fn in_gamma(&self, t: f64) -> bool {
        self.gamma.iter().any(|g| (g - t).abs() <= self.cluster_tol)
    }

    pub fn in_gamma_tilde(&self, t: f64) -> bool {
        self.gamma_tilde.iter().any(|g| (g - t).abs() <= self.cluster_tol)
    }

    /// Number of independent eigenvectors orthogonal to `z` in the cluster.
    pub fn orthogonal_multiplicity(&self, cluster: &EigenCluster) -> usize {
        if cluster.in_gamma_tilde {
            cluster.multiplicity()
        } else {
            cluster.multiplicity() - 1
        }
    }
}

/// The compression `Bᵀ X B` of `X` to `z⊥`, for the Householder complement
/// basis `B`.
pub fn compress(x: &SymMatrix, z: &[f64]) -> Result<SymMatrix> {
    if x.dim() < 2 {
        return Err(Error::InvalidInput(
            "compression needs dimension at least 2".into(),
        ));
    }
    if z.len() != x.dim() {
        return Err(Error::InvalidInput("z has the wrong dimension".into()));
    }
    let basis = complement_basis(z)?;
    Ok(x.congruence(&basis))
}

pub fn analyze_operator(x: &SymMatrix, z: &[f64], tol: &Tolerances) -> Result<OperatorStructure> {
    let n = x.dim();
    let eig = jacobi_eig(x, tol)?;
    let weights: Vec<f64> = (0..n)
        .map(|j| {
            let c: f64 = (0..n).map(|i| z[i] * eig.vectors[(i, j)]).sum();
            c * c
        })
        .collect();
    let compressed_eig = if n >= 2 {
        jacobi_eig(&compress(x, z)?, tol)?
    } else {
        EigDecomp::empty()
    };

    let cluster_tol = tol.cluster_rel * (1.0 + eig.diameter());
    let weight_tol = tol.zero_weight;
    let mut warnings = Vec::new();

    let compressed_clusters: Vec<CompressedCluster> =
        linalg::cluster_sorted(&compressed_eig.values, cluster_tol)
            .into_iter()
            .map(|r| CompressedCluster {
                value: mean(&compressed_eig.values[r.clone()]),
                multiplicity: r.len(),
            })
            .collect();

    let mut clusters = Vec::new();
    for r in linalg::cluster_sorted(&eig.values, cluster_tol) {
        let value = mean(&eig.values[r.clone()]);
        let weight: f64 = weights[r.clone()].iter().sum();
        let m = r.len();
        let in_gamma_tilde = weight < weight_tol;
        let in_gamma = m >= 2 || in_gamma_tilde;
        let in_delta = compressed_clusters
            .iter()
            .any(|c| (c.value - value).abs() <= cluster_tol && c.multiplicity > m);
        if weight >= weight_tol && weight < 1e4 * weight_tol {
            warnings.push(format!(
                "eigenvalue {value} has coupling weight {weight:e}, close to the zero-weight threshold"
            ));
        }
        clusters.push(EigenCluster {
            value,
            indices: r,
            weight,
            in_gamma,
            in_gamma_tilde,
            in_delta,
        });
    }
    for w in eig.values.windows(2) {
        let gap = w[1] - w[0];
        if gap > cluster_tol && gap <= 1e3 * cluster_tol {
            warnings.push(format!(
                "eigenvalues {} and {} are nearly coincident (gap {gap:e})",
                w[0], w[1]
            ));
        }
    }

    let pick = |f: fn(&EigenCluster) -> bool| -> Vec<f64> {
        clusters.iter().filter(|c| f(c)).map(|c| c.value).collect()
    };
    let gamma = pick(|c| c.in_gamma);
    let gamma_tilde = pick(|c| c.in_gamma_tilde);
    let delta = pick(|c| c.in_delta);

    Ok(OperatorStructure {
        eig,
        weights,
        compressed_eig,
        clusters,
        compressed_clusters,
        gamma,
        gamma_tilde,
        delta,
        cluster_tol,
        weight_tol,
        warnings,
    })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Where a mesh dividing point comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Spec,
    Compressed,
    Both,
}

impl Origin {
    pub fn label(self) -> &'static str {
        match self {
            Origin::Spec => "spec",
            Origin::Compressed => "compressed",
            Origin::Both => "both",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshPoint {
    pub value: f64,
    pub origin: Origin,
}

/// Rectangle indices (1-based) of the chess-board mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub p: usize,
    pub q: usize,
}

impl Rect {
    pub fn is_even(self) -> bool {
        (self.p + self.q).is_multiple_of(2)
    }
}

/// Dividing points of the chess-board mesh; `-∞` and `+∞` are implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub x_points: Vec<MeshPoint>,
    pub y_points: Vec<MeshPoint>,
    pub x_tol: f64,
    pub y_tol: f64,
}

/// Dividing points on one axis: the eigenvalues of `X` and of its
/// compression, without the fully orthogonal ones unless they are in Δ.
///
/// A compression eigenvalue is identified with a nearby eigenvalue of `X`
/// only when that eigenvalue is in Γ. A simple eigenvalue that sees `z` is
/// strictly interlaced with the compression, so a compression eigenvalue
/// within tolerance of it is still a separate dividing point.
fn axis_points(s: &OperatorStructure) -> Vec<MeshPoint> {
    // (point, may absorb a compression eigenvalue)
    let mut raw: Vec<(MeshPoint, bool)> = Vec::new();
    for c in &s.clusters {
        if !c.in_gamma_tilde {
            raw.push((
                MeshPoint {
                    value: c.value,
                    origin: Origin::Spec,
                },
                c.in_gamma,
            ));
        } else if c.in_delta {
            raw.push((
                MeshPoint {
                    value: c.value,
                    origin: Origin::Both,
                },
                true,
            ));
        }
    }
    for c in &s.compressed_clusters {
        if !s.in_gamma_tilde(c.value) {
            raw.push((
                MeshPoint {
                    value: c.value,
                    origin: Origin::Compressed,
                },
                true,
            ));
        }
    }
    raw.sort_by(|a, b| a.0.value.total_cmp(&b.0.value));
    let mut merged: Vec<(MeshPoint, bool)> = Vec::with_capacity(raw.len());
    for (p, absorbs) in raw {
        match merged.last_mut() {
            Some((last, last_absorbs))
                if (p.value - last.value).abs() <= s.cluster_tol
                    && *last_absorbs
                    && absorbs
                    && (last.origin == Origin::Compressed) != (p.origin == Origin::Compressed) =>
            {
                last.origin = Origin::Both;
                if p.origin != Origin::Compressed {
                    last.value = p.value;
                }
                *last_absorbs = false;
            }
            _ => merged.push((p, absorbs)),
        }
    }
    merged.into_iter().map(|(p, _)| p).collect()
}

pub fn build_mesh(sa: &OperatorStructure, sb: &OperatorStructure) -> Mesh {
    Mesh {
        x_points: axis_points(sa),
        y_points: axis_points(sb),
        x_tol: sa.cluster_tol,
        y_tol: sb.cluster_tol,
    }
}

impl Mesh {
    pub fn x_values(&self) -> Vec<f64> {
        self.x_points.iter().map(|p| p.value).collect()
    }

    pub fn y_values(&self) -> Vec<f64> {
        self.y_points.iter().map(|p| p.value).collect()
    }

    /// The rectangle `R_{p,q}` containing `(α, β)`.
    pub fn rectangle_of(&self, alpha: f64, beta: f64) -> Result<Rect> {
        let on_line = |pts: &[MeshPoint], t: f64, tol: f64| pts.iter().any(|p| (p.value - t).abs() <= tol);
        if on_line(&self.x_points, alpha, self.x_tol) || on_line(&self.y_points, beta, self.y_tol) {
            return Err(Error::OnMeshLine { alpha, beta });
        }
        let p = 1 + self.x_points.iter().filter(|x| x.value < alpha).count();
        let q = 1 + self.y_points.iter().filter(|y| y.value < beta).count();
        Ok(Rect { p, q })
    }

    /// Rectangle by plain comparison with the dividing points, without the
    /// mesh-line tolerance. Use for points known to be off the lines.
    pub fn locate(&self, alpha: f64, beta: f64) -> Rect {
        Rect {
            p: 1 + self.x_points.iter().filter(|x| x.value < alpha).count(),
            q: 1 + self.y_points.iter().filter(|y| y.value < beta).count(),
        }
    }

    /// Every rectangle whose closure contains `(α, β)` up to the mesh-line
    /// tolerance; a single rectangle for points off the lines.
    pub fn closure_rects(&self, alpha: f64, beta: f64) -> Vec<Rect> {
        let span = |pts: &[MeshPoint], t: f64, tol: f64| {
            let lo = 1 + pts.iter().filter(|x| x.value < t - tol).count();
            let hi = 1 + pts.iter().filter(|x| x.value < t + tol).count();
            lo..=hi
        };
        let qs = span(&self.y_points, beta, self.y_tol);
        span(&self.x_points, alpha, self.x_tol)
            .flat_map(|p| qs.clone().map(move |q| Rect { p, q }))
            .collect()
    }

    /// `true` when `(α, β)` lies in the closure of an even rectangle.
    pub fn in_even_closure(&self, alpha: f64, beta: f64) -> bool {
        self.closure_rects(alpha, beta).into_iter().any(Rect::is_even)
    }

    /// `true` when `(α, β)` is within tolerance of a mesh corner.
    pub fn is_corner(&self, alpha: f64, beta: f64, slack: f64) -> bool {
        self.x_points.iter().any(|x| (x.value - alpha).abs() <= slack)
            && self.y_points.iter().any(|y| (y.value - beta).abs() <= slack)
    }
}

/// Interlacing slack check `λ_k - slack <= λ̂_k <= λ_{k+1} + slack`.
pub fn interlaces(s: &OperatorStructure, slack: f64) -> bool {
    let full = &s.eig.values;
    s.compressed_eig
        .values
        .iter()
        .enumerate()
        .all(|(k, &c)| full[k] - slack <= c && c <= full[k + 1] + slack)
}

/// `‖z‖²` split across the eigenvectors; should sum to one.
pub fn total_weight(s: &OperatorStructure) -> f64 {
    s.weights.iter().sum()
}
