//! Numerical tolerances shared by every solver stage.

/// All thresholds used by the solver, in one place.
///
/// The defaults are tuned for desk-scale problems (dimension up to 64) with
/// entries of order one. Relative tolerances are scaled by the quantity named
/// in the field doc.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Jacobi stops once the off-diagonal Frobenius norm drops below
    /// `jacobi_rel * ‖S‖_F`.
    pub jacobi_rel: f64,
    pub jacobi_max_sweeps: usize,
    /// Accepted deviation of `‖z‖` from one before renormalising.
    pub unit_norm: f64,
    /// Relative asymmetry rejected when building a symmetric matrix.
    pub symmetry_rel: f64,
    /// Durand-Kerner step tolerance, relative to `1 + max|root|`.
    pub root_step_rel: f64,
    pub root_max_iter: usize,
    /// Roots closer than this are merged into one cluster with multiplicity.
    pub root_merge: f64,
    /// Pivot magnitude below which a determinant is reported as exactly zero.
    pub det_pivot: f64,
    /// Eigenvalue clustering, relative to `1 + spectral diameter`.
    pub cluster_rel: f64,
    /// Total eigenspace weight below which `z` is considered orthogonal.
    pub zero_weight: f64,
    /// Pole exclusion radius, relative to `1 + spectral diameter`.
    pub pole_rel: f64,
    /// `|R(α)|` below which the characteristic equation has no finite roots.
    pub resolvent_zero: f64,
    /// Bisection bracket width, relative to `1 + |β|`.
    pub bisect_rel: f64,
    /// Blow-up threshold, relative to `1 + spectral diameter`.
    pub blowup_rel: f64,
    /// Residual accepted by `curve_derivative` for a point on a curve.
    pub on_curve: f64,
    /// Membership tolerance, relative to the row-sum norm of `M(α, β)`.
    pub membership_rel: f64,
    /// Imaginary parts below this are snapped to the real axis.
    pub imag_snap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            jacobi_rel: 1e-13,
            jacobi_max_sweeps: 100,
            unit_norm: 1e-12,
            symmetry_rel: 1e-12,
            root_step_rel: 1e-12,
            root_max_iter: 500,
            root_merge: 1e-6,
            det_pivot: 1e-300,
            cluster_rel: 1e-8,
            zero_weight: 1e-10,
            pole_rel: 1e-9,
            resolvent_zero: 1e-12,
            bisect_rel: 1e-12,
            blowup_rel: 1e6,
            on_curve: 1e-8,
            membership_rel: 1e-8,
            imag_snap: 1e-8,
        }
    }
}
