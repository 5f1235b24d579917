//! Real pair-eigenvalue curves `β(α)` from the characteristic equation
//! `κ² R_A(α) R_B(β) = 1`, plus the straight-line and corner components.

use std::collections::BTreeMap;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::resolvent::ResolventProfile;
use crate::structure::{analyze_operator, build_mesh, Mesh, OperatorStructure, ProblemDef, Rect};

/// Number of uniform samples in the default α-grid.
pub const DEFAULT_SAMPLES: usize = 2000;
/// Radius around each pole of `R_A` that receives geometric refinement.
pub const REFINE_RADIUS: f64 = 1e-2;
const REFINE_PER_DECADE: usize = 10;

/// A problem together with everything derived from it that the solvers need.
#[derive(Clone, Debug)]
pub struct PairProblem {
    problem: ProblemDef,
    tol: Tolerances,
    pub sa: OperatorStructure,
    pub sb: OperatorStructure,
    pub ra: ResolventProfile,
    pub rb: ResolventProfile,
    pub mesh: Mesh,
}

/// A root of the secular equation in `β` together with the index of the
/// interval between effective poles of `R_B` that contains it
/// (0 is left of every pole, `m` right of every pole).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaRoot {
    pub beta: f64,
    pub interval: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub alpha: f64,
    pub beta: f64,
    pub dbeta_dalpha: f64,
    /// `None` when the point is within tolerance of a mesh line.
    pub rect: Option<Rect>,
}

/// Endpoint of a branch where `|β|` exceeds the blow-up threshold next to a
/// pole of `R_A`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowUp {
    pub pole: f64,
    pub to_plus_infinity: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveBranch {
    pub id: usize,
    /// Mesh column `p` (1-based) the branch lives in.
    pub strip: usize,
    /// Pole interval of `R_B` the branch lives in.
    pub interval: usize,
    pub points: Vec<CurvePoint>,
    pub start_blowup: Option<BlowUp>,
    pub end_blowup: Option<BlowUp>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gap {
    pub alpha: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub branches: Vec<CurveBranch>,
    pub gaps: Vec<Gap>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CornerKind {
    /// `(α, β̂)`: eigenvalue of `A` with an eigenvalue of the compression of `B`.
    SpecACompressedB,
    /// `(α̂, β)`: eigenvalue of the compression of `A` with an eigenvalue of `B`.
    CompressedASpecB,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerPoint {
    pub alpha: f64,
    pub beta: f64,
    pub kind: CornerKind,
}

/// The real pair-eigenvalue set: curve branches, straight lines and
/// isolated corner points.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSpectrum {
    pub branches: Vec<CurveBranch>,
    /// Lines `{α} x ℝ`.
    pub vertical_lines: Vec<f64>,
    /// Lines `ℝ x {β}`.
    pub horizontal_lines: Vec<f64>,
    pub corner_points: Vec<CornerPoint>,
    pub mesh: Mesh,
    pub gaps: Vec<Gap>,
}

impl PairSpectrum {
    pub fn curve_points(&self) -> impl Iterator<Item = &CurvePoint> {
        self.branches.iter().flat_map(|b| b.points.iter())
    }
}

impl PairProblem {
    pub fn new(problem: ProblemDef, tol: Tolerances) -> Result<Self> {
        let sa = analyze_operator(problem.a(), problem.z(), &tol)?;
        let sb = analyze_operator(problem.b(), problem.z(), &tol)?;
        let ra = ResolventProfile::from_structure(&sa, &tol);
        let rb = ResolventProfile::from_structure(&sb, &tol);
        let mesh = build_mesh(&sa, &sb);
        Ok(Self {
            problem,
            tol,
            sa,
            sb,
            ra,
            rb,
            mesh,
        })
    }

    pub fn problem(&self) -> &ProblemDef {
        &self.problem
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn kappa(&self) -> f64 {
        self.problem.kappa()
    }

    /// `|β|` beyond which a branch endpoint next to a pole counts as a blow-up.
    ///
    /// Bounded branches never leave the hull of `Spec(B)`, so the nominal
    /// `1e6 (1 + diameter)` is lowered to `1e3 (1 + ρ(B))` when that is
    /// smaller. Weakly coupled poles could otherwise never reach the nominal
    /// value before the exclusion zone cuts the branch off.
    pub fn blowup_threshold(&self) -> f64 {
        let nominal = self.tol.blowup_rel * (1.0 + self.sa.diameter().max(self.sb.diameter()));
        let radius = self.sb.eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        nominal.min(1e3 * (1.0 + radius))
    }

    /// Real roots `β` of `κ² R_A(α) R_B(β) = 1`, ascending.
    pub fn beta_roots(&self, alpha: f64) -> Result<Vec<f64>> {
        Ok(self.beta_roots_indexed(alpha)?.into_iter().map(|r| r.beta).collect())
    }

    pub fn beta_roots_indexed(&self, alpha: f64) -> Result<Vec<BetaRoot>> {
        let c = match self.secular_rhs(alpha)? {
            Some(c) => c,
            None => return Ok(Vec::new()),
        };
        let m = self.rb.num_poles();
        let mut out = Vec::with_capacity(m);
        for interval in 0..=m {
            if let Some(beta) = self.solve_interval(c, interval)? {
                out.push(BetaRoot { beta, interval });
            }
        }
        Ok(out)
    }

    /// The root in one pole interval of `R_B`, if it exists.
    pub fn beta_in_interval(&self, alpha: f64, interval: usize) -> Result<Option<f64>> {
        match self.secular_rhs(alpha)? {
            Some(c) => self.solve_interval(c, interval),
            None => Ok(None),
        }
    }

    /// `c = 1 / (κ² R_A(α))`, or `None` when `R_A(α)` vanishes.
    fn secular_rhs(&self, alpha: f64) -> Result<Option<f64>> {
        let kappa = self.problem.kappa();
        if kappa == 0.0 {
            return Err(Error::DegenerateCoupling);
        }
        let ra = self.ra.eval(alpha)?;
        if ra.abs() <= self.tol.resolvent_zero {
            return Ok(None);
        }
        Ok(Some(1.0 / (kappa * kappa * ra)))
    }

    /// Bisection for `R_B(β) = c` inside one pole interval. `R_B` increases
    /// from `-∞` to `+∞` between consecutive poles, from `0` to `+∞` left of
    /// the first pole and from `-∞` to `0` right of the last one.
    fn solve_interval(&self, c: f64, interval: usize) -> Result<Option<f64>> {
        let poles = &self.rb.poles;
        let m = poles.len();
        if m == 0 {
            return Ok(None);
        }
        let f = |b: f64| self.rb.eval_unchecked(b) - c;
        let (lo, hi) = if interval == 0 {
            if c <= 0.0 {
                return Ok(None);
            }
            let hi = poles[0];
            (self.grow_bracket(hi, -1.0, |b| f(b) < 0.0)?, hi)
        } else if interval == m {
            if c >= 0.0 {
                return Ok(None);
            }
            let lo = poles[m - 1];
            (lo, self.grow_bracket(lo, 1.0, |b| f(b) > 0.0)?)
        } else if interval < m {
            (poles[interval - 1], poles[interval])
        } else {
            return Ok(None);
        };
        Ok(Some(bisect_increasing(f, lo, hi)))
    }

    /// Steps away from `from` geometrically until `ok` holds.
    fn grow_bracket(&self, from: f64, dir: f64, ok: impl Fn(f64) -> bool) -> Result<f64> {
        let mut step = 1.0 + self.sb.diameter();
        while step < 1e300 {
            let b = from + dir * step;
            if ok(b) {
                return Ok(b);
            }
            step *= 2.0;
        }
        Err(Error::NumericalFailure {
            what: "exterior root bracket",
            residual: step,
        })
    }

    /// `|κ² R_A(α) R_B(β) - 1|`.
    pub fn char_residual(&self, alpha: f64, beta: f64) -> Result<f64> {
        let k2 = self.problem.kappa().powi(2);
        Ok((k2 * self.ra.eval(alpha)? * self.rb.eval(beta)? - 1.0).abs())
    }

    /// First-order rounding floor of [`char_residual`](Self::char_residual):
    /// the change caused by perturbing `α` and `β` by one ulp. Close to a pole
    /// of `R_A` this exceeds any fixed tolerance.
    pub fn residual_allowance(&self, alpha: f64, beta: f64) -> f64 {
        let k2 = self.problem.kappa().powi(2);
        let ra = self.ra.eval_unchecked(alpha).abs();
        let rb = self.rb.eval_unchecked(beta).abs();
        let dra = self.ra.eval_prime_unchecked(alpha);
        let drb = self.rb.eval_prime_unchecked(beta);
        8.0 * f64::EPSILON * k2 * (ra * drb * (1.0 + beta.abs()) + dra * rb * (1.0 + alpha.abs()))
    }

    /// `dβ/dα = -κ² R_A'(α) R_B(β)² / R_B'(β)` at a point of a curve.
    pub fn curve_derivative(&self, alpha: f64, beta: f64) -> Result<f64> {
        let residual = self.char_residual(alpha, beta)?;
        if residual > self.tol.on_curve + self.residual_allowance(alpha, beta) {
            return Err(Error::InvalidPoint { alpha, beta, residual });
        }
        Ok(self.derivative_unchecked(alpha, beta))
    }

    fn derivative_unchecked(&self, alpha: f64, beta: f64) -> f64 {
        let k2 = self.problem.kappa().powi(2);
        let rb = self.rb.eval_unchecked(beta);
        -k2 * self.ra.eval_prime_unchecked(alpha) * rb * rb / self.rb.eval_prime_unchecked(beta)
    }

    /// Uniform samples on `[α_min, α_max]` plus geometric refinement toward
    /// every pole of `R_A` inside the range, down to twice the exclusion radius.
    pub fn grid(&self, alpha_min: f64, alpha_max: f64, samples: usize) -> Vec<f64> {
        let samples = samples.max(2);
        let mut g: Vec<f64> = (0..samples)
            .map(|i| alpha_min + (alpha_max - alpha_min) * i as f64 / (samples - 1) as f64)
            .collect();
        let floor = 2.0 * self.ra.pole_tol;
        for &pole in &self.ra.poles {
            let mut k = 0;
            loop {
                let d = REFINE_RADIUS * 10f64.powf(-(k as f64) / REFINE_PER_DECADE as f64);
                let d = d.max(floor);
                for a in [pole - d, pole + d] {
                    if a > alpha_min && a < alpha_max {
                        g.push(a);
                    }
                }
                if d == floor {
                    break;
                }
                k += 1;
            }
        }
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    }

    /// Grid spanning one unit beyond the outermost α mesh points.
    pub fn default_grid(&self) -> Vec<f64> {
        let xs = self.mesh.x_values();
        let lo = xs.first().copied().unwrap_or(0.0) - 1.0;
        let hi = xs.last().copied().unwrap_or(0.0) + 1.0;
        self.grid(lo, hi, DEFAULT_SAMPLES)
    }

    /// Solves on every grid point and stitches roots into branches keyed by
    /// (mesh column, `R_B` pole interval).
    pub fn trace_branches(&self, grid: &[f64]) -> Trace {
        let mut gaps = Vec::new();
        let mut by_key: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut branches: Vec<CurveBranch> = Vec::new();
        for &alpha in grid {
            let roots = match self.beta_roots_indexed(alpha) {
                Ok(r) => r,
                Err(e) => {
                    gaps.push(Gap {
                        alpha,
                        reason: e.to_string(),
                    });
                    continue;
                }
            };
            if roots.is_empty() {
                gaps.push(Gap {
                    alpha,
                    reason: "resolvent of A vanishes".into(),
                });
            }
            let strip = 1 + self.mesh.x_points.iter().filter(|x| x.value < alpha).count();
            for root in roots {
                let point = CurvePoint {
                    alpha,
                    beta: root.beta,
                    dbeta_dalpha: self.derivative_unchecked(alpha, root.beta),
                    rect: self.mesh.rectangle_of(alpha, root.beta).ok(),
                };
                let idx = *by_key.entry((strip, root.interval)).or_insert_with(|| {
                    branches.push(CurveBranch {
                        id: branches.len(),
                        strip,
                        interval: root.interval,
                        points: Vec::new(),
                        start_blowup: None,
                        end_blowup: None,
                    });
                    branches.len() - 1
                });
                branches[idx].points.push(point);
            }
        }
        let threshold = self.blowup_threshold();
        for b in &mut branches {
            let (first, last) = match (b.points.first(), b.points.last()) {
                (Some(f), Some(l)) => (*f, *l),
                _ => continue,
            };
            b.start_blowup = self.blowup_at(first, threshold, |pole| pole <= first.alpha);
            b.end_blowup = self.blowup_at(last, threshold, |pole| pole >= last.alpha);
        }
        Trace { branches, gaps }
    }

    fn blowup_at(&self, p: CurvePoint, threshold: f64, side: impl Fn(f64) -> bool) -> Option<BlowUp> {
        if p.beta.abs() <= threshold {
            return None;
        }
        self.ra
            .poles
            .iter()
            .copied()
            .filter(|&pole| side(pole) && (pole - p.alpha).abs() <= REFINE_RADIUS)
            .min_by(|a, b| (a - p.alpha).abs().total_cmp(&(b - p.alpha).abs()))
            .map(|pole| BlowUp {
                pole,
                to_plus_infinity: p.beta > 0.0,
            })
    }

    /// Corner points `(α, β̂)` and `(α̂, β)` where a curve may change
    /// rectangle, excluding those already on a straight line.
    pub fn corner_points(&self) -> Vec<CornerPoint> {
        let mut out = Vec::new();
        for ca in self.sa.clusters.iter().filter(|c| !c.in_gamma) {
            for cb in &self.sb.compressed_clusters {
                if !self.sb.in_gamma(cb.value) {
                    out.push(CornerPoint {
                        alpha: ca.value,
                        beta: cb.value,
                        kind: CornerKind::SpecACompressedB,
                    });
                }
            }
        }
        for cb in self.sb.clusters.iter().filter(|c| !c.in_gamma) {
            for ca in &self.sa.compressed_clusters {
                if !self.sa.in_gamma(ca.value) {
                    out.push(CornerPoint {
                        alpha: ca.value,
                        beta: cb.value,
                        kind: CornerKind::CompressedASpecB,
                    });
                }
            }
        }
        out
    }

    pub fn assemble_spectrum(&self) -> Result<PairSpectrum> {
        self.assemble_on(&self.default_grid())
    }

    pub fn assemble_on(&self, grid: &[f64]) -> Result<PairSpectrum> {
        if self.problem.is_uncoupled() {
            return Err(Error::DegenerateCoupling);
        }
        let trace = self.trace_branches(grid);
        Ok(PairSpectrum {
            branches: trace.branches,
            vertical_lines: self.sa.gamma.clone(),
            horizontal_lines: self.sb.gamma.clone(),
            corner_points: self.corner_points(),
            mesh: self.mesh.clone(),
            gaps: trace.gaps,
        })
    }
}

/// Bisection for an increasing function with `f(lo⁺) < 0 < f(hi⁻)`; the
/// endpoints themselves are never evaluated. Runs until the bracket cannot
/// be split further in floating point.
fn bisect_increasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Compact window for [`limit_sweep`]: the rectangle `alpha x beta` minus
/// the vertical strips of half-width `strip_margin` around `Spec(A)` and
/// `Spec(A⊥⊥)`. Near those lines the curves turn through a knee whose
/// distance to the limit lines decays only like `κ` (or `1/κ`), so the
/// unrestricted distance over the whole rectangle is reported separately.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitWindow {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub strip_margin: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitEntry {
    pub kappa: f64,
    /// Largest distance from a windowed curve point to
    /// `Spec(A) x ℝ ∪ ℝ x Spec(B)`.
    pub d_small: f64,
    /// Distance to the same union built from the compressions.
    pub d_large: f64,
    pub d_small_unrestricted: f64,
    pub d_large_unrestricted: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub entries: Vec<LimitEntry>,
    /// `d_small` strictly decreases as `κ` decreases.
    pub small_decreasing: bool,
    /// `d_large` strictly decreases as `κ` increases.
    pub large_decreasing: bool,
}

/// Samples the real curves for each `κ` and measures how far they are from
/// the two limiting line configurations.
pub fn limit_sweep(
    problem: &ProblemDef,
    kappas: &[f64],
    window: &LimitWindow,
    tol: &Tolerances,
) -> Result<LimitReport> {
    let base = PairProblem::new(problem.clone(), tol.clone())?;
    if !base.sa.gamma.is_empty() || !base.sb.gamma.is_empty() {
        return Err(Error::Precondition(
            "limit sweeps need both exceptional sets empty".into(),
        ));
    }
    if kappas.iter().any(|&k| !(k > 0.0)) {
        return Err(Error::InvalidInput("kappa values must be positive".into()));
    }
    let spec_a = base.sa.eig.values.clone();
    let spec_b = base.sb.eig.values.clone();
    let comp_a = base.sa.compressed_eig.values.clone();
    let comp_b = base.sb.compressed_eig.values.clone();
    let dist = |t: f64, set: &[f64]| set.iter().map(|s| (s - t).abs()).fold(f64::INFINITY, f64::min);

    let mut entries = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let pp = PairProblem::new(problem.with_kappa(kappa), tol.clone())?;
        let grid = pp.grid(window.alpha.0, window.alpha.1, window.samples);
        let mut e = LimitEntry {
            kappa,
            d_small: 0.0,
            d_large: 0.0,
            d_small_unrestricted: 0.0,
            d_large_unrestricted: 0.0,
            points: 0,
        };
        for &alpha in &grid {
            let roots = match pp.beta_roots(alpha) {
                Ok(r) => r,
                Err(Error::PoleProximity { .. }) => continue,
                Err(err) => return Err(err),
            };
            let da_small = dist(alpha, &spec_a);
            let da_large = dist(alpha, &comp_a);
            let in_window = da_small.min(da_large) >= window.strip_margin;
            for beta in roots {
                if beta < window.beta.0 || beta > window.beta.1 {
                    continue;
                }
                e.points += 1;
                let small = da_small.min(dist(beta, &spec_b));
                let large = da_large.min(dist(beta, &comp_b));
                e.d_small_unrestricted = e.d_small_unrestricted.max(small);
                e.d_large_unrestricted = e.d_large_unrestricted.max(large);
                if in_window {
                    e.d_small = e.d_small.max(small);
                    e.d_large = e.d_large.max(large);
                }
            }
        }
        entries.push(e);
    }

    let strictly_decreasing = |mut v: Vec<(f64, f64)>| -> bool {
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v.windows(2).all(|w| w[1].1 < w[0].1)
    };
    // order by "closeness to the limit": descending κ for small, ascending for large
    let small_decreasing = strictly_decreasing(entries.iter().map(|e| (-e.kappa, e.d_small)).collect());
    let large_decreasing = strictly_decreasing(entries.iter().map(|e| (e.kappa, e.d_large)).collect());
    Ok(LimitReport {
        entries,
        small_decreasing,
        large_decreasing,
    })
}
