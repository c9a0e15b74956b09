//! Tube construction over a pair of curvature-adapted hypersurfaces.
//!
//! For `M1 ⊂ X1`, `M2 ⊂ X2` with unit normals `N1`, `N2` and a closed
//! profile curve `u(θ)` around the origin,
//!
//! ```text
//! f(p1, p2, θ) = (exp(u1(θ) N1), exp(u2(θ) N2))
//! N̄ = (−u2'·P(N1), u1'·P(N2)) / ‖u'‖
//! ```
//!
//! where `P` is parallel transport along the normal geodesics. With
//! `κ(λ, μ, s) = (μ·f_s + λ·f_c) / (f_c − λ·f_s)`, `f_c = f_c(μ, s)`,
//! `f_s = f_s(μ, s)`, the spectra of the result are
//!
//! | eigenspace    | shape operator                 | `R(·, N̄)N̄`       |
//! |---------------|--------------------------------|------------------|
//! | `P(E¹_jk)`    | `−(u2'/‖u'‖)·κ(λ1j, μ1k, u1)`  | `u2'²·μ1k/‖u'‖²` |
//! | `P(E²_jk)`    | `+(u1'/‖u'‖)·κ(λ2j, μ2k, u2)`  | `u1'²·μ2k/‖u'‖²` |
//! | `∂/∂θ`        | `(u1'u2'' − u1''u2')/‖u'‖³`    | `0`              |

use std::f64::consts::TAU;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypersurface::{Hypersurface, HypersurfacePointData, SurfacePoint};
use crate::matfun::{
    cos_branch, joint_eigenspaces_default, sinc_branch, spectral_cos, spectral_sinc, SpectralData, SymMatrix,
};
use crate::spaceform::{Space, TangentVector, GEOMETRY_TOL};

/// Focal-proximity threshold on `f_c − λ·f_s`.
pub const FOCAL_GUARD: f64 = 1e-10;
/// Samples used for winding number, regularity and radius diagnostics.
pub const CURVE_SAMPLES: usize = 4096;
/// Seed points sampled (besides the reference point) for the admissible radius.
pub const DEFAULT_FOCAL_SAMPLES: usize = 16;
/// Fraction of the sampled focal infimum a curve may reach.
pub const ADMISSIBLE_FRACTION: f64 = 0.9;

/// Profile curve families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveKind {
    /// `r(cos θ, sin θ)`.
    Circle { r: f64 },
    /// `(a cos θ, b sin θ)`.
    Ellipse { a: f64, b: f64 },
    /// `u_i(θ) = Σ_k a_k cos kθ + b_k sin kθ`, entry `k` holding `[a_k, b_k]`.
    Fourier { u1: Vec<[f64; 2]>, u2: Vec<[f64; 2]> },
}

/// `u(θ)`, `u'(θ)`, `u''(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub u: [f64; 2],
    pub du: [f64; 2],
    pub ddu: [f64; 2],
}

impl CurveSample {
    pub fn speed(&self) -> f64 {
        self.du[0].hypot(self.du[1])
    }

    /// Signed curvature of the plane curve.
    pub fn curvature(&self) -> f64 {
        (self.du[0] * self.ddu[1] - self.ddu[0] * self.du[1]) / self.speed().powi(3)
    }
}

/// A closed plane curve with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    kind: CurveKind,
    reversed: bool,
}

fn fourier_eval(coeffs: &[[f64; 2]], theta: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, [a, b]) in coeffs.iter().enumerate() {
        let kf = k as f64;
        let (s, c) = (kf * theta).sin_cos();
        out[0] += a * c + b * s;
        out[1] += kf * (b * c - a * s);
        out[2] -= kf * kf * (a * c + b * s);
    }
    out
}

impl ProfileCurve {
    pub fn new(kind: CurveKind) -> Result<Self> {
        let positive = |x: f64, what: &str| -> Result<()> {
            if !x.is_finite() {
                return Err(Error::NonFinite("curve parameter"));
            }
            if x <= 0.0 {
                return Err(Error::InvalidParameter(format!("{what} must be positive, got {x}")));
            }
            Ok(())
        };
        match &kind {
            CurveKind::Circle { r } => positive(*r, "circle radius")?,
            CurveKind::Ellipse { a, b } => {
                positive(*a, "ellipse semi-axis a")?;
                positive(*b, "ellipse semi-axis b")?;
            }
            CurveKind::Fourier { u1, u2 } => {
                if u1.iter().chain(u2).flatten().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite("curve parameter"));
                }
            }
        }
        Ok(ProfileCurve { kind, reversed: false })
    }

    pub fn circle(r: f64) -> Result<Self> {
        Self::new(CurveKind::Circle { r })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Self::new(CurveKind::Ellipse { a, b })
    }

    pub fn fourier(u1: Vec<[f64; 2]>, u2: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(CurveKind::Fourier { u1, u2 })
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// The same trace run backwards: `θ ↦ u(2π − θ)`.
    pub fn reversed(mut self) -> Self {
        self.reversed = !self.reversed;
        self
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn eval(&self, theta: f64) -> CurveSample {
        let t = if self.reversed { TAU - theta } else { theta };
        let mut s = match &self.kind {
            CurveKind::Circle { r } => {
                let (sn, cs) = t.sin_cos();
                CurveSample {
                    u: [r * cs, r * sn],
                    du: [-r * sn, r * cs],
                    ddu: [-r * cs, -r * sn],
                }
            }
            CurveKind::Ellipse { a, b } => {
                let (sn, cs) = t.sin_cos();
                CurveSample {
                    u: [a * cs, b * sn],
                    du: [-a * sn, b * cs],
                    ddu: [-a * cs, -b * sn],
                }
            }
            CurveKind::Fourier { u1, u2 } => {
                let f1 = fourier_eval(u1, t);
                let f2 = fourier_eval(u2, t);
                CurveSample {
                    u: [f1[0], f2[0]],
                    du: [f1[1], f2[1]],
                    ddu: [f1[2], f2[2]],
                }
            }
        };
        if self.reversed {
            s.du = [-s.du[0], -s.du[1]];
        }
        s
    }

    /// Closure, regularity, winding and radius diagnostics over
    /// [`CURVE_SAMPLES`] uniform samples, against the focal bound of a pair
    /// of seeds.
    pub fn diagnostics(&self, focal_bound: f64) -> CurveDiagnostics {
        let admissible_radius = ADMISSIBLE_FRACTION * focal_bound;
        let a = self.eval(0.0);
        let b = self.eval(TAU);
        let diff = |x: [f64; 2], y: [f64; 2]| (x[0] - y[0]).abs().max((x[1] - y[1]).abs());
        let mut min_speed = f64::INFINITY;
        let mut max_radius: f64 = 0.0;
        let mut min_radius = f64::INFINITY;
        let mut angle = 0.0;
        for i in 0..CURVE_SAMPLES {
            let s = self.eval(TAU * i as f64 / CURVE_SAMPLES as f64);
            let r2 = s.u[0] * s.u[0] + s.u[1] * s.u[1];
            min_speed = min_speed.min(s.speed());
            max_radius = max_radius.max(r2.sqrt());
            min_radius = min_radius.min(r2.sqrt());
            angle += (s.u[0] * s.du[1] - s.u[1] * s.du[0]) / r2;
        }
        let winding_integral = angle / CURVE_SAMPLES as f64;
        CurveDiagnostics {
            closure_u: diff(a.u, b.u),
            closure_du: diff(a.du, b.du),
            closure_ddu: diff(a.ddu, b.ddu),
            min_speed,
            min_radius,
            max_radius,
            winding: if winding_integral.is_finite() {
                winding_integral.round() as i64
            } else {
                0
            },
            focal_bound,
            admissible_radius,
            margin: admissible_radius - max_radius,
        }
    }
}

/// Outcome of [`ProfileCurve::diagnostics`].
#[derive(Debug, Clone, PartialEq)]
pub struct CurveDiagnostics {
    pub closure_u: f64,
    pub closure_du: f64,
    pub closure_ddu: f64,
    pub min_speed: f64,
    /// Smallest sampled `‖u‖`; the curve must avoid the origin.
    pub min_radius: f64,
    pub max_radius: f64,
    pub winding: i64,
    /// Sampled infimum of the seeds' focal radii.
    pub focal_bound: f64,
    /// `0.9 × focal_bound`.
    pub admissible_radius: f64,
    /// `admissible_radius − max_radius`.
    pub margin: f64,
}

impl CurveDiagnostics {
    /// First failed requirement, if any.
    pub fn check(&self) -> Result<()> {
        let scale = 1e-9 * (1.0 + self.max_radius);
        if self.closure_u > scale || self.closure_du > scale || self.closure_ddu > scale {
            return Err(Error::CurveRejected(format!(
                "curve is not closed to second order at the seam (residuals u {:e}, u' {:e}, u'' {:e})",
                self.closure_u, self.closure_du, self.closure_ddu
            )));
        }
        if self.min_speed <= 1e-12 {
            return Err(Error::CurveRejected(format!(
                "curve is not regular: min ‖u'‖ = {:e}",
                self.min_speed
            )));
        }
        if self.min_radius <= 1e-12 {
            return Err(Error::CurveRejected(format!(
                "curve passes through the origin (min ‖u‖ = {:e})",
                self.min_radius
            )));
        }
        if self.winding != 1 {
            return Err(Error::CurveRejected(format!(
                "winding number about the origin is {}, expected +1",
                self.winding
            )));
        }
        if self.max_radius >= self.admissible_radius {
            return Err(Error::CurveRejected(format!(
                "max ‖u‖ = {} exceeds the admissible radius {} (focal bound {})",
                self.max_radius,
                self.admissible_radius, self.focal_bound
            )));
        }
        Ok(())
    }
}

/// Smallest `|s| > 0` with `f_c(μ,s) − λ·f_s(μ,s) = 0`, or `+∞`.
pub fn focal_radius(lambda: f64, mu: f64) -> f64 {
    let l = lambda.abs();
    if mu > 0.0 {
        let k = mu.sqrt();
        k.atan2(l) / k
    } else if mu < 0.0 {
        let k = (-mu).sqrt();
        // λ = √−μ (horosphere-like) counts as focal-free despite roundoff
        if l - k > 1e-12 * (1.0 + k) {
            (k / l).atanh() / k
        } else {
            f64::INFINITY
        }
    } else if l > 0.0 {
        1.0 / l
    } else {
        f64::INFINITY
    }
}

/// One focal-radius evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FocalRow {
    /// 1 or 2.
    pub factor: usize,
    /// 0 for the reference point, then the random samples.
    pub sample: usize,
    pub lambda: f64,
    pub mu: f64,
    pub multiplicity: usize,
    pub focal_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FocalReport {
    pub rows: Vec<FocalRow>,
    /// Infimum of the sampled focal radii.
    pub focal_bound: f64,
    /// `0.9 × focal_bound`.
    pub admissible_radius: f64,
}

/// Focal radii of both seeds at their reference points and `samples` random
/// points drawn from a fixed stream.
pub fn focal_table(m1: &Hypersurface, m2: &Hypersurface, samples: usize) -> Result<FocalReport> {
    let mut rows = Vec::new();
    for (factor, m) in [(1, m1), (2, m2)] {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        rng.set_stream(factor as u64);
        let mut points = vec![m.reference_point()];
        for _ in 0..samples {
            points.push(m.sample_point(&mut rng));
        }
        for (sample, p) in points.iter().enumerate() {
            let d = m.point_data(p)?;
            for pair in &d.spectra.pairs {
                rows.push(FocalRow {
                    factor,
                    sample,
                    lambda: pair.lambda,
                    mu: pair.mu,
                    multiplicity: pair.multiplicity,
                    focal_radius: focal_radius(pair.lambda, pair.mu),
                });
            }
        }
    }
    let focal_bound = rows.iter().map(|r| r.focal_radius).fold(f64::INFINITY, f64::min);
    Ok(FocalReport {
        rows,
        focal_bound,
        admissible_radius: ADMISSIBLE_FRACTION * focal_bound,
    })
}

/// `0.9 ×` the sampled infimum of focal radii of both seeds.
pub fn admissible_radius(m1: &Hypersurface, m2: &Hypersurface, samples: usize) -> Result<f64> {
    Ok(focal_table(m1, m2, samples)?.admissible_radius)
}

/// Checks `curve` against the seeds; returns the diagnostics when it passes.
pub fn validate_curve(curve: &ProfileCurve, m1: &Hypersurface, m2: &Hypersurface) -> Result<CurveDiagnostics> {
    validate_curve_with(curve, m1, m2, DEFAULT_FOCAL_SAMPLES)
}

/// [`validate_curve`] with an explicit focal sample budget.
pub fn validate_curve_with(
    curve: &ProfileCurve,
    m1: &Hypersurface,
    m2: &Hypersurface,
    focal_samples: usize,
) -> Result<CurveDiagnostics> {
    let bound = focal_table(m1, m2, focal_samples)?.focal_bound;
    let diag = curve.diagnostics(bound);
    diag.check()?;
    Ok(diag)
}

/// Principal curvature of the parallel hypersurface at signed distance `s`
/// in a direction with seed data `(λ, μ)`:
/// `(μ·f_s + λ·f_c) / (f_c − λ·f_s)`. At `μ = 0` this is `λ/(1 − λs)`.
pub fn offset_principal_curvature(lambda: f64, mu: f64, s: f64) -> Result<f64> {
    let fc = cos_branch(mu, s);
    let fs = sinc_branch(mu, s);
    let den = fc - lambda * fs;
    if den.abs() < FOCAL_GUARD {
        return Err(Error::FocalPoint(den));
    }
    Ok((mu * fs + lambda * fc) / den)
}

/// Immersion scale factor `f_c(μ,s) − λ·f_s(μ,s)`.
pub fn immersion_scale(lambda: f64, mu: f64, s: f64) -> f64 {
    cos_branch(mu, s) - lambda * sinc_branch(mu, s)
}

/// Which row of the spectral table a direction belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowLabel {
    /// Transported joint eigenspace `j` of the first seed.
    First(usize),
    /// Transported joint eigenspace `j` of the second seed.
    Second(usize),
    /// The curve direction `∂/∂θ`.
    Theta,
}

impl std::fmt::Display for RowLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RowLabel::First(j) => write!(f, "E1_{j}"),
            RowLabel::Second(j) => write!(f, "E2_{j}"),
            RowLabel::Theta => write!(f, "theta"),
        }
    }
}

/// One row of the spectral table.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub label: RowLabel,
    /// Seed eigenvalues `(λ, μ)`; `None` for the θ row.
    pub seed: Option<(f64, f64)>,
    pub value: f64,
    pub multiplicity: usize,
}

/// Unit normal coefficients `(ρ1, ρ2) = (−u2', u1')/‖u'‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalDecomposition {
    pub rho1: f64,
    pub rho2: f64,
}

/// Everything computed at one `(p1, p2, θ)`.
#[derive(Debug, Clone)]
struct Evaluation {
    point: DVector<f64>,
    /// `(P(N1), 0)` and `(0, P(N2))`.
    transported_normals: [DVector<f64>; 2],
    curve: CurveSample,
    rows: Vec<EvalRow>,
}

#[derive(Debug, Clone)]
struct EvalRow {
    label: RowLabel,
    seed: Option<(f64, f64)>,
    scale: f64,
    shape: f64,
    normal_jacobi: f64,
    /// Unit directions in ambient product coordinates.
    directions: Vec<DVector<f64>>,
}

/// The tube `f(M1 × M2 × S¹)` inside `X1 × X2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructedHypersurface {
    m1: Hypersurface,
    m2: Hypersurface,
    curve: ProfileCurve,
    ambient: Space,
    diagnostics: Option<CurveDiagnostics>,
}

impl ConstructedHypersurface {
    /// Validates the curve against the seeds' admissible radius.
    pub fn new(m1: Hypersurface, m2: Hypersurface, curve: ProfileCurve) -> Result<Self> {
        Self::with_focal_samples(m1, m2, curve, DEFAULT_FOCAL_SAMPLES)
    }

    /// [`Self::new`] with an explicit focal sample budget.
    pub fn with_focal_samples(
        m1: Hypersurface,
        m2: Hypersurface,
        curve: ProfileCurve,
        focal_samples: usize,
    ) -> Result<Self> {
        let diag = validate_curve_with(&curve, &m1, &m2, focal_samples)?;
        let mut c = Self::new_unvalidated(m1, m2, curve)?;
        c.diagnostics = Some(diag);
        Ok(c)
    }

    /// Skips curve validation; evaluations still refuse focal points.
    pub fn new_unvalidated(m1: Hypersurface, m2: Hypersurface, curve: ProfileCurve) -> Result<Self> {
        let ambient = Space::pair(m1.ambient().clone(), m2.ambient().clone())?;
        Ok(ConstructedHypersurface {
            m1,
            m2,
            curve,
            ambient,
            diagnostics: None,
        })
    }

    pub fn m1(&self) -> &Hypersurface {
        &self.m1
    }

    pub fn m2(&self) -> &Hypersurface {
        &self.m2
    }

    pub fn curve(&self) -> &ProfileCurve {
        &self.curve
    }

    pub fn ambient(&self) -> &Space {
        &self.ambient
    }

    /// Curve diagnostics, present when built with [`Self::new`].
    pub fn diagnostics(&self) -> Option<&CurveDiagnostics> {
        self.diagnostics.as_ref()
    }

    pub fn as_hypersurface(self) -> Hypersurface {
        Hypersurface::from_constructed(self)
    }

    fn split_len(&self) -> (usize, usize) {
        (self.m1.ambient().ambient_dim(), self.m2.ambient().ambient_dim())
    }

    fn join(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        let (n1, n2) = self.split_len();
        let mut out = DVector::zeros(n1 + n2);
        out.rows_mut(0, n1).copy_from(a);
        out.rows_mut(n1, n2).copy_from(b);
        out
    }

    pub fn tube_map(&self, p1: &SurfacePoint, p2: &SurfacePoint, theta: f64) -> Result<DVector<f64>> {
        let u = self.curve.eval(theta).u;
        let x1 = self.m1.normal_offset(p1, u[0])?;
        let x2 = self.m2.normal_offset(p2, u[1])?;
        Ok(self.join(&x1, &x2))
    }

    fn factor_rows(
        &self,
        d: &HypersurfacePointData,
        x: &Space,
        s: f64,
        first: bool,
    ) -> Vec<(usize, f64, f64, f64, Vec<DVector<f64>>)> {
        let (n1, n2) = self.split_len();
        d.spectra
            .pairs
            .iter()
            .enumerate()
            .map(|(j, pair)| {
                let dirs = pair
                    .basis
                    .iter()
                    .map(|b| {
                        let v = x.transport(&d.point, &d.normal, s, &d.to_ambient(b));
                        if first {
                            self.join(&v, &DVector::zeros(n2))
                        } else {
                            self.join(&DVector::zeros(n1), &v)
                        }
                    })
                    .collect();
                (j, pair.lambda, pair.mu, immersion_scale(pair.lambda, pair.mu, s), dirs)
            })
            .collect()
    }

    fn evaluate(&self, p1: &SurfacePoint, p2: &SurfacePoint, theta: f64) -> Result<Evaluation> {
        let d1 = self.m1.point_data(p1)?;
        let d2 = self.m2.point_data(p2)?;
        let cs = self.curve.eval(theta);
        let [u1, u2] = cs.u;
        let [v1, v2] = cs.du;
        let l = cs.speed();
        if l <= 1e-12 {
            return Err(Error::CurveRejected(format!("curve is not regular at θ = {theta}")));
        }
        let (x1, x2) = (self.m1.ambient(), self.m2.ambient());
        let (n1, n2) = self.split_len();
        let point = self.join(&x1.exp(&d1.point, &d1.normal, u1), &x2.exp(&d2.point, &d2.normal, u2));
        let pn1 = x1.velocity(&d1.point, &d1.normal, u1);
        let pn2 = x2.velocity(&d2.point, &d2.normal, u2);
        let transported_normals = [self.join(&pn1, &DVector::zeros(n2)), self.join(&DVector::zeros(n1), &pn2)];

        let mut rows = Vec::new();
        for (j, lambda, mu, scale, directions) in self.factor_rows(&d1, x1, u1, true) {
            if scale.abs() < FOCAL_GUARD {
                return Err(Error::FocalPoint(scale));
            }
            let kappa = offset_principal_curvature(lambda, mu, u1)?;
            rows.push(EvalRow {
                label: RowLabel::First(j),
                seed: Some((lambda, mu)),
                scale,
                shape: -(v2 / l) * kappa,
                normal_jacobi: v2 * v2 * mu / (l * l),
                directions,
            });
        }
        for (j, lambda, mu, scale, directions) in self.factor_rows(&d2, x2, u2, false) {
            if scale.abs() < FOCAL_GUARD {
                return Err(Error::FocalPoint(scale));
            }
            let kappa = offset_principal_curvature(lambda, mu, u2)?;
            rows.push(EvalRow {
                label: RowLabel::Second(j),
                seed: Some((lambda, mu)),
                scale,
                shape: (v1 / l) * kappa,
                normal_jacobi: v1 * v1 * mu / (l * l),
                directions,
            });
        }
        let theta_dir = (&transported_normals[0] * v1 + &transported_normals[1] * v2) / l;
        rows.push(EvalRow {
            label: RowLabel::Theta,
            seed: None,
            scale: l,
            shape: cs.curvature(),
            normal_jacobi: 0.0,
            directions: vec![theta_dir],
        });
        Ok(Evaluation {
            point,
            transported_normals,
            curve: cs,
            rows,
        })
    }

    /// Images of the seed eigenvectors and of `∂/∂θ` under `df`.
    pub fn tube_differential(
        &self,
        p1: &SurfacePoint,
        p2: &SurfacePoint,
        theta: f64,
    ) -> Result<Vec<(RowLabel, DVector<f64>)>> {
        let ev = self.evaluate(p1, p2, theta)?;
        Ok(ev
            .rows
            .iter()
            .flat_map(|r| r.directions.iter().map(move |d| (r.label, d * r.scale)))
            .collect())
    }

    pub fn unit_normal(
        &self,
        p1: &SurfacePoint,
        p2: &SurfacePoint,
        theta: f64,
    ) -> Result<(DVector<f64>, NormalDecomposition)> {
        let ev = self.evaluate(p1, p2, theta)?;
        Ok(normal_from(&ev))
    }

    /// `C(θ) = −(u1'² − u2'²)/(u1'² + u2'²)`.
    pub fn product_angle(&self, theta: f64) -> f64 {
        let [v1, v2] = self.curve.eval(theta).du;
        -(v1 * v1 - v2 * v2) / (v1 * v1 + v2 * v2)
    }

    /// `C` evaluated as `g̃(P N̄, N̄)` with the product structure `P`.
    pub fn product_angle_via_structure(&self, p1: &SurfacePoint, p2: &SurfacePoint, theta: f64) -> Result<f64> {
        let (n, _) = self.unit_normal(p1, p2, theta)?;
        let pn = self.ambient.apply_product_structure(&n)?;
        Ok(self.ambient.inner(&pn, &n))
    }

    fn rows_with(ev: &Evaluation, value: impl Fn(&EvalRow) -> f64) -> Vec<SpectrumRow> {
        ev.rows
            .iter()
            .map(|r| SpectrumRow {
                label: r.label,
                seed: r.seed,
                value: value(r),
                multiplicity: r.directions.len(),
            })
            .collect()
    }

    /// Shape operator eigenvalues per table row.
    pub fn shape_spectrum(&self, p1: &SurfacePoint, p2: &SurfacePoint, theta: f64) -> Result<Vec<SpectrumRow>> {
        let ev = self.evaluate(p1, p2, theta)?;
        Ok(Self::rows_with(&ev, |r| r.shape))
    }

    /// Normal Jacobi operator eigenvalues per table row.
    pub fn normal_jacobi_spectrum(
        &self,
        p1: &SurfacePoint,
        p2: &SurfacePoint,
        theta: f64,
    ) -> Result<Vec<SpectrumRow>> {
        let ev = self.evaluate(p1, p2, theta)?;
        Ok(Self::rows_with(&ev, |r| r.normal_jacobi))
    }

    /// Joint spectral data of both operators in the transported eigenframe.
    pub fn spectral_data(&self, p1: &SurfacePoint, p2: &SurfacePoint, theta: f64) -> Result<SpectralData> {
        Ok(self.point_data(p1, p2, theta)?.spectra)
    }

    pub fn point_data(&self, p1: &SurfacePoint, p2: &SurfacePoint, theta: f64) -> Result<HypersurfacePointData> {
        let ev = self.evaluate(p1, p2, theta)?;
        let (normal, _) = normal_from(&ev);
        let mut frame = Vec::new();
        let mut shape = Vec::new();
        let mut nj = Vec::new();
        for r in &ev.rows {
            for d in &r.directions {
                frame.push(d.clone());
                shape.push(r.shape);
                nj.push(r.normal_jacobi);
            }
        }
        let shape = SymMatrix::from_diagonal(&shape)?;
        let normal_jacobi = SymMatrix::from_diagonal(&nj)?;
        let spectra = joint_eigenspaces_default(&shape, &normal_jacobi)?;
        Ok(HypersurfacePointData {
            point: ev.point,
            frame,
            normal,
            shape,
            normal_jacobi,
            spectra,
        })
    }

    /// The totally geodesic surface `(s1, s2) ↦ (exp(s1 N1), exp(s2 N2))`.
    pub fn flat_section(&self, p1: &SurfacePoint, p2: &SurfacePoint) -> Result<FlatSection> {
        Ok(FlatSection {
            x1: self.m1.embed(p1)?,
            n1: self.m1.normal_at(p1)?,
            x2: self.m2.embed(p2)?,
            n2: self.m2.normal_at(p2)?,
            space1: self.m1.ambient().clone(),
            space2: self.m2.ambient().clone(),
        })
    }
}

fn normal_from(ev: &Evaluation) -> (DVector<f64>, NormalDecomposition) {
    let [v1, v2] = ev.curve.du;
    let l = ev.curve.speed();
    let rho1 = -v2 / l;
    let rho2 = v1 / l;
    let n = &ev.transported_normals[0] * rho1 + &ev.transported_normals[1] * rho2;
    (n, NormalDecomposition { rho1, rho2 })
}

/// Chart of the flat section through `(f1(p1), f2(p2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatSection {
    x1: DVector<f64>,
    n1: DVector<f64>,
    x2: DVector<f64>,
    n2: DVector<f64>,
    space1: Space,
    space2: Space,
}

impl FlatSection {
    pub fn eval(&self, s1: f64, s2: f64) -> DVector<f64> {
        let a = self.space1.exp(&self.x1, &self.n1, s1);
        let b = self.space2.exp(&self.x2, &self.n2, s2);
        let mut out = DVector::zeros(a.len() + b.len());
        out.rows_mut(0, a.len()).copy_from(&a);
        out.rows_mut(a.len(), b.len()).copy_from(&b);
        out
    }
}

/// Strongly `M`-Jacobi field along the normal geodesic from `p`:
/// `Y(s) = P( cos(s√R)·v0 − (sin(s√R)/√R)·A·v0 )` with `R = R(·, N)N`.
pub fn strongly_jacobi_field(h: &Hypersurface, p: &SurfacePoint, v0: &DVector<f64>, s: f64) -> Result<TangentVector> {
    let d = h.point_data(p)?;
    let x = h.ambient();
    x.check_tangent(&d.point, v0)?;
    let coords = DVector::from_iterator(d.frame.len(), d.frame.iter().map(|e| x.inner(e, v0)));
    let off = (v0 - d.to_ambient(&coords)).amax();
    if off > GEOMETRY_TOL * (1.0 + v0.amax()) {
        return Err(Error::NotTangent(off));
    }
    let c = spectral_cos(&d.normal_jacobi, s)?;
    let sn = spectral_sinc(&d.normal_jacobi, s)?;
    let y = c.matrix() * &coords - sn.matrix() * (d.shape.matrix() * &coords);
    let y0 = d.to_ambient(&y);
    Ok(TangentVector::new(
        x.exp(&d.point, &d.normal, s),
        x.transport(&d.point, &d.normal, s, &y0),
    ))
}
