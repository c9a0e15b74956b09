//! Seed hypersurfaces with closed-form pointwise data.
//!
//! Catalog (inward / toward-the-focal-set normal, `A X = −(∇_X N)ᵀ`):
//!
//! | seed              | ambient  | λ                   | μ |
//! |-------------------|----------|---------------------|---|
//! | geodesic sphere r | any form | `f_c(c,r)/f_s(c,r)` | c |
//! | horosphere        | `Hⁿ(c)`  | `√−c`               | c |
//! | equidistant d     | `Hⁿ(c)`  | `√−c·tanh(√−c·d)`   | c |
//! | equator           | any form | 0                   | c |
//!
//! `f_c(c,r)/f_s(c,r)` is `√c·cot(√c r)`, `√−c·coth(√−c r)` or `1/r`.
//! Constructed tubes from [`crate::construct`] are hypersurfaces too and can
//! be fed back in as seeds.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::construct::ConstructedHypersurface;
use crate::error::{Error, Result};
use crate::matfun::{cos_branch, joint_eigenspaces_default, sinc_branch, SpectralData, SymMatrix};
use crate::spaceform::{FormKind, Space, SpaceForm, GEOMETRY_TOL};

/// Closed-form seed families.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedKind {
    /// Points at distance `radius` from `center`.
    GeodesicSphere { center: DVector<f64>, radius: f64 },
    /// Horosphere through the origin `(R, 0, …, 0)` centred at the ideal point
    /// `(1, direction)`; `direction` is spatial (time component 0) and unit.
    Horosphere { direction: DVector<f64> },
    /// Points at signed distance `distance` from the totally geodesic
    /// hyperplane `⟨x, normal⟩ = 0`; `normal` is spatial and unit.
    Equidistant { normal: DVector<f64>, distance: f64 },
    /// Totally geodesic hyperplane `⟨x, normal⟩ = 0`.
    Equator { normal: DVector<f64> },
}

/// A seed hypersurface in a single space form.
#[derive(Debug, Clone, PartialEq)]
pub struct Seed {
    form: SpaceForm,
    kind: SeedKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HypersurfaceKind {
    Seed(Seed),
    Constructed(Box<ConstructedHypersurface>),
}

/// An oriented curvature-adapted hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypersurface {
    ambient: Space,
    kind: HypersurfaceKind,
    /// Normal flipped against the catalog convention.
    reversed: bool,
}

/// A point of a hypersurface: an ambient point for seeds, `(p1, p2, θ)` for
/// constructed tubes.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfacePoint {
    Seed(DVector<f64>),
    Tube(Box<TubePoint>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubePoint {
    pub p1: SurfacePoint,
    pub p2: SurfacePoint,
    pub theta: f64,
}

impl SurfacePoint {
    pub fn at(x: DVector<f64>) -> Self {
        SurfacePoint::Seed(x)
    }

    pub fn tube(p1: SurfacePoint, p2: SurfacePoint, theta: f64) -> Self {
        SurfacePoint::Tube(Box::new(TubePoint { p1, p2, theta }))
    }
}

/// Everything known at one point of a hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub struct HypersurfacePointData {
    pub point: DVector<f64>,
    /// Orthonormal basis of the tangent space, in ambient coordinates.
    pub frame: Vec<DVector<f64>>,
    pub normal: DVector<f64>,
    /// Shape operator in `frame`.
    pub shape: SymMatrix,
    /// Normal Jacobi operator `v ↦ R(v, N)N` in `frame`.
    pub normal_jacobi: SymMatrix,
    /// Joint eigenspaces, bases expressed in `frame` coordinates.
    pub spectra: SpectralData,
}

impl HypersurfacePointData {
    /// Ambient vector with the given `frame` coordinates.
    pub fn to_ambient(&self, coords: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.point.len());
        for (c, e) in coords.iter().zip(&self.frame) {
            out += e * *c;
        }
        out
    }
}

fn unit_basis(n: usize, k: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[k] = 1.0;
    e
}

/// Euclidean-orthonormal basis of the complement of `exclude` in `ℝⁿ`.
fn euclidean_complement(n: usize, exclude: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = exclude.iter().map(|v| v.normalize()).collect();
    let fixed = basis.len();
    for k in 0..n {
        let mut e = unit_basis(n, k);
        for b in &basis {
            let c = e.dot(b);
            e -= b * c;
        }
        for b in &basis {
            let c = e.dot(b);
            e -= b * c;
        }
        let nrm = e.norm();
        if nrm > 1e-8 {
            basis.push(e / nrm);
        }
    }
    basis.split_off(fixed)
}

fn check_unit_vector(v: &DVector<f64>, n: usize, what: &str) -> Result<DVector<f64>> {
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("seed vector"));
    }
    let nrm = v.norm();
    if nrm < 1e-12 {
        return Err(Error::InvalidParameter(format!("{what} must be nonzero")));
    }
    Ok(v / nrm)
}

impl Seed {
    pub fn new(form: SpaceForm, kind: SeedKind) -> Result<Self> {
        let n = form.ambient_dim();
        let space = Space::Form(form);
        let hyperbolic_only = |what: &str| -> Result<()> {
            if form.kind() != FormKind::Hyperbolic {
                return Err(Error::InvalidParameter(format!(
                    "{what} requires a hyperbolic ambient"
                )));
            }
            Ok(())
        };
        let spatial = |v: &DVector<f64>, what: &str| -> Result<DVector<f64>> {
            let u = check_unit_vector(v, n, what)?;
            if form.kind() == FormKind::Hyperbolic && u[0].abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "{what} must have zero time component"
                )));
            }
            Ok(u)
        };
        let kind = match kind {
            SeedKind::GeodesicSphere { center, radius } => {
                space.check_point(&center)?;
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "geodesic sphere radius must be positive, got {radius}"
                    )));
                }
                if form.kind() == FormKind::Sphere {
                    let limit = std::f64::consts::PI / form.curvature().sqrt();
                    if radius >= limit {
                        return Err(Error::InvalidParameter(format!(
                            "geodesic sphere radius {radius} must lie in (0, {limit})"
                        )));
                    }
                }
                SeedKind::GeodesicSphere { center, radius }
            }
            SeedKind::Horosphere { direction } => {
                hyperbolic_only("horosphere")?;
                SeedKind::Horosphere {
                    direction: spatial(&direction, "horosphere direction")?,
                }
            }
            SeedKind::Equidistant { normal, distance } => {
                hyperbolic_only("equidistant hypersurface")?;
                if !distance.is_finite() {
                    return Err(Error::NonFinite("equidistant distance"));
                }
                SeedKind::Equidistant {
                    normal: spatial(&normal, "equidistant normal")?,
                    distance,
                }
            }
            SeedKind::Equator { normal } => SeedKind::Equator {
                normal: spatial(&normal, "equator normal")?,
            },
        };
        Ok(Seed { form, kind })
    }

    pub fn form(&self) -> SpaceForm {
        self.form
    }

    pub fn kind(&self) -> &SeedKind {
        &self.kind
    }

    fn space(&self) -> Space {
        Space::Form(self.form)
    }

    /// The constant principal curvature.
    pub fn principal_curvature(&self) -> f64 {
        let c = self.form.curvature();
        match &self.kind {
            SeedKind::GeodesicSphere { radius, .. } => cos_branch(c, *radius) / sinc_branch(c, *radius),
            SeedKind::Horosphere { .. } => (-c).sqrt(),
            SeedKind::Equidistant { distance, .. } => {
                let k = (-c).sqrt();
                k * (k * distance).tanh()
            }
            SeedKind::Equator { .. } => 0.0,
        }
    }

    fn null_direction(&self, direction: &DVector<f64>) -> DVector<f64> {
        let mut l = direction.clone();
        l[0] = 1.0;
        l
    }

    /// Geodesic distance from `x` to the seed (0 on the seed).
    pub fn distance_to(&self, x: &DVector<f64>) -> f64 {
        let f = self.form;
        let c = f.curvature();
        let sp = self.space();
        match &self.kind {
            SeedKind::GeodesicSphere { center, radius } => (sp.distance(center, x) - radius).abs(),
            SeedKind::Horosphere { direction } => {
                let a = -sp.inner(x, &self.null_direction(direction));
                if a <= 0.0 {
                    return f64::INFINITY;
                }
                (a / f.radius()).ln().abs() * f.radius()
            }
            SeedKind::Equidistant { normal, distance } => {
                let k = (-c).sqrt();
                ((k * sp.inner(x, normal)).asinh() / k - distance).abs()
            }
            SeedKind::Equator { normal } => {
                let t = sp.inner(x, normal);
                match f.kind() {
                    FormKind::Euclidean => t.abs(),
                    FormKind::Sphere => {
                        let k = c.sqrt();
                        (k * t).clamp(-1.0, 1.0).asin().abs() / k
                    }
                    FormKind::Hyperbolic => {
                        let k = (-c).sqrt();
                        (k * t).asinh().abs() / k
                    }
                }
            }
        }
    }

    fn check_on(&self, x: &DVector<f64>) -> Result<()> {
        self.space().check_point(x)?;
        let d = self.distance_to(x);
        if d > GEOMETRY_TOL * (1.0 + x.amax()) {
            return Err(Error::OffHypersurface(d));
        }
        Ok(())
    }

    /// Unit direction at the center of the geodesic sphere pointing at `x`.
    fn radial_direction(&self, center: &DVector<f64>, radius: f64, x: &DVector<f64>) -> DVector<f64> {
        let c = self.form.curvature();
        let sp = self.space();
        let raw = (x - center * cos_branch(c, radius)) / sinc_branch(c, radius);
        let t = sp.project_tangent(center, &raw);
        let n = sp.norm(&t);
        t / n
    }

    /// Closed-form unit normal at a point known to lie on the seed.
    fn normal_unchecked(&self, x: &DVector<f64>) -> DVector<f64> {
        let c = self.form.curvature();
        let r = self.form.radius();
        let sp = self.space();
        match &self.kind {
            SeedKind::GeodesicSphere { center, radius } => {
                let xi = self.radial_direction(center, *radius, x);
                // −γ'(r) for γ(s) = exp_center(s·ξ)
                center * (c * sinc_branch(c, *radius)) - xi * cos_branch(c, *radius)
            }
            SeedKind::Horosphere { direction } => {
                let l = self.null_direction(direction);
                let a = -sp.inner(x, &l);
                l * (r / a) - x / r
            }
            SeedKind::Equidistant { normal, distance } => {
                let k = (-c).sqrt();
                let y = (x - normal * (r * (k * distance).sinh())) / (k * distance).cosh();
                -(y * (k * (k * distance).sinh()) + normal * (k * distance).cosh())
            }
            SeedKind::Equator { normal } => normal.clone(),
        }
    }

    pub fn normal(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_on(x)?;
        Ok(self.normal_unchecked(x))
    }

    pub fn point_data(&self, x: &DVector<f64>) -> Result<HypersurfacePointData> {
        self.check_on(x)?;
        let sp = self.space();
        let normal = self.normal_unchecked(x);
        let frame = sp.tangent_frame(x, std::slice::from_ref(&normal));
        let m = frame.len();
        let lambda = self.principal_curvature();
        let shape = SymMatrix::from_diagonal(&vec![lambda; m])?;
        let (normal_jacobi, frame) = sp.curvature_normal_operator(x, &normal, Some(&frame))?;
        let spectra = joint_eigenspaces_default(&shape, &normal_jacobi)?;
        Ok(HypersurfacePointData {
            point: x.clone(),
            frame,
            normal,
            shape,
            normal_jacobi,
            spectra,
        })
    }

    fn horosphere_point(&self, direction: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let r = self.form.radius();
        let w2 = w.norm_squared();
        let mut x = w + direction * (w2 / 2.0);
        x[0] = 1.0 + w2 / 2.0;
        x * r
    }

    fn hyperplane_point(&self, normal: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        // point of the totally geodesic hyperplane ⟨x, normal⟩ = 0
        match self.form.kind() {
            FormKind::Euclidean => w - normal * w.dot(normal),
            FormKind::Sphere => {
                let r = self.form.radius();
                let mut x = w.clone();
                let along = x.dot(normal);
                x -= normal * along;
                x.normalize() * r
            }
            FormKind::Hyperbolic => {
                let r = self.form.radius();
                let mut y = w.clone();
                y[0] = 0.0;
                let along = y.dot(normal);
                y -= normal * along;
                y[0] = (r * r + y.norm_squared()).sqrt();
                y
            }
        }
    }

    fn equidistant_point(&self, normal: &DVector<f64>, distance: f64, w: &DVector<f64>) -> DVector<f64> {
        let k = (-self.form.curvature()).sqrt();
        let y = self.hyperplane_point(normal, w);
        y * (k * distance).cosh() + normal * ((k * distance).sinh() / k)
    }

    pub fn chart_dim(&self) -> usize {
        self.form.dim() - 1
    }

    /// Local chart around `base`: `params` are coordinates in an orthonormal
    /// tangent basis of the parameter domain, `params = 0` maps to `base`.
    pub fn chart_point(&self, base: &DVector<f64>, params: &[f64]) -> Result<DVector<f64>> {
        self.check_on(base)?;
        if params.len() != self.chart_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.chart_dim(),
                found: params.len(),
            });
        }
        let n = self.form.ambient_dim();
        let sp = self.space();
        let combine = |origin: &DVector<f64>, basis: &[DVector<f64>]| -> DVector<f64> {
            let mut out = origin.clone();
            for (b, t) in basis.iter().zip(params) {
                out += b * *t;
            }
            out
        };
        Ok(match &self.kind {
            SeedKind::GeodesicSphere { center, radius } => {
                let xi0 = self.radial_direction(center, *radius, base);
                let basis = sp.tangent_frame(center, std::slice::from_ref(&xi0));
                let xi = combine(&xi0, &basis);
                let xi = &xi / sp.norm(&xi);
                sp.exp(center, &xi, *radius)
            }
            SeedKind::Horosphere { direction } => {
                let r = self.form.radius();
                let e0 = unit_basis(n, 0);
                let mut w0 = base / r;
                w0[0] = 0.0;
                let along = w0.dot(direction);
                w0 -= direction * along;
                let basis = euclidean_complement(n, &[e0, direction.clone()]);
                let scaled: Vec<DVector<f64>> = basis.iter().map(|b| b / r).collect();
                self.horosphere_point(direction, &combine(&w0, &scaled))
            }
            SeedKind::Equidistant { normal, distance } => {
                let k = (-self.form.curvature()).sqrt();
                let r = self.form.radius();
                let y0 = (base - normal * (r * (k * distance).sinh())) / (k * distance).cosh();
                let basis = euclidean_complement(n, &[unit_basis(n, 0), normal.clone()]);
                self.equidistant_point(normal, *distance, &combine(&y0, &basis))
            }
            SeedKind::Equator { normal } => match self.form.kind() {
                FormKind::Euclidean => {
                    let basis = euclidean_complement(n, std::slice::from_ref(normal));
                    combine(base, &basis)
                }
                FormKind::Sphere => {
                    let basis = euclidean_complement(n, &[base.clone(), normal.clone()]);
                    self.hyperplane_point(normal, &combine(base, &basis))
                }
                FormKind::Hyperbolic => {
                    let basis = euclidean_complement(n, &[unit_basis(n, 0), normal.clone()]);
                    self.hyperplane_point(normal, &combine(base, &basis))
                }
            },
        })
    }

    /// A deterministic point of the seed.
    pub fn reference_point(&self) -> DVector<f64> {
        let n = self.form.ambient_dim();
        let sp = self.space();
        match &self.kind {
            SeedKind::GeodesicSphere { center, radius } => {
                let xi = sp.tangent_frame(center, &[]).remove(0);
                sp.exp(center, &xi, *radius)
            }
            SeedKind::Horosphere { direction } => self.horosphere_point(direction, &DVector::zeros(n)),
            SeedKind::Equidistant { normal, distance } => {
                self.equidistant_point(normal, *distance, &DVector::zeros(n))
            }
            SeedKind::Equator { normal } => match self.form.kind() {
                FormKind::Sphere => {
                    let e = euclidean_complement(n, std::slice::from_ref(normal)).remove(0);
                    e * self.form.radius()
                }
                _ => self.hyperplane_point(normal, &DVector::zeros(n)),
            },
        }
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let n = self.form.ambient_dim();
        let sp = self.space();
        let r = if self.form.kind() == FormKind::Euclidean {
            1.0
        } else {
            self.form.radius()
        };
        let gauss = |rng: &mut R| DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        match &self.kind {
            SeedKind::GeodesicSphere { center, radius } => {
                let xi = sp.random_unit_tangent(center, rng);
                sp.exp(center, &xi, *radius)
            }
            SeedKind::Horosphere { direction } => {
                let mut w = gauss(rng);
                w[0] = 0.0;
                let along = w.dot(direction);
                w -= direction * along;
                self.horosphere_point(direction, &w)
            }
            SeedKind::Equidistant { normal, distance } => {
                self.equidistant_point(normal, *distance, &(gauss(rng) * r))
            }
            SeedKind::Equator { normal } => self.hyperplane_point(normal, &(gauss(rng) * r)),
        }
    }
}

impl Hypersurface {
    pub fn seed(form: SpaceForm, kind: SeedKind) -> Result<Self> {
        Ok(Hypersurface {
            ambient: Space::Form(form),
            kind: HypersurfaceKind::Seed(Seed::new(form, kind)?),
            reversed: false,
        })
    }

    /// Geodesic sphere about `center` (the origin when `None`).
    pub fn geodesic_sphere(form: SpaceForm, center: Option<DVector<f64>>, radius: f64) -> Result<Self> {
        let center = center.unwrap_or_else(|| form.origin());
        Self::seed(form, SeedKind::GeodesicSphere { center, radius })
    }

    /// Horosphere through the origin (ideal point along the last axis when `None`).
    pub fn horosphere(form: SpaceForm, direction: Option<DVector<f64>>) -> Result<Self> {
        let direction = direction.unwrap_or_else(|| unit_basis(form.ambient_dim(), form.ambient_dim() - 1));
        Self::seed(form, SeedKind::Horosphere { direction })
    }

    pub fn equidistant(form: SpaceForm, normal: Option<DVector<f64>>, distance: f64) -> Result<Self> {
        let normal = normal.unwrap_or_else(|| unit_basis(form.ambient_dim(), form.ambient_dim() - 1));
        Self::seed(form, SeedKind::Equidistant { normal, distance })
    }

    pub fn equator(form: SpaceForm, normal: Option<DVector<f64>>) -> Result<Self> {
        let normal = normal.unwrap_or_else(|| unit_basis(form.ambient_dim(), form.ambient_dim() - 1));
        Self::seed(form, SeedKind::Equator { normal })
    }

    pub(crate) fn from_constructed(c: ConstructedHypersurface) -> Self {
        Hypersurface {
            ambient: c.ambient().clone(),
            kind: HypersurfaceKind::Constructed(Box::new(c)),
            reversed: false,
        }
    }

    /// Same hypersurface with the opposite unit normal.
    pub fn reversed(mut self) -> Self {
        self.reversed = !self.reversed;
        self
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn ambient(&self) -> &Space {
        &self.ambient
    }

    pub fn kind(&self) -> &HypersurfaceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim() - 1
    }

    fn sign(&self) -> f64 {
        if self.reversed {
            -1.0
        } else {
            1.0
        }
    }

    /// Ambient position of a surface point (the immersion itself).
    pub fn embed(&self, p: &SurfacePoint) -> Result<DVector<f64>> {
        match (&self.kind, p) {
            (HypersurfaceKind::Seed(s), SurfacePoint::Seed(x)) => {
                s.check_on(x)?;
                Ok(x.clone())
            }
            (HypersurfaceKind::Constructed(c), SurfacePoint::Tube(t)) => c.tube_map(&t.p1, &t.p2, t.theta),
            _ => Err(point_kind_mismatch()),
        }
    }

    /// Unit normal at a surface point, without building the full point data.
    pub fn normal_at(&self, p: &SurfacePoint) -> Result<DVector<f64>> {
        let n = match (&self.kind, p) {
            (HypersurfaceKind::Seed(s), SurfacePoint::Seed(x)) => s.normal(x)?,
            (HypersurfaceKind::Constructed(c), SurfacePoint::Tube(t)) => c.unit_normal(&t.p1, &t.p2, t.theta)?.0,
            _ => return Err(point_kind_mismatch()),
        };
        Ok(n * self.sign())
    }

    pub fn point_data(&self, p: &SurfacePoint) -> Result<HypersurfacePointData> {
        let data = match (&self.kind, p) {
            (HypersurfaceKind::Seed(s), SurfacePoint::Seed(x)) => s.point_data(x)?,
            (HypersurfaceKind::Constructed(c), SurfacePoint::Tube(t)) => c.point_data(&t.p1, &t.p2, t.theta)?,
            _ => return Err(point_kind_mismatch()),
        };
        if !self.reversed {
            return Ok(data);
        }
        let shape = SymMatrix::new(-data.shape.matrix())?;
        let spectra = joint_eigenspaces_default(&shape, &data.normal_jacobi)?;
        Ok(HypersurfacePointData {
            normal: -data.normal,
            shape,
            spectra,
            ..data
        })
    }

    /// `exp(r·N_p)`: the point at signed distance `r` along the normal geodesic.
    pub fn normal_offset(&self, p: &SurfacePoint, r: f64) -> Result<DVector<f64>> {
        let x = self.embed(p)?;
        let n = self.normal_at(p)?;
        self.ambient.geodesic(&x, &n, r)
    }

    pub fn chart_dim(&self) -> usize {
        self.dim()
    }

    /// Local chart around `base`; `params = 0` maps to `base`.
    pub fn chart_point(&self, base: &SurfacePoint, params: &[f64]) -> Result<SurfacePoint> {
        if params.len() != self.chart_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.chart_dim(),
                found: params.len(),
            });
        }
        match (&self.kind, base) {
            (HypersurfaceKind::Seed(s), SurfacePoint::Seed(x)) => Ok(SurfacePoint::Seed(s.chart_point(x, params)?)),
            (HypersurfaceKind::Constructed(c), SurfacePoint::Tube(t)) => {
                let d1 = c.m1().chart_dim();
                let d2 = c.m2().chart_dim();
                let p1 = c.m1().chart_point(&t.p1, &params[..d1])?;
                let p2 = c.m2().chart_point(&t.p2, &params[d1..d1 + d2])?;
                Ok(SurfacePoint::tube(p1, p2, t.theta + params[d1 + d2]))
            }
            _ => Err(point_kind_mismatch()),
        }
    }

    pub fn reference_point(&self) -> SurfacePoint {
        match &self.kind {
            HypersurfaceKind::Seed(s) => SurfacePoint::Seed(s.reference_point()),
            HypersurfaceKind::Constructed(c) => {
                SurfacePoint::tube(c.m1().reference_point(), c.m2().reference_point(), 0.0)
            }
        }
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfacePoint {
        match &self.kind {
            HypersurfaceKind::Seed(s) => SurfacePoint::Seed(s.sample_point(rng)),
            HypersurfaceKind::Constructed(c) => {
                let p1 = c.m1().sample_point(rng);
                let p2 = c.m2().sample_point(rng);
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                SurfacePoint::tube(p1, p2, theta)
            }
        }
    }
}

fn point_kind_mismatch() -> Error {
    Error::InvalidParameter("surface point kind does not match the hypersurface".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::commutator_residual;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s2() -> SpaceForm {
        SpaceForm::sphere(2, 1.0).unwrap()
    }

    fn h2() -> SpaceForm {
        SpaceForm::hyperbolic(2, -1.0).unwrap()
    }

    fn catalog() -> Vec<Hypersurface> {
        let s3 = SpaceForm::sphere(3, 2.0).unwrap();
        let h3 = SpaceForm::hyperbolic(3, -0.5).unwrap();
        let e3 = SpaceForm::euclidean(3).unwrap();
        vec![
            Hypersurface::geodesic_sphere(s2(), None, 0.5).unwrap(),
            Hypersurface::geodesic_sphere(h2(), None, 0.5).unwrap(),
            Hypersurface::geodesic_sphere(SpaceForm::euclidean(2).unwrap(), None, 0.5).unwrap(),
            Hypersurface::geodesic_sphere(s3, Some(s3.origin()), 1.2).unwrap(),
            Hypersurface::geodesic_sphere(h3, None, 0.8).unwrap(),
            Hypersurface::geodesic_sphere(e3, None, 2.0).unwrap(),
            Hypersurface::horosphere(h2(), None).unwrap(),
            Hypersurface::horosphere(h3, Some(DVector::from_vec(vec![0.0, 1.0, 1.0, 0.0]))).unwrap(),
            Hypersurface::equidistant(h2(), None, 0.3).unwrap(),
            Hypersurface::equidistant(h3, None, -0.7).unwrap(),
            Hypersurface::equator(s2(), None).unwrap(),
            Hypersurface::equator(s3, Some(DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]))).unwrap(),
            Hypersurface::equator(h3, None).unwrap(),
            Hypersurface::equator(e3, None).unwrap(),
        ]
    }

    #[test]
    fn catalog_values() {
        let sphere = Hypersurface::geodesic_sphere(s2(), None, 0.5).unwrap();
        let d = sphere.point_data(&sphere.reference_point()).unwrap();
        assert!((d.shape.get(0, 0) - 1.830_487_7).abs() < 1e-7);
        assert!((d.shape.get(0, 0) - 1.0 / 0.5f64.tan()).abs() < 1e-14);
        assert!((d.normal_jacobi.get(0, 0) - 1.0).abs() < 1e-14);

        let hyp = Hypersurface::geodesic_sphere(h2(), None, 0.5).unwrap();
        let d = hyp.point_data(&hyp.reference_point()).unwrap();
        assert!((d.shape.get(0, 0) - 2.163_953_4).abs() < 1e-7);
        assert!((d.normal_jacobi.get(0, 0) + 1.0).abs() < 1e-14);

        let equi = Hypersurface::equidistant(h2(), None, 0.3).unwrap();
        let d = equi.point_data(&equi.reference_point()).unwrap();
        assert!((d.shape.get(0, 0) - 0.291_312_6).abs() < 1e-7);
        assert!((d.normal_jacobi.get(0, 0) + 1.0).abs() < 1e-14);

        let horo = Hypersurface::horosphere(h2(), None).unwrap();
        let d = horo.point_data(&horo.reference_point()).unwrap();
        assert_eq!(d.shape.get(0, 0), 1.0);
        assert!((d.normal_jacobi.get(0, 0) + 1.0).abs() < 1e-14);

        let s4 = SpaceForm::sphere(2, 4.0).unwrap();
        let eq = Hypersurface::equator(s4, None).unwrap();
        let d = eq.point_data(&eq.reference_point()).unwrap();
        assert_eq!(d.shape.get(0, 0), 0.0);
        assert!((d.normal_jacobi.get(0, 0) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn point_data_invariants_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for h in catalog() {
            for _ in 0..20 {
                let p = h.sample_point(&mut rng);
                let d = h.point_data(&p).unwrap_or_else(|e| panic!("{h:?} {e}"));
                let x = h.ambient();
                let mut all = d.frame.clone();
                all.push(d.normal.clone());
                for (i, a) in all.iter().enumerate() {
                    assert!(x.tangency_residual(&d.point, a) < 1e-10);
                    for (j, b) in all.iter().enumerate() {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((x.inner(a, b) - want).abs() < 1e-10, "{h:?}");
                    }
                }
                let res = commutator_residual(&d.shape, &d.normal_jacobi).unwrap();
                assert!(res <= 1e-10);
                assert_eq!(d.spectra.total_multiplicity(), h.dim());
                // frame spans exactly N^⊥: P_frame + N N^T restricted to T_pX is the identity
                let probe = x.random_tangent(&d.point, &mut rng);
                let mut rebuilt = &d.normal * x.inner(&probe, &d.normal);
                for e in &d.frame {
                    rebuilt += e * x.inner(&probe, e);
                }
                assert!((rebuilt - probe).amax() < 1e-10);
            }
        }
    }

    #[test]
    fn charts_pass_through_base_and_stay_on_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for h in catalog() {
            let base = h.sample_point(&mut rng);
            let zero = vec![0.0; h.chart_dim()];
            let at0 = h.embed(&h.chart_point(&base, &zero).unwrap()).unwrap();
            assert!((at0 - h.embed(&base).unwrap()).amax() < 1e-12, "{h:?}");
            let params: Vec<f64> = (0..h.chart_dim()).map(|i| 0.05 * (i as f64 + 1.0)).collect();
            let moved = h.chart_point(&base, &params).unwrap();
            h.point_data(&moved).unwrap();
        }
    }

    #[test]
    fn off_surface_points_are_rejected() {
        let sphere = Hypersurface::geodesic_sphere(s2(), None, 0.5).unwrap();
        let x = SurfacePoint::at(DVector::from_vec(vec![1.0, 0.0, 0.0]));
        match sphere.point_data(&x) {
            Err(Error::OffHypersurface(d)) => assert!((d - 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let horo = Hypersurface::horosphere(h2(), None).unwrap();
        let x = h2().origin() * 1.0;
        let off = Space::Form(h2()).exp(&x, &DVector::from_vec(vec![0.0, 0.0, 1.0]), 0.25);
        match horo.point_data(&SurfacePoint::at(off)) {
            Err(Error::OffHypersurface(d)) => assert!((d - 0.25).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(Hypersurface::geodesic_sphere(s2(), None, 3.2).is_err());
        assert!(Hypersurface::geodesic_sphere(s2(), None, -0.1).is_err());
        assert!(Hypersurface::horosphere(s2(), None).is_err());
        assert!(Hypersurface::equidistant(SpaceForm::euclidean(2).unwrap(), None, 0.3).is_err());
        assert!(Hypersurface::horosphere(h2(), Some(DVector::from_vec(vec![1.0, 0.0, 1.0]))).is_err());
        assert!(Hypersurface::equator(s2(), Some(DVector::zeros(3))).is_err());
    }

    #[test]
    fn normal_offsets() {
        let sphere = Hypersurface::geodesic_sphere(s2(), None, 0.5).unwrap();
        let p = sphere.reference_point();
        assert_eq!(sphere.normal_offset(&p, 0.0).unwrap(), sphere.embed(&p).unwrap());
        let q = sphere.normal_offset(&p, 0.2).unwrap();
        let center = s2().origin();
        assert!((Space::Form(s2()).distance(&center, &q) - 0.3).abs() < 1e-10);

        let horo = Hypersurface::horosphere(h2(), None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let p = horo.sample_point(&mut rng);
            let r: f64 = rng.random_range(-2.0..2.0);
            let q = horo.normal_offset(&p, r).unwrap();
            let x = horo.ambient();
            assert!((x.inner(&q, &q) + 1.0).abs() < 1e-10 * q.norm_squared());
            // lands on the parallel horosphere ⟨q, ℓ⟩ = −e^{−r}
            let l = DVector::from_vec(vec![1.0, 0.0, 1.0]);
            assert!((x.inner(&q, &l) + (-r).exp()).abs() < 1e-10 * q.norm_squared());
        }
    }

    #[test]
    fn reversed_orientation_negates_shape() {
        let sphere = Hypersurface::geodesic_sphere(h2(), None, 0.5).unwrap();
        let p = sphere.reference_point();
        let d = sphere.point_data(&p).unwrap();
        let r = sphere.clone().reversed().point_data(&p).unwrap();
        assert_eq!(r.normal, -d.normal);
        assert_eq!(r.shape.get(0, 0), -d.shape.get(0, 0));
        assert_eq!(r.normal_jacobi, d.normal_jacobi);
    }
}
