//! Model symmetric spaces embedded in flat ambient spaces.
//!
//! - sphere `Sⁿ(c)`: `{x ∈ ℝⁿ⁺¹ : ⟨x,x⟩ = 1/c}`
//! - hyperbolic `Hⁿ(c)`, `c < 0`: upper sheet of `{x ∈ ℝ¹'ⁿ : ⟨x,x⟩_L = 1/c}`,
//!   coordinate 0 is the time axis
//! - Euclidean `Eⁿ`: `ℝⁿ` itself
//!
//! Products are stored as one flat coordinate vector whose blocks follow the
//! factor tree left to right. All closed forms go through the scalar branches
//! of [`crate::matfun`], so the three kinds share the same formulas:
//!
//! ```text
//! γ(s)  = f_c(c, s)·p + f_s(c, s)·v
//! γ'(s) = −c·f_s(c, s)·p + f_c(c, s)·v
//! ```

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matfun::{cos_branch, sinc_branch, SymMatrix};

/// Membership and tangency tolerance for validated inputs.
pub const GEOMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    Sphere,
    Hyperbolic,
    Euclidean,
}

/// A simply connected space of constant curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceForm {
    dim: usize,
    curvature: f64,
}

impl SpaceForm {
    pub fn new(kind: FormKind, dim: usize, curvature: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if !curvature.is_finite() {
            return Err(Error::NonFinite("curvature"));
        }
        let ok = match kind {
            FormKind::Sphere => curvature > 0.0,
            FormKind::Hyperbolic => curvature < 0.0,
            FormKind::Euclidean => curvature == 0.0,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "curvature {curvature} does not match {kind:?}"
            )));
        }
        Ok(SpaceForm { dim, curvature })
    }

    pub fn sphere(dim: usize, curvature: f64) -> Result<Self> {
        Self::new(FormKind::Sphere, dim, curvature)
    }

    pub fn hyperbolic(dim: usize, curvature: f64) -> Result<Self> {
        Self::new(FormKind::Hyperbolic, dim, curvature)
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(FormKind::Euclidean, dim, 0.0)
    }

    pub fn kind(&self) -> FormKind {
        if self.curvature > 0.0 {
            FormKind::Sphere
        } else if self.curvature < 0.0 {
            FormKind::Hyperbolic
        } else {
            FormKind::Euclidean
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind() {
            FormKind::Euclidean => self.dim,
            _ => self.dim + 1,
        }
    }

    /// `1/√|c|`; infinite for Euclidean space.
    pub fn radius(&self) -> f64 {
        1.0 / self.curvature.abs().sqrt()
    }

    /// Ambient bilinear form: Euclidean, or Minkowski with the time axis first.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        if self.kind() == FormKind::Hyperbolic {
            dot - 2.0 * a[0] * b[0]
        } else {
            dot
        }
    }

    /// The base point `(1/√|c|, 0, …, 0)`, or the origin in Euclidean space.
    pub fn origin(&self) -> DVector<f64> {
        let mut o = DVector::zeros(self.ambient_dim());
        if self.kind() != FormKind::Euclidean {
            o[0] = self.radius();
        }
        o
    }

    /// Residual of the membership constraint `c⟨p,p⟩ = 1`, relative to the
    /// coordinate magnitude (hyperboloid coordinates grow like `e^{dist}`).
    fn membership_residual(&self, p: &[f64]) -> f64 {
        if self.kind() == FormKind::Euclidean {
            return 0.0;
        }
        if self.kind() == FormKind::Hyperbolic && p[0] <= 0.0 {
            return f64::INFINITY;
        }
        let e2: f64 = p.iter().map(|x| x * x).sum();
        let r = (self.curvature * self.inner(p, p) - 1.0).abs();
        r / (self.curvature.abs() * e2).max(1.0)
    }

    /// Tangential part of an ambient vector at `p`.
    fn project(&self, p: &[f64], v: &mut [f64]) {
        if self.kind() == FormKind::Euclidean {
            return;
        }
        let k = self.inner(v, p) / self.inner(p, p);
        for (vi, pi) in v.iter_mut().zip(p) {
            *vi -= k * pi;
        }
    }

    fn tangency_residual(&self, p: &[f64], v: &[f64]) -> f64 {
        if self.kind() == FormKind::Euclidean {
            return 0.0;
        }
        let pn: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        self.inner(p, v).abs() / pn
    }

    /// Geodesic from `p` with initial velocity `v` (any speed), at time `s`.
    fn exp(&self, p: &[f64], v: &[f64], s: f64, out: &mut [f64]) {
        let k = self.curvature * self.inner(v, v);
        let (fc, fs) = (cos_branch(k, s), sinc_branch(k, s));
        for i in 0..p.len() {
            out[i] = fc * p[i] + fs * v[i];
        }
    }

    fn velocity(&self, p: &[f64], v: &[f64], s: f64, out: &mut [f64]) {
        let k = self.curvature * self.inner(v, v);
        let (fc, fs) = (cos_branch(k, s), sinc_branch(k, s));
        for i in 0..p.len() {
            out[i] = -k * fs * p[i] + fc * v[i];
        }
    }

    fn transport(&self, p: &[f64], v: &[f64], s: f64, w: &[f64], out: &mut [f64]) {
        out.copy_from_slice(w);
        let speed2 = self.inner(v, v);
        if speed2 == 0.0 {
            return;
        }
        // w = α·v + w⊥; w⊥ is carried unchanged and v turns into γ'(s).
        let alpha = self.inner(w, v) / speed2;
        let mut vel = vec![0.0; p.len()];
        self.velocity(p, v, s, &mut vel);
        for i in 0..p.len() {
            out[i] += alpha * (vel[i] - v[i]);
        }
    }

    /// Geodesic distance between two points of the space.
    fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        let d: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
        let chord = self.inner(&d, &d).max(0.0).sqrt();
        match self.kind() {
            FormKind::Euclidean => chord,
            FormKind::Sphere => {
                let r = self.radius();
                2.0 * r * (chord / (2.0 * r)).min(1.0).asin()
            }
            FormKind::Hyperbolic => {
                let r = self.radius();
                2.0 * r * (chord / (2.0 * r)).asinh()
            }
        }
    }
}

/// A space form or a finite product of spaces.
#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Form(SpaceForm),
    Product(ProductSpace),
}

/// Ordered product with a flat block layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    factors: Vec<Space>,
    offsets: Vec<usize>,
}

impl ProductSpace {
    pub fn new(factors: Vec<Space>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("product needs at least one factor".into()));
        }
        let mut offsets = Vec::with_capacity(factors.len());
        let mut acc = 0;
        for f in &factors {
            offsets.push(acc);
            acc += f.ambient_dim();
        }
        Ok(ProductSpace { factors, offsets })
    }

    pub fn factors(&self) -> &[Space] {
        &self.factors
    }

    /// Ambient coordinate range of factor `i`.
    pub fn block(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + self.factors[i].ambient_dim()
    }
}

impl From<SpaceForm> for Space {
    fn from(f: SpaceForm) -> Self {
        Space::Form(f)
    }
}

/// A tangent vector together with its base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: DVector<f64>,
    pub coords: DVector<f64>,
}

impl TangentVector {
    pub fn new(base: DVector<f64>, coords: DVector<f64>) -> Self {
        TangentVector { base, coords }
    }
}

impl Space {
    pub fn product(factors: Vec<Space>) -> Result<Self> {
        Ok(Space::Product(ProductSpace::new(factors)?))
    }

    pub fn pair(a: impl Into<Space>, b: impl Into<Space>) -> Result<Self> {
        Self::product(vec![a.into(), b.into()])
    }

    pub fn dim(&self) -> usize {
        match self {
            Space::Form(f) => f.dim(),
            Space::Product(p) => p.factors.iter().map(Space::dim).sum(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Space::Form(f) => f.ambient_dim(),
            Space::Product(p) => p.factors.iter().map(Space::ambient_dim).sum(),
        }
    }

    /// Leaf space forms with their ambient offsets, left to right.
    pub fn leaves(&self) -> Vec<(usize, SpaceForm)> {
        let mut out = Vec::new();
        self.collect_leaves(0, &mut out);
        out
    }

    fn collect_leaves(&self, offset: usize, out: &mut Vec<(usize, SpaceForm)>) {
        match self {
            Space::Form(f) => out.push((offset, *f)),
            Space::Product(p) => {
                for (f, &o) in p.factors.iter().zip(&p.offsets) {
                    f.collect_leaves(offset + o, out);
                }
            }
        }
    }

    fn check_len(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("ambient coordinates"));
        }
        Ok(())
    }

    /// Block-diagonal ambient bilinear form; the Riemannian metric on tangent
    /// vectors.
    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.leaves()
            .iter()
            .map(|(o, f)| {
                let n = f.ambient_dim();
                f.inner(&a.as_slice()[*o..o + n], &b.as_slice()[*o..o + n])
            })
            .sum()
    }

    pub fn norm(&self, v: &DVector<f64>) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// Largest relative membership residual over all factors.
    pub fn membership_residual(&self, p: &DVector<f64>) -> f64 {
        self.leaves()
            .iter()
            .map(|(o, f)| f.membership_residual(&p.as_slice()[*o..o + f.ambient_dim()]))
            .fold(0.0, f64::max)
    }

    pub fn check_point(&self, p: &DVector<f64>) -> Result<()> {
        self.check_len(p)?;
        let r = self.membership_residual(p);
        if r > GEOMETRY_TOL {
            return Err(Error::NotOnSpace(r));
        }
        Ok(())
    }

    pub fn tangency_residual(&self, p: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.leaves()
            .iter()
            .map(|(o, f)| {
                let n = f.ambient_dim();
                f.tangency_residual(&p.as_slice()[*o..o + n], &v.as_slice()[*o..o + n])
            })
            .fold(0.0, f64::max)
    }

    pub fn check_tangent(&self, p: &DVector<f64>, v: &DVector<f64>) -> Result<()> {
        self.check_len(v)?;
        let r = self.tangency_residual(p, v);
        if r > GEOMETRY_TOL * (1.0 + v.amax()) {
            return Err(Error::NotTangent(r));
        }
        Ok(())
    }

    fn check_unit(&self, v: &DVector<f64>) -> Result<()> {
        let n2 = self.inner(v, v);
        if (n2 - 1.0).abs() > GEOMETRY_TOL {
            return Err(Error::NotUnit(n2));
        }
        Ok(())
    }

    /// Orthogonal projection of an ambient vector onto `T_pX`.
    pub fn project_tangent(&self, p: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let mut out = v.clone();
        for (o, f) in self.leaves() {
            let n = f.ambient_dim();
            f.project(&p.as_slice()[o..o + n], &mut out.as_mut_slice()[o..o + n]);
        }
        out
    }

    fn map_leaves(
        &self,
        n: usize,
        op: impl Fn(&SpaceForm, std::ops::Range<usize>, &mut [f64]),
    ) -> DVector<f64> {
        let mut out = DVector::zeros(n);
        for (o, f) in self.leaves() {
            let range = o..o + f.ambient_dim();
            op(&f, range.clone(), &mut out.as_mut_slice()[range]);
        }
        out
    }

    /// Exponential map `exp_p(s·v)` for any tangent `v`; each factor moves
    /// along its own geodesic at speed `‖v_i‖`. No validation.
    pub fn exp(&self, p: &DVector<f64>, v: &DVector<f64>, s: f64) -> DVector<f64> {
        self.map_leaves(p.len(), |f, r, out| {
            f.exp(&p.as_slice()[r.clone()], &v.as_slice()[r], s, out)
        })
    }

    /// `γ'(s)` for the geodesic `γ(s) = exp_p(s·v)`. No validation.
    pub fn velocity(&self, p: &DVector<f64>, v: &DVector<f64>, s: f64) -> DVector<f64> {
        self.map_leaves(p.len(), |f, r, out| {
            f.velocity(&p.as_slice()[r.clone()], &v.as_slice()[r], s, out)
        })
    }

    /// Parallel transport of `w` along `s ↦ exp_p(s·v)` from 0 to `s`. No
    /// validation.
    pub fn transport(
        &self,
        p: &DVector<f64>,
        v: &DVector<f64>,
        s: f64,
        w: &DVector<f64>,
    ) -> DVector<f64> {
        self.map_leaves(p.len(), |f, r, out| {
            f.transport(
                &p.as_slice()[r.clone()],
                &v.as_slice()[r.clone()],
                s,
                &w.as_slice()[r],
                out,
            )
        })
    }

    /// Unit-speed geodesic through `p` with direction `v`, evaluated at `s`.
    pub fn geodesic(&self, p: &DVector<f64>, v: &DVector<f64>, s: f64) -> Result<DVector<f64>> {
        self.check_point(p)?;
        self.check_tangent(p, v)?;
        self.check_unit(v)?;
        if !s.is_finite() {
            return Err(Error::NonFinite("arc length"));
        }
        Ok(self.exp(p, v, s))
    }

    /// Parallel transport of `w` along the unit-speed geodesic from `p` in
    /// direction `v`, over `[0, s]`.
    pub fn parallel_transport(
        &self,
        p: &DVector<f64>,
        v: &DVector<f64>,
        s: f64,
        w: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        self.check_point(p)?;
        self.check_tangent(p, v)?;
        self.check_unit(v)?;
        self.check_tangent(p, w)?;
        if !s.is_finite() {
            return Err(Error::NonFinite("arc length"));
        }
        Ok(self.transport(p, v, s, w))
    }

    /// `R(v, n)n`; per factor `c_i(⟨n_i,n_i⟩v_i − ⟨v_i,n_i⟩n_i)`.
    pub fn curvature_apply(&self, v: &DVector<f64>, n: &DVector<f64>) -> DVector<f64> {
        self.map_leaves(v.len(), |f, r, out| {
            let (vi, ni) = (&v.as_slice()[r.clone()], &n.as_slice()[r]);
            let nn = f.inner(ni, ni);
            let vn = f.inner(vi, ni);
            for k in 0..out.len() {
                out[k] = f.curvature() * (nn * vi[k] - vn * ni[k]);
            }
        })
    }

    /// Orthonormal frame of `T_pX ∩ exclude^⊥`.
    ///
    /// Gram–Schmidt over the tangent projections of the ambient coordinate
    /// vectors; at every step the candidate with the largest residual norm is
    /// taken (lowest index on ties), so the frame is a deterministic function
    /// of its inputs. `exclude` must be orthonormal.
    pub fn tangent_frame(&self, p: &DVector<f64>, exclude: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let n_amb = self.ambient_dim();
        let want = self.dim().saturating_sub(exclude.len());
        let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(want);
        let mut candidates: Vec<DVector<f64>> = (0..n_amb)
            .map(|k| {
                let mut e = DVector::zeros(n_amb);
                e[k] = 1.0;
                let mut t = self.project_tangent(p, &e);
                for x in exclude {
                    let c = self.inner(&t, x);
                    t -= x * c;
                }
                t
            })
            .collect();
        while accepted.len() < want {
            let mut best = 0;
            let mut best_norm = -1.0;
            for (k, c) in candidates.iter().enumerate() {
                let nrm = self.norm(c);
                if nrm > best_norm {
                    best = k;
                    best_norm = nrm;
                }
            }
            if best_norm <= 1e-12 {
                break;
            }
            let mut e = candidates.swap_remove(best);
            // second pass against everything already accepted
            for x in exclude.iter().chain(accepted.iter()) {
                let c = self.inner(&e, x);
                e -= x * c;
            }
            let nrm = self.norm(&e);
            e /= nrm;
            for c in candidates.iter_mut() {
                let k = self.inner(c, &e);
                *c -= &e * k;
            }
            accepted.push(e);
        }
        accepted
    }

    /// Matrix of `v ↦ R(v, n)n` on `n^⊥ ∩ T_pX` in `frame` (generated with
    /// [`Space::tangent_frame`] when absent). Returns the matrix and the frame.
    pub fn curvature_normal_operator(
        &self,
        p: &DVector<f64>,
        n: &DVector<f64>,
        frame: Option<&[DVector<f64>]>,
    ) -> Result<(SymMatrix, Vec<DVector<f64>>)> {
        self.check_point(p)?;
        self.check_tangent(p, n)?;
        self.check_unit(n)?;
        let frame: Vec<DVector<f64>> = match frame {
            Some(f) => f.to_vec(),
            None => self.tangent_frame(p, std::slice::from_ref(n)),
        };
        let m = frame.len();
        let images: Vec<DVector<f64>> = frame.iter().map(|e| self.curvature_apply(e, n)).collect();
        let mat = DMatrix::from_fn(m, m, |a, b| self.inner(&frame[a], &images[b]));
        let sym = SymMatrix::new((&mat + mat.transpose()) * 0.5)?;
        Ok((sym, frame))
    }

    /// Product structure `P(v1, v2) = (v1, −v2)`.
    pub fn apply_product_structure(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        let prod = match self {
            Space::Product(p) if p.factors.len() == 2 => p,
            Space::Product(p) => return Err(Error::NotTwoFactorProduct(p.factors.len())),
            Space::Form(_) => return Err(Error::NotTwoFactorProduct(1)),
        };
        self.check_len(v)?;
        let mut out = v.clone();
        for i in prod.block(1) {
            out[i] = -out[i];
        }
        Ok(out)
    }

    /// Riemannian metric of two tangent vectors at the same point.
    pub fn metric(&self, v: &TangentVector, w: &TangentVector) -> Result<f64> {
        if v.base != w.base {
            return Err(Error::BasePointMismatch);
        }
        self.check_point(&v.base)?;
        self.check_tangent(&v.base, &v.coords)?;
        self.check_tangent(&w.base, &w.coords)?;
        Ok(self.inner(&v.coords, &w.coords))
    }

    /// Geodesic distance (for products, the root sum of squared factor distances).
    pub fn distance(&self, p: &DVector<f64>, q: &DVector<f64>) -> f64 {
        self.leaves()
            .iter()
            .map(|(o, f)| {
                let n = f.ambient_dim();
                f.distance(&p.as_slice()[*o..o + n], &q.as_slice()[*o..o + n]).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// A point drawn near the origin of every factor (geodesic radius ≤ 1).
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let mut p = DVector::zeros(self.ambient_dim());
        for (o, f) in self.leaves() {
            let origin = f.origin();
            let dir = Space::Form(f).random_unit_tangent(&origin, rng);
            let radius: f64 = rng.random_range(0.0..1.0);
            let q = Space::Form(f).exp(&origin, &dir, radius);
            p.rows_mut(o, f.ambient_dim()).copy_from(&q);
        }
        p
    }

    /// A uniformly oriented unit tangent vector at `p`.
    pub fn random_unit_tangent<R: Rng + ?Sized>(&self, p: &DVector<f64>, rng: &mut R) -> DVector<f64> {
        loop {
            let g = DVector::from_fn(self.ambient_dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
            let t = self.project_tangent(p, &g);
            let n = self.norm(&t);
            if n > 1e-6 {
                return t / n;
            }
        }
    }

    /// A tangent vector at `p` with standard normal components in a frame.
    pub fn random_tangent<R: Rng + ?Sized>(&self, p: &DVector<f64>, rng: &mut R) -> DVector<f64> {
        let g = DVector::from_fn(self.ambient_dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        self.project_tangent(p, &g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn dv(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn s2() -> Space {
        SpaceForm::sphere(2, 1.0).unwrap().into()
    }

    fn h2() -> Space {
        SpaceForm::hyperbolic(2, -1.0).unwrap().into()
    }

    fn e2() -> Space {
        SpaceForm::euclidean(2).unwrap().into()
    }

    fn test_spaces() -> Vec<Space> {
        vec![
            s2(),
            h2(),
            e2(),
            SpaceForm::sphere(3, 4.0).unwrap().into(),
            SpaceForm::hyperbolic(3, -0.25).unwrap().into(),
            Space::pair(s2(), s2()).unwrap(),
            Space::pair(Space::pair(s2(), h2()).unwrap(), e2()).unwrap(),
        ]
    }

    #[test]
    fn rejects_inconsistent_curvature() {
        assert!(SpaceForm::sphere(2, -1.0).is_err());
        assert!(SpaceForm::hyperbolic(2, 0.0).is_err());
        assert!(SpaceForm::new(FormKind::Euclidean, 2, 1.0).is_err());
        assert!(SpaceForm::sphere(0, 1.0).is_err());
    }

    #[test]
    fn quarter_great_circle() {
        let q = s2().geodesic(&dv(&[1., 0., 0.]), &dv(&[0., 1., 0.]), FRAC_PI_2).unwrap();
        assert!((q - dv(&[0., 1., 0.])).amax() < 1e-15);
    }

    #[test]
    fn straight_line() {
        let q = e2().geodesic(&dv(&[0., 0.]), &dv(&[1., 0.]), 2.0).unwrap();
        assert_eq!(q, dv(&[2., 0.]));
    }

    #[test]
    fn hyperboloid_geodesic() {
        let h = h2();
        let q = h.geodesic(&dv(&[1., 0., 0.]), &dv(&[0., 1., 0.]), 1.0).unwrap();
        assert!((q.clone() - dv(&[1f64.cosh(), 1f64.sinh(), 0.])).amax() < 1e-15);
        assert!((q[0] - 1.543_080_6).abs() < 1e-7 && (q[1] - 1.175_201_2).abs() < 1e-7);
        assert!((h.inner(&q, &q) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn geodesic_rejects_bad_input() {
        let s = s2();
        let p = dv(&[1., 0., 0.]);
        assert!(matches!(s.geodesic(&p, &dv(&[1., 0., 0.]), 1.0), Err(Error::NotTangent(_))));
        assert!(matches!(s.geodesic(&dv(&[2., 0., 0.]), &dv(&[0., 1., 0.]), 1.0), Err(Error::NotOnSpace(_))));
        assert!(matches!(s.geodesic(&p, &dv(&[0., 2., 0.]), 1.0), Err(Error::NotUnit(_))));
        assert!(matches!(h2().check_point(&dv(&[-1., 0., 0.])), Err(Error::NotOnSpace(_))));
    }

    #[test]
    fn geodesics_have_constant_speed_and_stay_on_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for x in test_spaces() {
            for _ in 0..10 {
                let p = x.random_point(&mut rng);
                let v = x.random_unit_tangent(&p, &mut rng);
                for &s in &[0.3, 2.0, 7.5, 10.0] {
                    let q = x.geodesic(&p, &v, s).unwrap();
                    assert!(x.membership_residual(&q) < 1e-10, "{x:?} s={s}");
                    // d/ds ⟨γ',γ'⟩ by central differences; the hyperboloid's
                    // coordinates grow like e^s, so roundoff scales with ‖γ'‖²
                    let h = 0.05;
                    let speed = |t: f64| {
                        let w = x.velocity(&p, &v, t);
                        x.inner(&w, &w)
                    };
                    let d = (speed(s + h) - speed(s - h)) / (2.0 * h);
                    let mag = x.velocity(&p, &v, s).norm_squared().max(1.0);
                    assert!(d.abs() <= 1e-10 * mag, "{x:?} s={s}: {d:e}");
                    assert!((speed(s) - 1.0).abs() < 1e-12 * mag);
                }
            }
        }
    }

    #[test]
    fn velocity_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for x in test_spaces() {
            let p = x.random_point(&mut rng);
            let v = x.random_unit_tangent(&p, &mut rng);
            let h = 1e-6;
            let fd = (x.exp(&p, &v, 0.7 + h) - x.exp(&p, &v, 0.7 - h)) / (2.0 * h);
            assert!((fd - x.velocity(&p, &v, 0.7)).amax() < 1e-8);
        }
    }

    #[test]
    fn transport_is_a_linear_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for x in test_spaces() {
            for _ in 0..5 {
                let p = x.random_point(&mut rng);
                let v = x.random_unit_tangent(&p, &mut rng);
                let a = x.random_tangent(&p, &mut rng);
                let b = x.random_tangent(&p, &mut rng);
                let s = 1.3;
                let q = x.exp(&p, &v, s);
                let ta = x.parallel_transport(&p, &v, s, &a).unwrap();
                let tb = x.parallel_transport(&p, &v, s, &b).unwrap();
                assert!(x.tangency_residual(&q, &ta) < 1e-12);
                assert!((x.inner(&ta, &tb) - x.inner(&a, &b)).abs() < 1e-12 * (1.0 + a.norm() * b.norm()));
                let sum = x.transport(&p, &v, s, &(&a * 2.0 + &b));
                assert!((sum - (ta * 2.0 + tb)).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn transport_of_direction_is_velocity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for x in test_spaces() {
            let p = x.random_point(&mut rng);
            let v = x.random_unit_tangent(&p, &mut rng);
            let t = x.parallel_transport(&p, &v, 0.9, &v).unwrap();
            assert!((t - x.velocity(&p, &v, 0.9)).amax() < 1e-14);
        }
    }

    #[test]
    fn transport_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for x in test_spaces() {
            let p = x.random_point(&mut rng);
            let v = x.random_unit_tangent(&p, &mut rng);
            let w = x.random_tangent(&p, &mut rng);
            let s = 1.1;
            let q = x.exp(&p, &v, s);
            let back_dir = -x.velocity(&p, &v, s);
            let there = x.transport(&p, &v, s, &w);
            let back = x.parallel_transport(&q, &back_dir, s, &there).unwrap();
            assert!((back - w).amax() < 1e-12);
        }
    }

    #[test]
    fn transport_perpendicular_on_sphere() {
        let s = s2();
        let p = dv(&[1., 0., 0.]);
        let v = dv(&[0., 1., 0.]);
        let w = dv(&[0., 0., 1.]);
        let t = s.parallel_transport(&p, &v, 1.0, &w).unwrap();
        assert_eq!(t, w);
    }

    #[test]
    fn curvature_operator_of_single_forms() {
        let s = s2();
        let (m, _) = s.curvature_normal_operator(&dv(&[1., 0., 0.]), &dv(&[0., 1., 0.]), None).unwrap();
        assert_eq!(m.dim(), 1);
        assert!((m.get(0, 0) - 1.0).abs() < 1e-15);
        let h = h2();
        let (m, _) = h.curvature_normal_operator(&dv(&[1., 0., 0.]), &dv(&[0., 1., 0.]), None).unwrap();
        assert!((m.get(0, 0) + 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x: Space = SpaceForm::hyperbolic(4, -2.5).unwrap().into();
        let p = x.random_point(&mut rng);
        let n = x.random_unit_tangent(&p, &mut rng);
        let (m, frame) = x.curvature_normal_operator(&p, &n, None).unwrap();
        assert_eq!(frame.len(), 3);
        assert!((m.matrix() + DMatrix::identity(3, 3) * 2.5).amax() < 1e-12);
    }

    #[test]
    fn curvature_operator_on_product_blocks() {
        let x = Space::pair(s2(), s2()).unwrap();
        let p = dv(&[1., 0., 0., 1., 0., 0.]);
        let n = dv(&[0., 1., 0., 0., 0., 0.]);
        let (m, frame) = x.curvature_normal_operator(&p, &n, None).unwrap();
        assert_eq!(frame.len(), 3);
        let e = crate::matfun::sym_eigen(&m).unwrap();
        assert!((e.values[0]).abs() < 1e-15 && e.values[1].abs() < 1e-15);
        assert!((e.values[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn curvature_operator_matches_geodesic_deviation() {
        // J(s) = ∂_ε exp_p(s(n + εw)) is a Jacobi field; in a parallel frame
        // E_a along γ its coefficients satisfy y'' = −⟨E_a, R(E_b, γ')γ'⟩ y_b.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = Space::pair(s2(), Space::pair(h2(), e2()).unwrap()).unwrap();
        let p = x.random_point(&mut rng);
        let n = x.random_unit_tangent(&p, &mut rng);
        let basis = x.tangent_frame(&p, &[]);
        let s0 = 0.6;
        for w in x.tangent_frame(&p, std::slice::from_ref(&n)) {
            let coeffs = |s: f64| -> Vec<f64> {
                let eps = 1e-3;
                let j = (x.exp(&p, &(&n + &w * eps), s) - x.exp(&p, &(&n - &w * eps), s)) / (2.0 * eps);
                basis.iter().map(|e| x.inner(&j, &x.transport(&p, &n, s, e))).collect()
            };
            let h = 1e-3;
            let (ym, y0, yp) = (coeffs(s0 - h), coeffs(s0), coeffs(s0 + h));
            let vel = x.velocity(&p, &n, s0);
            let frame_s: Vec<DVector<f64>> = basis.iter().map(|e| x.transport(&p, &n, s0, e)).collect();
            for (a, ea) in frame_s.iter().enumerate() {
                let ydd = (yp[a] - 2.0 * y0[a] + ym[a]) / (h * h);
                let ky: f64 = frame_s
                    .iter()
                    .enumerate()
                    .map(|(b, eb)| x.inner(ea, &x.curvature_apply(eb, &vel)) * y0[b])
                    .sum();
                assert!((ydd + ky).abs() < 1e-5, "{}", ydd + ky);
            }
        }
    }

    #[test]
    fn product_structure() {
        let x = Space::pair(s2(), h2()).unwrap();
        let v = dv(&[1., 2., 3., 4., 5., 6.]);
        assert_eq!(x.apply_product_structure(&v).unwrap(), dv(&[1., 2., 3., -4., -5., -6.]));
        let pv = x.apply_product_structure(&v).unwrap();
        assert_eq!(x.apply_product_structure(&pv).unwrap(), v);
        assert!(matches!(s2().apply_product_structure(&dv(&[1., 0., 0.])), Err(Error::NotTwoFactorProduct(1))));
        let three = Space::product(vec![s2(), s2(), s2()]).unwrap();
        assert!(matches!(three.apply_product_structure(&DVector::zeros(9)), Err(Error::NotTwoFactorProduct(3))));
        let nested = Space::pair(Space::pair(s2(), s2()).unwrap(), h2()).unwrap();
        let v = DVector::from_fn(9, |i, _| i as f64);
        let pv = nested.apply_product_structure(&v).unwrap();
        assert_eq!(pv.rows(0, 6), v.rows(0, 6));
        assert_eq!(pv.rows(6, 3), -v.rows(6, 3));
    }

    #[test]
    fn metric_examples() {
        let h = h2();
        let p = dv(&[1., 0., 0.]);
        let v = TangentVector::new(p.clone(), dv(&[0., 1., 0.]));
        assert_eq!(h.metric(&v, &v).unwrap(), 1.0);
        let w = TangentVector::new(dv(&[1f64.cosh(), 1f64.sinh(), 0.]), dv(&[0., 0., 1.]));
        assert_eq!(h.metric(&v, &w), Err(Error::BasePointMismatch));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for x in test_spaces() {
            let p = x.random_point(&mut rng);
            let a = x.random_tangent(&p, &mut rng);
            let b = x.random_tangent(&p, &mut rng);
            let c = x.random_tangent(&p, &mut rng);
            let t = |u: &DVector<f64>| TangentVector::new(p.clone(), u.clone());
            assert!(x.metric(&t(&a), &t(&a)).unwrap() > 0.0);
            let lhs = x.metric(&t(&(&a * 2.5 + &b)), &t(&c)).unwrap();
            let rhs = 2.5 * x.metric(&t(&a), &t(&c)).unwrap() + x.metric(&t(&b), &t(&c)).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
            let z = DVector::zeros(x.ambient_dim());
            assert_eq!(x.metric(&t(&z), &t(&z)).unwrap(), 0.0);
        }
    }

    #[test]
    fn tangent_frames_are_orthonormal_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for x in test_spaces() {
            let p = x.random_point(&mut rng);
            let n = x.random_unit_tangent(&p, &mut rng);
            let f = x.tangent_frame(&p, std::slice::from_ref(&n));
            assert_eq!(f.len(), x.dim() - 1);
            for (i, a) in f.iter().enumerate() {
                assert!(x.tangency_residual(&p, a) < 1e-12);
                assert!(x.inner(a, &n).abs() < 1e-12);
                for (j, b) in f.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((x.inner(a, b) - want).abs() < 1e-12);
                }
            }
            assert_eq!(f, x.tangent_frame(&p, std::slice::from_ref(&n)));
        }
    }

    #[test]
    fn distances() {
        let s = s2();
        assert!((s.distance(&dv(&[1., 0., 0.]), &dv(&[0., 1., 0.])) - FRAC_PI_2).abs() < 1e-15);
        let h = h2();
        let q = h.exp(&dv(&[1., 0., 0.]), &dv(&[0., 0.6, 0.8]), 0.37);
        assert!((h.distance(&dv(&[1., 0., 0.]), &q) - 0.37).abs() < 1e-15);
    }
}
