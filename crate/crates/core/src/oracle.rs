//! Independent numerical checks.
//!
//! Nothing here reads closed-form spectra: the shape operator is
//! differentiated out of the immersion, Jacobi fields are integrated with
//! RK4, and Gauss curvature comes from the Brioschi formula. Only
//! [`compare_spectra`] sees both sides.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hypersurface::{Hypersurface, SurfacePoint};
use crate::matfun::{commutator_residual, sym_eigen, SpectralData, SymMatrix};
use crate::spaceform::Space;

/// Default central-difference step for shape operators.
pub const DEFAULT_STEP: f64 = 1e-4;
/// Default tolerance for spectrum comparisons.
pub const DEFAULT_TOL: f64 = 1e-5;
/// Eigenvalue clustering tolerance used when matching spectra.
pub const MATCH_CLUSTER_TOL: f64 = 1e-6;
/// Largest accepted condition number of the chart's Gram matrix.
pub const MAX_FRAME_CONDITION: f64 = 1e8;

/// Finite-difference shape operator and normal Jacobi operator at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FdShape {
    pub point: DVector<f64>,
    /// Orthonormalized chart tangents.
    pub frame: Vec<DVector<f64>>,
    pub normal: DVector<f64>,
    pub shape: SymMatrix,
    pub normal_jacobi: SymMatrix,
}

fn chart_tangents<F>(chart: &F, x0: &[f64], h: f64) -> Result<Vec<DVector<f64>>>
where
    F: Fn(&[f64]) -> Result<DVector<f64>>,
{
    let mut out = Vec::with_capacity(x0.len());
    for a in 0..x0.len() {
        let mut xp = x0.to_vec();
        let mut xm = x0.to_vec();
        xp[a] += h;
        xm[a] -= h;
        out.push((chart(&xp)? - chart(&xm)?) / (2.0 * h));
    }
    Ok(out)
}

/// Unit normal from tangents: the one-dimensional solution of
/// `⟨t_a, n⟩ = 0` and `⟨x_i, n_i⟩ = 0` for every curved factor `i`.
fn numeric_normal(space: &Space, x: &DVector<f64>, tangents: &[DVector<f64>], sign_ref: &DVector<f64>) -> DVector<f64> {
    let n = space.ambient_dim();
    let leaves = space.leaves();
    // each row r encodes the linear form v ↦ ⟨r-th constraint, v⟩ in plain coordinates
    let mut rows: Vec<DVector<f64>> = Vec::new();
    let signature = |v: &DVector<f64>| -> DVector<f64> {
        let mut w = v.clone();
        for (o, f) in &leaves {
            if f.curvature() < 0.0 {
                w[*o] = -w[*o];
            }
        }
        w
    };
    for t in tangents {
        rows.push(signature(t));
    }
    for (o, f) in &leaves {
        if f.curvature() != 0.0 {
            let mut r = DVector::zeros(n);
            r.rows_mut(*o, f.ambient_dim()).copy_from(&x.rows(*o, f.ambient_dim()));
            rows.push(signature(&r));
        }
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, r) in rows.iter().enumerate().take(n) {
        m.set_row(i, &r.transpose());
    }
    // rows are scaled to comparable magnitudes before the SVD
    for i in 0..rows.len().min(n) {
        let nrm = m.row(i).norm();
        if nrm > 0.0 {
            m.row_mut(i).scale_mut(1.0 / nrm);
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let k = svd.singular_values.imin();
    let mut normal: DVector<f64> = v_t.row(k).transpose();
    let len = space.norm(&normal);
    normal /= len;
    if space.inner(&normal, sign_ref) < 0.0 {
        normal = -normal;
    }
    normal
}

/// Shape operator of the immersion `chart` at parameters `x0`.
///
/// Tangents are central differences with step `h`; the unit normal is the
/// orthogonal complement of the tangents inside the ambient product, signed
/// to agree with `sign_ref`. `B_ab = −⟨∂_a N, t_b⟩` is symmetrized and
/// returned in the orthonormalized frame `t·G^{-1/2}`, together with
/// `R(·, N)N` in the same frame.
pub fn fd_shape_operator<F>(space: &Space, chart: F, x0: &[f64], h: f64, sign_ref: &DVector<f64>) -> Result<FdShape>
where
    F: Fn(&[f64]) -> Result<DVector<f64>>,
{
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let m = x0.len();
    if m + 1 != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim() - 1,
            found: m,
        });
    }
    let point = chart(x0)?;
    space.check_point(&point)?;
    let tangents = chart_tangents(&chart, x0, h)?;
    let normal = numeric_normal(space, &point, &tangents, sign_ref);

    let normal_at = |x: &[f64]| -> Result<DVector<f64>> {
        let p = chart(x)?;
        let t = chart_tangents(&chart, x, h)?;
        Ok(numeric_normal(space, &p, &t, &normal))
    };
    let mut b = DMatrix::zeros(m, m);
    for a in 0..m {
        let mut xp = x0.to_vec();
        let mut xm = x0.to_vec();
        xp[a] += h;
        xm[a] -= h;
        let dn = (normal_at(&xp)? - normal_at(&xm)?) / (2.0 * h);
        for (c, t) in tangents.iter().enumerate() {
            b[(a, c)] = -space.inner(&dn, t);
        }
    }
    let b = (&b + b.transpose()) * 0.5;
    let g = DMatrix::from_fn(m, m, |i, j| space.inner(&tangents[i], &tangents[j]));
    let g_eig = sym_eigen(&SymMatrix::new(g)?)?;
    let (gmin, gmax) = (g_eig.values[0], g_eig.values[m - 1]);
    if gmin <= 0.0 || gmax / gmin > MAX_FRAME_CONDITION {
        return Err(Error::DegenerateFrame(if gmin <= 0.0 { f64::INFINITY } else { gmax / gmin }));
    }
    let inv_sqrt = &g_eig.vectors
        * DMatrix::from_diagonal(&DVector::from_iterator(m, g_eig.values.iter().map(|v| 1.0 / v.sqrt())))
        * g_eig.vectors.transpose();
    let shape = SymMatrix::new(&inv_sqrt * b * &inv_sqrt)?;
    let frame: Vec<DVector<f64>> = (0..m)
        .map(|a| {
            let mut e = DVector::zeros(point.len());
            for (c, t) in tangents.iter().enumerate() {
                e += t * inv_sqrt[(c, a)];
            }
            e
        })
        .collect();
    let images: Vec<DVector<f64>> = frame.iter().map(|e| space.curvature_apply(e, &normal)).collect();
    let r = DMatrix::from_fn(m, m, |i, j| space.inner(&frame[i], &images[j]));
    let normal_jacobi = SymMatrix::new((&r + r.transpose()) * 0.5)?;
    Ok(FdShape {
        point,
        frame,
        normal,
        shape,
        normal_jacobi,
    })
}

/// `Y(s_end)` for `Y'' = −R(Y, γ')γ'` along `γ(s) = exp_p(s·v)`, integrated
/// with classical RK4 in a parallel frame. Returned in ambient coordinates at
/// `γ(s_end)`.
pub fn ode_jacobi(
    space: &Space,
    p: &DVector<f64>,
    v: &DVector<f64>,
    y0: &DVector<f64>,
    y0_prime: &DVector<f64>,
    s_end: f64,
    steps: usize,
) -> Result<DVector<f64>> {
    if steps < 10 {
        return Err(Error::InvalidParameter(format!("RK4 needs at least 10 steps, got {steps}")));
    }
    if !s_end.is_finite() {
        return Err(Error::NonFinite("integration length"));
    }
    space.check_point(p)?;
    for w in [v, y0, y0_prime] {
        space.check_tangent(p, w)?;
    }
    let frame = space.tangent_frame(p, &[]);
    let n = frame.len();
    let coords = |w: &DVector<f64>| DVector::from_iterator(n, frame.iter().map(|e| space.inner(e, w)));
    // K_ab(s) = ⟨E_a, R(E_b, γ')γ'⟩ with E_a parallel along γ
    let curvature_matrix = |s: f64| -> DMatrix<f64> {
        let e: Vec<DVector<f64>> = frame.iter().map(|f| space.transport(p, v, s, f)).collect();
        let vel = space.velocity(p, v, s);
        let images: Vec<DVector<f64>> = e.iter().map(|x| space.curvature_apply(x, &vel)).collect();
        DMatrix::from_fn(n, n, |a, b| space.inner(&e[a], &images[b]))
    };
    let rhs = |s: f64, y: &DVector<f64>, yp: &DVector<f64>| -> (DVector<f64>, DVector<f64>) {
        (yp.clone(), -(curvature_matrix(s) * y))
    };
    let dt = s_end / steps as f64;
    let mut y = coords(y0);
    let mut yp = coords(y0_prime);
    for i in 0..steps {
        let s = dt * i as f64;
        let (k1y, k1p) = rhs(s, &y, &yp);
        let (k2y, k2p) = rhs(s + dt / 2.0, &(&y + &k1y * (dt / 2.0)), &(&yp + &k1p * (dt / 2.0)));
        let (k3y, k3p) = rhs(s + dt / 2.0, &(&y + &k2y * (dt / 2.0)), &(&yp + &k2p * (dt / 2.0)));
        let (k4y, k4p) = rhs(s + dt, &(&y + &k3y * dt), &(&yp + &k3p * dt));
        y += (k1y + &k2y * 2.0 + &k3y * 2.0 + k4y) * (dt / 6.0);
        yp += (k1p + &k2p * 2.0 + &k3p * 2.0 + k4p) * (dt / 6.0);
    }
    let mut out = DVector::zeros(p.len());
    for (c, f) in y.iter().zip(&frame) {
        out += space.transport(p, v, s_end, f) * *c;
    }
    Ok(out)
}

/// Fourth-order central first derivative.
fn d1<T>(f: &impl Fn(f64) -> T, x: f64, h: f64) -> T
where
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    (f(x - 2.0 * h) - f(x + 2.0 * h) + (f(x + h) - f(x - h)) * 8.0) * (1.0 / (12.0 * h))
}

/// Fourth-order central second derivative.
fn d2(f: &impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h)
}

/// Default outer step for [`fd_gauss_curvature`].
pub const GAUSS_STEP: f64 = 1e-2;

/// Gauss curvature of the surface `chart(s1, s2)` by the Brioschi formula.
///
/// Metric coefficients come from fourth-order differences of the chart with
/// step `h/10`; their derivatives from fourth-order differences with step `h`.
pub fn fd_gauss_curvature<F>(space: &Space, chart: F, s: (f64, f64), h: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> DVector<f64>,
{
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let hi = h / 10.0;
    let metric = |u: f64, v: f64| -> [f64; 3] {
        let xu = d1(&|t| chart(t, v), u, hi);
        let xv = d1(&|t| chart(u, t), v, hi);
        [space.inner(&xu, &xu), space.inner(&xu, &xv), space.inner(&xv, &xv)]
    };
    let (u, v) = s;
    let [e, f, g] = metric(u, v);
    let det = e * g - f * f;
    if !(det > 1e-14 * (e * g).max(1e-300)) {
        return Err(Error::DegenerateFrame(if det > 0.0 { e * g / det } else { f64::INFINITY }));
    }
    let comp = |k: usize| {
        let du = d1(&|t| metric(t, v)[k], u, h);
        let dv = d1(&|t| metric(u, t)[k], v, h);
        (du, dv)
    };
    let (e_u, e_v) = comp(0);
    let (f_u, f_v) = comp(1);
    let (g_u, g_v) = comp(2);
    let e_vv = d2(&|t| metric(u, t)[0], v, h);
    let g_uu = d2(&|t| metric(t, v)[2], u, h);
    let f_uv = d1(&|a| d1(&|b| metric(a, b)[1], v, h), u, h);
    let m1 = nalgebra::Matrix3::new(
        -e_vv / 2.0 + f_uv - g_uu / 2.0,
        e_u / 2.0,
        f_u - e_v / 2.0,
        f_v - g_u / 2.0,
        e,
        f,
        g_v / 2.0,
        f,
        g,
    );
    let m2 = nalgebra::Matrix3::new(0.0, e_v / 2.0, g_u / 2.0, e_v / 2.0, e, f, g_u / 2.0, f, g);
    Ok((m1.determinant() - m2.determinant()) / (det * det))
}

/// Signed curvature of a plane curve `θ ↦ (x, y)` from five-point stencils.
pub fn fd_plane_curvature<F>(curve: F, theta: f64, h: f64) -> f64
where
    F: Fn(f64) -> [f64; 2],
{
    let x = |t: f64| curve(t)[0];
    let y = |t: f64| curve(t)[1];
    let (x1, y1) = (d1(&x, theta, h), d1(&y, theta, h));
    let (x2, y2) = (d2(&x, theta, h), d2(&y, theta, h));
    (x1 * y2 - x2 * y1) / (x1 * x1 + y1 * y1).powf(1.5)
}

/// One matched eigenpair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub closed_lambda: f64,
    pub numeric_lambda: f64,
    pub closed_mu: f64,
    pub numeric_mu: f64,
    /// `max(|Δλ|, |Δμ|)`.
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub commutator_residual: f64,
    pub max_error: f64,
    pub tol: f64,
    /// Finite-difference step the numeric pair was built with, if any.
    pub h: Option<f64>,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn with_step(mut self, h: f64) -> Self {
        self.h = Some(h);
        self
    }
}

/// Sorts `(λ, μ)` by `λ`, then by `μ` inside runs of `λ` closer than `tol`.
fn canonical_order(mut pairs: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::with_capacity(pairs.len());
    let mut start = 0;
    for i in 1..=pairs.len() {
        if i == pairs.len() || pairs[i].0 - pairs[i - 1].0 >= tol {
            let mut run = pairs[start..i].to_vec();
            run.sort_by(|a, b| a.1.total_cmp(&b.1));
            out.extend(run);
            start = i;
        }
    }
    out
}

/// Numeric joint eigenpairs: `A` is diagonalized and clustered, `R` is
/// diagonalized inside each cluster.
fn numeric_pairs(a: &SymMatrix, r: &SymMatrix, tol: f64) -> Result<Vec<(f64, f64)>> {
    let eig = sym_eigen(a)?;
    let n = a.dim();
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    for i in 1..=n {
        if i == n || eig.values[i] - eig.values[i - 1] >= tol {
            let q = DMatrix::from_fn(n, i - start, |row, col| eig.vectors[(row, start + col)]);
            let restricted = q.transpose() * r.matrix() * &q;
            let sub = sym_eigen(&SymMatrix::new((&restricted + restricted.transpose()) * 0.5)?)?;
            for (k, mu) in sub.values.iter().enumerate() {
                out.push((eig.values[start + k], *mu));
            }
            start = i;
        }
    }
    Ok(out)
}

/// Matches the numeric pair `(A, R)` against closed-form joint spectra.
pub fn compare_spectra(closed: &SpectralData, numeric_a: &SymMatrix, numeric_r: &SymMatrix, tol: f64) -> Result<ComparisonReport> {
    if numeric_a.dim() != numeric_r.dim() {
        return Err(Error::DimensionMismatch {
            expected: numeric_a.dim(),
            found: numeric_r.dim(),
        });
    }
    if closed.total_multiplicity() != numeric_a.dim() {
        return Err(Error::DimensionMismatch {
            expected: closed.total_multiplicity(),
            found: numeric_a.dim(),
        });
    }
    let scale = 1.0 + numeric_a.frobenius_norm();
    let cluster = MATCH_CLUSTER_TOL * scale;
    let closed_pairs = canonical_order(closed.expanded(), cluster);
    let numeric = canonical_order(numeric_pairs(numeric_a, numeric_r, cluster)?, cluster);
    let rows: Vec<ComparisonRow> = closed_pairs
        .iter()
        .zip(&numeric)
        .map(|(c, n)| ComparisonRow {
            closed_lambda: c.0,
            numeric_lambda: n.0,
            closed_mu: c.1,
            numeric_mu: n.1,
            abs_error: (c.0 - n.0).abs().max((c.1 - n.1).abs()),
        })
        .collect();
    let max_error = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    let commutator = commutator_residual(numeric_a, numeric_r)?;
    Ok(ComparisonReport {
        rows,
        commutator_residual: commutator,
        max_error,
        tol,
        h: None,
        pass: max_error <= tol && commutator <= tol,
    })
}

/// Finite-difference shape operator of `surface` through its own chart at
/// `p`, compared with the closed-form spectra there.
pub fn verify_point(surface: &Hypersurface, p: &SurfacePoint, h: f64, tol: f64) -> Result<ComparisonReport> {
    let closed = surface.point_data(p)?;
    let chart = |x: &[f64]| surface.embed(&surface.chart_point(p, x)?);
    let fd = fd_shape_operator(surface.ambient(), chart, &vec![0.0; surface.chart_dim()], h, &closed.normal)?;
    Ok(compare_spectra(&closed.spectra, &fd.shape, &fd.normal_jacobi, tol)?.with_step(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{strongly_jacobi_field, ConstructedHypersurface, ProfileCurve};
    use crate::hypersurface::{Hypersurface, SurfacePoint};
    use crate::matfun::joint_eigenspaces_default;
    use crate::spaceform::SpaceForm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s2() -> SpaceForm {
        SpaceForm::sphere(2, 1.0).unwrap()
    }

    fn h2() -> SpaceForm {
        SpaceForm::hyperbolic(2, -1.0).unwrap()
    }

    fn fd_at(h: &Hypersurface, p: &SurfacePoint, step: f64) -> FdShape {
        let n = h.normal_at(p).unwrap();
        let chart = |x: &[f64]| h.embed(&h.chart_point(p, x)?);
        fd_shape_operator(h.ambient(), chart, &vec![0.0; h.chart_dim()], step, &n).unwrap()
    }

    #[test]
    fn sphere_seed_polar_chart() {
        let sp = Space::Form(s2());
        // polar angle φ at colatitude 0.5
        let chart = |x: &[f64]| {
            let (r, phi) = (0.5f64, x[0]);
            Ok(DVector::from_vec(vec![r.cos(), r.sin() * phi.cos(), r.sin() * phi.sin()]))
        };
        let inward = DVector::from_vec(vec![0.5f64.sin(), -0.5f64.cos(), 0.0]);
        let fd = fd_shape_operator(&sp, chart, &[0.0], 1e-4, &inward).unwrap();
        assert!((fd.shape.get(0, 0) - 1.830_487_7).abs() < 1e-6);
        assert!((fd.normal_jacobi.get(0, 0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn catalog_seeds_match_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let seeds = [
            Hypersurface::geodesic_sphere(s2(), None, 0.5).unwrap(),
            Hypersurface::geodesic_sphere(h2(), None, 0.5).unwrap(),
            Hypersurface::geodesic_sphere(SpaceForm::euclidean(3).unwrap(), None, 0.7).unwrap(),
            Hypersurface::horosphere(h2(), None).unwrap(),
            Hypersurface::horosphere(SpaceForm::hyperbolic(3, -2.0).unwrap(), None).unwrap(),
            Hypersurface::equidistant(h2(), None, 0.3).unwrap(),
            Hypersurface::equator(s2(), None).unwrap(),
            Hypersurface::equator(SpaceForm::sphere(3, 1.0).unwrap(), None).unwrap(),
        ];
        for h in &seeds {
            for _ in 0..20 {
                let p = h.sample_point(&mut rng);
                let fd = fd_at(h, &p, 1e-4);
                let d = h.point_data(&p).unwrap();
                let rep = compare_spectra(&d.spectra, &fd.shape, &fd.normal_jacobi, 1e-6).unwrap();
                assert!(rep.pass, "{h:?} {rep:?}");
            }
        }
    }

    #[test]
    fn equator_is_totally_geodesic() {
        let h = Hypersurface::equator(s2(), None).unwrap();
        let fd = fd_at(&h, &h.reference_point(), 1e-4);
        assert!(fd.shape.get(0, 0).abs() < 1e-7);
    }

    #[test]
    fn shape_fd_converges_at_second_order() {
        let c = ConstructedHypersurface::new(
            Hypersurface::geodesic_sphere(s2(), None, 0.5).unwrap(),
            Hypersurface::geodesic_sphere(s2(), None, 0.5).unwrap(),
            ProfileCurve::ellipse(0.1, 0.05).unwrap(),
        )
        .unwrap();
        let h = c.as_hypersurface();
        let p = match h.reference_point() {
            SurfacePoint::Tube(t) => SurfacePoint::tube(t.p1, t.p2, 0.7),
            other => other,
        };
        let d = h.point_data(&p).unwrap();
        let errs: Vec<f64> = [1e-3, 5e-4, 2.5e-4]
            .iter()
            .map(|&step| {
                let fd = fd_at(&h, &p, step);
                compare_spectra(&d.spectra, &fd.shape, &fd.normal_jacobi, 1.0).unwrap().max_error
            })
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.0..5.0).contains(&ratio), "{errs:?}");
        }
    }

    #[test]
    fn degenerate_chart_is_rejected() {
        let sp = Space::Form(SpaceForm::sphere(3, 1.0).unwrap());
        let chart = |x: &[f64]| {
            let t = x[0] + x[1];
            Ok(DVector::from_vec(vec![t.cos(), t.sin(), 0.0, 0.0]))
        };
        let r = fd_shape_operator(&sp, chart, &[0.0, 0.0], 1e-4, &DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]));
        assert!(matches!(r, Err(Error::DegenerateFrame(_))), "{r:?}");
    }

    #[test]
    fn jacobi_flat_is_linear() {
        let sp = Space::Form(SpaceForm::euclidean(2).unwrap());
        let p = DVector::from_vec(vec![0.3, -0.2]);
        let v = DVector::from_vec(vec![1.0, 0.0]);
        let y0 = DVector::from_vec(vec![0.5, 1.0]);
        let y0p = DVector::from_vec(vec![-0.25, 2.0]);
        let y = ode_jacobi(&sp, &p, &v, &y0, &y0p, 1.3, 50).unwrap();
        assert!((y - (&y0 + &y0p * 1.3)).amax() < 1e-12);
        assert!(ode_jacobi(&sp, &p, &v, &y0, &y0p, 1.3, 9).is_err());
    }

    #[test]
    fn jacobi_sphere_cosine() {
        let sp = Space::Form(s2());
        let p = s2().origin();
        let v = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let w = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        let y = ode_jacobi(&sp, &p, &v, &w, &DVector::zeros(3), 1.0, 1000).unwrap();
        assert!((y.norm() - 1.0f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn jacobi_rk4_fourth_order() {
        let sp = Space::Form(s2());
        let p = s2().origin();
        let v = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let w = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        let wp = DVector::from_vec(vec![0.0, 0.0, 0.7]);
        let exact = 2.0f64.cos() + 0.7 * 2.0f64.sin();
        let errs: Vec<f64> = [100, 200, 400]
            .iter()
            .map(|&n| (ode_jacobi(&sp, &p, &v, &w, &wp, 2.0, n).unwrap()[2] - exact).abs())
            .collect();
        for e in errs.windows(2) {
            let ratio = e[0] / e[1];
            assert!((13.0..19.0).contains(&ratio), "{errs:?}");
        }
    }

    #[test]
    fn jacobi_matches_strongly_jacobi_field() {
        let h = Hypersurface::geodesic_sphere(s2(), None, 0.5).unwrap();
        let p = h.reference_point();
        let d = h.point_data(&p).unwrap();
        let v0 = d.frame[0].clone();
        let y0p = -(d.to_ambient(&(d.shape.matrix() * DVector::from_vec(vec![1.0]))));
        for i in 1..=10 {
            let s = 0.1 * i as f64;
            let closed = strongly_jacobi_field(&h, &p, &v0, s).unwrap().coords;
            let ode = ode_jacobi(h.ambient(), &d.point, &d.normal, &v0, &y0p, s, 1000).unwrap();
            assert!((closed - ode).amax() < 1e-8);
        }
    }

    #[test]
    fn gauss_curvature_sanity() {
        let sphere = Space::Form(s2());
        let chart = |a: f64, b: f64| DVector::from_vec(vec![a.sin() * b.cos(), a.sin() * b.sin(), a.cos()]);
        let k = fd_gauss_curvature(&sphere, chart, (0.9, 0.3), GAUSS_STEP).unwrap();
        assert!((k - 1.0).abs() < 1e-4, "{k}");
        let hyp = Space::Form(h2());
        let chart = |a: f64, b: f64| DVector::from_vec(vec![a.cosh(), a.sinh() * b.cos(), a.sinh() * b.sin()]);
        let k = fd_gauss_curvature(&hyp, chart, (0.7, 1.1), GAUSS_STEP).unwrap();
        assert!((k + 1.0).abs() < 1e-4, "{k}");
        let plane = Space::Form(SpaceForm::euclidean(2).unwrap());
        let chart = |a: f64, b: f64| DVector::from_vec(vec![a * b.cos(), a * b.sin()]);
        let k = fd_gauss_curvature(&plane, chart, (1.3, 0.2), GAUSS_STEP).unwrap();
        assert!(k.abs() < 1e-6);
        assert!(fd_gauss_curvature(&plane, |a, _b| DVector::from_vec(vec![a, 0.0]), (0.0, 0.0), 1e-2).is_err());
    }

    #[test]
    fn plane_curvature_of_circle() {
        let k = fd_plane_curvature(|t| [0.1 * t.cos(), 0.1 * t.sin()], 0.4, 1e-3);
        assert!((k - 10.0).abs() < 1e-6);
    }

    #[test]
    fn compare_examples() {
        let a = SymMatrix::from_diagonal(&[2.0, -1.0, 2.0]).unwrap();
        let r = SymMatrix::from_diagonal(&[1.0, 0.5, -1.0]).unwrap();
        let closed = joint_eigenspaces_default(&a, &r).unwrap();
        let rep = compare_spectra(&closed, &a, &r, 1e-5).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.max_error, 0.0);

        let a2 = SymMatrix::from_diagonal(&[2.0 + 1e-7, -1.0, 2.0 - 1e-7]).unwrap();
        let rep = compare_spectra(&closed, &a2, &r, 1e-5).unwrap();
        assert!(rep.pass);
        assert!((rep.max_error - 1e-7).abs() < 1e-12);

        let rep = compare_spectra(&closed, &a2, &r, 1e-12).unwrap();
        assert!(!rep.pass);

        let small = SymMatrix::identity(2);
        assert!(compare_spectra(&closed, &small, &small, 1e-5).is_err());
    }
}
