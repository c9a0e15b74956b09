//! Dense symmetric-matrix spectral calculus.
//!
//! Everything here works on small symmetric matrices expressed in an
//! orthonormal frame: shape operators `A` and normal Jacobi operators `R(N)`.
//! Matrix functions are evaluated spectrally, one scalar branch per
//! eigenvalue, so the sphere (`μ > 0`), hyperbolic (`μ < 0`) and flat (`μ = 0`)
//! cases share one code path.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Below this value of `|μ|·s²` the scalar branches switch to a Taylor series.
pub const TAYLOR_THRESHOLD: f64 = 1e-8;

const TAYLOR_TERMS: usize = 12;

/// A real symmetric matrix with finite entries.
///
/// The constructor symmetrizes its input exactly, so `m[(i, j)] == m[(j, i)]`
/// holds bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Wraps a square matrix, rejecting non-finite entries and asymmetry above
    /// `1e-12·(1 + max|m_ij|)`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("symmetric matrix"));
        }
        let scale = 1.0 + m.amax();
        let asym = (&m - m.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self::symmetrized(m))
    }

    fn symmetrized(m: DMatrix<f64>) -> Self {
        let t = m.transpose();
        SymMatrix((m + t) * 0.5)
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(DMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// `Q·diag(values)·Qᵀ` for orthonormal columns `Q`.
    fn from_spectrum(vectors: &DMatrix<f64>, values: &[f64]) -> Self {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(values));
        Self::symmetrized(vectors * d * vectors.transpose())
    }
}

/// Eigendecomposition `S = Q·diag(values)·Qᵀ` with ascending eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column.
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        SymMatrix::from_spectrum(&self.vectors, &self.values).into_matrix()
    }
}

/// Flips `v` so that its largest-magnitude component is positive (first index
/// wins ties).
pub fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if !v.is_empty() && v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues come back ascending; each eigenvector is sign-fixed with
/// [`fix_sign`] so repeated calls produce identical output.
pub fn sym_eigen(s: &SymMatrix) -> Result<SymEigen> {
    let n = s.dim();
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = s.matrix().clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("eigenvalues"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .total_cmp(&eig.eigenvalues[j])
            .then(i.cmp(&j))
    });
    let mut vectors = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        fix_sign(&mut v);
        vectors.set_column(k, &v);
        values.push(eig.eigenvalues[i]);
    }
    Ok(SymEigen { values, vectors })
}

/// Scalar `cos(s√μ)` with the hyperbolic branch `cosh(s√−μ)` for `μ < 0`.
pub fn cos_branch(mu: f64, s: f64) -> f64 {
    let x = mu * s * s;
    if x.abs() < TAYLOR_THRESHOLD {
        // Σ (−μs²)^j / (2j)!
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..TAYLOR_TERMS {
            term *= -x / ((2 * j - 1) * (2 * j)) as f64;
            sum += term;
        }
        sum
    } else if mu > 0.0 {
        (s * mu.sqrt()).cos()
    } else {
        (s * (-mu).sqrt()).cosh()
    }
}

/// Scalar `sin(s√μ)/√μ`, `sinh(s√−μ)/√−μ` for `μ < 0`, and `s` at `μ = 0`.
pub fn sinc_branch(mu: f64, s: f64) -> f64 {
    let x = mu * s * s;
    if x.abs() < TAYLOR_THRESHOLD {
        // s·Σ (−μs²)^j / (2j+1)!
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..TAYLOR_TERMS {
            term *= -x / ((2 * j) * (2 * j + 1)) as f64;
            sum += term;
        }
        s * sum
    } else if mu > 0.0 {
        let k = mu.sqrt();
        (s * k).sin() / k
    } else {
        let k = (-mu).sqrt();
        (s * k).sinh() / k
    }
}

fn check_finite_scalar(s: f64) -> Result<()> {
    if s.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("arc length"))
    }
}

fn spectral_map(s: &SymMatrix, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    let eig = sym_eigen(s)?;
    let mapped: Vec<f64> = eig.values.iter().map(|&mu| f(mu)).collect();
    Ok(SymMatrix::from_spectrum(&eig.vectors, &mapped))
}

/// `cos(s√S)`, evaluated per eigenvalue with [`cos_branch`].
pub fn spectral_cos(s_mat: &SymMatrix, s: f64) -> Result<SymMatrix> {
    check_finite_scalar(s)?;
    spectral_map(s_mat, |mu| cos_branch(mu, s))
}

/// `sin(s√S)/√S`, evaluated per eigenvalue with [`sinc_branch`].
pub fn spectral_sinc(s_mat: &SymMatrix, s: f64) -> Result<SymMatrix> {
    check_finite_scalar(s)?;
    spectral_map(s_mat, |mu| sinc_branch(mu, s))
}

/// `‖AB − BA‖_F`.
pub fn commutator_residual(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok((ab - ba).norm())
}

/// One common eigenspace `E_jk` of a commuting pair `(A, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPair {
    /// Eigenvalue of `A` on the space.
    pub lambda: f64,
    /// Eigenvalue of `R` on the space.
    pub mu: f64,
    pub multiplicity: usize,
    /// Orthonormal basis, each vector sign-fixed.
    pub basis: Vec<DVector<f64>>,
}

impl JointPair {
    /// Orthogonal projector onto the space.
    pub fn projector(&self, dim: usize) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(dim, dim);
        for b in &self.basis {
            p += b * b.transpose();
        }
        p
    }
}

/// Common eigenspace decomposition, pairs sorted by `(lambda, mu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub dim: usize,
    pub pairs: Vec<JointPair>,
}

impl SpectralData {
    /// Every `(λ, μ)` repeated by multiplicity, in pair order.
    pub fn expanded(&self) -> Vec<(f64, f64)> {
        self.pairs
            .iter()
            .flat_map(|p| std::iter::repeat_n((p.lambda, p.mu), p.multiplicity))
            .collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.pairs.iter().map(|p| p.multiplicity).sum()
    }
}

/// Groups indices of ascending `values` into runs whose consecutive gaps are
/// below `tol`.
fn cluster_sorted(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if v - values[*g.last().unwrap()] < tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

fn mean_of(values: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| values[i]).sum::<f64>() / idx.len() as f64
}

/// Default clustering tolerance `1e-9·(1 + max(‖A‖_F, ‖R‖_F))`.
pub fn default_cluster_tol(a: &SymMatrix, r: &SymMatrix) -> f64 {
    1e-9 * (1.0 + a.frobenius_norm().max(r.frobenius_norm()))
}

/// Joint eigenspaces of commuting symmetric matrices.
///
/// `R` is diagonalized first and its eigenvalues clustered with `tol`; `A`
/// is then restricted to each `R`-eigenspace and diagonalized there, so the
/// result stays exact even when `A` alone has degenerate eigenvalues spread
/// over several `R`-eigenspaces.
pub fn joint_eigenspaces(a: &SymMatrix, r: &SymMatrix, tol: f64) -> Result<SpectralData> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "clustering tolerance must be positive, got {tol}"
        )));
    }
    let residual = commutator_residual(a, r)?;
    let threshold = tol * (a.frobenius_norm() + r.frobenius_norm() + 1.0);
    if residual > threshold {
        return Err(Error::NotCurvatureAdapted {
            residual,
            threshold,
        });
    }
    let n = a.dim();
    let r_eig = sym_eigen(r)?;
    let mut pairs = Vec::new();
    for group in cluster_sorted(&r_eig.values, tol) {
        let mu = mean_of(&r_eig.values, &group);
        let mut q = DMatrix::zeros(n, group.len());
        for (c, &i) in group.iter().enumerate() {
            q.set_column(c, &r_eig.vectors.column(i));
        }
        let restricted = SymMatrix::symmetrized(q.transpose() * a.matrix() * &q);
        let a_eig = sym_eigen(&restricted)?;
        for sub in cluster_sorted(&a_eig.values, tol) {
            let lambda = mean_of(&a_eig.values, &sub);
            let basis: Vec<DVector<f64>> = sub
                .iter()
                .map(|&k| {
                    let mut v = &q * a_eig.vectors.column(k);
                    fix_sign(&mut v);
                    v
                })
                .collect();
            pairs.push(JointPair {
                lambda,
                mu,
                multiplicity: basis.len(),
                basis,
            });
        }
    }
    pairs.sort_by(|x, y| match x.lambda.total_cmp(&y.lambda) {
        Ordering::Equal => x.mu.total_cmp(&y.mu),
        o => o,
    });
    Ok(SpectralData { dim: n, pairs })
}

/// [`joint_eigenspaces`] with [`default_cluster_tol`].
pub fn joint_eigenspaces_default(a: &SymMatrix, r: &SymMatrix) -> Result<SpectralData> {
    joint_eigenspaces(a, r, default_cluster_tol(a, r))
}
