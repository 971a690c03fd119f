//! Dense complex linear-algebra helpers on top of `faer`.
//!
//! All rank and null-space decisions in the crate go through this module so
//! the thresholding rules (and their audits) live in one place.

use faer::linalg::matmul::matmul;
use faer::traits::Conjugate;
use faer::{c64, Accum, Mat, MatRef, Side};
use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{Error, Result};

pub type CMat = Mat<c64>;

pub(crate) const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub(crate) const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

/// Records how far the values on either side of a threshold were from it.
///
/// `largest_below` is the largest value treated as zero, `smallest_above` the
/// smallest value treated as nonzero. A decision is borderline when either of
/// them lies within a factor 10 of the threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdAudit {
    pub threshold: f64,
    pub largest_below: Option<f64>,
    pub smallest_above: Option<f64>,
}

impl ThresholdAudit {
    pub fn new(threshold: f64) -> Self {
        ThresholdAudit { threshold, largest_below: None, smallest_above: None }
    }

    pub fn from_values(values: impl IntoIterator<Item = f64>, threshold: f64) -> Self {
        let mut audit = ThresholdAudit::new(threshold);
        for v in values {
            audit.record(v);
        }
        audit
    }

    pub fn record(&mut self, v: f64) {
        if v <= self.threshold {
            self.largest_below = Some(self.largest_below.map_or(v, |b| b.max(v)));
        } else {
            self.smallest_above = Some(self.smallest_above.map_or(v, |a| a.min(v)));
        }
    }

    /// Combines two audits taken against the same threshold.
    pub fn merge(&mut self, other: &ThresholdAudit) {
        if let Some(b) = other.largest_below {
            self.largest_below = Some(self.largest_below.map_or(b, |x| x.max(b)));
        }
        if let Some(a) = other.smallest_above {
            self.smallest_above = Some(self.smallest_above.map_or(a, |x| x.min(a)));
        }
    }

    pub fn borderline(&self) -> bool {
        let t = self.threshold;
        self.largest_below.is_some_and(|b| b >= t / 10.0) || self.smallest_above.is_some_and(|a| a <= t * 10.0)
    }
}

pub(crate) fn par() -> faer::Par {
    faer::get_global_parallelism()
}

/// `a b`, accepting conjugated views on either side.
pub fn mul<L, R>(a: MatRef<'_, L>, b: MatRef<'_, R>) -> CMat
where
    L: Conjugate<Canonical = c64>,
    R: Conjugate<Canonical = c64>,
{
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a, b, ONE, par());
    out
}

/// `a^† b`.
pub fn adjoint_mul(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> CMat {
    mul(a.adjoint(), b)
}

pub fn max_abs(a: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

pub fn frobenius(a: MatRef<'_, c64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

pub fn vec_norm(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn svd_err(e: impl std::fmt::Debug) -> Error {
    Error::Numerical(format!("singular value decomposition did not converge: {e:?}"))
}

fn evd_err(e: impl std::fmt::Debug) -> Error {
    Error::Numerical(format!("eigendecomposition did not converge: {e:?}"))
}

/// Singular values in nonincreasing order.
pub fn singular_values(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values().map_err(svd_err)
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order.
pub fn hermitian_eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.self_adjoint_eigenvalues(Side::Lower).map_err(evd_err)
}

/// Eigenvalues (nondecreasing) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: MatRef<'_, c64>) -> Result<(Vec<f64>, CMat)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(evd_err)?;
    let vals = (0..n).map(|i| evd.S()[i].re).collect();
    Ok((vals, evd.U().to_owned()))
}

/// Orthonormal basis of the column space, keeping singular values above
/// `rank_tol * sigma_max`.
pub fn column_space(a: MatRef<'_, c64>, rank_tol: f64) -> Result<(CMat, ThresholdAudit)> {
    let (m, n) = (a.nrows(), a.ncols());
    if m == 0 || n == 0 {
        return Ok((Mat::zeros(m, 0), ThresholdAudit::new(0.0)));
    }
    budget::check_matrices(&[(m, n), (m, m.min(n)), (n, n)])?;
    let svd = a.thin_svd().map_err(svd_err)?;
    let s: Vec<f64> = (0..m.min(n)).map(|i| svd.S()[i].re).collect();
    let thr = rank_tol * s[0];
    let audit = ThresholdAudit::from_values(s.iter().copied(), thr);
    let k = if s[0] == 0.0 { 0 } else { s.iter().filter(|&&x| x > thr).count() };
    Ok((svd.U().subcols(0, k).to_owned(), audit))
}

/// Column space together with an orthonormal basis of its orthogonal
/// complement, both from one full singular value decomposition.
pub fn column_space_and_complement(a: MatRef<'_, c64>, rank_tol: f64) -> Result<(CMat, CMat, ThresholdAudit)> {
    let (m, n) = (a.nrows(), a.ncols());
    if n == 0 || m == 0 {
        return Ok((Mat::zeros(m, 0), identity(m), ThresholdAudit::new(0.0)));
    }
    budget::check_matrices(&[(m, n), (m, m), (n, n)])?;
    let svd = a.svd().map_err(svd_err)?;
    let s: Vec<f64> = (0..m.min(n)).map(|i| svd.S()[i].re).collect();
    let thr = rank_tol * s[0];
    let audit = ThresholdAudit::from_values(s.iter().copied(), thr);
    let k = if s[0] == 0.0 { 0 } else { s.iter().filter(|&&x| x > thr).count() };
    let u = svd.U();
    Ok((u.subcols(0, k).to_owned(), u.subcols(k, m - k).to_owned(), audit))
}

/// Right null space of `a`: directions whose singular value is at most the
/// absolute threshold `thr`. Missing singular values of wide matrices count
/// as zero.
pub fn null_space(a: MatRef<'_, c64>, thr: f64) -> Result<(CMat, ThresholdAudit)> {
    let (m, n) = (a.nrows(), a.ncols());
    if n == 0 {
        return Ok((Mat::zeros(0, 0), ThresholdAudit::new(thr)));
    }
    if m == 0 {
        return Ok((identity(n), ThresholdAudit::from_values(std::iter::repeat_n(0.0, n), thr)));
    }
    budget::check_matrices(&[(m, n), (m, m.min(n)), (n, n)])?;
    let svd = if m >= n { a.thin_svd() } else { a.svd() }.map_err(svd_err)?;
    let r = m.min(n);
    let s: Vec<f64> = (0..n).map(|i| if i < r { svd.S()[i].re } else { 0.0 }).collect();
    let audit = ThresholdAudit::from_values(s.iter().copied(), thr);
    let v = svd.V();
    let keep: Vec<usize> = (0..n).filter(|&i| s[i] <= thr).collect();
    Ok((Mat::from_fn(n, keep.len(), |i, j| v[(i, keep[j])]), audit))
}

/// Null space of a Hermitian positive semidefinite matrix: eigenvectors with
/// eigenvalue at most `thr`.
pub fn hermitian_null_space(g: MatRef<'_, c64>, thr: f64) -> Result<(CMat, ThresholdAudit)> {
    let n = g.nrows();
    budget::check_matrices(&[(n, n), (n, n)])?;
    let (vals, vecs) = hermitian_eigen(g)?;
    let audit = ThresholdAudit::from_values(vals.iter().copied(), thr);
    let k = vals.iter().take_while(|&&x| x <= thr).count();
    Ok((vecs.subcols(0, k).to_owned(), audit))
}

/// Orthonormalizes the columns of `a` (dropping numerically dependent ones).
pub fn orthonormalize(a: MatRef<'_, c64>, rank_tol: f64) -> Result<CMat> {
    Ok(column_space(a, rank_tol)?.0)
}

/// Largest principal angle (radians) between the spans of two orthonormal
/// bases. Subspaces of different dimension are reported as π/2 apart.
pub fn max_principal_angle(u: MatRef<'_, c64>, v: MatRef<'_, c64>) -> Result<f64> {
    assert_eq!(u.nrows(), v.nrows(), "ambient dimension mismatch");
    if u.ncols() != v.ncols() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    if u.ncols() == 0 {
        return Ok(0.0);
    }
    // sin of the largest angle = spectral norm of (1 - U U^†) V
    let proj = mul(u, adjoint_mul(u, v).as_ref());
    let resid = Mat::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] - proj[(i, j)]);
    let s = singular_values(resid.as_ref())?;
    Ok(s.first().copied().unwrap_or(0.0).min(1.0).asin())
}

/// `||(1 - U U^†) x|| / ||x||` for an orthonormal basis `U`.
pub fn residual_outside(u: MatRef<'_, c64>, x: &[c64]) -> f64 {
    let n = vec_norm(x);
    if n == 0.0 {
        return 0.0;
    }
    let xv = MatRef::from_column_major_slice(x, x.len(), 1);
    let coeff = adjoint_mul(u, xv);
    let proj = mul(u, coeff.as_ref());
    let r: f64 = (0..x.len()).map(|i| (x[i] - proj[(i, 0)]).norm_sqr()).sum();
    r.sqrt() / n
}

/// Max-abs deviation of `a` from Hermiticity.
pub fn hermiticity_defect(a: MatRef<'_, c64>) -> f64 {
    let n = a.nrows();
    let mut m = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            m = m.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    m
}
