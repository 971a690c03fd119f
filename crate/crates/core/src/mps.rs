//! Translation-invariant matrix product states.
//!
//! Index conventions, fixed for the whole crate:
//!
//! * A tensor entry is `A[i][α][β]`, physical index first.
//! * A basis state `|i_1 … i_n⟩` has the big-endian index
//!   `i_1 d^{n-1} + … + i_n` (site 1 most significant).
//! * The boundary matrix `X` of `tr[A^{i_1}⋯A^{i_n} X]` is vectorized in
//!   `(β, α)` order, i.e. `vec(X)[β·D + α] = X[β][α]`, which is the row-major
//!   flattening of `X`. Column `β·D + α` of the blocking map therefore holds
//!   the entries `(A^{i_1}⋯A^{i_n})[α][β]`.

use faer::{c64, Mat, MatRef};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ThresholdAudit, ONE, ZERO};

/// Default relative singular-value threshold for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// The tensor `A^i_{αβ}` of a translation-invariant MPS.
#[derive(Clone, Debug, PartialEq)]
pub struct MpsTensor {
    phys_dim: usize,
    bond_dim: usize,
    mats: Vec<CMat>,
}

impl MpsTensor {
    /// Builds a tensor from its `d` matrices of size `D x D`.
    pub fn from_matrices(mats: Vec<CMat>) -> Result<Self> {
        let d = mats.len();
        if d < 1 {
            return Err(Error::domain("an MPS tensor needs at least one physical level"));
        }
        let bond = mats[0].nrows();
        if bond < 1 {
            return Err(Error::domain("bond dimension must be at least 1"));
        }
        for (i, m) in mats.iter().enumerate() {
            if m.nrows() != bond || m.ncols() != bond {
                return Err(Error::domain(format!("A^{i} is {}x{}, expected {bond}x{bond}", m.nrows(), m.ncols())));
            }
            for c in 0..bond {
                for r in 0..bond {
                    if !(m[(r, c)].re.is_finite() && m[(r, c)].im.is_finite()) {
                        return Err(Error::domain(format!("A^{i}[{r}][{c}] is not finite")));
                    }
                }
            }
        }
        Ok(MpsTensor { phys_dim: d, bond_dim: bond, mats })
    }

    pub fn from_fn(d: usize, bond: usize, f: impl Fn(usize, usize, usize) -> c64) -> Result<Self> {
        Self::from_matrices((0..d).map(|i| Mat::from_fn(bond, bond, |a, b| f(i, a, b))).collect())
    }

    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }

    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    /// `A^i` as a `D x D` matrix.
    pub fn matrix(&self, i: usize) -> MatRef<'_, c64> {
        self.mats[i].as_ref()
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.mats
    }

    pub fn entry(&self, i: usize, alpha: usize, beta: usize) -> c64 {
        self.mats[i][(alpha, beta)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mats.iter().map(|m| linalg::frobenius(m.as_ref()).powi(2)).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> MpsTensor {
        MpsTensor {
            phys_dim: self.phys_dim,
            bond_dim: self.bond_dim,
            mats: self.mats.iter().map(|m| Mat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] * s)).collect(),
        }
    }

    /// Embeds the tensor into a larger physical space by appending zero
    /// matrices.
    pub fn padded(&self, new_d: usize) -> Result<MpsTensor> {
        if new_d < self.phys_dim {
            return Err(Error::domain("padding cannot shrink the physical dimension"));
        }
        let mut mats = self.mats.clone();
        mats.resize(new_d, Mat::zeros(self.bond_dim, self.bond_dim));
        MpsTensor::from_matrices(mats)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&MpsJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: MpsJson = serde_json::from_str(s)?;
        j.try_into()
    }
}

/// On-disk layout: `{"d": .., "D": .., "entries": [i][α][β] = [re, im]}`.
#[derive(Serialize, Deserialize)]
struct MpsJson {
    d: usize,
    #[serde(rename = "D")]
    bond: usize,
    entries: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<&MpsTensor> for MpsJson {
    fn from(a: &MpsTensor) -> Self {
        let entries = a
            .mats
            .iter()
            .map(|m| (0..a.bond_dim).map(|r| (0..a.bond_dim).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect())
            .collect();
        MpsJson { d: a.phys_dim, bond: a.bond_dim, entries }
    }
}

impl TryFrom<MpsJson> for MpsTensor {
    type Error = Error;

    fn try_from(j: MpsJson) -> Result<Self> {
        if j.entries.len() != j.d {
            return Err(Error::domain(format!("expected {} physical slices, found {}", j.d, j.entries.len())));
        }
        let mut mats = Vec::with_capacity(j.d);
        for (i, slice) in j.entries.iter().enumerate() {
            if slice.len() != j.bond || slice.iter().any(|row| row.len() != j.bond) {
                return Err(Error::domain(format!("slice {i} is not {0}x{0}", j.bond)));
            }
            mats.push(Mat::from_fn(j.bond, j.bond, |r, c| c64::new(slice[r][c][0], slice[r][c][1])));
        }
        MpsTensor::from_matrices(mats)
    }
}

/// An orthonormal basis of a subspace of `C^ambient_dim`.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub basis: CMat,
    /// Tolerance used when the basis was extracted.
    pub rank_tol: f64,
    /// Singular values (or sines) closest to the threshold on either side.
    pub audit: ThresholdAudit,
}

impl Subspace {
    pub fn new(basis: CMat, rank_tol: f64, audit: ThresholdAudit) -> Self {
        Subspace { ambient_dim: basis.nrows(), basis, rank_tol, audit }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace::new(Mat::zeros(ambient_dim, 0), 0.0, ThresholdAudit::new(0.0))
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace::new(linalg::identity(ambient_dim), 0.0, ThresholdAudit::new(0.0))
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_borderline(&self) -> bool {
        self.audit.borderline()
    }

    /// Max-abs deviation of `basis^† basis` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = linalg::adjoint_mul(self.basis.as_ref(), self.basis.as_ref());
        linalg::max_abs_diff(g.as_ref(), linalg::identity(self.dim()).as_ref())
    }

    /// Dense orthogonal projector onto the subspace.
    pub fn projector(&self) -> Result<CMat> {
        budget::check_matrices(&[(self.ambient_dim, self.ambient_dim)])?;
        Ok(linalg::mul(self.basis.as_ref(), self.basis.adjoint()))
    }

    /// `||(1 - Π) v|| / ||v||`.
    pub fn residual(&self, v: &[c64]) -> f64 {
        linalg::residual_outside(self.basis.as_ref(), v)
    }

    /// Largest principal angle to another subspace.
    pub fn max_angle_to(&self, other: &Subspace) -> Result<f64> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::domain("subspaces live in different ambient spaces"));
        }
        linalg::max_principal_angle(self.basis.as_ref(), other.basis.as_ref())
    }
}

/// Boundary condition of a finite chain.
#[derive(Clone, Debug)]
pub enum Boundary {
    /// `tr[A⋯A X]` with an explicit `D x D` matrix.
    Matrix(CMat),
    /// `X = 1`, the translation-invariant periodic state.
    Periodic,
}

/// Random tensor with i.i.d. standard complex Gaussian entries (real and
/// imaginary parts each `N(0, 1)`), drawn from ChaCha20 seeded with `seed`.
/// Entries are drawn in `i`, `α`, `β` order, real part first.
pub fn random_mps(d: usize, bond: usize, seed: u64) -> Result<MpsTensor> {
    if d < 2 || bond < 1 {
        return Err(Error::domain(format!("random_mps needs d >= 2 and D >= 1, got d={d}, D={bond}")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut mats = Vec::with_capacity(d);
    for _ in 0..d {
        let mut m: CMat = Mat::zeros(bond, bond);
        for a in 0..bond {
            for b in 0..bond {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                m[(a, b)] = c64::new(re, im);
            }
        }
        mats.push(m);
    }
    MpsTensor::from_matrices(mats)
}

/// Horizontal concatenation of all products `A^{i_1}⋯A^{i_n}` as a
/// `D x (D·d^n)` matrix with column `w·D + β`.
fn word_products(a: &MpsTensor, n: usize) -> Result<CMat> {
    let (d, bond) = (a.phys_dim, a.bond_dim);
    let words = budget::checked_pow(d, n)?;
    budget::check_matrices(&[(bond, bond * words), (bond, bond * words / d.max(1))])?;
    let mut cat = linalg::identity(bond);
    for _ in 0..n {
        let w = cat.ncols();
        let mut next: CMat = Mat::zeros(bond, d * w);
        for i in 0..d {
            faer::linalg::matmul::matmul(
                next.as_mut().subcols_mut(i * w, w),
                faer::Accum::Replace,
                a.matrix(i),
                cat.as_ref(),
                ONE,
                linalg::par(),
            );
        }
        cat = next;
    }
    Ok(cat)
}

/// The map `X ↦ |Ψ_ℓ[X]⟩` as a `d^ℓ x D²` matrix.
pub fn blocking_map(a: &MpsTensor, ell: usize) -> Result<CMat> {
    if ell < 1 {
        return Err(Error::domain("blocking map needs at least one site"));
    }
    let bond = a.bond_dim;
    let words = budget::checked_pow(a.phys_dim, ell)?;
    budget::check_matrices(&[(words, bond * bond), (bond, bond * words)])?;
    let cat = word_products(a, ell)?;
    Ok(Mat::from_fn(words, bond * bond, |w, col| {
        let (beta, alpha) = (col / bond, col % bond);
        cat[(alpha, w * bond + beta)]
    }))
}

/// The MPS space `S_ℓ = { |Ψ_ℓ[X]⟩ }` as an orthonormal basis.
pub fn mps_space(a: &MpsTensor, ell: usize, rank_tol: f64) -> Result<Subspace> {
    let p = blocking_map(a, ell)?;
    let (basis, audit) = linalg::column_space(p.as_ref(), rank_tol)?;
    Ok(Subspace::new(basis, rank_tol, audit))
}

/// `S_ℓ` together with an orthonormal basis of its complement in `(C^d)^⊗ℓ`.
pub(crate) fn mps_space_with_complement(a: &MpsTensor, ell: usize, rank_tol: f64) -> Result<(Subspace, CMat)> {
    let p = blocking_map(a, ell)?;
    let (basis, complement, audit) = linalg::column_space_and_complement(p.as_ref(), rank_tol)?;
    Ok((Subspace::new(basis, rank_tol, audit), complement))
}

/// `T_A = P_A^† P_A` for the `ℓ`-site blocking map, computed from powers of
/// the transfer matrix so that `P_A` is never formed.
pub fn gram_matrix(a: &MpsTensor, ell: usize) -> Result<CMat> {
    let bond = a.bond_dim;
    let n = bond * bond;
    budget::check_matrices(&[(n, n), (n, n), (n, n)])?;
    // E[(α,α'),(β,β')] = Σ_i conj(A^i[α,β]) A^i[α',β']
    let e: CMat = Mat::from_fn(n, n, |r, c| {
        let (al, alp) = (r / bond, r % bond);
        let (be, bep) = (c / bond, c % bond);
        a.mats.iter().fold(ZERO, |acc, m| acc + m[(al, be)].conj() * m[(alp, bep)])
    });
    let mut pow = linalg::identity(n);
    for _ in 0..ell {
        pow = linalg::mul(pow.as_ref(), e.as_ref());
    }
    // T[(β,α),(β',α')] = E^ℓ[(α,α'),(β,β')]
    Ok(Mat::from_fn(n, n, |r, c| {
        let (be, al) = (r / bond, r % bond);
        let (bep, alp) = (c / bond, c % bond);
        pow[(al * bond + alp, be * bond + bep)]
    }))
}

/// Rank of the `ℓ`-site blocking map.
pub fn mps_space_dim(a: &MpsTensor, ell: usize, rank_tol: f64) -> Result<usize> {
    let words = budget::checked_pow(a.phys_dim, ell)?;
    let n = a.bond_dim * a.bond_dim;
    if words.saturating_mul(n) <= GRAM_SWITCH {
        return Ok(mps_space(a, ell, rank_tol)?.dim());
    }
    let t = gram_matrix(a, ell)?;
    let vals = linalg::hermitian_eigenvalues(t.as_ref())?;
    let top = vals.last().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Ok(0);
    }
    Ok(vals.iter().filter(|&&v| v > rank_tol * top).count())
}

/// Blocking maps with more entries than this are ranked through `T_A`.
const GRAM_SWITCH: usize = 1 << 22;

/// Smallest `ℓ <= ell_max` with `dim S_ℓ = D²`.
pub fn injectivity_length(a: &MpsTensor, ell_max: usize, rank_tol: f64) -> Result<Option<usize>> {
    if ell_max < 1 {
        return Err(Error::domain("ell_max must be at least 1"));
    }
    let target = a.bond_dim * a.bond_dim;
    for ell in 1..=ell_max {
        let words = budget::checked_pow(a.phys_dim, ell)?;
        if words < target {
            continue;
        }
        if mps_space_dim(a, ell, rank_tol)? == target {
            return Ok(Some(ell));
        }
    }
    Ok(None)
}

/// `vec(X)` in `(β, α)` order.
pub fn vectorize_boundary(x: MatRef<'_, c64>) -> Vec<c64> {
    let bond = x.nrows();
    (0..bond * bond).map(|k| x[(k / bond, k % bond)]).collect()
}

/// Coefficients `tr[A^{i_1}⋯A^{i_n} X]` of the unnormalized `n`-site state.
pub fn state_vector(a: &MpsTensor, n: usize, boundary: &Boundary) -> Result<Vec<c64>> {
    let bond = a.bond_dim;
    let x = match boundary {
        Boundary::Periodic => linalg::identity(bond),
        Boundary::Matrix(x) => {
            if x.nrows() != bond || x.ncols() != bond {
                return Err(Error::domain(format!("boundary must be {bond}x{bond}")));
            }
            x.clone()
        }
    };
    let p = blocking_map(a, n)?;
    let v = vectorize_boundary(x.as_ref());
    let vm = MatRef::from_column_major_slice(&v, v.len(), 1);
    let out = linalg::mul(p.as_ref(), vm);
    Ok((0..out.nrows()).map(|r| out[(r, 0)]).collect())
}

/// State of a chain whose site tensors differ: `tr[B_1^{i_1}⋯B_n^{i_n} X]`.
pub fn inhomogeneous_state(sites: &[&MpsTensor], x: MatRef<'_, c64>) -> Result<Vec<c64>> {
    let first = sites.first().ok_or_else(|| Error::domain("empty chain"))?;
    let (d, bond) = (first.phys_dim, first.bond_dim);
    let words = budget::checked_pow(d, sites.len())?;
    budget::check_matrices(&[(bond, bond * words), (bond, bond * words)])?;
    // right-to-left: cat holds B_k⋯B_n X for all words, column w·D + β
    let mut cat = x.to_owned();
    for site in sites.iter().rev() {
        if site.phys_dim != d || site.bond_dim != bond {
            return Err(Error::domain("all sites must share d and D"));
        }
        let w = cat.ncols();
        let mut next: CMat = Mat::zeros(bond, d * w);
        for i in 0..d {
            faer::linalg::matmul::matmul(
                next.as_mut().subcols_mut(i * w, w),
                faer::Accum::Replace,
                site.matrix(i),
                cat.as_ref(),
                ONE,
                linalg::par(),
            );
        }
        cat = next;
    }
    Ok((0..words).map(|w| (0..bond).fold(ZERO, |acc, k| acc + cat[(k, w * bond + k)])).collect())
}
