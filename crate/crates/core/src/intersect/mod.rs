//! Joint kernels of window projectors: `I^ℓ_N = ⋂_i (C^d)^{⊗i} ⊗ S_ℓ ⊗ (C^d)^{⊗(N-ℓ-i)}`.
//!
//! The engine grows the intersection one site at a time. With `I_k` known,
//! `I_{k+1}` is the set of vectors in `I_k ⊗ C^d` annihilated by the window
//! term on the last `ℓ` sites. Only the constraint matrix
//! `M = (1 ⊗ K^†)(B_k ⊗ 1)` is ever built, where `K` spans the range of `h^ℓ`
//! and `B_k` is the current basis; its singular values are the sines of the
//! angles between candidate directions and the window space.

mod oracle;
mod sector;

use std::time::Instant;

use faer::linalg::matmul::matmul;
use faer::{c64, Accum, Mat, MatMut, MatRef};
use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ThresholdAudit, ONE, ZERO};
use crate::mps::{MpsTensor, Subspace};
use crate::parent::{parent_term, ParentTerm};

pub use oracle::brute_force_intersection;
pub use sector::{check_charges, sector_blocked_intersection, SectorDim};

pub const DEFAULT_ANGLE_TOL: f64 = 1e-8;

/// Default size of one streamed block of constraint rows.
pub const DEFAULT_BLOCK_BYTES: u64 = 64 << 20;

/// How the null space of each growth step's constraint matrix is found.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Dense when the constraint matrix fits in one block, streamed otherwise.
    #[default]
    Auto,
    /// Materialize the whole constraint matrix and take its SVD.
    Dense,
    /// Accumulate the Gram matrix over row blocks and diagonalize it.
    Streamed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntersectOptions {
    pub rank_tol: f64,
    pub angle_tol: f64,
    pub strategy: Strategy,
    pub block_bytes: u64,
}

impl Default for IntersectOptions {
    fn default() -> Self {
        IntersectOptions {
            rank_tol: crate::mps::DEFAULT_RANK_TOL,
            angle_tol: DEFAULT_ANGLE_TOL,
            strategy: Strategy::Auto,
            block_bytes: DEFAULT_BLOCK_BYTES,
        }
    }
}

/// Largest sine accepted as "inside": `cos θ >= 1 - angle_tol`.
pub fn sine_threshold(angle_tol: f64) -> f64 {
    (angle_tol * (2.0 - angle_tol)).max(0.0).sqrt()
}

/// Outcome of one intersection run, one entry per chain length.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub d: usize,
    #[serde(rename = "D")]
    pub bond_dim: usize,
    pub ell: usize,
    /// `(L, dim I^ℓ_L)` for `L = ℓ, ℓ+1, …`.
    pub dims: Vec<(usize, usize)>,
    /// `(L, dim I^ℓ_L == D²)`.
    pub verdicts: Vec<(usize, bool)>,
    pub descriptor: String,
    pub rank_tol: f64,
    pub angle_tol: f64,
    pub injective_on_ell: bool,
    /// Per-length threshold audits; entry 0 is the rank decision for `S_ℓ`.
    pub audits: Vec<ThresholdAudit>,
    pub borderline: bool,
    pub peak_memory: u64,
    pub wall_time: f64,
    /// Per-sector dimensions, filled by the charge-blocked engine only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sectors: Vec<SectorDim>,
}

impl IntersectionReport {
    pub fn dim_at(&self, l: usize) -> Option<usize> {
        self.dims.iter().find(|(x, _)| *x == l).map(|(_, k)| *k)
    }

    pub fn holds_at(&self, l: usize) -> Option<bool> {
        self.verdicts.iter().find(|(x, _)| *x == l).map(|(_, v)| *v)
    }

    /// `dim I^ℓ_L >= D²` at every length, checked only for tensors injective on `ℓ` sites.
    pub fn sanity_violations(&self) -> Vec<usize> {
        if !self.injective_on_ell {
            return Vec::new();
        }
        let target = self.bond_dim * self.bond_dim;
        self.dims.iter().filter(|(_, k)| *k < target).map(|(l, _)| *l).collect()
    }
}

/// Raw result of the growth loop.
#[derive(Clone, Debug)]
pub struct IntersectionTrace {
    pub dims: Vec<(usize, usize)>,
    pub audits: Vec<ThresholdAudit>,
    pub peak_memory: u64,
}

/// Contiguous column-major storage, so reshapes are free.
#[derive(Clone, Debug)]
pub(crate) struct Block {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<c64>,
}

impl Block {
    pub fn from_mat(m: MatRef<'_, c64>) -> Self {
        let (rows, cols) = (m.nrows(), m.ncols());
        let mut data = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            data.extend((0..rows).map(|r| m[(r, c)]));
        }
        Block { rows, cols, data }
    }

    pub fn as_ref(&self) -> MatRef<'_, c64> {
        MatRef::from_column_major_slice(&self.data, self.rows, self.cols)
    }

    pub fn bytes(&self) -> u64 {
        budget::complex_matrix_bytes(self.rows, self.cols)
    }
}

/// `K_i^†` for each value `i` of the last window site, `K_i[s, c] = K[s·d + i, c]`.
pub(crate) struct WindowOps {
    pub d: usize,
    pub q: usize,
    pub nc: usize,
    pub kts: Vec<CMat>,
}

impl WindowOps {
    pub fn new(complement: MatRef<'_, c64>, d: usize) -> Self {
        let nc = complement.ncols();
        let q = complement.nrows() / d;
        let kts = (0..d).map(|i| Mat::from_fn(nc, q, |c, s| complement[(s * d + i, c)].conj())).collect();
        WindowOps { d, q, nc, kts }
    }
}

/// Rows `p0..p1` (by prefix) of the constraint matrix, `(np·nc) x (d·m)`.
/// Row `p·nc + c`, column `i·m + b`.
fn constraint_rows(basis: &Block, ops: &WindowOps, p0: usize, p1: usize) -> Vec<c64> {
    let (q, m, np) = (ops.q, basis.cols, p1 - p0);
    let mut buf = vec![ZERO; q * np * m];
    for col in 0..m {
        let src = col * basis.rows;
        buf[col * q * np..(col + 1) * q * np].copy_from_slice(&basis.data[src + p0 * q..src + p1 * q]);
    }
    let r = np * ops.nc;
    let mut out = vec![ZERO; r * ops.d * m];
    let bview = MatRef::from_column_major_slice(&buf, q, np * m);
    for (i, kt) in ops.kts.iter().enumerate() {
        let dst = MatMut::from_column_major_slice_mut(&mut out[i * m * r..(i + 1) * m * r], ops.nc, np * m);
        matmul(dst, Accum::Replace, kt.as_ref(), bview, ONE, linalg::par());
    }
    out
}

/// Kernel of `M` from `M^† M`, audited in sine units.
pub(crate) fn gram_null_space(g: MatRef<'_, c64>, thr: f64) -> Result<(CMat, ThresholdAudit)> {
    let (vals, vecs) = linalg::hermitian_eigen(g)?;
    let sines: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
    let audit = ThresholdAudit::from_values(sines.iter().copied(), thr);
    let k = sines.iter().take_while(|&&s| s <= thr).count();
    Ok((vecs.subcols(0, k).to_owned(), audit))
}

/// `out[w·d + i, col] = (B Z_i)[w, col]` with `Z_i` the `i`-th row block of `z`.
pub(crate) fn assemble_next(basis: &Block, z: MatRef<'_, c64>, d: usize) -> Block {
    let m = basis.cols;
    let mnew = z.ncols();
    let rows = basis.rows * d;
    let mut data = vec![ZERO; rows * mnew];
    for i in 0..d {
        let y = linalg::mul(basis.as_ref(), z.subrows(i * m, m));
        for col in 0..mnew {
            let dst = &mut data[col * rows..(col + 1) * rows];
            for w in 0..basis.rows {
                dst[w * d + i] = y[(w, col)];
            }
        }
    }
    Block { rows, cols: mnew, data }
}

fn grow(basis: &Block, ops: &WindowOps, opts: &IntersectOptions, peak: &mut u64) -> Result<(Block, ThresholdAudit)> {
    let d = ops.d;
    let m = basis.cols;
    let n = d * m;
    let thr = sine_threshold(opts.angle_tol);
    if m == 0 {
        return Ok((Block { rows: basis.rows * d, cols: 0, data: Vec::new() }, ThresholdAudit::new(thr)));
    }
    let (z, audit) = if ops.nc == 0 {
        (linalg::identity(n), ThresholdAudit::new(thr))
    } else {
        let np_total = basis.rows / ops.q;
        let row_bytes = budget::complex_matrix_bytes(ops.nc, n);
        let total_bytes = row_bytes.saturating_mul(np_total as u64);
        let dense = match opts.strategy {
            Strategy::Dense => true,
            Strategy::Streamed => false,
            Strategy::Auto => total_bytes <= opts.block_bytes,
        };
        if dense {
            let rows = np_total * ops.nc;
            let need = basis.bytes() + total_bytes + budget::complex_matrix_bytes(rows, rows.min(n)) + budget::complex_matrix_bytes(n, n);
            budget::check(need)?;
            *peak = (*peak).max(need);
            let mdat = constraint_rows(basis, ops, 0, np_total);
            linalg::null_space(MatRef::from_column_major_slice(&mdat, rows, n), thr)?
        } else {
            let per_block = ((opts.block_bytes / row_bytes.max(1)) as usize).clamp(1, np_total);
            let need = basis.bytes()
                + row_bytes * per_block as u64
                + budget::complex_matrix_bytes(per_block * ops.q, m)
                + 2 * budget::complex_matrix_bytes(n, n);
            budget::check(need)?;
            *peak = (*peak).max(need);
            let mut g: CMat = Mat::zeros(n, n);
            let mut p0 = 0;
            while p0 < np_total {
                let p1 = (p0 + per_block).min(np_total);
                let mdat = constraint_rows(basis, ops, p0, p1);
                let mref = MatRef::from_column_major_slice(&mdat, (p1 - p0) * ops.nc, n);
                matmul(g.as_mut(), Accum::Add, mref.adjoint(), mref, ONE, linalg::par());
                p0 = p1;
            }
            gram_null_space(g.as_ref(), thr)?
        }
    };
    let out_need = basis.bytes()
        + budget::complex_matrix_bytes(basis.rows * d, z.ncols())
        + budget::complex_matrix_bytes(basis.rows, z.ncols())
        + budget::complex_matrix_bytes(n, z.ncols());
    budget::check(out_need)?;
    *peak = (*peak).max(out_need);
    Ok((assemble_next(basis, z.as_ref(), d), audit))
}

/// Growth loop that keeps whatever it reached when a step fails.
pub(crate) struct PartialRun {
    pub space: Option<Subspace>,
    pub trace: IntersectionTrace,
    pub error: Option<Error>,
}

fn grow_until(term: &ParentTerm, l: usize, stop_dim: Option<usize>, opts: &IntersectOptions) -> Result<PartialRun> {
    let ell = term.ell;
    if l < ell {
        return Err(Error::domain(format!("L = {l} is smaller than ℓ = {ell}")));
    }
    let d = term.phys_dim();
    budget::checked_pow(d, l)?;
    let ops = WindowOps::new(term.complement.as_ref(), d);
    let mut basis = Block::from_mat(term.space.basis.as_ref());
    let mut peak = basis.bytes() + budget::complex_matrix_bytes(term.complement.nrows(), term.complement.ncols());
    let mut dims = vec![(ell, basis.cols)];
    let mut audits = vec![term.space.audit.clone()];
    let mut error = None;
    for k in ell..l {
        if k > ell && stop_dim.is_some_and(|t| basis.cols == t) {
            break;
        }
        match grow(&basis, &ops, opts, &mut peak) {
            Ok((next, audit)) => {
                basis = next;
                dims.push((k + 1, basis.cols));
                audits.push(audit);
            }
            Err(e) => {
                error = Some(e);
                break;
            }
        }
    }
    let mut merged = ThresholdAudit::new(sine_threshold(opts.angle_tol));
    for a in &audits[1..] {
        merged.merge(a);
    }
    let space = error.is_none().then(|| {
        let basis = MatRef::from_column_major_slice(&basis.data, basis.rows, basis.cols).to_owned();
        Subspace::new(basis, opts.angle_tol, merged)
    });
    Ok(PartialRun { space, trace: IntersectionTrace { dims, audits, peak_memory: peak }, error })
}

/// Runs the growth loop from `S_ℓ` up to `L` sites.
pub fn intersection_from_term(term: &ParentTerm, l: usize, opts: &IntersectOptions) -> Result<(Subspace, IntersectionTrace)> {
    let run = grow_until(term, l, None, opts)?;
    match (run.error, run.space) {
        (Some(e), _) => Err(e),
        (None, Some(space)) => Ok((space, run.trace)),
        (None, None) => unreachable!("a finished run always has a space"),
    }
}

/// Dimensions of `I^ℓ_k` for `k = ℓ, …, l_max`, stopping early once the
/// dimension equals `D²` if `stop_at_target` is set. A failing step (for
/// example the memory budget) ends the scan; the report then holds the
/// lengths reached and the error is returned alongside.
pub fn intersection_scan(
    a: &MpsTensor,
    ell: usize,
    l_max: usize,
    stop_at_target: bool,
    opts: &IntersectOptions,
) -> Result<(IntersectionReport, Option<Error>)> {
    let started = Instant::now();
    let term = parent_term(a, ell, opts.rank_tol)?;
    let target = a.bond_dim() * a.bond_dim();
    let run = grow_until(&term, l_max, stop_at_target.then_some(target), opts)?;
    Ok((build_report(a, ell, run.trace, opts, started), run.error))
}

pub(crate) fn build_report(
    a: &MpsTensor,
    ell: usize,
    trace: IntersectionTrace,
    opts: &IntersectOptions,
    started: Instant,
) -> IntersectionReport {
    let target = a.bond_dim() * a.bond_dim();
    let injective = trace.dims.first().is_some_and(|&(_, k)| k == target);
    let verdicts = trace.dims.iter().map(|&(l, k)| (l, k == target)).collect();
    let borderline = trace.audits.iter().any(ThresholdAudit::borderline);
    IntersectionReport {
        d: a.phys_dim(),
        bond_dim: a.bond_dim(),
        ell,
        dims: trace.dims,
        verdicts,
        descriptor: String::new(),
        rank_tol: opts.rank_tol,
        angle_tol: opts.angle_tol,
        injective_on_ell: injective,
        audits: trace.audits,
        borderline,
        peak_memory: trace.peak_memory,
        wall_time: started.elapsed().as_secs_f64(),
        sectors: Vec::new(),
    }
}

/// `I^ℓ_L` and the dimensions of every intermediate `I^ℓ_k`, `ℓ <= k <= L`.
pub fn intersection_space(a: &MpsTensor, ell: usize, l: usize, opts: &IntersectOptions) -> Result<(Subspace, IntersectionReport)> {
    let started = Instant::now();
    let term = parent_term(a, ell, opts.rank_tol)?;
    let (space, trace) = intersection_from_term(&term, l, opts)?;
    Ok((space, build_report(a, ell, trace, opts, started)))
}

/// `Int(ℓ, L)`: `dim I^ℓ_L = D²`.
pub fn int_holds(a: &MpsTensor, ell: usize, l: usize, opts: &IntersectOptions) -> Result<bool> {
    let (space, _) = intersection_space(a, ell, l, opts)?;
    Ok(space.dim() == a.bond_dim() * a.bond_dim())
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Transitivity {
    pub int_ell_l: bool,
    pub int_l_n: bool,
    pub int_ell_n: bool,
}

impl Transitivity {
    /// `Int(ℓ,L) ∧ Int(L,N) ⇒ Int(ℓ,N)`.
    pub fn consistent(&self) -> bool {
        !(self.int_ell_l && self.int_l_n) || self.int_ell_n
    }
}

/// Computes the three verdicts entering the transitivity implication.
pub fn transitivity_check(a: &MpsTensor, ell: usize, l: usize, n: usize, opts: &IntersectOptions) -> Result<Transitivity> {
    if !(ell <= l && l <= n) {
        return Err(Error::domain("need ℓ <= L <= N"));
    }
    Ok(Transitivity { int_ell_l: int_holds(a, ell, l, opts)?, int_l_n: int_holds(a, l, n, opts)?, int_ell_n: int_holds(a, ell, n, opts)? })
}

/// Parameter-counting bound `d^L - (L-ℓ+1)(d^ℓ - D²) d^{L-ℓ}`; may be negative.
pub fn dim_lower_bound(d: usize, bond: usize, ell: usize, l: usize) -> Result<i128> {
    if ell < 1 || l < ell {
        return Err(Error::domain("need 1 <= ℓ <= L"));
    }
    let overflow = || Error::domain("lower bound overflows");
    let dd = d as i128;
    let pow = |e: usize| dd.checked_pow(e as u32).ok_or_else(overflow);
    let windows = (l - ell + 1) as i128;
    let per_window = pow(ell)? - (bond as i128) * (bond as i128);
    let removed = windows.checked_mul(per_window).and_then(|x| x.checked_mul(pow(l - ell).ok()?)).ok_or_else(overflow)?;
    Ok(pow(l)? - removed)
}

/// `U ∩ V` from the SVD of `U^† V`: right singular directions with
/// `1 - σ <= angle_tol`, mapped through `V` and re-orthonormalized.
pub fn intersect_subspaces(u: &Subspace, v: &Subspace, angle_tol: f64) -> Result<Subspace> {
    if u.ambient_dim != v.ambient_dim {
        return Err(Error::domain(format!("ambient dimensions differ ({} vs {})", u.ambient_dim, v.ambient_dim)));
    }
    if u.dim() == 0 || v.dim() == 0 {
        return Ok(Subspace::new(Mat::zeros(u.ambient_dim, 0), angle_tol, ThresholdAudit::new(angle_tol)));
    }
    let overlap = linalg::adjoint_mul(u.basis.as_ref(), v.basis.as_ref());
    let svd = overlap.svd().map_err(|e| Error::Numerical(format!("svd failed: {e:?}")))?;
    let k = u.dim().min(v.dim());
    let sig: Vec<f64> = (0..k).map(|i| svd.S()[i].re).collect();
    let audit = ThresholdAudit::from_values(sig.iter().map(|s| 1.0 - s), angle_tol);
    let keep = sig.iter().filter(|&&s| 1.0 - s <= angle_tol).count();
    let dirs = linalg::mul(v.basis.as_ref(), svd.V().subcols(0, keep));
    let basis = if keep == 0 { dirs } else { linalg::column_space(dirs.as_ref(), 0.5)?.0 };
    Ok(Subspace::new(basis, angle_tol, audit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::{mps_space, random_mps, state_vector, Boundary, DEFAULT_RANK_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_orthonormal(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
        let m = Mat::from_fn(rows, cols, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        linalg::orthonormalize(m.as_ref(), 1e-12).unwrap()
    }

    fn sub(m: CMat) -> Subspace {
        Subspace::new(m, 0.0, ThresholdAudit::new(0.0))
    }

    #[test]
    fn planted_intersection_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let all = random_orthonormal(6, 5, &mut rng);
        // shared plane = cols 0,1; U adds col 2; V adds cols 3,4
        let pick = |cols: &[usize]| Mat::from_fn(6, cols.len(), |r, c| all[(r, cols[c])]);
        let plane = sub(pick(&[0, 1]));
        let mix = |m: CMat, rng: &mut ChaCha8Rng| {
            let k = m.ncols();
            let r = random_orthonormal(k, k, rng);
            sub(linalg::mul(m.as_ref(), r.as_ref()))
        };
        let u = mix(pick(&[0, 1, 2]), &mut rng);
        let v = mix(pick(&[0, 1, 3, 4]), &mut rng);
        let w = intersect_subspaces(&u, &v, DEFAULT_ANGLE_TOL).unwrap();
        assert_eq!(w.dim(), 2);
        assert!(w.max_angle_to(&plane).unwrap() < 1e-8);
        assert!(w.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn intersect_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let all = random_orthonormal(5, 4, &mut rng);
        let u = sub(all.subcols(0, 2).to_owned());
        let v = sub(all.subcols(2, 2).to_owned());
        assert_eq!(intersect_subspaces(&u, &u, DEFAULT_ANGLE_TOL).unwrap().dim(), 2);
        assert_eq!(intersect_subspaces(&u, &v, DEFAULT_ANGLE_TOL).unwrap().dim(), 0);
        let other = sub(random_orthonormal(4, 2, &mut rng));
        assert!(matches!(intersect_subspaces(&u, &other, DEFAULT_ANGLE_TOL), Err(Error::Domain(_))));
    }

    #[test]
    fn sine_threshold_matches_cosine_criterion() {
        let t = 1e-8;
        let s = sine_threshold(t);
        assert!(((1.0 - s * s).sqrt() - (1.0 - t)).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_values() {
        assert_eq!(dim_lower_bound(5, 4, 2, 3).unwrap(), 35);
        assert_eq!(dim_lower_bound(6, 5, 2, 3).unwrap(), 84);
        assert_eq!(dim_lower_bound(5, 4, 2, 4).unwrap(), -50);
        assert_eq!(dim_lower_bound(5, 4, 2, 2).unwrap(), 16);
    }

    #[test]
    fn table_row_d5_bond4() {
        let a = random_mps(5, 4, 0).unwrap();
        let (space, rep) = intersection_space(&a, 2, 5, &IntersectOptions::default()).unwrap();
        let dims: Vec<usize> = rep.dims.iter().map(|x| x.1).collect();
        assert_eq!(dims, vec![16, 35, 31, 16]);
        assert_eq!(rep.verdicts.last(), Some(&(5, true)));
        assert!(!rep.borderline);
        assert!(space.orthonormality_defect() < 1e-10);
        // the intersection equals S_5
        let s5 = mps_space(&a, 5, DEFAULT_RANK_TOL).unwrap();
        assert!(space.max_angle_to(&s5).unwrap() < 1e-8);
    }

    #[test]
    fn dense_and_streamed_agree() {
        let a = random_mps(4, 3, 2).unwrap();
        let dense = IntersectOptions { strategy: Strategy::Dense, ..Default::default() };
        let streamed = IntersectOptions { strategy: Strategy::Streamed, block_bytes: 4096, ..Default::default() };
        let (s1, r1) = intersection_space(&a, 2, 5, &dense).unwrap();
        let (s2, r2) = intersection_space(&a, 2, 5, &streamed).unwrap();
        assert_eq!(r1.dims, r2.dims);
        assert!(s1.max_angle_to(&s2).unwrap() < 1e-8);
    }

    #[test]
    fn contains_every_mps_state() {
        let a = random_mps(3, 2, 9).unwrap();
        let (space, rep) = intersection_space(&a, 2, 5, &IntersectOptions::default()).unwrap();
        assert!(rep.sanity_violations().is_empty());
        let v = state_vector(&a, 5, &Boundary::Periodic).unwrap();
        assert!(space.residual(&v) < 1e-9);
    }

    #[test]
    fn l_equal_ell_gives_s_ell() {
        let a = random_mps(3, 2, 1).unwrap();
        let (space, rep) = intersection_space(&a, 2, 2, &IntersectOptions::default()).unwrap();
        assert_eq!(rep.dims, vec![(2, 4)]);
        let s2 = mps_space(&a, 2, DEFAULT_RANK_TOL).unwrap();
        assert!(space.max_angle_to(&s2).unwrap() < 1e-10);
    }

    #[test]
    fn transitivity_on_random_instance() {
        let a = random_mps(4, 3, 3).unwrap();
        let t = transitivity_check(&a, 2, 3, 4, &IntersectOptions::default()).unwrap();
        assert!(t.int_ell_l && t.int_l_n && t.int_ell_n && t.consistent());
        let vacuous = Transitivity { int_ell_l: false, int_l_n: true, int_ell_n: false };
        assert!(vacuous.consistent());
    }

    #[test]
    fn scan_stops_at_target_and_keeps_partial_dims() {
        let a = random_mps(5, 4, 0).unwrap();
        let opts = IntersectOptions::default();
        let (rep, err) = intersection_scan(&a, 2, 8, true, &opts).unwrap();
        assert!(err.is_none());
        assert_eq!(rep.dims.last(), Some(&(5, 16)));
        let (rep, err) = budget::with_limit(4 << 20, || intersection_scan(&a, 2, 5, false, &opts).unwrap());
        assert!(matches!(err, Some(Error::Resource { .. })));
        assert!(!rep.dims.is_empty() && rep.dims.len() < 4);
    }

    #[test]
    fn memory_cap_is_reported() {
        let a = random_mps(5, 4, 0).unwrap();
        let opts = IntersectOptions::default();
        budget::with_limit(1 << 16, || {
            assert!(matches!(intersection_space(&a, 2, 5, &opts), Err(Error::Resource { .. })));
        });
    }
}
