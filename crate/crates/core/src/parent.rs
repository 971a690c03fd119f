//! Parent Hamiltonians `h^ℓ = 1 - Π_{S_ℓ}` and the chains built from them.

use faer::{c64, Mat, MatMut, MatRef};
use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{Error, Result};
use crate::intersect::{self, IntersectOptions};
use crate::linalg::{self, CMat, ONE, ZERO};
use crate::mps::{self, MpsTensor, Subspace};
use crate::spinalg::LocalOperator;

/// Largest Hilbert-space dimension for which `H_L` is assembled densely.
pub const DENSE_ASSEMBLY_MAX: usize = 4096;

/// One local term `h^ℓ` of the parent Hamiltonian.
#[derive(Clone, Debug)]
pub struct ParentTerm {
    /// The projector `h^ℓ` on `(C^d)^⊗ℓ`.
    pub base: LocalOperator,
    pub ell: usize,
    pub source_tol: f64,
    /// `S_ℓ`, the kernel of `h^ℓ`.
    pub space: Subspace,
    /// Orthonormal basis of the range of `h^ℓ`, so `h^ℓ = K K^†`.
    pub complement: CMat,
}

impl ParentTerm {
    /// Builds a term directly from a subspace of `(C^d)^⊗ℓ`.
    pub fn from_space(space: Subspace, complement: CMat, phys_dim: usize, ell: usize) -> Result<Self> {
        let n = budget::checked_pow(phys_dim, ell)?;
        if space.ambient_dim != n || complement.nrows() != n || space.dim() + complement.ncols() != n {
            return Err(Error::domain("subspace and complement do not split (C^d)^⊗ℓ"));
        }
        budget::check_matrices(&[(n, n)])?;
        let proj = linalg::mul(space.basis.as_ref(), space.basis.adjoint());
        let h = Mat::from_fn(n, n, |r, c| if r == c { ONE - proj[(r, c)] } else { -proj[(r, c)] });
        let source_tol = space.rank_tol;
        Ok(ParentTerm { base: LocalOperator::new_unchecked(ell, phys_dim, h), ell, source_tol, space, complement })
    }

    pub fn phys_dim(&self) -> usize {
        self.base.phys_dim
    }

    /// `S_ℓ` is the whole space, so the term vanishes.
    pub fn is_trivial(&self) -> bool {
        self.complement.ncols() == 0
    }

    pub fn rank(&self) -> usize {
        self.complement.ncols()
    }
}

/// `h^ℓ = 1 - Π_{S_ℓ}` for the MPS generated by `a`.
pub fn parent_term(a: &MpsTensor, ell: usize, rank_tol: f64) -> Result<ParentTerm> {
    let (space, complement) = mps::mps_space_with_complement(a, ell, rank_tol)?;
    ParentTerm::from_space(space, complement, a.phys_dim(), ell)
}

/// `Σ_{i=0}^{N-ℓ} h^ℓ_i v` without forming the chain Hamiltonian.
pub fn apply_obc_hamiltonian(term: &ParentTerm, n: usize, v: &[c64]) -> Result<Vec<c64>> {
    let d = term.phys_dim();
    let ell = term.ell;
    if n < ell {
        return Err(Error::domain(format!("chain of {n} sites is shorter than the term ({ell} sites)")));
    }
    let total = budget::checked_pow(d, n)?;
    if v.len() != total {
        return Err(Error::domain(format!("vector has length {}, expected d^N = {total}", v.len())));
    }
    budget::check_matrices(&[(total, 2)])?;
    let win = budget::checked_pow(d, ell)?;
    let mut out = vec![ZERO; total];
    for start in 0..=(n - ell) {
        let n_post = budget::checked_pow(d, n - ell - start)?;
        let slab = win * n_post;
        for (src, dst) in v.chunks_exact(slab).zip(out.chunks_exact_mut(slab)) {
            // slab viewed as (post x window), window index slow
            let s = MatRef::from_column_major_slice(src, n_post, win);
            let o = MatMut::from_column_major_slice_mut(dst, n_post, win);
            faer::linalg::matmul::matmul(o, faer::Accum::Add, s, term.base.matrix.transpose(), ONE, linalg::par());
        }
    }
    Ok(out)
}

/// Dense `Σ_{i=0}^{N-ℓ} h^ℓ_i` for `d^N <= DENSE_ASSEMBLY_MAX`.
pub fn assemble_obc_hamiltonian(term: &ParentTerm, n: usize) -> Result<CMat> {
    let d = term.phys_dim();
    let ell = term.ell;
    if n < ell {
        return Err(Error::domain(format!("chain of {n} sites is shorter than the term ({ell} sites)")));
    }
    let total = budget::checked_pow(d, n)?;
    if total > DENSE_ASSEMBLY_MAX {
        return Err(Error::Resource {
            requested: budget::complex_matrix_bytes(total, total),
            limit: budget::complex_matrix_bytes(DENSE_ASSEMBLY_MAX, DENSE_ASSEMBLY_MAX),
        });
    }
    budget::check_matrices(&[(total, total)])?;
    let win = budget::checked_pow(d, ell)?;
    let h = &term.base.matrix;
    let mut out: CMat = Mat::zeros(total, total);
    for start in 0..=(n - ell) {
        let n_post = budget::checked_pow(d, n - ell - start)?;
        let n_pre = total / (win * n_post);
        for pre in 0..n_pre {
            for post in 0..n_post {
                let base = pre * win * n_post + post;
                for uc in 0..win {
                    for ur in 0..win {
                        let x = h[(ur, uc)];
                        if x != ZERO {
                            out[(base + ur * n_post, base + uc * n_post)] += x;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Cyclic shift of a state so that site `r` becomes site 0:
/// `|i_0 … i_{N-1}⟩ ↦ |i_r … i_{N-1} i_0 … i_{r-1}⟩`.
pub(crate) fn rotate_sites(data: &[c64], rows: usize, cols: usize, d: usize, n: usize, r: usize) -> Vec<c64> {
    let r = r % n;
    if r == 0 {
        return data.to_vec();
    }
    let lo_size = d.pow((n - r) as u32);
    let hi_size = d.pow(r as u32);
    let mut out = vec![ZERO; data.len()];
    for c in 0..cols {
        let col = &data[c * rows..(c + 1) * rows];
        let dst = &mut out[c * rows..(c + 1) * rows];
        for hi in 0..hi_size {
            for lo in 0..lo_size {
                dst[lo * hi_size + hi] = col[hi * lo_size + lo];
            }
        }
    }
    out
}

/// Ground space of the periodic chain `Σ_{i cyclic} h^ℓ_i` on `N` sites.
///
/// The open-chain kernel comes from the intersection engine; the windows
/// that wrap around are then imposed as extra linear constraints.
pub fn pbc_kernel(term: &ParentTerm, n: usize, opts: &IntersectOptions) -> Result<Subspace> {
    let d = term.phys_dim();
    let ell = term.ell;
    if n < ell {
        return Err(Error::domain(format!("ring of {n} sites is shorter than the term ({ell} sites)")));
    }
    let (obc, _) = intersect::intersection_from_term(term, n, opts)?;
    let total = obc.ambient_dim;
    let m = obc.dim();
    if m == 0 || term.is_trivial() {
        return Ok(obc);
    }
    let data: Vec<c64> = (0..m).flat_map(|c| (0..total).map(move |r| (c, r))).map(|(c, r)| obc.basis[(r, c)]).collect();
    let nc = term.complement.ncols();
    let win = budget::checked_pow(d, ell)?;
    let n_pre = total / win;
    let wraps: Vec<usize> = (n - ell + 1..n).collect();
    budget::check_matrices(&[(total, m), (total, m), (wraps.len() * n_pre * nc, m)])?;
    let mut stacked: CMat = Mat::zeros(wraps.len() * n_pre * nc, m);
    let kt = term.complement.adjoint().to_owned();
    for (w, &start) in wraps.iter().enumerate() {
        // bring sites start..start+ℓ-1 (mod N) to the end of the chain
        let rotated = rotate_sites(&data, total, m, d, n, (start + ell) % n);
        let view = MatRef::from_column_major_slice(&rotated, win, n_pre * m);
        let prod = linalg::mul(kt.as_ref(), view);
        let block_rows = n_pre * nc;
        for c in 0..m {
            for p in 0..n_pre {
                for k in 0..nc {
                    stacked[(w * block_rows + p * nc + k, c)] = prod[(k, c * n_pre + p)];
                }
            }
        }
    }
    let thr = intersect::sine_threshold(opts.angle_tol);
    let (null, audit) = linalg::null_space(stacked.as_ref(), thr)?;
    let basis = linalg::mul(obc.basis.as_ref(), null.as_ref());
    let mut merged = obc.audit.clone();
    merged.merge(&audit);
    Ok(Subspace::new(basis, opts.angle_tol, merged))
}

/// The determinant witness `det[H_L^ℓ + (1 - h^L)]`, reported through its
/// spectrum because the raw value over- or underflows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetWitness {
    /// The smallest eigenvalue is below `ZERO_FLOOR` times the largest.
    pub zero: bool,
    /// `ln det` when nonzero.
    pub log_abs: Option<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl DetWitness {
    /// The determinant itself (0 when flagged zero; may be infinite).
    pub fn value(&self) -> f64 {
        self.log_abs.map_or(0.0, f64::exp)
    }
}

/// Relative eigenvalue floor below which the witness counts as zero.
pub const ZERO_FLOOR: f64 = 1e-9;

/// `f(A) = det[H_L^ℓ + (1 - h^L)]` on the open chain of `L` sites.
pub fn f_det(a: &MpsTensor, ell: usize, l: usize, rank_tol: f64) -> Result<DetWitness> {
    if l < ell {
        return Err(Error::domain("L must be at least ℓ"));
    }
    let target = a.bond_dim() * a.bond_dim();
    let term = parent_term(a, ell, rank_tol)?;
    if term.space.dim() != target {
        return Err(Error::precondition(format!("tensor is not injective on {ell} sites (dim S_ℓ = {}, D² = {target})", term.space.dim())));
    }
    let mut h = assemble_obc_hamiltonian(&term, l)?;
    let s_l = mps::mps_space(a, l, rank_tol)?;
    let proj = s_l.projector()?;
    for c in 0..h.ncols() {
        for r in 0..h.nrows() {
            h[(r, c)] += proj[(r, c)];
        }
    }
    let vals = linalg::hermitian_eigenvalues(h.as_ref())?;
    let min = vals[0];
    let max = *vals.last().unwrap();
    let zero = min < ZERO_FLOOR * max;
    let log_abs = if zero { None } else { Some(vals.iter().map(|v| v.ln()).sum()) };
    Ok(DetWitness { zero, log_abs, min_eigenvalue: min, max_eigenvalue: max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::{random_mps, state_vector, Boundary, DEFAULT_RANK_TOL};

    fn random_boundary(bond: usize, k: usize) -> CMat {
        Mat::from_fn(bond, bond, |r, c| c64::new(((r * 3 + c * 5 + k) % 7) as f64 - 3.0, ((r + 2 * c + k) % 5) as f64 - 2.0))
    }

    #[test]
    fn term_is_a_projector_of_the_right_rank() {
        let a = random_mps(3, 2, 4).unwrap();
        let t = parent_term(&a, 2, DEFAULT_RANK_TOL).unwrap();
        let h = &t.base.matrix;
        let h2 = linalg::mul(h.as_ref(), h.as_ref());
        assert!(linalg::max_abs_diff(h2.as_ref(), h.as_ref()) < 1e-10);
        assert!(linalg::hermiticity_defect(h.as_ref()) < 1e-10);
        assert_eq!(t.rank(), 9 - 4);
        assert!(!t.is_trivial());
    }

    #[test]
    fn trivial_term_is_flagged() {
        let a = random_mps(2, 3, 0).unwrap();
        let t = parent_term(&a, 2, DEFAULT_RANK_TOL).unwrap();
        assert!(t.is_trivial());
        let v: Vec<c64> = (0..8).map(|i| c64::new(i as f64, 0.0)).collect();
        assert!(apply_obc_hamiltonian(&t, 3, &v).unwrap().iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn mps_states_are_frustration_free() {
        for (d, bond, n) in [(3, 2, 5), (4, 3, 4), (5, 4, 4)] {
            let a = random_mps(d, bond, 11).unwrap();
            let t = parent_term(&a, 2, DEFAULT_RANK_TOL).unwrap();
            let mut xs: Vec<Boundary> = (0..10).map(|k| Boundary::Matrix(random_boundary(bond, k))).collect();
            xs.push(Boundary::Periodic);
            for x in &xs {
                let v = state_vector(&a, n, x).unwrap();
                let hv = apply_obc_hamiltonian(&t, n, &v).unwrap();
                assert!(linalg::vec_norm(&hv) < 1e-9 * linalg::vec_norm(&v));
            }
        }
    }

    #[test]
    fn single_window_is_the_term_itself() {
        let a = random_mps(3, 2, 2).unwrap();
        let t = parent_term(&a, 2, DEFAULT_RANK_TOL).unwrap();
        let v: Vec<c64> = (0..9).map(|i| c64::new(i as f64, 1.0 - i as f64)).collect();
        let hv = apply_obc_hamiltonian(&t, 2, &v).unwrap();
        let vm = MatRef::from_column_major_slice(&v, 9, 1);
        let want = linalg::mul(t.base.matrix.as_ref(), vm);
        for i in 0..9 {
            assert!((hv[i] - want[(i, 0)]).norm() < 1e-12);
        }
    }

    #[test]
    fn matrix_free_matches_dense_assembly() {
        let a = random_mps(3, 2, 8).unwrap();
        let t = parent_term(&a, 2, DEFAULT_RANK_TOL).unwrap();
        let h = assemble_obc_hamiltonian(&t, 4).unwrap();
        let v: Vec<c64> = (0..81).map(|i| c64::new((i % 7) as f64, (i % 3) as f64)).collect();
        let hv = apply_obc_hamiltonian(&t, 4, &v).unwrap();
        let dense = linalg::mul(h.as_ref(), MatRef::from_column_major_slice(&v, 81, 1));
        for i in 0..81 {
            assert!((hv[i] - dense[(i, 0)]).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_is_a_cyclic_shift() {
        // word 0b011 on three qubits, rotated by one site -> 0b110
        let mut v = vec![ZERO; 8];
        v[0b011] = ONE;
        let r = rotate_sites(&v, 8, 1, 2, 3, 1);
        assert_eq!(r[0b110], ONE);
    }

    #[test]
    fn periodic_kernel_matches_dense_diagonalization() {
        let a = random_mps(3, 2, 21).unwrap();
        let t = parent_term(&a, 2, DEFAULT_RANK_TOL).unwrap();
        let n = 5;
        let k = pbc_kernel(&t, n, &IntersectOptions::default()).unwrap();
        // dense ring Hamiltonian: open chain plus the wrap-around window
        let mut h = assemble_obc_hamiltonian(&t, n).unwrap();
        let total = 3usize.pow(n as u32);
        for c in 0..total {
            let mut e = vec![ZERO; total];
            e[c] = ONE;
            let rotated = rotate_sites(&e, total, 1, 3, n, 1);
            let mut applied = vec![ZERO; total];
            // window on the last two sites of the rotated chain = sites (N-1, 0)
            let hw = apply_last_window(&t, &rotated);
            let back = rotate_sites(&hw, total, 1, 3, n, n - 1);
            applied.copy_from_slice(&back);
            for r in 0..total {
                h[(r, c)] += applied[r];
            }
        }
        let vals = linalg::hermitian_eigenvalues(h.as_ref()).unwrap();
        let dense_dim = vals.iter().filter(|&&v| v < 1e-9).count();
        assert_eq!(k.dim(), dense_dim);
        assert_eq!(k.dim(), 1);
        let psi = state_vector(&a, n, &Boundary::Periodic).unwrap();
        assert!(k.residual(&psi) < 1e-9);
    }

    fn apply_last_window(t: &ParentTerm, v: &[c64]) -> Vec<c64> {
        let win = 9;
        let mut out = vec![ZERO; v.len()];
        for (src, dst) in v.chunks_exact(win).zip(out.chunks_exact_mut(win)) {
            for (r, x) in dst.iter_mut().enumerate() {
                *x = (0..win).map(|c| t.base.matrix[(r, c)] * src[c]).sum();
            }
        }
        out
    }

    #[test]
    fn f_det_positive_for_generic_and_rejects_non_injective() {
        let a = random_mps(3, 2, 3).unwrap();
        let f = f_det(&a, 2, 3, DEFAULT_RANK_TOL).unwrap();
        assert!(!f.zero && f.value() > 0.0);
        assert!(f.min_eigenvalue >= -1e-9 * f.max_eigenvalue);
        let b = random_mps(2, 3, 0).unwrap();
        assert!(matches!(f_det(&b, 2, 3, DEFAULT_RANK_TOL), Err(Error::Precondition(_))));
    }
}
