//! The intersection engine run separately in each total-charge sector of a
//! U(1)-symmetric tensor.

use std::collections::BTreeMap;
use std::time::Instant;

use faer::linalg::matmul::matmul;
use faer::{c64, Accum, Mat, MatMut, MatRef};
use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{ChargeViolation, Error, Result};
use crate::linalg::{self, CMat, ThresholdAudit, ONE, ZERO};
use crate::mps::{blocking_map, MpsTensor, Subspace};

use super::{build_report, gram_null_space, sine_threshold, Block, IntersectOptions, IntersectionReport, IntersectionTrace};

/// Dimension of one charge sector of `I^ℓ_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorDim {
    pub length: usize,
    pub charge: i32,
    pub dim: usize,
}

/// Verifies `A^i_{αβ} ≠ 0 ⇒ bond[α] = bond[β] + charge[i]`.
pub fn check_charges(a: &MpsTensor, charges: &[i32], bond_charges: &[i32]) -> Result<()> {
    if charges.len() != a.phys_dim() || bond_charges.len() != a.bond_dim() {
        return Err(Error::domain(format!(
            "expected {} physical and {} bond charges, got {} and {}",
            a.phys_dim(),
            a.bond_dim(),
            charges.len(),
            bond_charges.len()
        )));
    }
    let scale = a.matrices().iter().map(|m| linalg::max_abs(m.as_ref())).fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    let mut bad = Vec::new();
    for (i, m) in a.matrices().iter().enumerate() {
        for al in 0..a.bond_dim() {
            for be in 0..a.bond_dim() {
                let x = m[(al, be)].norm();
                if x > tol && bond_charges[al] != bond_charges[be] + charges[i] {
                    bad.push(ChargeViolation { phys: i, left: al, right: be, magnitude: x });
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::ChargeInconsistent(bad))
    }
}

/// Charge bookkeeping for all words of a fixed length.
struct Words {
    charge: Vec<i32>,
    local: Vec<u32>,
    sectors: BTreeMap<i32, Vec<usize>>,
}

impl Words {
    fn new(charges: &[i32], len: usize) -> Self {
        let mut charge = vec![0i32];
        for _ in 0..len {
            charge = charge.iter().flat_map(|&q| charges.iter().map(move |&c| q + c)).collect();
        }
        let mut sectors: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        let mut local = vec![0u32; charge.len()];
        for (w, &q) in charge.iter().enumerate() {
            let list = sectors.entry(q).or_default();
            local[w] = list.len() as u32;
            list.push(w);
        }
        Words { charge, local, sectors }
    }

    fn sector(&self, q: i32) -> &[usize] {
        self.sectors.get(&q).map_or(&[], Vec::as_slice)
    }
}

/// `S_ℓ` restricted to one window charge, with its complement in that sector.
struct WindowSector {
    space: CMat,
    /// `K^†` for this sector, `nc x (sector size)`.
    kt: CMat,
}

fn window_sectors(
    a: &MpsTensor,
    ell: usize,
    bond: &[i32],
    rank_tol: f64,
    win: &Words,
) -> Result<(BTreeMap<i32, WindowSector>, ThresholdAudit)> {
    let p = blocking_map(a, ell)?;
    let sigma_max = linalg::singular_values(p.as_ref())?.first().copied().unwrap_or(0.0);
    let abs_thr = rank_tol * sigma_max;
    let bd = a.bond_dim();
    let mut audit = ThresholdAudit::new(abs_thr);
    let mut out = BTreeMap::new();
    for (&qw, rows) in &win.sectors {
        // column β·D+α carries bond charge difference bond[α] - bond[β]
        let cols: Vec<usize> = (0..bd * bd).filter(|&c| bond[c % bd] - bond[c / bd] == qw).collect();
        let sub = Mat::from_fn(rows.len(), cols.len(), |r, c| p[(rows[r], cols[c])]);
        let smax = if cols.is_empty() { 0.0 } else { linalg::singular_values(sub.as_ref())?[0] };
        let (space, comp) = if smax <= abs_thr {
            if smax > 0.0 {
                audit.record(smax);
            }
            (Mat::zeros(rows.len(), 0), linalg::identity(rows.len()))
        } else {
            let (s, k, au) = linalg::column_space_and_complement(sub.as_ref(), abs_thr / smax)?;
            audit.merge(&au);
            (s, k)
        };
        out.insert(qw, WindowSector { kt: comp.adjoint().to_owned(), space });
    }
    Ok((out, audit))
}

fn sector_null_space(m: MatRef<'_, c64>, thr: f64, block_bytes: u64) -> Result<(CMat, ThresholdAudit)> {
    let bytes = budget::complex_matrix_bytes(m.nrows(), m.ncols());
    if bytes > block_bytes && m.nrows() > m.ncols() {
        let g = linalg::adjoint_mul(m, m);
        gram_null_space(g.as_ref(), thr)
    } else {
        linalg::null_space(m, thr)
    }
}

/// `I^ℓ_L` computed sector by sector and returned as the direct sum.
///
/// `charges[i]` is the charge of physical state `i` and `bond_charges[α]`
/// that of bond state `α`; the tensor must satisfy
/// `A^i_{αβ} ≠ 0 ⇒ bond[α] = bond[β] + charge[i]`.
pub fn sector_blocked_intersection(
    a: &MpsTensor,
    charges: &[i32],
    bond_charges: &[i32],
    ell: usize,
    l: usize,
    opts: &IntersectOptions,
) -> Result<(Subspace, IntersectionReport)> {
    let started = Instant::now();
    check_charges(a, charges, bond_charges)?;
    if ell < 1 || l < ell {
        return Err(Error::domain("need 1 <= ℓ <= L"));
    }
    let d = a.phys_dim();
    let total = budget::checked_pow(d, l)?;
    let thr = sine_threshold(opts.angle_tol);
    let win = Words::new(charges, ell);
    let tail = Words::new(charges, ell - 1);
    let (wsec, s_audit) = window_sectors(a, ell, bond_charges, opts.rank_tol, &win)?;

    let mut words = Words::new(charges, ell);
    let mut basis: BTreeMap<i32, Block> =
        wsec.iter().filter(|(_, s)| s.space.ncols() > 0).map(|(&q, s)| (q, Block::from_mat(s.space.as_ref()))).collect();
    let dim_of = |b: &BTreeMap<i32, Block>| b.values().map(|x| x.cols).sum::<usize>();
    let bytes_of = |b: &BTreeMap<i32, Block>| b.values().map(Block::bytes).sum::<u64>();
    let mut dims = vec![(ell, dim_of(&basis))];
    let mut audits = vec![s_audit];
    let mut sectors: Vec<SectorDim> = basis.iter().map(|(&q, b)| SectorDim { length: ell, charge: q, dim: b.cols }).collect();
    let mut peak = bytes_of(&basis);
    let q = tail.charge.len();

    for k in ell..l {
        let next_words = Words::new(charges, k + 1);
        let prefixes = Words::new(charges, k + 1 - ell);
        let mut next: BTreeMap<i32, Block> = BTreeMap::new();
        let mut audit = ThresholdAudit::new(thr);
        let live = bytes_of(&basis);
        for (&target, target_words) in &next_words.sectors {
            // candidate blocks B^{target - q_i} ⊗ e_i
            let mut col_base = vec![0usize; d];
            let mut n_cand = 0;
            for i in 0..d {
                col_base[i] = n_cand;
                n_cand += basis.get(&(target - charges[i])).map_or(0, |b| b.cols);
            }
            if n_cand == 0 {
                continue;
            }
            // constraint rows grouped by window charge, then prefix, then complement index
            let mut row_base = BTreeMap::new();
            let mut n_rows = 0;
            for (&qw, ws) in &wsec {
                row_base.insert(qw, n_rows);
                n_rows += prefixes.sector(target - qw).len() * ws.kt.nrows();
            }
            let need = live
                + bytes_of(&next)
                + budget::complex_matrix_bytes(n_rows, n_cand)
                + budget::complex_matrix_bytes(n_rows, n_rows.min(n_cand))
                + 2 * budget::complex_matrix_bytes(n_cand, n_cand)
                + budget::complex_matrix_bytes(target_words.len(), n_cand);
            budget::check(need)?;
            peak = peak.max(need);
            let mut m: CMat = Mat::zeros(n_rows, n_cand);
            for i in 0..d {
                let Some(b) = basis.get(&(target - charges[i])) else { continue };
                for (&qw, ws) in &wsec {
                    let nc = ws.kt.nrows();
                    let ps = prefixes.sector(target - qw);
                    let ss = tail.sector(qw - charges[i]);
                    if nc == 0 || ps.is_empty() || ss.is_empty() {
                        continue;
                    }
                    let (np, ns, mb) = (ps.len(), ss.len(), b.cols);
                    let kt = Mat::from_fn(nc, ns, |c, si| ws.kt[(c, win.local[ss[si] * d + i] as usize)]);
                    let mut g = vec![ZERO; ns * np * mb];
                    for bc in 0..mb {
                        let src = &b.data[bc * b.rows..(bc + 1) * b.rows];
                        for (pi, &p) in ps.iter().enumerate() {
                            let dst = &mut g[ns * (pi + np * bc)..ns * (pi + np * bc + 1)];
                            for (si, &sw) in ss.iter().enumerate() {
                                dst[si] = src[words.local[p * q + sw] as usize];
                            }
                        }
                    }
                    let mut prod = vec![ZERO; nc * np * mb];
                    matmul(
                        MatMut::from_column_major_slice_mut(&mut prod, nc, np * mb),
                        Accum::Replace,
                        kt.as_ref(),
                        MatRef::from_column_major_slice(&g, ns, np * mb),
                        ONE,
                        linalg::par(),
                    );
                    let rb = row_base[&qw];
                    for bc in 0..mb {
                        for pi in 0..np {
                            for c in 0..nc {
                                m[(rb + pi * nc + c, col_base[i] + bc)] = prod[c + nc * (pi + np * bc)];
                            }
                        }
                    }
                }
            }
            let (z, au) = sector_null_space(m.as_ref(), thr, opts.block_bytes)?;
            audit.merge(&au);
            if z.ncols() == 0 {
                continue;
            }
            let rows = target_words.len();
            let mut data = vec![ZERO; rows * z.ncols()];
            for i in 0..d {
                let Some(b) = basis.get(&(target - charges[i])) else { continue };
                let y = linalg::mul(b.as_ref(), z.subrows(col_base[i], b.cols));
                let src_words = words.sector(target - charges[i]);
                for col in 0..z.ncols() {
                    let dst = &mut data[col * rows..(col + 1) * rows];
                    for (r, &w) in src_words.iter().enumerate() {
                        dst[next_words.local[w * d + i] as usize] = y[(r, col)];
                    }
                }
            }
            sectors.push(SectorDim { length: k + 1, charge: target, dim: z.ncols() });
            next.insert(target, Block { rows, cols: z.ncols(), data });
        }
        basis = next;
        words = next_words;
        dims.push((k + 1, dim_of(&basis)));
        audits.push(audit);
    }

    let dim = dim_of(&basis);
    budget::check(peak.max(budget::complex_matrix_bytes(total, dim) + bytes_of(&basis)))?;
    let mut full: CMat = Mat::zeros(total, dim);
    let mut c0 = 0;
    for (qs, b) in &basis {
        for (r, &w) in words.sector(*qs).iter().enumerate() {
            for c in 0..b.cols {
                full[(w, c0 + c)] = b.data[c * b.rows + r];
            }
        }
        c0 += b.cols;
    }
    let mut merged = ThresholdAudit::new(thr);
    for a in &audits[1..] {
        merged.merge(a);
    }
    let trace = IntersectionTrace { dims, audits, peak_memory: peak };
    let mut report = build_report(a, ell, trace, opts, started);
    report.sectors = sectors;
    Ok((Subspace::new(full, opts.angle_tol, merged), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersect::intersection_space;
    use crate::mps::random_mps;

    /// Random tensor with block structure `A^i_{αβ} ≠ 0` only when `b_α = b_β + q_i`.
    fn charged_random(charges: &[i32], bond: &[i32], seed: u64) -> MpsTensor {
        let r = random_mps(charges.len(), bond.len(), seed).unwrap();
        MpsTensor::from_fn(charges.len(), bond.len(), |i, al, be| if bond[al] == bond[be] + charges[i] { r.entry(i, al, be) } else { ZERO })
            .unwrap()
    }

    #[test]
    fn violations_are_listed() {
        let a = random_mps(2, 2, 0).unwrap();
        match check_charges(&a, &[1, -1], &[1, -1]) {
            Err(Error::ChargeInconsistent(v)) => assert!(!v.is_empty()),
            other => panic!("expected charge error, got {other:?}"),
        }
        assert!(matches!(check_charges(&a, &[1], &[0, 0]), Err(Error::Domain(_))));
    }

    #[test]
    fn blocked_matches_dense() {
        let charges = [1, 0, -1];
        let bond = [0, 1, -1];
        let a = charged_random(&charges, &bond, 4);
        check_charges(&a, &charges, &bond).unwrap();
        let opts = IntersectOptions::default();
        let (dense, rd) = intersection_space(&a, 2, 5, &opts).unwrap();
        let (blocked, rb) = sector_blocked_intersection(&a, &charges, &bond, 2, 5, &opts).unwrap();
        assert_eq!(rd.dims, rb.dims);
        assert!(dense.max_angle_to(&blocked).unwrap() < 1e-8);
        assert!(blocked.orthonormality_defect() < 1e-10);
        let total: usize = rb.sectors.iter().filter(|s| s.length == 5).map(|s| s.dim).sum();
        assert_eq!(total, blocked.dim());
    }
}
