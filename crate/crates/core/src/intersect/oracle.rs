//! Reference intersection from one stacked constraint matrix.

use faer::Mat;

use crate::budget;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::mps::{mps_space_with_complement, MpsTensor, Subspace};

use super::{sine_threshold, IntersectOptions};

/// Largest `d^L` accepted by the oracle.
pub const ORACLE_MAX_DIM: usize = 4096;

/// `I^ℓ_L` as the null space of all window constraints `1 ⊗ K^† ⊗ 1`
/// stacked on top of each other, from one dense SVD.
///
/// The singular values of the stack are square roots of the eigenvalues of
/// the open-chain Hamiltonian, so the kernel is cut at the same sine
/// threshold as the iterative engine.
pub fn brute_force_intersection(a: &MpsTensor, ell: usize, l: usize, opts: &IntersectOptions) -> Result<Subspace> {
    if l < ell {
        return Err(Error::domain(format!("L = {l} is smaller than ℓ = {ell}")));
    }
    let d = a.phys_dim();
    let total = budget::checked_pow(d, l)?;
    if total > ORACLE_MAX_DIM {
        return Err(Error::Resource {
            requested: budget::complex_matrix_bytes(total, total),
            limit: budget::complex_matrix_bytes(ORACLE_MAX_DIM, ORACLE_MAX_DIM),
        });
    }
    let (space, k) = mps_space_with_complement(a, ell, opts.rank_tol)?;
    if l == ell {
        return Ok(space);
    }
    let nc = k.ncols();
    if nc == 0 {
        return Ok(Subspace::full(total));
    }
    let win = k.nrows();
    let n_windows = l - ell + 1;
    let rows = n_windows * (total / win) * nc;
    budget::check_matrices(&[(rows, total), (rows, total), (total, total)])?;
    let mut stack: CMat = Mat::zeros(rows, total);
    let mut row0 = 0;
    for start in 0..n_windows {
        let n_post = d.pow((l - ell - start) as u32);
        let n_pre = total / (win * n_post);
        for pre in 0..n_pre {
            for post in 0..n_post {
                for c in 0..nc {
                    let r = row0 + (pre * nc + c) * n_post + post;
                    for u in 0..win {
                        stack[(r, (pre * win + u) * n_post + post)] = k[(u, c)].conj();
                    }
                }
            }
        }
        row0 += n_pre * nc * n_post;
    }
    let (null, audit) = linalg::null_space(stack.as_ref(), sine_threshold(opts.angle_tol))?;
    Ok(Subspace::new(null, opts.angle_tol, audit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersect::intersection_space;
    use crate::mps::random_mps;

    #[test]
    fn oracle_matches_engine_on_small_instances() {
        let opts = IntersectOptions::default();
        for (d, bond) in [(3, 2), (4, 3)] {
            for seed in 0..3 {
                let a = random_mps(d, bond, seed).unwrap();
                let b = brute_force_intersection(&a, 2, 4, &opts).unwrap();
                let (s, _) = intersection_space(&a, 2, 4, &opts).unwrap();
                assert_eq!(b.dim(), s.dim());
                assert!(b.max_angle_to(&s).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn trivial_term_gives_full_space() {
        let a = random_mps(2, 3, 0).unwrap();
        assert_eq!(brute_force_intersection(&a, 2, 4, &IntersectOptions::default()).unwrap().dim(), 16);
    }

    #[test]
    fn size_cap() {
        let a = random_mps(5, 2, 0).unwrap();
        assert!(matches!(brute_force_intersection(&a, 2, 6, &IntersectOptions::default()), Err(Error::Resource { .. })));
    }
}
