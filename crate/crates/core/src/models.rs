//! Concrete model families: AKLT and its spin-`j` generalizations, weight
//! vectors and exceptional models, the spin-2 Hamiltonian family, tensors
//! with degenerate ground spaces, and bond-spin sequence counting.

use std::fmt;
use std::str::FromStr;

use faer::{c64, Mat};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ThresholdAudit, ONE, ZERO};
use crate::mps::{self, MpsTensor, Subspace};
use crate::parent::{apply_obc_hamiltonian, parent_term};
use crate::spinalg::{cg, coupled_state, heisenberg_poly, spin_projector_matrix, HalfInt, LocalOperator};

/// Virtual spin `j`, physical spin `J` and bond spin `Q` of a generalized
/// AKLT model. Written as `"j=3/2 J=2 Q=0"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AkltSpec {
    pub j: HalfInt,
    #[serde(rename = "J")]
    pub big_j: HalfInt,
    #[serde(rename = "Q")]
    pub q: HalfInt,
}

impl AkltSpec {
    pub fn new(j: HalfInt, big_j: HalfInt, q: HalfInt) -> Result<Self> {
        if j.twice < 1 {
            return Err(Error::domain(format!("virtual spin must be positive, got {j}")));
        }
        if big_j.twice < 0 || big_j.twice > 2 * j.twice || !big_j.is_integer() {
            return Err(Error::domain(format!("physical spin {big_j} is not contained in {j} ⊗ {j}")));
        }
        if q.twice < 0 || q.twice > 2 * j.twice || !q.is_integer() {
            return Err(Error::domain(format!("bond spin {q} is not contained in {j} ⊗ {j}")));
        }
        Ok(AkltSpec { j, big_j, q })
    }

    pub fn phys_dim(&self) -> usize {
        self.big_j.multiplicity()
    }

    pub fn bond_dim(&self) -> usize {
        self.j.multiplicity()
    }

    /// Charges `2M` of the physical states and `2a` of the bond states, in
    /// the descending-`m` order used by [`generalized_aklt`].
    pub fn u1_charges(&self) -> (Vec<i32>, Vec<i32>) {
        (self.big_j.projections().map(|m| m.twice).collect(), self.j.projections().map(|m| m.twice).collect())
    }
}

impl fmt::Display for AkltSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "j={} J={} Q={}", self.j, self.big_j, self.q)
    }
}

impl FromStr for AkltSpec {
    type Err = Error;

    /// `Q` may be omitted and defaults to 0.
    fn from_str(s: &str) -> Result<Self> {
        let (mut j, mut big_j, mut q) = (None, None, HalfInt::ZERO);
        for tok in s.split_whitespace() {
            let (key, val) = tok.split_once('=').ok_or_else(|| Error::domain(format!("expected key=value, got {tok:?}")))?;
            let v: HalfInt = val.parse()?;
            match key {
                "j" => j = Some(v),
                "J" => big_j = Some(v),
                "Q" => q = v,
                _ => return Err(Error::domain(format!("unknown key {key:?} in model spec"))),
            }
        }
        let j = j.ok_or_else(|| Error::domain("model spec is missing j"))?;
        let big_j = big_j.ok_or_else(|| Error::domain("model spec is missing J"))?;
        AkltSpec::new(j, big_j, q)
    }
}

/// Spin-1 AKLT tensor in the basis `m = +1, 0, -1`:
/// `A^{+1} = √2 σ⁺`, `A^0 = -σ^z`, `A^{-1} = -√2 σ⁻`.
pub fn aklt_tensor() -> MpsTensor {
    let s = std::f64::consts::SQRT_2;
    let entries = [[[0.0, s], [0.0, 0.0]], [[-1.0, 0.0], [0.0, 1.0]], [[0.0, 0.0], [-s, 0.0]]];
    MpsTensor::from_fn(3, 2, |i, a, b| c64::new(entries[i][a][b], 0.0)).expect("fixed AKLT entries are valid")
}

/// `A^{(M)}_{ab} = Σ_{b'} ⟨j a; j b'|J M⟩ B_{b'b}` with the bond matrix
/// `B_{b'b} = ⟨j b'; j b|Q 0⟩`, normalized to unit Frobenius norm.
pub fn generalized_aklt(spec: &AkltSpec) -> Result<MpsTensor> {
    let AkltSpec { j, big_j, q } = *spec;
    let ms: Vec<HalfInt> = j.projections().collect();
    let big_ms: Vec<HalfInt> = big_j.projections().collect();
    let bond = ms.len();
    let mut b = vec![0.0; bond * bond];
    for r in 0..bond {
        for c in 0..bond {
            b[r * bond + c] = cg(j, ms[r], j, ms[c], q, HalfInt::ZERO)?;
        }
    }
    let mut entries = vec![0.0; big_ms.len() * bond * bond];
    for (i, &m) in big_ms.iter().enumerate() {
        for a in 0..bond {
            for bp in 0..bond {
                let c = cg(j, ms[a], j, ms[bp], big_j, m)?;
                if c == 0.0 {
                    continue;
                }
                for bb in 0..bond {
                    entries[(i * bond + a) * bond + bb] += c * b[bp * bond + bb];
                }
            }
        }
    }
    let norm = entries.iter().map(|x| x * x).sum::<f64>().sqrt();
    MpsTensor::from_fn(big_ms.len(), bond, |i, a, bb| c64::new(entries[(i * bond + a) * bond + bb] / norm, 0.0))
}

/// Relative threshold below which a weight `w_S` counts as zero.
pub const DEFAULT_WEIGHT_TOL: f64 = 1e-12;

/// Decomposition `P = Σ_S w_S P_S` of the two-site map of a singlet-bond model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: Vec<(HalfInt, f64)>,
    pub zero_flags: Vec<HalfInt>,
    /// `‖P - Σ w_S P_S‖_F / ‖P‖_F`.
    pub residual: f64,
    /// The two smallest `|w_S| / max|w_S|`, for auditing the zero threshold.
    pub smallest_relative: Vec<f64>,
}

impl WeightVector {
    pub fn weight(&self, s: HalfInt) -> Option<f64> {
        self.weights.iter().find(|(x, _)| *x == s).map(|(_, w)| *w)
    }
}

/// The two-site map from the outer virtual spins `(a, b')` to `J ⊗ J`,
/// `d² x D²` with column `a·D + b'`.
fn two_site_map(spec: &AkltSpec) -> Result<CMat> {
    let AkltSpec { j, big_j, q } = *spec;
    let ms: Vec<HalfInt> = j.projections().collect();
    let big_ms: Vec<HalfInt> = big_j.projections().collect();
    let (bond, d) = (ms.len(), big_ms.len());
    let mut bmat = vec![0.0; bond * bond];
    for r in 0..bond {
        for c in 0..bond {
            bmat[r * bond + c] = cg(j, ms[r], j, ms[c], q, HalfInt::ZERO)?;
        }
    }
    // v[M][x][y] = <j x; j y | J M>
    let mut v = vec![0.0; d * bond * bond];
    for (mi, &m) in big_ms.iter().enumerate() {
        for x in 0..bond {
            for y in 0..bond {
                v[(mi * bond + x) * bond + y] = cg(j, ms[x], j, ms[y], big_j, m)?;
            }
        }
    }
    let mut p: CMat = Mat::zeros(d * d, bond * bond);
    for m1 in 0..d {
        for m2 in 0..d {
            for a in 0..bond {
                for bp in 0..bond {
                    let mut acc = 0.0;
                    for cp in 0..bond {
                        let left = v[(m1 * bond + a) * bond + cp];
                        if left == 0.0 {
                            continue;
                        }
                        for c in 0..bond {
                            acc += left * bmat[cp * bond + c] * v[(m2 * bond + c) * bond + bp];
                        }
                    }
                    p[(m1 * d + m2, a * bond + bp)] = c64::new(acc, 0.0);
                }
            }
        }
    }
    Ok(p)
}

/// `Σ_M |S M⟩_{J⊗J} ⟨S M|_{j⊗j}`.
fn spin_isometry(j: HalfInt, big_j: HalfInt, s: HalfInt) -> Result<CMat> {
    let (d, bond) = (big_j.multiplicity(), j.multiplicity());
    let mut p: CMat = Mat::zeros(d * d, bond * bond);
    for m in s.projections() {
        let out = coupled_state(big_j, big_j, s, m)?;
        let inp = coupled_state(j, j, s, m)?;
        for (c, x) in inp.iter().enumerate() {
            if *x == ZERO {
                continue;
            }
            for (r, y) in out.iter().enumerate() {
                p[(r, c)] += *y * x.conj();
            }
        }
    }
    Ok(p)
}

pub fn weight_vector(spec: &AkltSpec) -> Result<WeightVector> {
    weight_vector_with_tol(spec, DEFAULT_WEIGHT_TOL)
}

/// `w_S = tr[P_S^† P] / (2S + 1)` for `S = 0, …, 2j`.
pub fn weight_vector_with_tol(spec: &AkltSpec, zero_tol: f64) -> Result<WeightVector> {
    if spec.q != HalfInt::ZERO {
        return Err(Error::domain("weights are defined for singlet bonds (Q = 0) only"));
    }
    let p = two_site_map(spec)?;
    let mut recon: CMat = Mat::zeros(p.nrows(), p.ncols());
    let mut weights = Vec::new();
    for s2 in (0..=2 * spec.j.twice.min(spec.big_j.twice)).step_by(2) {
        let s = HalfInt::from_twice(s2);
        let ps = spin_isometry(spec.j, spec.big_j, s)?;
        let mut overlap = ZERO;
        for c in 0..p.ncols() {
            for r in 0..p.nrows() {
                overlap += ps[(r, c)].conj() * p[(r, c)];
            }
        }
        let w = overlap.re / s.multiplicity() as f64;
        for c in 0..p.ncols() {
            for r in 0..p.nrows() {
                recon[(r, c)] += ps[(r, c)] * w;
            }
        }
        weights.push((s, w));
    }
    let diff = Mat::from_fn(p.nrows(), p.ncols(), |r, c| p[(r, c)] - recon[(r, c)]);
    let residual = linalg::frobenius(diff.as_ref()) / linalg::frobenius(p.as_ref());
    if residual > 1e-10 {
        return Err(Error::Consistency(format!("weight decomposition of {spec} leaves residual {residual:.3e}")));
    }
    let wmax = weights.iter().map(|(_, w)| w.abs()).fold(0.0, f64::max);
    let zero_flags = weights.iter().filter(|(_, w)| w.abs() < zero_tol * wmax).map(|(s, _)| *s).collect();
    let mut rel: Vec<f64> = weights.iter().map(|(_, w)| w.abs() / wmax).collect();
    rel.sort_by(f64::total_cmp);
    rel.truncate(2);
    Ok(WeightVector { weights, zero_flags, residual, smallest_relative: rel })
}

/// A singlet-bond model with at least one vanishing weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exceptional {
    pub j: HalfInt,
    #[serde(rename = "J")]
    pub big_j: HalfInt,
    pub zero_spins: Vec<HalfInt>,
}

pub fn find_exceptional(j_max: HalfInt) -> Result<Vec<Exceptional>> {
    find_exceptional_with_tol(j_max, DEFAULT_WEIGHT_TOL)
}

/// Scans all integer `J` with `j <= J < 2j`, for `j = 1/2, 1, …, j_max`.
pub fn find_exceptional_with_tol(j_max: HalfInt, zero_tol: f64) -> Result<Vec<Exceptional>> {
    let mut out = Vec::new();
    for jt in 1..=j_max.twice {
        let j = HalfInt::from_twice(jt);
        let first = if jt % 2 == 0 { jt } else { jt + 1 };
        for big in (first..2 * jt).step_by(2) {
            let spec = AkltSpec::new(j, HalfInt::from_twice(big), HalfInt::ZERO)?;
            let w = weight_vector_with_tol(&spec, zero_tol)?;
            if !w.zero_flags.is_empty() {
                out.push(Exceptional { j, big_j: spec.big_j, zero_spins: w.zero_flags });
            }
        }
    }
    Ok(out)
}

/// Coefficients of `S·S'`, `(S·S')²`, `(S·S')³`, `(S·S')⁴` in `H_a`.
pub const H_A: [f64; 4] = [-1.0, 0.0, 91.0 / 900.0, 11.0 / 900.0];
/// Coefficients of `S·S'`, `(S·S')²`, `(S·S')³`, `(S·S')⁴` in `H_b`.
pub const H_B: [f64; 4] = [0.0, 1.0, 11.0 / 30.0, 1.0 / 30.0];

/// `λ H_a + (1-λ) H_b` on two spin-2 sites.
pub fn spin2_term(lambda: f64) -> Result<LocalOperator> {
    let coeffs: Vec<f64> = H_A.iter().zip(H_B).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
    heisenberg_poly(HalfInt::integer(2), 0.0, &coeffs)
}

/// The spin-0 ⊕ 1 ⊕ 3 subspace of `2 ⊗ 2`.
pub fn spin013_subspace() -> Result<Subspace> {
    let two = HalfInt::integer(2);
    let mut p: CMat = Mat::zeros(25, 25);
    for s in [0, 1, 3] {
        let ps = spin_projector_matrix(two, two, HalfInt::integer(s))?;
        for c in 0..25 {
            for r in 0..25 {
                p[(r, c)] += ps[(r, c)];
            }
        }
    }
    let (basis, audit) = linalg::column_space(p.as_ref(), 1e-10)?;
    Ok(Subspace::new(basis, 1e-10, audit))
}

#[derive(Clone, Debug)]
pub struct Spin2Family {
    pub lambda: f64,
    pub term: LocalOperator,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub kernel: Subspace,
    /// Largest principal angle between the kernel and the spin-{0,1,3} subspace.
    pub angle_to_spin013: f64,
}

impl Spin2Family {
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -1e-10 * self.max_eigenvalue.abs().max(1.0)
    }

    pub fn kernel_is_spin013(&self) -> bool {
        self.kernel.dim() == 11 && self.angle_to_spin013 < 1e-9
    }
}

/// Relative eigenvalue threshold for the kernel of a spin-2 family member.
const SPIN2_KERNEL_TOL: f64 = 1e-9;

pub fn spin2_family(lambda: f64) -> Result<Spin2Family> {
    let term = spin2_term(lambda)?;
    let (vals, vecs) = linalg::hermitian_eigen(term.matrix.as_ref())?;
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let thr = SPIN2_KERNEL_TOL * scale;
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].abs() <= thr).collect();
    let basis = Mat::from_fn(25, keep.len(), |r, c| vecs[(r, keep[c])]);
    let audit = ThresholdAudit::from_values(vals.iter().map(|v| v.abs()), thr);
    let kernel = Subspace::new(basis, SPIN2_KERNEL_TOL, audit);
    let angle = kernel.max_angle_to(&spin013_subspace()?)?;
    Ok(Spin2Family { lambda, min_eigenvalue: vals[0], max_eigenvalue: *vals.last().unwrap(), term, kernel, angle_to_spin013: angle })
}

/// Bisection for the largest `λ` in `[lo, hi]` keeping the spin-2 family
/// positive semidefinite; `lo` must be PSD and `hi` must not be.
pub fn psd_threshold(mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    if !spin2_family(lo)?.is_psd() || spin2_family(hi)?.is_psd() {
        return Err(Error::domain(format!("[{lo}, {hi}] does not bracket the PSD boundary")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if spin2_family(mid)?.is_psd() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn gaussian(rng: &mut ChaCha20Rng) -> c64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64::new(re, im)
}

/// Largest condition number accepted for the similarity transform of an idempotent.
pub const IDEMPOTENT_COND_CAP: f64 = 1e4;
const DEGENERATE_RETRIES: usize = 50;

/// `S diag(1_r, 0) S^{-1}` with a random well-conditioned `S`.
fn random_idempotent(bond: usize, rank: usize, rng: &mut ChaCha20Rng) -> Result<CMat> {
    for _ in 0..DEGENERATE_RETRIES {
        let s = Mat::from_fn(bond, bond, |_, _| gaussian(rng));
        let svd = s.svd().map_err(|e| Error::Numerical(format!("svd failed: {e:?}")))?;
        let sig: Vec<f64> = (0..bond).map(|i| svd.S()[i].re).collect();
        if sig[bond - 1] <= 0.0 || sig[0] / sig[bond - 1] > IDEMPOTENT_COND_CAP {
            continue;
        }
        // S^{-1} = V Σ^{-1} U^†
        let (u, v) = (svd.U(), svd.V());
        let inv = Mat::from_fn(bond, bond, |r, c| (0..bond).map(|k| v[(r, k)] * u[(c, k)].conj() / sig[k]).sum::<c64>());
        let sd = Mat::from_fn(bond, bond, |r, c| if c < rank { s[(r, c)] } else { ZERO });
        return Ok(linalg::mul(sd.as_ref(), inv.as_ref()));
    }
    Err(Error::Numerical("no well-conditioned similarity transform found".into()))
}

/// States of an `n`-site chain with `X` on some internal links.
#[derive(Clone, Debug)]
pub struct WitnessSet {
    pub sites: usize,
    pub states: Vec<Vec<c64>>,
    /// Numerical rank of the witness Gram matrix.
    pub rank: usize,
    /// Largest `‖H²_N ψ‖ / ‖ψ‖` over the witnesses.
    pub max_residual: f64,
}

#[derive(Clone, Debug)]
pub struct DegenerateFamily {
    pub tensor: MpsTensor,
    pub x: CMat,
    pub y: CMat,
    /// Dimension of the solution space of `X A = A Y`.
    pub solution_dim: usize,
    pub attempts: usize,
    pub witnesses: Vec<WitnessSet>,
}

/// `tr[A ⋯ A]` with `X` inserted on every subset of the odd internal links
/// `1, 3, 5, …` (link `k` sits between sites `k` and `k+1`).
pub fn witness_states(a: &MpsTensor, x: &CMat, n: usize) -> Result<Vec<Vec<c64>>> {
    if n < 2 {
        return Err(Error::domain("witness chains need at least two sites"));
    }
    let ax = MpsTensor::from_matrices(a.matrices().iter().map(|m| linalg::mul(m.as_ref(), x.as_ref())).collect())?;
    let odd: Vec<usize> = (1..n).step_by(2).collect();
    let id = linalg::identity(a.bond_dim());
    let mut out = Vec::new();
    for mask in 0..1usize << odd.len() {
        let sites: Vec<&MpsTensor> = (1..=n)
            .map(|k| match odd.iter().position(|&l| l == k) {
                Some(bit) if mask >> bit & 1 == 1 => &ax,
                _ => a,
            })
            .collect();
        out.push(mps::inhomogeneous_state(&sites, id.as_ref())?);
    }
    Ok(out)
}

/// Random solution of `X A^i = A^i Y` for random idempotents of the given
/// ranks, resampled until injective on two sites, with its witness states
/// on `N = 3, …, 6` sites.
pub fn degenerate_family(d: usize, bond: usize, rank_x: usize, rank_y: usize, seed: u64) -> Result<DegenerateFamily> {
    if !(1..bond).contains(&rank_x) || !(1..bond).contains(&rank_y) {
        return Err(Error::domain("idempotent ranks must lie in 1..D"));
    }
    if d * d < bond * bond {
        return Err(Error::domain("d² < D², the tensor cannot be injective on two sites"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = bond * bond;
    let expected = rank_x * rank_y + (bond - rank_x) * (bond - rank_y);
    for attempt in 1..=DEGENERATE_RETRIES {
        let x = random_idempotent(bond, rank_x, &mut rng)?;
        let y = random_idempotent(bond, rank_y, &mut rng)?;
        // vec(X A - A Y) = (1 ⊗ X - Yᵀ ⊗ 1) vec(A), column-major vec
        let op = Mat::from_fn(n, n, |r, c| {
            let (ar, ac) = (r % bond, r / bond);
            let (br, bc) = (c % bond, c / bond);
            let mut v = ZERO;
            if ac == bc {
                v += x[(ar, br)];
            }
            if ar == br {
                v -= y[(bc, ac)];
            }
            v
        });
        let scale = linalg::frobenius(op.as_ref());
        let (sol, _) = linalg::null_space(op.as_ref(), 1e-10 * scale)?;
        if sol.ncols() != expected {
            continue;
        }
        let coeffs: Vec<c64> = (0..d * sol.ncols()).map(|_| gaussian(&mut rng)).collect();
        let tensor = MpsTensor::from_fn(d, bond, |i, al, be| {
            (0..sol.ncols()).map(|k| coeffs[i * sol.ncols() + k] * sol[(al + bond * be, k)]).sum()
        })?;
        let tensor = tensor.scaled(1.0 / tensor.frobenius_norm());
        if mps::mps_space_dim(&tensor, 2, mps::DEFAULT_RANK_TOL)? != n {
            continue;
        }
        let term = parent_term(&tensor, 2, mps::DEFAULT_RANK_TOL)?;
        let mut witnesses = Vec::new();
        for sites in 3..=6 {
            let states = witness_states(&tensor, &x, sites)?;
            let mut max_residual: f64 = 0.0;
            for s in &states {
                let hs = apply_obc_hamiltonian(&term, sites, s)?;
                max_residual = max_residual.max(linalg::vec_norm(&hs) / linalg::vec_norm(s));
            }
            let len = states[0].len();
            let stacked = Mat::from_fn(len, states.len(), |r, c| states[c][r] / linalg::vec_norm(&states[c]) * ONE);
            let sv = linalg::singular_values(stacked.as_ref())?;
            let rank = sv.iter().filter(|&&v| v > 1e-8 * sv[0]).count();
            witnesses.push(WitnessSet { sites, states, rank, max_residual });
        }
        return Ok(DegenerateFamily { tensor, x, y, solution_dim: sol.ncols(), attempts: attempt, witnesses });
    }
    Err(Error::Numerical(format!("no injective solution of X A = A Y after {DEGENERATE_RETRIES} attempts")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainBoundary {
    Open,
    Periodic,
}

/// Number of bond-spin sequences on `n` sites with every bond spin in
/// `0, 1/2, …, j_cap` and each neighbouring pair `j_b ⊗ j_{b+1}` containing `J`.
/// Open chains have `n + 1` bonds, periodic ones `n`.
pub fn bond_sequence_count(big_j: HalfInt, j_cap: HalfInt, n: usize, boundary: ChainBoundary) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::domain("need at least two sites"));
    }
    if big_j.twice < 0 || j_cap.twice < 0 {
        return Err(Error::domain("spins must be non-negative"));
    }
    let k = j_cap.twice as usize + 1;
    let allowed = |a: usize, b: usize| -> bool {
        let (a, b, jt) = (a as i32, b as i32, big_j.twice);
        (a - b).abs() <= jt && jt <= a + b && (a + b + jt) % 2 == 0
    };
    let t: Vec<Vec<bool>> = (0..k).map(|a| (0..k).map(|b| allowed(a, b)).collect()).collect();
    let step = |v: &[BigUint]| -> Vec<BigUint> { (0..k).map(|b| (0..k).filter(|&a| t[a][b]).map(|a| v[a].clone()).sum()).collect() };
    match boundary {
        ChainBoundary::Open => {
            let mut v = vec![BigUint::from(1u32); k];
            for _ in 0..n {
                v = step(&v);
            }
            Ok(v.into_iter().sum())
        }
        ChainBoundary::Periodic => {
            let mut total = BigUint::from(0u32);
            for start in 0..k {
                let mut v = vec![BigUint::from(0u32); k];
                v[start] = BigUint::from(1u32);
                for _ in 0..n {
                    v = step(&v);
                }
                total += v[start].clone();
            }
            Ok(total)
        }
    }
}
