//! Angular-momentum algebra: half-integer labels, Clebsch–Gordan
//! coefficients (Condon–Shortley phases), spin matrices, total-spin
//! projectors and coupled bond states.
//!
//! Basis convention used everywhere in the crate: magnetic quantum numbers
//! in descending order, `m = s, s-1, ..., -s`. For two sites the first site
//! is the most significant index.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ZERO};

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt {
    pub twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub const fn integer(n: i32) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// Multiplet dimension `2s + 1` (only meaningful for `s >= 0`).
    pub fn multiplicity(self) -> usize {
        (self.twice + 1) as usize
    }

    /// Magnetic quantum numbers `s, s-1, ..., -s`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let t = self.twice;
        (0..=2 * t).step_by(2).map(move |k| HalfInt::from_twice(t - k))
    }

    /// Position of `m` in the descending basis of spin `self`.
    pub fn index_of(self, m: HalfInt) -> usize {
        ((self.twice - m.twice) / 2) as usize
    }

    /// `s(s+1)`.
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"2"`, `"3/2"`, `"-1/2"` and decimal forms like `"1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::domain(format!("not a half-integer: {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "1" => Ok(HalfInt::integer(num)),
                "2" => Ok(HalfInt::from_twice(num)),
                _ => Err(bad()),
            };
        }
        if let Ok(n) = s.parse::<i32>() {
            return Ok(HalfInt::integer(n));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let t = 2.0 * x;
        if (t - t.round()).abs() > 1e-12 {
            return Err(bad());
        }
        Ok(HalfInt::from_twice(t.round() as i32))
    }
}

/// A Hermitian operator on `sites` sites of local dimension `phys_dim`.
#[derive(Clone, Debug)]
pub struct LocalOperator {
    pub sites: usize,
    pub phys_dim: usize,
    pub matrix: CMat,
}

/// Hermiticity tolerance for [`LocalOperator`].
pub const HERMITIAN_TOL: f64 = 1e-12;

impl LocalOperator {
    pub fn new(sites: usize, phys_dim: usize, matrix: CMat) -> Result<Self> {
        let n = phys_dim.pow(sites as u32);
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::domain(format!(
                "operator on {sites} sites of dimension {phys_dim} must be {n}x{n}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = linalg::hermiticity_defect(matrix.as_ref());
        if defect > HERMITIAN_TOL {
            return Err(Error::domain(format!("operator is not Hermitian (defect {defect:.3e})")));
        }
        Ok(LocalOperator { sites, phys_dim, matrix })
    }

    pub(crate) fn new_unchecked(sites: usize, phys_dim: usize, matrix: CMat) -> Self {
        LocalOperator { sites, phys_dim, matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn zeros(sites: usize, phys_dim: usize) -> Self {
        let n = phys_dim.pow(sites as u32);
        LocalOperator { sites, phys_dim, matrix: Mat::zeros(n, n) }
    }
}

fn ln_factorial(n: i32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        // compensated running sum of ln k
        let mut out = Vec::with_capacity(1025);
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        out.push(0.0);
        for k in 1..=1024u32 {
            let y = (k as f64).ln() - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            out.push(sum);
        }
        out
    });
    debug_assert!(n >= 0);
    table[n as usize]
}

fn check_projection(j: HalfInt, m: HalfInt) -> Result<()> {
    if j.twice < 0 {
        return Err(Error::domain(format!("negative spin {j}")));
    }
    if m.twice.abs() > j.twice {
        return Err(Error::domain(format!("|m| = |{m}| exceeds j = {j}")));
    }
    if (j.twice - m.twice) % 2 != 0 {
        return Err(Error::domain(format!("m = {m} has the wrong parity for j = {j}")));
    }
    Ok(())
}

/// Whether spin `c` appears in the product `a ⊗ b`.
pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    c.twice >= (a.twice - b.twice).abs() && c.twice <= a.twice + b.twice && (a.twice + b.twice + c.twice) % 2 == 0
}

/// Clebsch–Gordan coefficient `<j1 m1; j2 m2 | J M>` with Condon–Shortley
/// phases, evaluated with Racah's single-sum formula in log space.
pub fn cg(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> Result<f64> {
    check_projection(j1, m1)?;
    check_projection(j2, m2)?;
    check_projection(j, m)?;
    if m1.twice + m2.twice != m.twice || !triangle(j1, j2, j) {
        return Ok(0.0);
    }
    // integer combinations (all halved twice-values)
    let h = |x: i32| x / 2;
    let a = h(j1.twice + j2.twice - j.twice);
    let b = h(j1.twice - j2.twice + j.twice);
    let c = h(-j1.twice + j2.twice + j.twice);
    let s = h(j1.twice + j2.twice + j.twice);
    let j1m = h(j1.twice - m1.twice);
    let j1p = h(j1.twice + m1.twice);
    let j2m = h(j2.twice - m2.twice);
    let j2p = h(j2.twice + m2.twice);
    let jm = h(j.twice - m.twice);
    let jp = h(j.twice + m.twice);

    let ln_pref = 0.5
        * (((j.twice + 1) as f64).ln() + ln_factorial(a) + ln_factorial(b) + ln_factorial(c) - ln_factorial(s + 1)
            + ln_factorial(j1p)
            + ln_factorial(j1m)
            + ln_factorial(j2p)
            + ln_factorial(j2m)
            + ln_factorial(jp)
            + ln_factorial(jm));

    // J - j2 + m1 and J - j1 - m2
    let e1 = h(j.twice - j2.twice + m1.twice);
    let e2 = h(j.twice - j1.twice - m2.twice);
    let kmin = 0.max(-e1).max(-e2);
    let kmax = a.min(j1m).min(j2p);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let ln_den = ln_factorial(k)
            + ln_factorial(a - k)
            + ln_factorial(j1m - k)
            + ln_factorial(j2p - k)
            + ln_factorial(e1 + k)
            + ln_factorial(e2 + k);
        let term = (ln_pref - ln_den).exp();
        sum += if k % 2 == 0 { term } else { -term };
    }
    Ok(sum)
}

/// Spin matrices `(Jx, Jy, Jz)` of the `(2s+1)`-dimensional irrep.
pub fn spin_operators(s: HalfInt) -> Result<(LocalOperator, LocalOperator, LocalOperator)> {
    if s.twice < 0 {
        return Err(Error::domain(format!("negative spin {s}")));
    }
    let n = s.multiplicity();
    let ms: Vec<HalfInt> = s.projections().collect();
    // J+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>; row index of m+1 is one above m
    let raise = |row: usize, col: usize| -> f64 {
        if row + 1 == col {
            let m = ms[col].value();
            (s.casimir() - m * (m + 1.0)).sqrt()
        } else {
            0.0
        }
    };
    let jx = Mat::from_fn(n, n, |r, c| c64::new(0.5 * (raise(r, c) + raise(c, r)), 0.0));
    let jy = Mat::from_fn(n, n, |r, c| c64::new(0.0, -0.5 * (raise(r, c) - raise(c, r))));
    let jz = Mat::from_fn(n, n, |r, c| if r == c { c64::new(ms[r].value(), 0.0) } else { ZERO });
    Ok((LocalOperator::new_unchecked(1, n, jx), LocalOperator::new_unchecked(1, n, jy), LocalOperator::new_unchecked(1, n, jz)))
}

/// The coupled state `|S M>` inside `s1 ⊗ s2`, first factor most significant.
pub fn coupled_state(s1: HalfInt, s2: HalfInt, total: HalfInt, m: HalfInt) -> Result<Vec<c64>> {
    let n2 = s2.multiplicity();
    let mut v = vec![ZERO; s1.multiplicity() * n2];
    for m1 in s1.projections() {
        let m2 = HalfInt::from_twice(m.twice - m1.twice);
        if m2.twice.abs() > s2.twice {
            continue;
        }
        let c = cg(s1, m1, s2, m2, total, m)?;
        v[s1.index_of(m1) * n2 + s2.index_of(m2)] = c64::new(c, 0.0);
    }
    Ok(v)
}

/// Orthogonal projector onto total spin `total` inside `s1 ⊗ s2`.
pub fn total_spin_projector(s1: HalfInt, s2: HalfInt, total: HalfInt) -> Result<LocalOperator> {
    if s1.twice < 0 || s2.twice < 0 || !triangle(s1, s2, total) {
        return Err(Error::domain(format!("spin {total} does not occur in {s1} ⊗ {s2}")));
    }
    if s1 != s2 {
        return Err(Error::domain(format!("a two-site operator needs equal local spins, got {s1} and {s2}; use spin_projector_matrix")));
    }
    let p = spin_projector_matrix(s1, s2, total)?;
    Ok(LocalOperator::new_unchecked(2, s1.multiplicity(), p))
}

/// Matrix of the spin-`total` projector on `s1 ⊗ s2` (dimensions may differ).
pub fn spin_projector_matrix(s1: HalfInt, s2: HalfInt, total: HalfInt) -> Result<CMat> {
    if s1.twice < 0 || s2.twice < 0 || !triangle(s1, s2, total) {
        return Err(Error::domain(format!("spin {total} does not occur in {s1} ⊗ {s2}")));
    }
    let n = s1.multiplicity() * s2.multiplicity();
    let mut p: CMat = Mat::zeros(n, n);
    for m in total.projections() {
        let v = coupled_state(s1, s2, total, m)?;
        for c in 0..n {
            if v[c] == ZERO {
                continue;
            }
            for r in 0..n {
                p[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    Ok(p)
}

/// Normalized bond state `|Q, 0>` in `j ⊗ j`.
pub fn bond_state(j: HalfInt, q: HalfInt) -> Result<Vec<c64>> {
    if j.twice < 0 {
        return Err(Error::domain(format!("negative spin {j}")));
    }
    if q.twice < 0 || q.twice > 2 * j.twice || !q.is_integer() {
        return Err(Error::domain(format!("bond spin {q} is not contained in {j} ⊗ {j}")));
    }
    coupled_state(j, j, q, HalfInt::ZERO)
}

/// `Σ_k c_k (S_1·S_2)^k` plus `constant·1` on two spin-`spin` sites, with
/// `coeffs[k-1] = c_k`.
pub fn heisenberg_poly(spin: HalfInt, constant: f64, coeffs: &[f64]) -> Result<LocalOperator> {
    let (jx, jy, jz) = spin_operators(spin)?;
    let d = spin.multiplicity();
    let n = d * d;
    let mut dot = kron(&jx.matrix, &jx.matrix);
    let yy = kron(&jy.matrix, &jy.matrix);
    let zz = kron(&jz.matrix, &jz.matrix);
    for c in 0..n {
        for r in 0..n {
            dot[(r, c)] += yy[(r, c)] + zz[(r, c)];
        }
    }
    let mut out: CMat = Mat::from_fn(n, n, |r, c| if r == c { c64::new(constant, 0.0) } else { ZERO });
    let mut power = linalg::identity(n);
    for &ck in coeffs {
        power = linalg::mul(power.as_ref(), dot.as_ref());
        if ck != 0.0 {
            for c in 0..n {
                for r in 0..n {
                    out[(r, c)] += power[(r, c)] * ck;
                }
            }
        }
    }
    // symmetrize away rounding in the powers
    let sym = Mat::from_fn(n, n, |r, c| (out[(r, c)] + out[(c, r)].conj()) * 0.5);
    Ok(LocalOperator::new_unchecked(2, d, sym))
}

/// `a ⊗ b` for square matrices.
fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, max_abs_diff, mul, ONE};

    fn hi(s: &str) -> HalfInt {
        s.parse().unwrap()
    }

    /// Racah's formula with exact integer factorials, kept separate from the
    /// log-space evaluation it checks.
    fn racah_oracle(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
        // arguments are twice-values
        if m1 + m2 != m || j < (j1 - j2).abs() || j > j1 + j2 || (j1 + j2 + j) % 2 != 0 {
            return 0.0;
        }
        let f = |n: i32| -> f64 { (1..=n as u64).map(|k| k as f64).product::<f64>() };
        let h = |x: i32| x / 2;
        let pref = (j + 1) as f64 * f(h(j1 + j2 - j)) * f(h(j1 - j2 + j)) * f(h(-j1 + j2 + j)) / f(h(j1 + j2 + j) + 1)
            * f(h(j1 + m1))
            * f(h(j1 - m1))
            * f(h(j2 + m2))
            * f(h(j2 - m2))
            * f(h(j + m))
            * f(h(j - m));
        let mut sum = 0.0;
        for k in 0..=h(j1 + j2 + j) {
            let args = [k, h(j1 + j2 - j) - k, h(j1 - m1) - k, h(j2 + m2) - k, h(j - j2 + m1) + k, h(j - j1 - m2) + k];
            if args.iter().any(|&a| a < 0) {
                continue;
            }
            let den: f64 = args.iter().map(|&a| f(a)).product();
            sum += if k % 2 == 0 { 1.0 } else { -1.0 } / den;
        }
        pref.sqrt() * sum
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(hi("3/2").twice, 3);
        assert_eq!(hi("2").twice, 4);
        assert_eq!(hi("-1/2").twice, -1);
        assert_eq!(hi("2.5").twice, 5);
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("0.3".parse::<HalfInt>().is_err());
        assert_eq!(HalfInt::from_twice(7).to_string(), "7/2");
        assert_eq!(HalfInt::integer(-3).to_string(), "-3");
    }

    #[test]
    fn cg_known_values() {
        let h = hi("1/2");
        let mh = hi("-1/2");
        let z = HalfInt::ZERO;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((cg(h, h, h, mh, z, z).unwrap() - s).abs() < 1e-15);
        assert!((cg(h, mh, h, h, z, z).unwrap() + s).abs() < 1e-15);
        let one = hi("1");
        assert_eq!(cg(one, one, one, one, one, one).unwrap(), 0.0);
        let third = 1.0 / 3f64.sqrt();
        assert!((cg(one, one, one, hi("-1"), z, z).unwrap() - third).abs() < 1e-15);
        // oracle agreement on the same cases
        assert!((racah_oracle(1, 1, 1, -1, 0, 0) - s).abs() < 1e-15);
        assert!((racah_oracle(2, 2, 2, -2, 0, 0) - third).abs() < 1e-15);
    }

    #[test]
    fn cg_domain_errors() {
        let one = hi("1");
        assert!(cg(one, hi("1/2"), one, HalfInt::ZERO, one, hi("1/2")).is_err());
        assert!(cg(one, hi("2"), one, HalfInt::ZERO, one, HalfInt::ZERO).is_err());
        // outside the triangle: exactly zero
        assert_eq!(cg(one, HalfInt::ZERO, one, HalfInt::ZERO, hi("3"), HalfInt::ZERO).unwrap(), 0.0);
    }

    #[test]
    fn cg_matches_racah_oracle() {
        for tj1 in 0..=8i32 {
            for tj2 in 0..=8 {
                for tj in (tj1 - tj2).abs()..=(tj1 + tj2) {
                    if (tj1 + tj2 + tj) % 2 != 0 {
                        continue;
                    }
                    for tm1 in (-tj1..=tj1).step_by(2) {
                        for tm2 in (-tj2..=tj2).step_by(2) {
                            let tm = tm1 + tm2;
                            if tm.abs() > tj {
                                continue;
                            }
                            let got = cg(
                                HalfInt::from_twice(tj1),
                                HalfInt::from_twice(tm1),
                                HalfInt::from_twice(tj2),
                                HalfInt::from_twice(tm2),
                                HalfInt::from_twice(tj),
                                HalfInt::from_twice(tm),
                            )
                            .unwrap();
                            let want = racah_oracle(tj1, tm1, tj2, tm2, tj, tm);
                            assert!((got - want).abs() < 1e-13, "{tj1} {tm1} {tj2} {tm2} {tj} {tm}: {got} vs {want}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cg_orthogonality_up_to_j_five() {
        for (tj1, tj2) in [(3, 3), (6, 4), (10, 10), (5, 9)] {
            let (j1, j2) = (HalfInt::from_twice(tj1), HalfInt::from_twice(tj2));
            let mut couplings = Vec::new();
            for tj in ((tj1 - tj2).abs()..=tj1 + tj2).step_by(2) {
                for m in HalfInt::from_twice(tj).projections() {
                    couplings.push((HalfInt::from_twice(tj), m));
                }
            }
            for &(ja, ma) in &couplings {
                for &(jb, mb) in &couplings {
                    let mut s = 0.0;
                    for m1 in j1.projections() {
                        for m2 in j2.projections() {
                            s += cg(j1, m1, j2, m2, ja, ma).unwrap() * cg(j1, m1, j2, m2, jb, mb).unwrap();
                        }
                    }
                    let want = if (ja, ma) == (jb, mb) { 1.0 } else { 0.0 };
                    assert!((s - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spin_matrices_satisfy_the_algebra() {
        for t in 0..=10 {
            let s = HalfInt::from_twice(t);
            let (x, y, z) = spin_operators(s).unwrap();
            let n = s.multiplicity();
            let xy = mul(x.matrix.as_ref(), y.matrix.as_ref());
            let yx = mul(y.matrix.as_ref(), x.matrix.as_ref());
            let comm = Mat::from_fn(n, n, |r, c| xy[(r, c)] - yx[(r, c)] - c64::new(0.0, 1.0) * z.matrix[(r, c)]);
            assert!(max_abs(comm.as_ref()) < 1e-13);
            let cas = Mat::from_fn(n, n, |r, c| {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += x.matrix[(r, k)] * x.matrix[(k, c)] + y.matrix[(r, k)] * y.matrix[(k, c)] + z.matrix[(r, k)] * z.matrix[(k, c)];
                }
                acc
            });
            let want = Mat::from_fn(n, n, |r, c| if r == c { c64::new(s.casimir(), 0.0) } else { ZERO });
            assert!(max_abs_diff(cas.as_ref(), want.as_ref()) < 1e-12);
        }
        let (_, _, z) = spin_operators(hi("1/2")).unwrap();
        assert_eq!(z.matrix[(0, 0)].re, 0.5);
        assert_eq!(z.matrix[(1, 1)].re, -0.5);
    }

    #[test]
    fn projectors_resolve_the_identity() {
        for t in 1..=6 {
            let s = HalfInt::from_twice(t);
            let n = s.multiplicity().pow(2);
            let mut total: CMat = Mat::zeros(n, n);
            let mut projs = Vec::new();
            for st in (0..=2 * t).step_by(2) {
                let p = total_spin_projector(s, s, HalfInt::from_twice(st)).unwrap();
                let p2 = mul(p.matrix.as_ref(), p.matrix.as_ref());
                assert!(max_abs_diff(p2.as_ref(), p.matrix.as_ref()) < 1e-12);
                assert!(linalg::hermiticity_defect(p.matrix.as_ref()) < 1e-12);
                let tr: f64 = (0..n).map(|i| p.matrix[(i, i)].re).sum();
                assert!((tr - (st + 1) as f64).abs() < 1e-12);
                for c in 0..n {
                    for r in 0..n {
                        total[(r, c)] += p.matrix[(r, c)];
                    }
                }
                projs.push(p);
            }
            assert!(max_abs_diff(total.as_ref(), linalg::identity(n).as_ref()) < 1e-12);
            for a in 0..projs.len() {
                for b in 0..a {
                    assert!(max_abs(mul(projs[a].matrix.as_ref(), projs[b].matrix.as_ref()).as_ref()) < 1e-12);
                }
            }
        }
        let singlet = total_spin_projector(hi("1/2"), hi("1/2"), HalfInt::ZERO).unwrap();
        assert!((singlet.matrix[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!((singlet.matrix[(1, 2)].re + 0.5).abs() < 1e-15);
        assert!(total_spin_projector(hi("1"), hi("1"), hi("3")).is_err());
    }

    #[test]
    fn bond_states() {
        let s = bond_state(hi("1/2"), HalfInt::ZERO).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s[1].re - r).abs() < 1e-15 && (s[2].re + r).abs() < 1e-15);
        assert_eq!(s[0], ZERO);
        for tj in 0..=10 {
            for tq in (0..=2 * tj).step_by(2) {
                let v = bond_state(HalfInt::from_twice(tj), HalfInt::from_twice(tq)).unwrap();
                assert!((linalg::vec_norm(&v) - 1.0).abs() < 1e-13);
            }
        }
        assert!(bond_state(hi("1"), hi("3")).is_err());
        let q2 = bond_state(hi("1"), hi("2")).unwrap();
        // |1,-1>, |0,0>, |-1,1> sit at indices 2, 4, 6
        let want = [racah_oracle(2, 2, 2, -2, 4, 0), racah_oracle(2, 0, 2, 0, 4, 0), racah_oracle(2, -2, 2, 2, 4, 0)];
        for (idx, w) in [2, 4, 6].into_iter().zip(want) {
            assert!((q2[idx].re - w).abs() < 1e-14);
        }
    }

    #[test]
    fn heisenberg_polynomials_commute_with_spin() {
        let two = hi("2");
        let ha = heisenberg_poly(two, 0.0, &[-1.0, 0.0, 91.0 / 900.0, 11.0 / 900.0]).unwrap();
        let hb = heisenberg_poly(two, 0.0, &[0.0, 1.0, 11.0 / 30.0, 1.0 / 30.0]).unwrap();
        for h in [&ha, &hb] {
            assert!(linalg::hermiticity_defect(h.matrix.as_ref()) < 1e-12);
            for st in (0..=8).step_by(2) {
                let p = total_spin_projector(two, two, HalfInt::from_twice(st)).unwrap();
                let a = mul(p.matrix.as_ref(), h.matrix.as_ref());
                let b = mul(h.matrix.as_ref(), p.matrix.as_ref());
                assert!(max_abs_diff(a.as_ref(), b.as_ref()) < 1e-11);
            }
        }
        let zero = heisenberg_poly(two, 0.0, &[]).unwrap();
        assert_eq!(max_abs(zero.matrix.as_ref()), 0.0);
    }

    #[test]
    fn local_operator_rejects_non_hermitian() {
        let m = Mat::from_fn(2, 2, |r, c| if r == 0 && c == 1 { ONE } else { ZERO });
        assert!(LocalOperator::new(1, 2, m).is_err());
        assert!(LocalOperator::new(2, 2, linalg::identity(3)).is_err());
    }
}
