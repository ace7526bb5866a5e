//! Unit-ball volumes, form normalisations and the Crofton / Gauss-Bonnet /
//! total-Gauss-curvature coefficient tables.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::pi::PiScalar;
use crate::error::{Error, Result};

pub(crate) fn factorial(m: u64) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Binomial coefficient, zero outside `0 <= k <= m`.
pub fn binom(m: i64, k: i64) -> BigInt {
    if k < 0 || m < 0 || k > m {
        return BigInt::zero();
    }
    let k = k.min(m - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(m - i) / BigInt::from(i + 1);
    }
    acc
}

pub(crate) fn rat(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

pub(crate) fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `max{0, k-n} <= q <= floor(k/2) < n`.
pub fn admissible(n: usize, k: usize, q: usize) -> bool {
    n >= 1 && k < 2 * n && 2 * q <= k && q + n >= k
}

/// Volume of the Euclidean unit ball in dimension `m`. Odd dimensions carry
/// an integer pi power once the half-integer gamma value is rationalised:
/// `omega_{2j+1} = 2^{j+1} pi^j / (2j+1)!!`.
pub fn ball_volume_coeff(m: u32) -> PiScalar {
    let j = (m / 2) as i32;
    if m % 2 == 0 {
        PiScalar::monomial(rat(BigInt::one(), factorial(j as u64)), j)
    } else {
        let double_fact = (0..=j as u64).fold(BigInt::one(), |acc, i| acc * BigInt::from(2 * i + 1));
        let num = BigInt::one() << (j as usize + 1);
        PiScalar::monomial(rat(num, double_fact), j)
    }
}

/// Volume of the unit sphere `S^m`, `O_m = (m+1) omega_{m+1}`.
pub fn sphere_volume_coeff(m: u32) -> PiScalar {
    ball_volume_coeff(m + 1).scale(&int(m as i64 + 1))
}

/// `c_{n,k,q} = 1 / (q! (n-k+q)! (k-2q)! omega_{2n-k})`.
pub fn form_norm_coeff(n: usize, k: usize, q: usize) -> Result<PiScalar> {
    if !admissible(n, k, q) {
        return Err(Error::IndexRange { n, k, q });
    }
    let denom = factorial(q as u64) * factorial((n + q - k) as u64) * factorial((k - 2 * q) as u64);
    let omega = ball_volume_coeff((2 * n - k) as u32);
    let (oc, oe) = omega.as_monomial().expect("ball volume is a monomial");
    Ok(PiScalar::monomial((BigRational::from_integer(denom) * oc).recip(), -oe))
}

/// A basis valuation appearing in a coefficient table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// Hermitian intrinsic volume `mu_{k,q}`.
    Mu { k: usize, q: usize },
    /// Riemannian volume of the domain.
    Vol,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Crofton,
    GaussBonnet,
    TotalGauss,
    /// Coefficients of the plane-measure variation on `B~_{2n-2r-1,q}`.
    CroftonVariation,
}

/// Symbolic `vol(G^C_{n-1, r})` carried as an opaque unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrassmannianFactor {
    pub n: usize,
    pub r: usize,
}

/// An epsilon-graded linear combination of valuations with exact
/// coefficients: `prefactor * [grassmannian] * sum coeff * eps^p * term`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTable {
    pub kind: TableKind,
    pub n: usize,
    pub r: Option<usize>,
    pub entries: BTreeMap<(Term, u32), PiScalar>,
    pub prefactor: PiScalar,
    pub grassmannian: Option<GrassmannianFactor>,
}

impl CoeffTable {
    fn new(kind: TableKind, n: usize, r: Option<usize>) -> Self {
        Self {
            kind,
            n,
            r,
            entries: BTreeMap::new(),
            prefactor: PiScalar::one(),
            grassmannian: None,
        }
    }

    pub(crate) fn add(&mut self, term: Term, eps_pow: u32, c: PiScalar) {
        if let Term::Mu { k, q } = term {
            assert!(admissible(self.n, k, q), "table entry mu_{{{k},{q}}} outside index range");
            assert!(k != 2 * q || q < self.n, "mu_{{{k},{q}}} would need an undefined Gamma");
        }
        let slot = self.entries.entry((term, eps_pow)).or_insert_with(PiScalar::zero);
        *slot += &c;
        if slot.is_zero() {
            self.entries.remove(&(term, eps_pow));
        }
    }

    pub fn get(&self, term: Term, eps_pow: u32) -> PiScalar {
        self.entries.get(&(term, eps_pow)).cloned().unwrap_or_default()
    }

    /// The volume entry `(eps power, coefficient)`, if any.
    pub fn vol_entry(&self) -> Option<(u32, &PiScalar)> {
        self.entries
            .iter()
            .find(|((t, _), _)| *t == Term::Vol)
            .map(|((_, p), c)| (*p, c))
    }

    /// Same table with the prefactor multiplied into every entry.
    pub fn effective(&self) -> Self {
        let mut out = self.clone();
        out.prefactor = PiScalar::one();
        for c in out.entries.values_mut() {
            *c = &*c * &self.prefactor;
        }
        out
    }

    /// Keep only the epsilon-free part.
    pub fn restrict_flat(&self) -> Self {
        let mut out = self.clone();
        out.entries.retain(|(_, p), _| *p == 0);
        out
    }

    pub fn scaled(&self, s: &PiScalar) -> Self {
        let mut out = self.clone();
        out.entries = out
            .entries
            .into_iter()
            .map(|(key, c)| (key, &c * s))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        out
    }

    /// Effective entries compared exactly; kind and symbolic factors ignored.
    pub fn same_coefficients(&self, other: &Self) -> bool {
        self.effective().entries == other.effective().entries
    }

    /// Numeric value of `prefactor * sum coeff * eps^p * value(term)`; the
    /// symbolic Grassmannian factor is left out.
    pub fn evaluate<F: Fn(Term) -> f64>(&self, value: F, eps: f64) -> f64 {
        let sum: f64 = self
            .entries
            .iter()
            .map(|((t, p), c)| c.to_f64() * powu(eps, *p) * value(*t))
            .sum();
        self.prefactor.to_f64() * sum
    }

    /// Every coefficient and the prefactor are single pi-monomials with
    /// integral exponent.
    pub fn is_monomial(&self) -> bool {
        self.prefactor.as_monomial().is_some()
            && self.entries.values().all(|c| c.as_monomial().is_some())
    }
}

pub fn powu(x: f64, p: u32) -> f64 {
    (0..p).fold(1.0, |acc, _| acc * x)
}

fn check_r(n: usize, r: usize) -> Result<()> {
    if r == 0 || r >= n {
        return Err(Error::PlaneDimension { n, r });
    }
    Ok(())
}

/// `4^{-(m)} binom(2m, m)` as an exact rational.
fn central_weight(m: usize) -> BigRational {
    rat(binom(2 * m as i64, m as i64), BigInt::one() << (2 * m))
}

fn binom_inv(m: usize, k: usize) -> BigRational {
    rat(BigInt::one(), binom(m as i64, k as i64))
}

/// Measure of complex r-planes meeting a domain, in all curvatures:
/// `vol(G) binom(n-1,r)^{-1} ( eps^r (r+1) vol + sum_j eps^{j-(n-r)}
/// omega_{2n-2j} binom(n,j)^{-1} ( (j+r-n+1) mu_{2j,j} + sum_q 4^{q-j}
/// binom(2j-2q, j-q) mu_{2j,q} ) )`.
pub fn crofton_coeffs(n: usize, r: usize) -> Result<CoeffTable> {
    check_r(n, r)?;
    let mut t = CoeffTable::new(TableKind::Crofton, n, Some(r));
    t.prefactor = PiScalar::rational(binom_inv(n - 1, r));
    t.grassmannian = Some(GrassmannianFactor { n: n - 1, r });
    t.add(Term::Vol, r as u32, PiScalar::int(r as i64 + 1));
    for j in (n - r)..n {
        let p = (j + r - n) as u32;
        let w = ball_volume_coeff((2 * n - 2 * j) as u32).scale(&binom_inv(n, j));
        t.add(Term::Mu { k: 2 * j, q: j }, p, w.scale(&int((j + r + 1 - n) as i64)));
        for q in (2 * j).saturating_sub(n)..j {
            t.add(Term::Mu { k: 2 * j, q }, p, w.scale(&central_weight(j - q)));
        }
    }
    Ok(t)
}

/// Gauss-Bonnet-Chern: coefficients with
/// `O_{2n-1} chi = 2n(n+1) eps^n vol + sum_c eps^c O_{2n-2c-1} binom(n-1,c)^{-1}
/// ( sum_q 4^{q-c} binom(2c-2q, c-q) mu_{2c,q} + (c+1) mu_{2c,c} )`.
pub fn gauss_bonnet_coeffs(n: usize) -> Result<CoeffTable> {
    if n == 0 {
        return Err(Error::PlaneDimension { n, r: 0 });
    }
    let mut t = CoeffTable::new(TableKind::GaussBonnet, n, None);
    t.add(Term::Vol, n as u32, PiScalar::int(2 * (n * (n + 1)) as i64));
    for c in 0..n {
        let w = sphere_volume_coeff((2 * n - 2 * c - 1) as u32).scale(&binom_inv(n - 1, c));
        t.add(Term::Mu { k: 2 * c, q: c }, c as u32, w.scale(&int(c as i64 + 1)));
        for q in (2 * c).saturating_sub(n)..c {
            t.add(Term::Mu { k: 2 * c, q }, c as u32, w.scale(&central_weight(c - q)));
        }
    }
    Ok(t)
}

/// Average total Gauss curvature of flat sections:
/// `2r omega_{2r}^2 vol(G) binom(n-1,r)^{-1} binom(n,r)^{-1}
/// sum_q 4^{q-n+r} binom(2n-2r-2q, n-r-q) mu_{2n-2r,q}`.
pub fn total_gauss_coeffs(n: usize, r: usize) -> Result<CoeffTable> {
    check_r(n, r)?;
    let mut t = CoeffTable::new(TableKind::TotalGauss, n, Some(r));
    t.grassmannian = Some(GrassmannianFactor { n: n - 1, r });
    let omega = ball_volume_coeff(2 * r as u32);
    let w = (&omega * &omega).scale(&(int(2 * r as i64) * binom_inv(n - 1, r) * binom_inv(n, r)));
    for q in n.saturating_sub(2 * r)..=(n - r) {
        t.add(Term::Mu { k: 2 * n - 2 * r, q }, 0, w.scale(&central_weight(n - r - q)));
    }
    Ok(t)
}

/// Variation of the plane measure in terms of `B~_{2n-2r-1,q}`:
/// `vol(G) omega_{2r+1} (r+1) binom(n-1,r)^{-1} binom(n,r)^{-1}
/// sum_q binom(2n-2r-2q-1, n-r-q) 4^{-(n-r-q-1)} B~_{2n-2r-1,q}`.
///
/// Entries are keyed by `Term::Mu { k, q }` standing for `B~_{k,q}`.
pub fn crofton_variation_coeffs(n: usize, r: usize) -> Result<CoeffTable> {
    check_r(n, r)?;
    let mut t = CoeffTable::new(TableKind::CroftonVariation, n, Some(r));
    t.grassmannian = Some(GrassmannianFactor { n: n - 1, r });
    let k = 2 * n - 2 * r - 1;
    let w = ball_volume_coeff(2 * r as u32 + 1)
        .scale(&(int(r as i64 + 1) * binom_inv(n - 1, r) * binom_inv(n, r)));
    for q in (n + 1).saturating_sub(2 * r + 2)..(n - r) {
        let a = n - r - q;
        let c = rat(binom(2 * a as i64 - 1, a as i64), BigInt::one() << (2 * (a - 1)));
        t.add(Term::Mu { k, q }, 0, w.scale(&c));
    }
    Ok(t)
}

/// Value of `vol(G^C_{n-1,n-1})` implied by the hyperplane form of
/// Gauss-Bonnet, read off the volume coefficients: the GB volume term must
/// equal `2n eps * [Crofton volume term] + 2n eps^n vol`.
pub fn implied_hyperplane_grassmannian(n: usize) -> Result<PiScalar> {
    if n < 2 {
        return Err(Error::PlaneDimension { n, r: n.saturating_sub(1) });
    }
    let gb = gauss_bonnet_coeffs(n)?;
    let cr = crofton_coeffs(n, n - 1)?.effective();
    let gb_vol = gb.get(Term::Vol, n as u32);
    let cr_vol = cr.get(Term::Vol, n as u32 - 1);
    let two_n = PiScalar::int(2 * n as i64);
    let lhs = &gb_vol - &two_n;
    lhs.div_monomial(&(&two_n * &cr_vol)).ok_or(Error::Unsupported("non-monomial crofton volume term"))
}

/// Residual of the hyperplane Gauss-Bonnet rearrangement:
/// `GB - 2n eps kappa Crofton(n, n-1) - sum_{k>=1} eps^k O_{2n-2k-1}
/// binom(n-1,k)^{-1} mu_{2k,k} - 2n eps^n vol - O_{2n-1} mu_{0,0}`, with
/// `kappa` from [`implied_hyperplane_grassmannian`]. Empty means exact.
pub fn hyperplane_gauss_bonnet_residual(n: usize) -> Result<CoeffTable> {
    let kappa = implied_hyperplane_grassmannian(n)?;
    let mut res = gauss_bonnet_coeffs(n)?;
    let cr = crofton_coeffs(n, n - 1)?.effective();
    let factor = &kappa * &PiScalar::int(-2 * n as i64);
    for ((t, p), c) in &cr.entries {
        res.add(*t, p + 1, c * &factor);
    }
    for k in 1..n {
        let w = sphere_volume_coeff((2 * n - 2 * k - 1) as u32).scale(&binom_inv(n - 1, k));
        res.add(Term::Mu { k: 2 * k, q: k }, k as u32, -w);
    }
    res.add(Term::Vol, n as u32, PiScalar::int(-2 * n as i64));
    res.add(Term::Mu { k: 0, q: 0 }, 0, -sphere_volume_coeff(2 * n as u32 - 1));
    Ok(res)
}

/// All admissible `(k, q)` for complex dimension `n`.
pub fn admissible_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 0..2 * n {
        for q in 0..=k / 2 {
            if admissible(n, k, q) {
                out.push((k, q));
            }
        }
    }
    out
}
