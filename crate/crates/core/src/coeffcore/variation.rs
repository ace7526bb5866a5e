//! First-variation operator: `delta_X` of every `B_{k,q}`, `Gamma_{2q,q}` and
//! `vol` as a combination of the boundary integrals `B~`, `Gamma~`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;

use super::pi::PiScalar;
use super::tables::{admissible, crofton_coeffs, form_norm_coeff, gauss_bonnet_coeffs, int, CoeffTable, Term};
use crate::error::{Error, Result};

/// A valuation (`B`, `Gamma`, `vol`) or, as a variation target, the matching
/// boundary integral against `<X, N>` (`B~`, `Gamma~`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValKey {
    B(usize, usize),
    G(usize, usize),
    Vol,
}

impl ValKey {
    /// The key that represents `mu_{k,q}`.
    pub fn mu(k: usize, q: usize) -> Self {
        if k == 2 * q {
            ValKey::G(k, q)
        } else {
            ValKey::B(k, q)
        }
    }

    pub fn from_term(t: Term) -> Self {
        match t {
            Term::Mu { k, q } => Self::mu(k, q),
            Term::Vol => ValKey::Vol,
        }
    }

    /// Whether the underlying form is defined in complex dimension `n`.
    pub fn defined(&self, n: usize) -> bool {
        match *self {
            ValKey::B(k, q) => admissible(n, k, q) && k != 2 * q,
            ValKey::G(k, q) => admissible(n, k, q) && q + n != k,
            ValKey::Vol => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationTerm {
    pub target: ValKey,
    pub eps_pow: u32,
    pub coeff: PiScalar,
}

/// `delta_X source = sum coeff * eps^p * target~`.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationOperator {
    pub n: usize,
    pub map: BTreeMap<ValKey, Vec<VariationTerm>>,
}

/// An epsilon-graded combination of tilde integrals.
pub type TildeCombination = BTreeMap<(ValKey, u32), PiScalar>;

struct Builder<'a> {
    n: usize,
    c_src: &'a PiScalar,
    out: Vec<VariationTerm>,
}

impl Builder<'_> {
    /// Add `2 c_src / c_target * factor * eps^p target~`; a vanishing factor
    /// is dropped before the target's normalisation is looked at.
    fn add(&mut self, target: ValKey, eps_pow: u32, factor: BigRational) {
        if factor.is_zero() {
            return;
        }
        assert!(target.defined(self.n), "variation target {target:?} undefined for n={}", self.n);
        let (k, q) = match target {
            ValKey::B(k, q) | ValKey::G(k, q) => (k, q),
            ValKey::Vol => unreachable!(),
        };
        let c_t = form_norm_coeff(self.n, k, q).expect("target admissible");
        let coeff = (self.c_src * &c_t.recip().expect("monomial")).scale(&(factor * int(2)));
        self.out.push(VariationTerm { target, eps_pow, coeff });
    }
}

fn half(num: i64) -> BigRational {
    BigRational::new(num.into(), 2.into())
}

/// Every variation formula for complex dimension `n`.
pub fn variation_operator(n: usize) -> Result<VariationOperator> {
    if n == 0 {
        return Err(Error::PlaneDimension { n, r: 0 });
    }
    let ni = n as i64;
    let mut map = BTreeMap::new();
    for k in 0..2 * n {
        for q in 0..=k / 2 {
            if !admissible(n, k, q) {
                continue;
            }
            let c = form_norm_coeff(n, k, q)?;
            let (ki, qi) = (k as i64, q as i64);
            let mut b = Builder { n, c_src: &c, out: Vec::new() };
            if k != 2 * q {
                let d = ki - 2 * qi;
                b.add(ValKey::G(k - 1, q), 0, int(d * d));
                if q > 0 {
                    b.add(ValKey::G(k - 1, q - 1), 0, int(-(ni + qi - ki) * qi));
                    b.add(ValKey::B(k - 1, q - 1), 0, half((2 * (ni + qi - ki) + 1) * qi));
                }
                b.add(ValKey::B(k - 1, q), 0, int(-d * (d - 1)));
                b.add(ValKey::B(k + 1, q + 1), 1, int(d * (d - 1)));
                b.add(ValKey::B(k + 1, q), 1, half(-(ni - ki + qi) * (2 * qi + 1)));
                map.insert(ValKey::B(k, q), b.out);
            } else if q != n {
                if q > 0 {
                    b.add(ValKey::G(2 * q - 1, q - 1), 0, int(-(ni - qi) * qi));
                    b.add(ValKey::B(2 * q - 1, q - 1), 0, half((2 * (ni - qi) + 1) * qi));
                }
                let mixed = half((ni - qi) * (4 * qi + 3) - (qi + 1));
                b.add(ValKey::B(2 * q + 1, q), 1, -mixed);
                b.add(ValKey::G(2 * q + 1, q), 1, int((ni - qi - 1) * (qi + 1)));
                b.add(ValKey::B(2 * q + 3, q + 1), 2, half((ni - qi - 1) * (2 * qi + 3)));
                map.insert(ValKey::G(k, q), b.out);
            }
        }
    }
    map.insert(
        ValKey::Vol,
        alloc::vec![VariationTerm {
            target: ValKey::B(2 * n - 1, n - 1),
            eps_pow: 0,
            coeff: PiScalar::int(2),
        }],
    );
    Ok(VariationOperator { n, map })
}

impl VariationOperator {
    /// `delta_X` of an epsilon-graded table (prefactor included).
    pub fn apply(&self, table: &CoeffTable) -> TildeCombination {
        assert_eq!(table.n, self.n);
        let mut out = TildeCombination::new();
        for ((term, p), c) in &table.effective().entries {
            let source = ValKey::from_term(*term);
            for t in &self.map[&source] {
                let slot = out.entry((t.target, p + t.eps_pow)).or_insert_with(PiScalar::zero);
                *slot += &(c * &t.coeff);
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Only the epsilon-free terms.
    pub fn flat(&self) -> Self {
        let map = self
            .map
            .iter()
            .map(|(k, v)| (*k, v.iter().filter(|t| t.eps_pow == 0).cloned().collect()))
            .collect();
        Self { n: self.n, map }
    }

    /// Numeric `delta_X source` at curvature `eps`, given the tilde integrals.
    pub fn evaluate<F: Fn(ValKey) -> f64>(&self, source: ValKey, eps: f64, tilde: F) -> f64 {
        self.map[&source]
            .iter()
            .map(|t| t.coeff.to_f64() * super::tables::powu(eps, t.eps_pow) * tilde(t.target))
            .sum()
    }
}

/// Variation of the Crofton bracket (`r < n`) or of the Gauss-Bonnet
/// right-hand side (`r = n`).
pub fn bracket_variation(n: usize, r: usize) -> Result<TildeCombination> {
    let table = if r == n { gauss_bonnet_coeffs(n)? } else { crofton_coeffs(n, r)? };
    Ok(variation_operator(n)?.apply(&table))
}

/// Every term carrying a positive power of `eps` cancels in the variation.
pub fn check_epsilon_independence(n: usize, r: usize) -> Result<bool> {
    if r == 0 || r > n {
        return Err(Error::PlaneDimension { n, r });
    }
    Ok(bracket_variation(n, r)?.keys().all(|(_, p)| *p == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffcore::tables::crofton_variation_coeffs;

    fn coeff(op: &VariationOperator, src: ValKey, target: ValKey, p: u32) -> PiScalar {
        op.map[&src]
            .iter()
            .filter(|t| t.target == target && t.eps_pow == p)
            .fold(PiScalar::zero(), |acc, t| &acc + &t.coeff)
    }

    fn c(n: usize, k: usize, q: usize) -> PiScalar {
        form_norm_coeff(n, k, q).unwrap()
    }

    #[test]
    fn leading_gamma_coefficient() {
        for n in 2..6 {
            let op = variation_operator(n).unwrap();
            for k in 1..2 * n {
                for q in 0..=k / 2 {
                    if !admissible(n, k, q) || k == 2 * q || !ValKey::G(k - 1, q).defined(n) {
                        continue;
                    }
                    let d = (k - 2 * q) as i64;
                    let expect = (&c(n, k, q) * &c(n, k - 1, q).recip().unwrap()).scale(&int(2 * d * d));
                    assert_eq!(coeff(&op, ValKey::B(k, q), ValKey::G(k - 1, q), 0), expect);
                }
            }
        }
    }

    #[test]
    fn second_order_gamma_coefficient() {
        let n = 4;
        let op = variation_operator(n).unwrap();
        for q in 0..n - 1 {
            let expect = (&c(n, 2 * q, q) * &c(n, 2 * q + 3, q + 1).recip().unwrap())
                .scale(&int(((n - q - 1) * (2 * q + 3)) as i64));
            assert_eq!(coeff(&op, ValKey::G(2 * q, q), ValKey::B(2 * q + 3, q + 1), 2), expect);
        }
    }

    #[test]
    fn target_degrees() {
        for n in 1..7 {
            let op = variation_operator(n).unwrap();
            for (src, terms) in &op.map {
                let k = match *src {
                    ValKey::B(k, _) | ValKey::G(k, _) => k,
                    ValKey::Vol => continue,
                };
                for t in terms {
                    let k2 = match t.target {
                        ValKey::B(k, _) | ValKey::G(k, _) => k,
                        ValKey::Vol => panic!("vol target"),
                    };
                    assert_eq!(k2 + 1, k + 2 * t.eps_pow as usize);
                }
            }
        }
    }

    #[test]
    fn volume_variation() {
        let op = variation_operator(3).unwrap();
        assert_eq!(op.map[&ValKey::Vol][0].target, ValKey::B(5, 2));
        assert_eq!(op.map[&ValKey::Vol][0].coeff, PiScalar::int(2));
    }

    #[test]
    fn epsilon_cancels() {
        for n in 1..=5 {
            for r in 1..=n {
                assert!(check_epsilon_independence(n, r).unwrap(), "n={n} r={r}");
            }
        }
        assert!(check_epsilon_independence(3, 0).is_err());
    }

    #[test]
    fn gauss_bonnet_has_null_variation() {
        for n in 1..=5 {
            assert!(bracket_variation(n, n).unwrap().is_empty(), "n={n}");
        }
    }

    #[test]
    fn flat_variation_reproduces_plane_measure_variation() {
        for n in 2..=5 {
            for r in 1..n {
                let got = bracket_variation(n, r).unwrap();
                let expect: TildeCombination = crofton_variation_coeffs(n, r)
                    .unwrap()
                    .entries
                    .into_iter()
                    .map(|((t, p), c)| {
                        let Term::Mu { k, q } = t else { panic!() };
                        ((ValKey::B(k, q), p), c)
                    })
                    .collect();
                assert_eq!(got, expect, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn two_one_variation() {
        // 4pi/3 B~_{1,0}
        let got = bracket_variation(2, 1).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[&(ValKey::B(1, 0), 0)], PiScalar::ratio(4, 3).shift(1));
    }
}
