//! Sparse exterior algebra over at most 32 generators, one bit per generator.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MultiVector {
    dim: usize,
    terms: BTreeMap<u32, f64>,
}

/// Sign of `e_a ^ e_b` relative to `e_{a|b}` for disjoint masks.
pub(crate) fn merge_sign(a: u32, b: u32) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j >> 1).count_ones();
        rest &= rest - 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl MultiVector {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= 32, "at most 32 generators");
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        let mut v = Self::zero(dim);
        v.add_term(0, c);
        v
    }

    /// The generator `alpha_i`.
    pub fn generator(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut v = Self::zero(dim);
        v.add_term(1 << i, 1.0);
        v
    }

    /// `sum_i c_i alpha_i`.
    pub fn one_form(coeffs: &[f64]) -> Self {
        let mut v = Self::zero(coeffs.len());
        for (i, c) in coeffs.iter().enumerate() {
            v.add_term(1 << i, *c);
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, *c))
    }

    pub fn coeff(&self, mask: u32) -> f64 {
        self.terms.get(&mask).copied().unwrap_or(0.0)
    }

    /// Coefficient of `alpha_0 ^ ... ^ alpha_{dim-1}`.
    pub fn top(&self) -> f64 {
        self.coeff(self.top_mask())
    }

    fn top_mask(&self) -> u32 {
        if self.dim == 32 {
            u32::MAX
        } else {
            (1u32 << self.dim) - 1
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree, if homogeneous and nonzero.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.count_ones());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn add_term(&mut self, mask: u32, c: f64) {
        assert!(mask & !self.top_mask() == 0, "mask outside the generator range");
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(mask).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.remove(&mask);
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in self.terms() {
            out.add_term(m, c * s);
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if a & b == 0 {
                    out.add_term(a | b, merge_sign(a, b) * ca * cb);
                }
            }
        }
        out
    }

    /// Top coefficient of `self ^ other` without forming the full product.
    pub fn wedge_top(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        let top = self.top_mask();
        self.terms()
            .map(|(a, ca)| {
                let b = top & !a;
                other.terms.get(&b).map_or(0.0, |cb| merge_sign(a, b) * ca * cb)
            })
            .sum()
    }

    /// `self^p`, with `self^0 = 1`.
    pub fn pow(&self, p: u32) -> Self {
        let mut acc = Self::scalar(self.dim, 1.0);
        let mut base = self.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.wedge(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.wedge(&base);
            }
        }
        acc
    }

    /// Successive powers `self^0 ..= self^max`.
    pub fn powers(&self, max: u32) -> Vec<Self> {
        let mut out = Vec::with_capacity(max as usize + 1);
        out.push(Self::scalar(self.dim, 1.0));
        for i in 0..max as usize {
            let next = out[i].wedge(self);
            out.push(next);
        }
        out
    }

    /// Largest absolute coefficient difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (self - other).terms().map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }
}

impl Add for &MultiVector {
    type Output = MultiVector;
    fn add(self, rhs: &MultiVector) -> MultiVector {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(m, c);
        }
        out
    }
}

impl Sub for &MultiVector {
    type Output = MultiVector;
    fn sub(self, rhs: &MultiVector) -> MultiVector {
        self + &(-rhs)
    }
}

impl Neg for &MultiVector {
    type Output = MultiVector;
    fn neg(self) -> MultiVector {
        self.scale(-1.0)
    }
}

impl Mul for &MultiVector {
    type Output = MultiVector;
    fn mul(self, rhs: &MultiVector) -> MultiVector {
        self.wedge(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(d: usize, i: usize) -> MultiVector {
        MultiVector::generator(d, i)
    }

    #[test]
    fn generators_anticommute() {
        let (a, b) = (e(4, 1), e(4, 3));
        assert_eq!(a.wedge(&b), b.wedge(&a).scale(-1.0));
        assert!(a.wedge(&a).is_zero());
        assert_eq!(a.wedge(&b).coeff(0b1010), 1.0);
        assert_eq!(b.wedge(&a).coeff(0b1010), -1.0);
    }

    #[test]
    fn top_form_order() {
        let v = e(3, 2).wedge(&e(3, 0)).wedge(&e(3, 1));
        // a2 a0 a1 = a0 a1 a2
        assert_eq!(v.top(), 1.0);
        let v = e(3, 1).wedge(&e(3, 0)).wedge(&e(3, 2));
        assert_eq!(v.top(), -1.0);
    }

    #[test]
    fn symplectic_power() {
        // (a0 a1 + a2 a3)^2 = 2 a0 a1 a2 a3
        let w = &e(4, 0).wedge(&e(4, 1)) + &e(4, 2).wedge(&e(4, 3));
        assert_eq!(w.pow(2).top(), 2.0);
        assert!(w.pow(3).is_zero());
        assert_eq!(w.powers(2)[2], w.pow(2));
    }

    fn arb_form(dim: usize, degree: u32) -> impl Strategy<Value = MultiVector> {
        let masks: Vec<u32> = (0u32..(1 << dim)).filter(|m| m.count_ones() == degree).collect();
        proptest::collection::vec(-2.0f64..2.0, masks.len()).prop_map(move |cs| {
            let mut v = MultiVector::zero(dim);
            for (m, c) in masks.iter().zip(cs) {
                v.add_term(*m, c);
            }
            v
        })
    }

    proptest! {
        #[test]
        fn graded_commutativity(
            (a, b, p, q) in (0u32..4, 0u32..4).prop_flat_map(|(p, q)| (arb_form(6, p), arb_form(6, q), Just(p), Just(q)))
        ) {
            let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!(a.wedge(&b).max_diff(&b.wedge(&a).scale(sign)) < 1e-12);
        }

        #[test]
        fn associativity(a in arb_form(5, 1), b in arb_form(5, 2), c in arb_form(5, 2)) {
            let lhs = a.wedge(&b).wedge(&c);
            let rhs = a.wedge(&b.wedge(&c));
            prop_assert!(lhs.max_diff(&rhs) < 1e-12);
        }

        #[test]
        fn wedge_top_agrees(a in arb_form(5, 1), b in arb_form(5, 4)) {
            prop_assert!((a.wedge(&b).top() - a.wedge_top(&b)).abs() < 1e-12);
        }
    }
}
