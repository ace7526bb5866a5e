//! Exact Laurent polynomials in pi with arbitrary-precision rational
//! coefficients.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt::{self, Write};
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `sum_e c_e * pi^e` with exact rational `c_e`. Zero coefficients are never
/// stored, so structural equality is numerical equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PiScalar {
    terms: BTreeMap<i32, BigRational>,
}

impl PiScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn int(c: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn monomial(c: BigRational, pi_pow: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(pi_pow, c);
        }
        Self { terms }
    }

    /// `pi^e`.
    pub fn pi_pow(e: i32) -> Self {
        Self::monomial(BigRational::one(), e)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(pi exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// The single term, if this is a monomial (zero is not a monomial).
    pub fn as_monomial(&self) -> Option<(&BigRational, i32)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (c, *e))
        } else {
            None
        }
    }

    /// The rational value when no pi power is present.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect() }
    }

    /// Multiply by `pi^e`.
    pub fn shift(&self, e: i32) -> Self {
        Self { terms: self.terms.iter().map(|(k, c)| (k + e, c.clone())).collect() }
    }

    /// Division by a monomial. Returns `None` when `divisor` is not one.
    pub fn div_monomial(&self, divisor: &PiScalar) -> Option<Self> {
        let (c, e) = divisor.as_monomial()?;
        let inv = c.recip();
        Some(self.scale(&inv).shift(-e))
    }

    /// Multiplicative inverse of a monomial.
    pub fn recip(&self) -> Option<Self> {
        Self::one().div_monomial(self)
    }

    /// Floating-point value.
    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * powi(core::f64::consts::PI, *e))
            .sum()
    }

    fn add_term(&mut self, e: i32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }
}

fn powi(x: f64, e: i32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..e.unsigned_abs() {
        acc *= x;
    }
    if e < 0 {
        1.0 / acc
    } else {
        acc
    }
}

impl From<BigRational> for PiScalar {
    fn from(c: BigRational) -> Self {
        Self::rational(c)
    }
}

impl From<i64> for PiScalar {
    fn from(c: i64) -> Self {
        Self::int(c)
    }
}

impl Add<&PiScalar> for &PiScalar {
    type Output = PiScalar;
    fn add(self, rhs: &PiScalar) -> PiScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for PiScalar {
    type Output = PiScalar;
    fn add(mut self, rhs: PiScalar) -> PiScalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&PiScalar> for PiScalar {
    fn add_assign(&mut self, rhs: &PiScalar) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl Neg for &PiScalar {
    type Output = PiScalar;
    fn neg(self) -> PiScalar {
        PiScalar { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Neg for PiScalar {
    type Output = PiScalar;
    fn neg(self) -> PiScalar {
        -&self
    }
}

impl Sub<&PiScalar> for &PiScalar {
    type Output = PiScalar;
    fn sub(self, rhs: &PiScalar) -> PiScalar {
        let mut out = self.clone();
        out += &(-rhs);
        out
    }
}

impl Sub for PiScalar {
    type Output = PiScalar;
    fn sub(self, rhs: PiScalar) -> PiScalar {
        &self - &rhs
    }
}

impl Mul<&PiScalar> for &PiScalar {
    type Output = PiScalar;
    fn mul(self, rhs: &PiScalar) -> PiScalar {
        let mut out = PiScalar::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl Mul for PiScalar {
    type Output = PiScalar;
    fn mul(self, rhs: PiScalar) -> PiScalar {
        &self * &rhs
    }
}

impl fmt::Display for PiScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut s = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            let mag = c.abs();
            match *e {
                0 => write!(s, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(s, "{mag}*")?;
                    }
                    if *e == 1 {
                        s.push_str("pi");
                    } else {
                        write!(s, "pi^{e}")?;
                    }
                }
            }
        }
        f.write_str(&s)
    }
}
