//! Brute-force Leibniz evaluation of the same densities: 1-forms are
//! vectors, 2-forms antisymmetric matrices, and the top form is evaluated on
//! the frame by summing over all permutations of the slots.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::pullback::{slot_e, slot_je, SffMatrix};
use crate::coeffcore::admissible;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormSpec {
    Beta { k: usize, q: usize },
    Gamma { k: usize, q: usize },
}

enum Factor {
    One(DVector<f64>),
    Two(DMatrix<f64>),
}

fn outer_anti(u: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    u * v.transpose() - v * u.transpose()
}

/// Value of `f_1 ^ ... ^ f_m` on `(e_0, ..., e_{d-1})`.
fn evaluate(factors: &[Factor], d: usize) -> f64 {
    let twos = factors.iter().filter(|f| matches!(f, Factor::Two(_))).count();
    let mut perm: Vec<usize> = (0..d).collect();
    let mut total = 0.0;
    // Heap's algorithm; each step is one transposition.
    let mut c = vec![0usize; d];
    let mut sign = 1.0;
    let term = |perm: &[usize]| {
        let mut slot = 0;
        let mut prod = 1.0;
        for f in factors {
            match f {
                Factor::One(v) => {
                    prod *= v[perm[slot]];
                    slot += 1;
                }
                Factor::Two(m) => {
                    prod *= m[(perm[slot], perm[slot + 1])];
                    slot += 2;
                }
            }
        }
        debug_assert_eq!(slot, d);
        prod
    };
    total += sign * term(&perm);
    let mut i = 0;
    while i < d {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            total += sign * term(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    total / (1u64 << twos) as f64
}

/// Density of a `beta_{k,q}` or `gamma_{k,q}` form, computed from `h`
/// without the multivector engine. Limited to `n <= 3`.
pub fn permutation_oracle(spec: FormSpec, h: &SffMatrix) -> Result<f64> {
    let n = h.n();
    if n > 3 {
        return Err(Error::OracleTooLarge { n });
    }
    let d = 2 * n - 1;
    let m = h.matrix();
    let unit = |i: usize| DVector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 });
    let conn = |j: usize| m.column(j).into_owned();

    let mut t0 = DMatrix::zeros(d, d);
    let mut t1 = DMatrix::zeros(d, d);
    let mut t2 = DMatrix::zeros(d, d);
    for i in 2..=n {
        let (e, je) = (slot_e(i), slot_je(i));
        t0 += outer_anti(&conn(e), &conn(je));
        t1 += outer_anti(&unit(e), &conn(je)) - outer_anti(&unit(je), &conn(e));
        t2 += outer_anti(&unit(e), &unit(je));
    }

    let (first, a, b, c) = match spec {
        FormSpec::Beta { k, q } => {
            if !admissible(n, k, q) || k == 2 * q {
                return Err(Error::IndexRange { n, k, q });
            }
            (unit(0), n + q - k, k - 2 * q - 1, q)
        }
        FormSpec::Gamma { k, q } => {
            if !admissible(n, k, q) || k == n + q {
                return Err(Error::IndexRange { n, k, q });
            }
            (m.row(0).transpose(), n + q - k - 1, k - 2 * q, q)
        }
    };
    let mut factors = vec![Factor::One(first)];
    factors.extend((0..a).map(|_| Factor::Two(t0.clone())));
    factors.extend((0..b).map(|_| Factor::Two(t1.clone())));
    factors.extend((0..c).map(|_| Factor::Two(t2.clone())));
    Ok(evaluate(&factors, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_generator_forms() {
        let h = SffMatrix::diagonal(2, 1.0, 1.0);
        assert_eq!(permutation_oracle(FormSpec::Beta { k: 3, q: 1 }, &h).unwrap(), 1.0);
        assert_eq!(permutation_oracle(FormSpec::Gamma { k: 2, q: 1 }, &h).unwrap(), 1.0);
        assert_eq!(permutation_oracle(FormSpec::Gamma { k: 0, q: 0 }, &h).unwrap(), 1.0);
    }

    #[test]
    fn zero_sff_kills_curvature_factors() {
        let h = SffMatrix::diagonal(3, 0.0, 0.0);
        assert_eq!(permutation_oracle(FormSpec::Beta { k: 1, q: 0 }, &h).unwrap(), 0.0);
        assert_eq!(permutation_oracle(FormSpec::Beta { k: 4, q: 1 }, &h).unwrap(), 0.0);
        assert_eq!(permutation_oracle(FormSpec::Beta { k: 5, q: 2 }, &h).unwrap(), 2.0);
    }

    #[test]
    fn size_limit() {
        let h = SffMatrix::diagonal(4, 1.0, 1.0);
        assert_eq!(
            permutation_oracle(FormSpec::Beta { k: 7, q: 3 }, &h),
            Err(Error::OracleTooLarge { n: 4 })
        );
    }
}
