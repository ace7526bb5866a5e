//! Pull-backs of the invariant forms to the boundary and their top-degree
//! densities, given the second fundamental form in a J-adapted frame.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::multivector::MultiVector;
use crate::coeffcore::{admissible, ValKey};
use crate::error::{Error, Result};

/// Slot of the `e_i` direction, `i = 2..=n`; slot 0 is `JN`.
pub const fn slot_e(i: usize) -> usize {
    2 * i - 3
}

/// Slot of the `J e_i` direction.
pub const fn slot_je(i: usize) -> usize {
    2 * i - 2
}

/// Second fundamental form (inner normal) on the `2n-1` frame slots
/// `JN, e_2, Je_2, ..., e_n, Je_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SffMatrix {
    n: usize,
    h: DMatrix<f64>,
}

impl SffMatrix {
    /// Symmetrises `h`; panics if the size is not `2n-1` or the asymmetry
    /// exceeds `1e-9` relative to the largest entry.
    pub fn new(n: usize, h: DMatrix<f64>) -> Self {
        let d = 2 * n - 1;
        assert!(n >= 1 && h.nrows() == d && h.ncols() == d, "II must be (2n-1)x(2n-1)");
        let scale = h.amax().max(1.0);
        let asym = (&h - h.transpose()).amax();
        assert!(asym <= 1e-9 * scale, "II not symmetric (defect {asym:e})");
        let h = (&h + h.transpose()) * 0.5;
        Self { n, h }
    }

    /// `diag(hopf; lambda, ..., lambda)`.
    pub fn diagonal(n: usize, hopf: f64, lambda: f64) -> Self {
        let mut h = DMatrix::from_diagonal_element(2 * n - 1, 2 * n - 1, lambda);
        h[(0, 0)] = hopf;
        Self { n, h }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// The block on the distribution `D` (slots `1..2n-1`).
    pub fn restrict_d(&self) -> DMatrix<f64> {
        let d = 2 * self.n - 2;
        self.h.view((1, 1), (d, d)).into_owned()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { n: self.n, h: &self.h * t }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pullbacks {
    pub beta: MultiVector,
    pub gamma: MultiVector,
    pub theta0: MultiVector,
    pub theta1: MultiVector,
    pub theta2: MultiVector,
}

pub fn build_pullbacks(h: &SffMatrix) -> Pullbacks {
    let n = h.n;
    let d = 2 * n - 1;
    let m = &h.h;
    // alpha_{1j} = sum_l h_{lj} alpha_l
    let conn = |j: usize| MultiVector::one_form(m.column(j).as_slice());
    let gen = |i: usize| MultiVector::generator(d, i);

    let mut theta0 = MultiVector::zero(d);
    let mut theta1 = MultiVector::zero(d);
    let mut theta2 = MultiVector::zero(d);
    for i in 2..=n {
        let (e, je) = (slot_e(i), slot_je(i));
        theta0 = &theta0 + &conn(e).wedge(&conn(je));
        theta1 = &theta1 + &(&gen(e).wedge(&conn(je)) - &gen(je).wedge(&conn(e)));
        theta2 = &theta2 + &gen(e).wedge(&gen(je));
    }
    Pullbacks { beta: gen(0), gamma: conn(0), theta0, theta1, theta2 }
}

fn beta_exponents(n: usize, k: usize, q: usize) -> Result<(u32, u32, u32)> {
    if !admissible(n, k, q) || k == 2 * q {
        return Err(Error::IndexRange { n, k, q });
    }
    Ok(((n + q - k) as u32, (k - 2 * q - 1) as u32, q as u32))
}

fn gamma_exponents(n: usize, k: usize, q: usize) -> Result<(u32, u32, u32)> {
    if !admissible(n, k, q) || k == n + q {
        return Err(Error::IndexRange { n, k, q });
    }
    Ok(((n + q - k - 1) as u32, (k - 2 * q) as u32, q as u32))
}

fn top_density(p: &Pullbacks, one: &MultiVector, (a, b, c): (u32, u32, u32)) -> f64 {
    let x = p.theta0.pow(a).wedge(&p.theta1.pow(b)).wedge(&p.theta2.pow(c));
    one.wedge_top(&x)
}

/// Top coefficient of `beta ^ theta0^{n-k+q} ^ theta1^{k-2q-1} ^ theta2^q`.
pub fn density_beta(k: usize, q: usize, h: &SffMatrix) -> Result<f64> {
    let e = beta_exponents(h.n, k, q)?;
    let p = build_pullbacks(h);
    Ok(top_density(&p, &p.beta, e))
}

/// Top coefficient of `gamma ^ theta0^{n-k+q-1} ^ theta1^{k-2q} ^ theta2^q`.
pub fn density_gamma(k: usize, q: usize, h: &SffMatrix) -> Result<f64> {
    let e = gamma_exponents(h.n, k, q)?;
    let p = build_pullbacks(h);
    Ok(top_density(&p, &p.gamma, e))
}

/// Every defined density at once, keyed `B(k,q)` for beta and `G(k,q)` for
/// gamma. Both families run over `theta0^a theta1^b theta2^c` with
/// `a + b + c = n - 1`, so each such product is formed once.
pub fn all_densities(h: &SffMatrix) -> BTreeMap<ValKey, f64> {
    let n = h.n;
    let p = build_pullbacks(h);
    let top = (n - 1) as u32;
    let t0 = p.theta0.powers(top);
    let t1 = p.theta1.powers(top);
    let t2 = p.theta2.powers(top);
    let mut out = BTreeMap::new();
    for a in 0..=top {
        let y = t0[a as usize].clone();
        for b in 0..=top - a {
            let yb = y.wedge(&t1[b as usize]);
            let c = top - a - b;
            let x = yb.wedge(&t2[c as usize]);
            let (b, c) = (b as usize, c as usize);
            out.insert(ValKey::B(2 * c + b + 1, c), p.beta.wedge_top(&x));
            out.insert(ValKey::G(2 * c + b, c), p.gamma.wedge_top(&x));
        }
    }
    out
}

/// Keys produced by [`all_densities`] for dimension `n`.
pub fn density_keys(n: usize) -> Vec<ValKey> {
    let mut keys = Vec::new();
    for c in 0..n {
        for b in 0..n - c {
            keys.push(ValKey::B(2 * c + b + 1, c));
            keys.push(ValKey::G(2 * c + b, c));
        }
    }
    keys.sort();
    keys
}
