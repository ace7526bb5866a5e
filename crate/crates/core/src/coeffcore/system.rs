//! The linear system fixing the flat Crofton coefficients from the
//! variation formulas, and its closed-form solution.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::pi::PiScalar;
use super::tables::{binom, factorial, form_norm_coeff, int, rat};
use super::variation::{variation_operator, ValKey};
use crate::error::{Error, Result};

/// Flat Crofton bracket written as `sum_q C_q B'_{k,q} + D Gamma'_{k,n-r}`,
/// `k = 2n-2r`, with `B' = B / c_{n,k,q}` and `Gamma' = 2 Gamma / c_{n,k,n-r}`.
/// All values are in units of `vol(G^C_{n-1,r})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CroftonSystemSolution {
    pub n: usize,
    pub r: usize,
    pub c: BTreeMap<usize, BigRational>,
    pub d: BigRational,
}

fn check(n: usize, r: usize) -> Result<()> {
    if r == 0 || r >= n {
        return Err(Error::PlaneDimension { n, r });
    }
    Ok(())
}

fn c_range(n: usize, r: usize) -> core::ops::Range<usize> {
    n.saturating_sub(2 * r)..n - r
}

/// `D = 1 / (2 n!) binom(n-1, r)^{-1}` and
/// `C_{n-r-a} = D binom(n-r, a) binom(r, a) / 2^{2a-1}`.
pub fn crofton_closed_form(n: usize, r: usize) -> Result<CroftonSystemSolution> {
    check(n, r)?;
    let d = rat(BigInt::one(), factorial(n as u64) * binom((n - 1) as i64, r as i64) * 2);
    let c = c_range(n, r)
        .map(|q| {
            let a = n - r - q;
            let w = rat(
                binom((n - r) as i64, a as i64) * binom(r as i64, a as i64),
                BigInt::one() << (2 * a - 1),
            );
            (q, &d * w)
        })
        .collect();
    Ok(CroftonSystemSolution { n, r, c, d })
}

fn rational(p: &PiScalar) -> BigRational {
    p.as_rational().expect("primed variation coefficients are rational")
}

/// Solve the system exactly. Rows: every `Gamma~'` coefficient of the flat
/// variation vanishes; one more row asks the `B~'` combination to give
/// `lambda^{2r}` on a boundary with `II|_D = lambda Id`.
pub fn solve_crofton_system(n: usize, r: usize) -> Result<CroftonSystemSolution> {
    check(n, r)?;
    let op = variation_operator(n)?.flat();
    let k = 2 * n - 2 * r;
    let qs: Vec<usize> = c_range(n, r).collect();
    let unknowns = qs.len() + 1;

    // Column j: primed tilde coefficients produced by unknown j.
    let mut rows: BTreeMap<ValKey, Vec<BigRational>> = BTreeMap::new();
    for j in 0..unknowns {
        let (source, scale) = if j < qs.len() {
            let q = qs[j];
            (ValKey::B(k, q), form_norm_coeff(n, k, q)?.recip().unwrap())
        } else {
            let c = form_norm_coeff(n, k, n - r)?;
            (ValKey::G(k, n - r), c.recip().unwrap().scale(&int(2)))
        };
        for t in &op.map[&source] {
            let (tk, tq) = match t.target {
                ValKey::B(a, b) | ValKey::G(a, b) => (a, b),
                ValKey::Vol => unreachable!(),
            };
            let mut primed = &(&scale * &t.coeff) * &form_norm_coeff(n, tk, tq)?;
            if matches!(t.target, ValKey::G(..)) {
                primed = primed.scale(&rat(1.into(), 2.into()));
            }
            let row = rows.entry(t.target).or_insert_with(|| alloc::vec![BigRational::zero(); unknowns + 1]);
            row[j] += rational(&primed);
        }
    }

    let mut system: Vec<Vec<BigRational>> = Vec::new();
    let mut norm = alloc::vec![BigRational::zero(); unknowns + 1];
    norm[unknowns] = BigRational::one();
    let fact = BigRational::from_integer(factorial(n as u64 - 1));
    for (key, row) in rows {
        match key {
            ValKey::G(..) => system.push(row),
            ValKey::B(tk, tq) => {
                // density of beta_{tk,tq} at II = diag(mu; lambda Id) over lambda^{2r}
                let dens = &fact * BigRational::from_integer(BigInt::one() << (tk - 2 * tq - 1));
                for j in 0..unknowns {
                    norm[j] += &row[j] * &dens;
                }
            }
            ValKey::Vol => unreachable!(),
        }
    }
    system.push(norm);

    let x = solve_exact(system, unknowns).ok_or(Error::SingularSystem { n, r })?;
    let c = qs.iter().copied().zip(x.iter().cloned()).collect();
    Ok(CroftonSystemSolution { n, r, c, d: x[unknowns - 1].clone() })
}

/// Gauss-Jordan elimination on an augmented, possibly overdetermined,
/// system. `None` unless there is exactly one solution.
fn solve_exact(mut m: Vec<Vec<BigRational>>, unknowns: usize) -> Option<Vec<BigRational>> {
    let mut row = 0;
    for col in 0..unknowns {
        let pivot = (row..m.len()).find(|&i| !m[i][col].is_zero())?;
        m.swap(row, pivot);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..=unknowns {
                    let delta = &f * &m[row][j];
                    m[i][j] -= delta;
                }
            }
        }
        row += 1;
    }
    if m[row..].iter().any(|r| !r[unknowns].is_zero()) {
        return None;
    }
    Some((0..unknowns).map(|i| m[i][unknowns].clone()).collect())
}

impl CroftonSystemSolution {
    fn c_at(&self, q: i64) -> BigRational {
        if q < 0 {
            return BigRational::zero();
        }
        self.c.get(&(q as usize)).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Residuals of the `r` equations
    /// `4 C_{n-r-1} - 2r(n-r) D = 0` and, for `a = 2..r`,
    /// `4a^2 C_{n-r-a} - (r-a+1)(n-r-a+1) C_{n-r-a+1} = 0`.
    pub fn residuals(&self) -> Vec<BigRational> {
        let (n, r) = (self.n as i64, self.r as i64);
        let mut out = Vec::new();
        out.push(int(4) * self.c_at(n - r - 1) - int(2 * r * (n - r)) * &self.d);
        for a in 2..=r {
            out.push(
                int(4 * a * a) * self.c_at(n - r - a)
                    - int((r - a + 1) * (n - r - a + 1)) * self.c_at(n - r - a + 1),
            );
        }
        out
    }

    /// The flat Crofton bracket as `mu_{k,q}` coefficients (units of vol(G)).
    pub fn mu_coefficients(&self) -> Result<BTreeMap<usize, PiScalar>> {
        let k = 2 * (self.n - self.r);
        let mut out = BTreeMap::new();
        for (q, c) in &self.c {
            out.insert(*q, form_norm_coeff(self.n, k, *q)?.recip().unwrap().scale(c));
        }
        let q = self.n - self.r;
        out.insert(q, form_norm_coeff(self.n, k, q)?.recip().unwrap().scale(&(&self.d * int(2))));
        Ok(out)
    }
}

/// `2 (n-r)! r! sum_{a=0}^{r} [(2r-2a+1)(n-r-a) - a(2a-1)] /
/// [(n-r-a)! (r-a)! a! a!] == 2 n! / (r! (n-r-1)!)`, terms with a negative
/// factorial argument dropped.
pub fn verify_cancellation_identity(n: usize, r: usize) -> bool {
    if r == 0 || r >= n {
        return false;
    }
    let f = |m: usize| factorial(m as u64);
    let mut sum = BigRational::zero();
    for a in 0..=r.min(n - r) {
        let (ai, ri, ni) = (a as i64, r as i64, n as i64);
        let num = (2 * ri - 2 * ai + 1) * (ni - ri - ai) - ai * (2 * ai - 1);
        sum += rat(BigInt::from(num), f(n - r - a) * f(r - a) * f(a) * f(a));
    }
    let lhs = sum * BigRational::from_integer(f(n - r) * f(r) * 2);
    let rhs = rat(f(n) * 2, f(r) * f(n - r - 1));
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffcore::tables::{crofton_coeffs, Term};

    #[test]
    fn two_one() {
        let s = solve_crofton_system(2, 1).unwrap();
        assert_eq!(s.d, rat(1.into(), 4.into()));
        assert_eq!(s.c[&0], &s.d / int(2));
    }

    #[test]
    fn three_one() {
        let s = solve_crofton_system(3, 1).unwrap();
        assert_eq!(s.c.len(), 1);
        assert_eq!(s.c[&1], s.d);
    }

    #[test]
    fn solver_matches_closed_form() {
        for n in 2..=6 {
            for r in 1..n {
                let s = solve_crofton_system(n, r).unwrap();
                assert_eq!(s, crofton_closed_form(n, r).unwrap(), "n={n} r={r}");
                assert!(s.residuals().iter().all(Zero::is_zero));
            }
        }
    }

    #[test]
    fn solution_is_flat_crofton_table() {
        for n in 2..=5 {
            for r in 1..n {
                let mu = solve_crofton_system(n, r).unwrap().mu_coefficients().unwrap();
                let flat = crofton_coeffs(n, r).unwrap().restrict_flat().effective();
                assert_eq!(flat.entries.len(), mu.len());
                for (q, c) in mu {
                    assert_eq!(flat.get(Term::Mu { k: 2 * n - 2 * r, q }, 0), c, "n={n} r={r} q={q}");
                }
            }
        }
    }

    #[test]
    fn cancellation_identity() {
        assert!(verify_cancellation_identity(2, 1));
        assert!(verify_cancellation_identity(5, 2));
        assert!(verify_cancellation_identity(10, 4));
        assert!(!verify_cancellation_identity(3, 3));
    }

    #[test]
    fn residuals_detect_perturbation() {
        let mut s = solve_crofton_system(5, 2).unwrap();
        *s.c.get_mut(&2).unwrap() += int(1);
        assert!(s.residuals().iter().any(|v| !v.is_zero()));
    }
}
