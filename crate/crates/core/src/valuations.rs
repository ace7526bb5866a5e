//! `B_{k,q}`, `Gamma_{k,q}`, `mu_{k,q}`, the mean curvature integrals `M_j`
//! and the volume of a domain, by boundary quadrature or in closed form.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::coeffcore::{
    crofton_coeffs, form_norm_coeff, gauss_bonnet_coeffs, sphere_volume_coeff, CoeffTable, Term, ValKey,
};
use crate::error::Result;
use crate::exec::{ChunkMap, Sequential};
use crate::extalg::{all_densities, density_keys};
use crate::geom::{Boundary, BoundaryPoint, GeodesicBall, Shape};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

/// Boundary points per partial sum. Partial sums are combined by a fixed
/// pairwise tree, so any parallel schedule over chunks gives the same bits.
pub const CHUNK: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct ValuationTable {
    pub n: usize,
    pub eps: f64,
    /// `B_{k,q}`, `k != 2q`.
    pub b: BTreeMap<(usize, usize), f64>,
    /// `Gamma_{k,q}`, `n != k - q`.
    pub gamma: BTreeMap<(usize, usize), f64>,
    /// `M_j`, `0 <= j <= 2n-1`.
    pub m: Vec<f64>,
    pub vol: f64,
}

impl ValuationTable {
    /// `mu_{k,q}`: `B` off the diagonal `k = 2q`, `Gamma` on it.
    pub fn mu(&self, k: usize, q: usize) -> Option<f64> {
        if k == 2 * q {
            self.gamma.get(&(k, q)).copied()
        } else {
            self.b.get(&(k, q)).copied()
        }
    }

    pub fn get(&self, key: ValKey) -> Option<f64> {
        match key {
            ValKey::B(k, q) => self.b.get(&(k, q)).copied(),
            ValKey::G(k, q) => self.gamma.get(&(k, q)).copied(),
            ValKey::Vol => Some(self.vol),
        }
    }

    pub fn term(&self, t: Term) -> f64 {
        match t {
            Term::Mu { k, q } => self.mu(k, q).expect("table term outside the valuation table"),
            Term::Vol => self.vol,
        }
    }

    /// `prefactor * sum coeff eps^p value` for a coefficient table.
    pub fn evaluate(&self, table: &CoeffTable) -> f64 {
        assert_eq!(table.n, self.n);
        table.evaluate(|t| self.term(t), self.eps)
    }

    /// Every `(key, value)` pair, `mu` keys excluded.
    pub fn entries(&self) -> Vec<(ValKey, f64)> {
        let mut out: Vec<(ValKey, f64)> = self.b.iter().map(|(&(k, q), v)| (ValKey::B(k, q), *v)).collect();
        out.extend(self.gamma.iter().map(|(&(k, q), v)| (ValKey::G(k, q), *v)));
        out.push((ValKey::Vol, self.vol));
        out
    }

    /// Largest `|a - b| / max(|a|, |b|, floor)` over shared entries.
    pub fn max_rel_diff(&self, other: &Self, floor: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (key, a) in self.entries() {
            if let Some(b) = other.get(key) {
                worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(floor));
            }
        }
        for (a, b) in self.m.iter().zip(&other.m) {
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(floor));
        }
        worst
    }
}

/// Weighted boundary integrals of every density and of `sigma_j(II)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawSums {
    pub densities: BTreeMap<ValKey, f64>,
    pub sigma: Vec<f64>,
    pub area: f64,
}

impl RawSums {
    pub fn zero(n: usize) -> Self {
        Self {
            densities: density_keys(n).into_iter().map(|k| (k, 0.0)).collect(),
            sigma: alloc::vec![0.0; 2 * n],
            area: 0.0,
        }
    }

    /// Add `factor * weight * (densities, sigma_j)` of one point.
    pub fn accumulate(&mut self, point: &BoundaryPoint, factor: f64) {
        let w = point.weight * factor;
        for (key, v) in all_densities(&point.h) {
            *self.densities.get_mut(&key).expect("density key") += w * v;
        }
        for (s, e) in self.sigma.iter_mut().zip(elementary_symmetric(point.h.matrix())) {
            *s += w * e;
        }
        self.area += w;
    }

    pub fn merge(&mut self, other: &Self) {
        for (k, v) in &other.densities {
            *self.densities.get_mut(k).expect("same dimension") += v;
        }
        for (a, b) in self.sigma.iter_mut().zip(&other.sigma) {
            *a += b;
        }
        self.area += other.area;
    }
}

/// `sigma_0 .. sigma_d` of the eigenvalues of a symmetric matrix.
pub fn elementary_symmetric(h: &DMatrix<f64>) -> Vec<f64> {
    let eig = h.clone().symmetric_eigen().eigenvalues;
    let mut e = alloc::vec![0.0; eig.len() + 1];
    e[0] = 1.0;
    for (i, x) in eig.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// Combine partial results with a fixed pairwise tree.
pub fn reduce_pairwise<T, F: Fn(&mut T, &T)>(mut parts: Vec<T>, merge: F) -> Option<T> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                merge(&mut a, &b);
            }
            next.push(a);
        }
        parts = next;
    }
    parts.into_iter().next()
}

/// Number of [`CHUNK`]-sized pieces of a boundary rule.
pub fn chunk_count(boundary: &Boundary<'_>) -> usize {
    boundary.len().div_ceil(CHUNK)
}

/// Partial sums of chunk `i`, each point scaled by `factor(point)`.
pub fn chunk_sums<F: Fn(&BoundaryPoint) -> f64>(n: usize, boundary: &Boundary<'_>, i: usize, factor: &F) -> RawSums {
    let mut acc = RawSums::zero(n);
    let end = ((i + 1) * CHUNK).min(boundary.len());
    for j in i * CHUNK..end {
        let p = boundary.point(j);
        let f = factor(&p);
        acc.accumulate(&p, f);
    }
    acc
}

/// All chunks through `exec`, then the pairwise reduction.
pub fn boundary_sums<E: ChunkMap, F: Fn(&BoundaryPoint) -> f64 + Sync>(
    exec: &E,
    shape: &Shape,
    level: u32,
    factor: F,
) -> RawSums {
    let n = shape.space().n;
    let boundary = shape.boundary(level);
    let parts = exec.map_chunks(chunk_count(&boundary), |i| chunk_sums(n, &boundary, i, &factor));
    reduce_pairwise(parts, RawSums::merge).unwrap_or_else(|| RawSums::zero(n))
}

/// Turn raw boundary integrals into the valuation table.
pub fn table_from_sums(n: usize, eps: f64, sums: &RawSums, vol: f64) -> ValuationTable {
    let mut b = BTreeMap::new();
    let mut gamma = BTreeMap::new();
    for (key, raw) in &sums.densities {
        match *key {
            ValKey::B(k, q) => {
                b.insert((k, q), form_norm_coeff(n, k, q).expect("admissible").to_f64() * raw);
            }
            ValKey::G(k, q) => {
                gamma.insert((k, q), 0.5 * form_norm_coeff(n, k, q).expect("admissible").to_f64() * raw);
            }
            ValKey::Vol => unreachable!(),
        }
    }
    let d = 2 * n - 1;
    let m = (0..=d)
        .map(|j| sums.sigma[j] / binom_f(d, j))
        .collect();
    ValuationTable { n, eps, b, gamma, m, vol }
}

/// Every Hermitian intrinsic volume of `shape` by boundary quadrature.
pub fn hermitian_volumes(shape: &Shape, level: u32) -> ValuationTable {
    hermitian_volumes_with(&Sequential, shape, level)
}

pub fn hermitian_volumes_with<E: ChunkMap>(exec: &E, shape: &Shape, level: u32) -> ValuationTable {
    let space = shape.space();
    let sums = boundary_sums(exec, shape, level, |_| 1.0);
    table_from_sums(space.n, space.eps, &sums, shape.volume())
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

fn binom_f(m: usize, k: usize) -> f64 {
    if k > m {
        0.0
    } else {
        factorial(m) / (factorial(k) * factorial(m - k))
    }
}

/// Geodesic ball values from `II = diag(hopf; lambda Id)`:
/// `B = c 2^{k-2q-1} lambda^{2n-k-1} (n-1)! area`,
/// `Gamma = c/2 hopf 2^{k-2q} lambda^{2n-k-2} (n-1)! area`.
pub fn ball_closed_form(ball: &GeodesicBall) -> ValuationTable {
    let n = ball.space.n;
    let (hopf, lambda) = ball.curvatures();
    let area = ball.area();
    let f = factorial(n - 1) * area;
    let mut b = BTreeMap::new();
    let mut gamma = BTreeMap::new();
    for key in density_keys(n) {
        match key {
            ValKey::B(k, q) => {
                let c = form_norm_coeff(n, k, q).expect("admissible").to_f64();
                let v = c * 2f64.powi((k - 2 * q - 1) as i32) * lambda.powi((2 * n - k - 1) as i32) * f;
                b.insert((k, q), v);
            }
            ValKey::G(k, q) => {
                let c = form_norm_coeff(n, k, q).expect("admissible").to_f64();
                let v = 0.5 * c * hopf * 2f64.powi((k - 2 * q) as i32) * lambda.powi((2 * n - k - 2) as i32) * f;
                gamma.insert((k, q), v);
            }
            ValKey::Vol => unreachable!(),
        }
    }
    let d = 2 * n - 1;
    let m = (0..=d)
        .map(|j| {
            let sigma = binom_f(d - 1, j) * lambda.powi(j as i32)
                + if j > 0 { binom_f(d - 1, j - 1) * hopf * lambda.powi(j as i32 - 1) } else { 0.0 };
            sigma * area / binom_f(d, j)
        })
        .collect();
    ValuationTable { n, eps: ball.space.eps, b, gamma, m, vol: ball.volume() }
}

/// `Gamma_{k,q} - B_{k,q} + eps c_{k,q}/c_{k+2,q+1} B_{k+2,q+1}` for
/// `max{0, k-n} < q < k/2 < n`.
pub fn check_gamma_b_relation(table: &ValuationTable) -> BTreeMap<(usize, usize), f64> {
    let n = table.n;
    let mut out = BTreeMap::new();
    for k in 0..2 * n {
        for q in 0..=k / 2 {
            let strict = q > k.saturating_sub(n) && (q > 0 || k < n) && 2 * q < k;
            if !strict || q + n <= k {
                continue;
            }
            let ratio = (form_norm_coeff(n, k, q).unwrap().to_f64()) / form_norm_coeff(n, k + 2, q + 1).unwrap().to_f64();
            let r = table.gamma[&(k, q)] - table.b[&(k, q)] + table.eps * ratio * table.b[&(k + 2, q + 1)];
            out.insert((k, q), r);
        }
    }
    out
}

/// `(O_{2n-1} - GB rhs, O_{2n-1} - M_{2n-1} - sum_{k>=1} eps^k O_{2n-2k-1}
/// binom(n-1,k)^{-1} mu_{2k,k} - 2n eps^n vol - 2n eps Crofton_{n-1})` for a
/// convex domain, the hyperplane measure taken with unit Grassmannian volume.
pub fn gauss_bonnet_residual(table: &ValuationTable) -> Result<(f64, f64)> {
    let n = table.n;
    let eps = table.eps;
    let o = sphere_volume_coeff(2 * n as u32 - 1).to_f64();
    let r51 = o - table.evaluate(&gauss_bonnet_coeffs(n)?);
    let mut r52 = o - table.m[2 * n - 1] - 2.0 * n as f64 * eps.powi(n as i32) * table.vol;
    for k in 1..n {
        let w = sphere_volume_coeff((2 * n - 2 * k - 1) as u32).to_f64() / binom_f(n - 1, k);
        r52 -= eps.powi(k as i32) * w * table.mu(2 * k, k).expect("mu_{2k,k}");
    }
    if n >= 2 {
        r52 -= 2.0 * n as f64 * eps * table.evaluate(&crofton_coeffs(n, n - 1)?);
    }
    Ok((r51, r52))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Ellipsoid;
    use core::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn unit_ball_c2() {
        let t = ball_closed_form(&GeodesicBall::new(2, 0.0, 1.0).unwrap());
        assert!(close(t.mu(0, 0).unwrap(), 1.0, 1e-14));
        assert!(close(t.mu(2, 0).unwrap(), 2.0 * PI, 1e-14));
        assert!(close(t.mu(2, 1).unwrap(), PI, 1e-14));
        assert!(close(t.m[3], 2.0 * PI * PI, 1e-14));
        // Gamma_{2,0} needs n != k - q, so it is absent in C^2
        assert!(!t.gamma.contains_key(&(2, 0)));
    }

    #[test]
    fn flat_b_equals_gamma() {
        let t = ball_closed_form(&GeodesicBall::new(3, 0.0, 0.8).unwrap());
        let mut shared = 0;
        for (key, g) in &t.gamma {
            if let Some(b) = t.b.get(key) {
                assert!(close(*g, *b, 1e-14), "{key:?}");
                shared += 1;
            }
        }
        assert!(shared > 0);
    }

    #[test]
    fn quadrature_matches_closed_form_on_round_spheres() {
        let s = Shape::Ellipsoid(Ellipsoid::from_axes(&[1.3; 4]).unwrap());
        let q = hermitian_volumes(&s, 1);
        let c = ball_closed_form(&GeodesicBall::new(2, 0.0, 1.3).unwrap());
        assert!(q.max_rel_diff(&c, 1e-12) < 1e-12);
    }

    #[test]
    fn single_point_ball_matches_closed_form() {
        for eps in [-1.0, 0.0, 1.0] {
            let ball = GeodesicBall::new(3, eps, 0.7).unwrap();
            let q = hermitian_volumes(&Shape::Ball(ball), 0);
            assert!(q.max_rel_diff(&ball_closed_form(&ball), 1e-12) < 1e-12, "eps={eps}");
        }
    }

    #[test]
    fn homogeneity_of_balls() {
        let a = ball_closed_form(&GeodesicBall::new(3, 0.0, 1.0).unwrap());
        let b = ball_closed_form(&GeodesicBall::new(3, 0.0, 2.0).unwrap());
        for (&(k, q), v) in &a.b {
            assert!(close(b.b[&(k, q)], v * 2f64.powi(k as i32), 1e-13));
        }
    }

    #[test]
    fn prop_2_6_on_balls() {
        for (eps, r) in [(1.0, 0.5), (-1.0, 0.8), (0.0, 1.1)] {
            let t = ball_closed_form(&GeodesicBall::new(3, eps, r).unwrap());
            let res = check_gamma_b_relation(&t);
            assert_eq!(res.keys().copied().collect::<Vec<_>>(), [(3, 1)]);
            for v in res.values() {
                assert!(v.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gauss_bonnet_on_balls() {
        for (n, eps) in [(2, 1.0), (2, -1.0), (3, 1.0), (3, -1.0), (4, 0.5)] {
            for r in [0.3, 0.6, 0.9] {
                let t = ball_closed_form(&GeodesicBall::new(n, eps, r).unwrap());
                let (a, b) = gauss_bonnet_residual(&t).unwrap();
                assert!(a.abs() < 1e-10 && b.abs() < 1e-10, "n={n} eps={eps} r={r}: {a:e} {b:e}");
            }
        }
    }

    #[test]
    fn pairwise_reduction_order() {
        let v: Vec<f64> = (0..7).map(|i| i as f64).collect();
        assert_eq!(reduce_pairwise(v, |a, b| *a += b), Some(21.0));
        assert_eq!(reduce_pairwise(Vec::<f64>::new(), |a, b| *a += b), None);
    }

    #[test]
    fn elementary_symmetric_functions() {
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![1.0, 2.0, 3.0]));
        let e = elementary_symmetric(&h);
        for (a, b) in e.iter().zip([1.0, 6.0, 11.0, 6.0]) {
            assert!(close(*a, b, 1e-14));
        }
    }
}
