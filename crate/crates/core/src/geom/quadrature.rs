//! Gauss-Legendre rules, adaptive 1-d integration and product rules on
//! spheres in hyperspherical coordinates.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut x = alloc::vec![0.0; m];
    let mut w = alloc::vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=m {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

/// `int_a^b f` by recursive bisection of a 10-point Gauss-Legendre panel
/// until each panel agrees with its two halves to `rel_tol` of the first
/// whole-interval estimate (or to rounding level).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let (x, w) = gauss_legendre(10);
    let panel = |lo: f64, hi: f64| {
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>() * half
    };
    let first = panel(a, b);
    let width = (b - a).abs().max(f64::MIN_POSITIVE);
    let budget = rel_tol * first.abs();
    let mut total = 0.0;
    let mut stack = alloc::vec![(a, b, first, 0u32)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (l, r) = (panel(lo, mid), panel(mid, hi));
        let diff = (l + r - whole).abs();
        let settled = diff <= budget * (hi - lo).abs() / width || diff <= 8.0 * f64::EPSILON * (l.abs() + r.abs());
        if settled || depth >= 30 {
            total += l + r;
        } else {
            stack.push((lo, mid, l, depth + 1));
            stack.push((mid, hi, r, depth + 1));
        }
    }
    total
}

/// Product rule on the unit sphere `S^{dim-1}`: Gauss-Legendre in each polar
/// angle (`m` nodes on `[0, pi]`), trapezoid with `2m` nodes in the azimuth.
/// Weights include the spherical Jacobian, so they sum to the sphere area.
/// Nodes are generated on demand from their index.
#[derive(Clone, Debug)]
pub struct SphereRule {
    dim: usize,
    m: usize,
    polar: Vec<(f64, f64, f64)>,
}

impl SphereRule {
    pub fn new(dim: usize, m: usize) -> Self {
        assert!(dim >= 2 && m >= 1);
        let (gx, gw) = gauss_legendre(m);
        let polar = gx
            .iter()
            .zip(&gw)
            .map(|(x, w)| {
                let theta = 0.5 * PI * (x + 1.0);
                (theta.cos(), theta.sin(), 0.5 * PI * w)
            })
            .collect();
        Self { dim, m, polar }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        2 * self.m.pow(self.dim as u32 - 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes the `i`-th node into `u` and returns its weight.
    pub fn node_into(&self, i: usize, u: &mut [f64]) -> f64 {
        let az = 2 * self.m;
        let (mut rest, j) = (i / az, i % az);
        let mut sin_prod = 1.0;
        let mut weight = 2.0 * PI / az as f64;
        for level in 0..self.dim - 2 {
            let (c, s, w) = self.polar[rest % self.m];
            rest /= self.m;
            u[level] = sin_prod * c;
            weight *= w * s.powi((self.dim - 2 - level) as i32);
            sin_prod *= s;
        }
        let phi = 2.0 * PI * j as f64 / az as f64;
        u[self.dim - 2] = sin_prod * phi.cos();
        u[self.dim - 1] = sin_prod * phi.sin();
        weight
    }

    pub fn node(&self, i: usize) -> (Vec<f64>, f64) {
        let mut u = alloc::vec![0.0; self.dim];
        let w = self.node_into(i, &mut u);
        (u, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials() {
        for m in 1..12 {
            let (x, w) = gauss_legendre(m);
            for p in 0..2 * m {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let expect = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
                assert!((got - expect).abs() < 1e-14, "m={m} p={p}");
            }
        }
    }

    #[test]
    fn adaptive() {
        let v = integrate_adaptive(|x| x.sin(), 0.0, PI, 1e-14);
        assert!((v - 2.0).abs() < 1e-13);
        let v = integrate_adaptive(|x| x.sqrt(), 0.0, 1.0, 1e-13);
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn sphere_areas() {
        // O_1 = 2pi, O_2 = 4pi, O_3 = 2pi^2, O_5 = pi^3
        for (dim, area) in [(2, 2.0 * PI), (3, 4.0 * PI), (4, 2.0 * PI * PI), (6, PI.powi(3))] {
            let rule = SphereRule::new(dim, 16);
            let mut total = 0.0;
            for i in 0..rule.len() {
                let (u, w) = rule.node(i);
                total += w;
                let norm: f64 = u.iter().map(|x| x * x).sum();
                assert!((norm - 1.0).abs() < 1e-14);
            }
            assert!((total - area).abs() < 1e-12 * area, "dim={dim}");
        }
    }

    #[test]
    fn sphere_second_moment() {
        // int_{S^3} u_0^2 = O_3 / 4
        let rule = SphereRule::new(4, 16);
        let got: f64 = (0..rule.len()).map(|i| rule.node(i)).map(|(u, w)| w * u[0] * u[0]).sum();
        assert!((got - 0.5 * PI * PI).abs() < 1e-12);
    }
}
