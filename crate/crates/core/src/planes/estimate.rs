//! Monte Carlo estimators over spaces of complex planes.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::meets::{ellipsoid_section, meets, real_basis};
use super::sampling::{haar_subspace, sample_plane_flat, sample_plane_projective, sample_rng, ComplexPlane};
use crate::coeffcore::{crofton_coeffs, crofton_variation_coeffs, form_norm_coeff, sphere_volume_coeff, total_gauss_coeffs, Term};
use crate::error::{Error, Result};
use crate::exec::{ChunkMap, Sequential};
use crate::extalg::{density_beta, sigma_restricted, SffMatrix};
use crate::geom::{Ellipsoid, Shape};
use crate::linalg::{complexify, decomplexify};
use crate::valuations::{reduce_pairwise, ValuationTable};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

/// Samples per chunk.
pub const PLANE_CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MCEstimate {
    /// Mean and `sample std / sqrt(samples)` from running sums.
    pub fn from_sums(sum: f64, sum_sq: f64, samples: u64, seed: u64) -> Self {
        let n = samples as f64;
        let mean = sum / n;
        let var = if samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        Self { mean, stderr: (var / n).sqrt(), samples, seed }
    }

    pub fn relative_stderr(&self) -> f64 {
        self.stderr / self.mean.abs()
    }
}

/// Numeric stand-in for `vol(G^C_{n-1,r})` together with the mass
/// convention of the plane measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub kappa: f64,
    pub kappa_stderr: f64,
}

#[derive(Clone, Debug)]
enum Window {
    Flat { center: DVector<Complex64>, rho: f64, weight: f64 },
    Projective,
}

/// Draws the planes used for a given shape: for flat space, Haar direction
/// plus a foot point in a disc of radius `1.01 x circumradius` about the
/// shape's center; for `CP^n`, Haar-random projective planes.
#[derive(Clone, Debug)]
pub struct PlaneSampler {
    n: usize,
    r: usize,
    window: Window,
}

impl PlaneSampler {
    pub fn new(shape: &Shape, r: usize) -> Result<Self> {
        let space = shape.space();
        let n = space.n;
        if r == 0 || r >= n {
            return Err(Error::PlaneDimension { n, r });
        }
        let window = match shape {
            Shape::Ellipsoid(e) => Window::Flat { center: complexify(e.center()), rho: 1.01 * e.circumradius(), weight: 0.0 },
            Shape::Ball(b) if b.space.eps == 0.0 => {
                Window::Flat { center: DVector::zeros(n), rho: 1.01 * b.radius, weight: 0.0 }
            }
            Shape::Ball(b) if b.space.eps > 0.0 => Window::Projective,
            Shape::Ball(_) => return Err(Error::Unsupported("plane sampling in complex hyperbolic space")),
        };
        let mut s = Self { n, r, window };
        if let Window::Flat { rho, weight, .. } = &mut s.window {
            *weight = crate::coeffcore::ball_volume_coeff(2 * (n - r) as u32).to_f64() * rho.powi(2 * (n - r) as i32);
        }
        Ok(s)
    }

    /// Override the flat window (center, radius).
    pub fn with_window(mut self, center: DVector<Complex64>, rho: f64) -> Self {
        let (n, r) = (self.n, self.r);
        if let Window::Flat { .. } = self.window {
            let weight = crate::coeffcore::ball_volume_coeff(2 * (n - r) as u32).to_f64() * rho.powi(2 * (n - r) as i32);
            self.window = Window::Flat { center, rho, weight };
        }
        self
    }

    /// Total mass sampled: the translational window for flat space, 1 for
    /// the probability measure on projective planes.
    pub fn weight(&self) -> f64 {
        match &self.window {
            Window::Flat { weight, .. } => *weight,
            Window::Projective => 1.0,
        }
    }

    pub fn sample(&self, seed: u64, index: u64) -> ComplexPlane {
        let mut rng = sample_rng(seed, index);
        match &self.window {
            Window::Flat { center, rho, .. } => sample_plane_flat(self.n, self.r, center, *rho, &mut rng).0,
            Window::Projective => sample_plane_projective(self.n, self.r, &mut rng),
        }
    }
}

fn chunk_range(chunk: usize, total: u64) -> core::ops::Range<u64> {
    let start = chunk as u64 * PLANE_CHUNK;
    start..(start + PLANE_CHUNK).min(total)
}

fn chunk_count(total: u64) -> usize {
    total.div_ceil(PLANE_CHUNK) as usize
}

/// Number of sampled planes in `chunk` that meet the shape.
pub fn hit_chunk(shape: &Shape, sampler: &PlaneSampler, seed: u64, chunk: usize, total: u64) -> Result<u64> {
    let mut hits = 0;
    for i in chunk_range(chunk, total) {
        if meets(shape, &sampler.sample(seed, i))? {
            hits += 1;
        }
    }
    Ok(hits)
}

/// `int chi(shape cap L) dL` relative to the Grassmannian mass: window
/// weight times hit fraction (flat) or hit fraction (projective).
pub fn chi_measure_estimate(shape: &Shape, r: usize, samples: u64, seed: u64) -> Result<MCEstimate> {
    chi_measure_estimate_with(&Sequential, &PlaneSampler::new(shape, r)?, shape, samples, seed)
}

pub fn chi_measure_estimate_with<E: ChunkMap>(
    exec: &E,
    sampler: &PlaneSampler,
    shape: &Shape,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    assert!(samples > 1);
    let parts = exec.map_chunks(chunk_count(samples), |c| hit_chunk(shape, sampler, seed, c, samples));
    let hits: u64 = parts.into_iter().sum::<Result<u64>>()?;
    let w = sampler.weight();
    let h = hits as f64;
    Ok(MCEstimate::from_sums(w * h, w * w * h, samples, seed))
}

/// The Crofton bracket `binom(n-1,r)^{-1} (...)` evaluated on a table; the
/// Grassmannian factor is left out.
pub fn crofton_rhs(table: &ValuationTable, r: usize) -> Result<f64> {
    Ok(table.evaluate(&crofton_coeffs(table.n, r)?))
}

/// `kappa = estimate / crofton_rhs` on a reference shape.
pub fn calibrate(estimate: &MCEstimate, rhs: f64) -> Result<Calibration> {
    if !(rhs.abs() > 1e-300) || !rhs.is_finite() {
        return Err(Error::DegenerateCalibration);
    }
    Ok(Calibration { kappa: estimate.mean / rhs, kappa_stderr: estimate.stderr / rhs.abs() })
}

/// `(estimate - kappa rhs) / sigma`, both uncertainties in quadrature.
pub fn z_score(estimate: &MCEstimate, cal: &Calibration, rhs: f64) -> f64 {
    let sigma = (estimate.stderr.powi(2) + (rhs * cal.kappa_stderr).powi(2)).sqrt();
    (estimate.mean - cal.kappa * rhs) / sigma
}

/// Running sums for the total-curvature estimator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CurvatureSums {
    pub hits: u64,
    /// sum and sum of squares of `M_{2r-1}(section)` over hits
    pub sum: f64,
    pub sum_sq: f64,
    /// largest `|M_{2r-1} - O_{2r-1}| / O_{2r-1}` seen
    pub worst: f64,
}

impl CurvatureSums {
    pub fn merge(&mut self, o: &Self) {
        self.hits += o.hits;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.worst = self.worst.max(o.worst);
    }
}

/// The section `ellipsoid cap plane` as an ellipsoid in `C^r = R^{2r}`
/// (coordinates along the plane's real basis), if nonempty.
pub fn section_ellipsoid(e: &Ellipsoid, plane: &ComplexPlane) -> Result<Option<Ellipsoid>> {
    let ComplexPlane::Affine { dirs, anchor } = plane else {
        return Err(Error::Unsupported("sections need affine planes"));
    };
    let sec = ellipsoid_section(e, &decomplexify(anchor), &real_basis(dirs));
    if sec.min >= 1.0 {
        return Ok(None);
    }
    // |b + M s|^2 = min + (s - s*)^T G (s - s*), G = L L^T
    let l = sec.gram.cholesky().expect("positive definite").l();
    let map = l.transpose().try_inverse().expect("invertible") * (1.0 - sec.min).sqrt();
    Ellipsoid::new(sec.center, map).map(Some)
}

pub fn curvature_chunk(
    e: &Ellipsoid,
    sampler: &PlaneSampler,
    r: usize,
    nodes: usize,
    seed: u64,
    chunk: usize,
    total: u64,
) -> Result<CurvatureSums> {
    let o = sphere_volume_coeff(2 * r as u32 - 1).to_f64();
    let mut acc = CurvatureSums::default();
    for i in chunk_range(chunk, total) {
        if let Some(sec) = section_ellipsoid(e, &sampler.sample(seed, i))? {
            let m = sec.total_gauss_curvature(nodes);
            acc.hits += 1;
            acc.sum += m;
            acc.sum_sq += m * m;
            acc.worst = acc.worst.max((m - o).abs() / o);
        }
    }
    Ok(acc)
}

/// Result of the total-curvature run: the measure-weighted mean of
/// `M_{2r-1}(partial(Omega cap L))`, the hit measure from the same planes,
/// and their ratio (which should be `O_{2r-1}`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TotalGaussReport {
    pub estimate: MCEstimate,
    pub chi: MCEstimate,
    pub ratio: f64,
    pub ratio_stderr: f64,
    pub worst_section_error: f64,
}

/// `nodes` polar nodes per angle are used on each section boundary.
pub fn total_gauss_estimate(e: &Ellipsoid, r: usize, samples: u64, seed: u64, nodes: usize) -> Result<TotalGaussReport> {
    total_gauss_estimate_with(&Sequential, e, r, samples, seed, nodes)
}

pub fn total_gauss_estimate_with<E: ChunkMap>(
    exec: &E,
    e: &Ellipsoid,
    r: usize,
    samples: u64,
    seed: u64,
    nodes: usize,
) -> Result<TotalGaussReport> {
    assert!(samples > 1);
    let shape = Shape::Ellipsoid(e.clone());
    let sampler = PlaneSampler::new(&shape, r)?;
    let parts: Vec<CurvatureSums> = exec
        .map_chunks(chunk_count(samples), |c| curvature_chunk(e, &sampler, r, nodes, seed, c, samples))
        .into_iter()
        .collect::<Result<_>>()?;
    let s = reduce_pairwise(parts, CurvatureSums::merge).unwrap_or_default();
    let w = sampler.weight();
    let estimate = MCEstimate::from_sums(w * s.sum, w * w * s.sum_sq, samples, seed);
    let h = s.hits as f64;
    let chi = MCEstimate::from_sums(w * h, w * w * h, samples, seed);
    let ratio = s.sum / h;
    let ratio_var = if s.hits > 1 { ((s.sum_sq - h * ratio * ratio) / (h - 1.0)).max(0.0) } else { 0.0 };
    Ok(TotalGaussReport {
        estimate,
        chi,
        ratio,
        ratio_stderr: (ratio_var / h).sqrt(),
        worst_section_error: s.worst,
    })
}

/// Flat total-curvature prediction `total_gauss_coeffs` on a table (the
/// Grassmannian factor left out).
pub fn total_gauss_rhs(table: &ValuationTable, r: usize) -> Result<f64> {
    Ok(table.evaluate(&total_gauss_coeffs(table.n, r)?))
}

/// Real `(2n-2) x 2r` basis of a Haar-random complex r-subspace of `D`.
pub fn sample_d_subspace(n: usize, r: usize, seed: u64, index: u64) -> DMatrix<f64> {
    let mut rng = sample_rng(seed, index);
    real_basis(&haar_subspace(n - 1, r, &mut rng))
}

pub fn grassmann_chunk(h_d: &DMatrix<f64>, n: usize, r: usize, seed: u64, chunk: usize, total: u64) -> Result<(f64, f64)> {
    let mut acc = (0.0, 0.0);
    for i in chunk_range(chunk, total) {
        let s = sigma_restricted(h_d, &sample_d_subspace(n, r, seed, i))?;
        acc.0 += s;
        acc.1 += s * s;
    }
    Ok(acc)
}

/// Haar average of `sigma_{2r}(II|_V)` over complex r-subspaces `V` of `D`.
pub fn grassmann_sigma_average(h: &SffMatrix, r: usize, samples: u64, seed: u64) -> Result<MCEstimate> {
    grassmann_sigma_average_with(&Sequential, h, r, samples, seed)
}

pub fn grassmann_sigma_average_with<E: ChunkMap>(
    exec: &E,
    h: &SffMatrix,
    r: usize,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    let n = h.n();
    if r == 0 || r >= n {
        return Err(Error::PlaneDimension { n, r });
    }
    let h_d = h.restrict_d();
    let parts: Vec<(f64, f64)> = exec
        .map_chunks(chunk_count(samples), |c| grassmann_chunk(&h_d, n, r, seed, c, samples))
        .into_iter()
        .collect::<Result<_>>()?;
    let (sum, sum_sq) = reduce_pairwise(parts, |a, b| {
        a.0 += b.0;
        a.1 += b.1;
    })
    .unwrap_or_default();
    Ok(MCEstimate::from_sums(sum, sum_sq, samples, seed))
}

/// Density form of the same average:
/// `sum_q w_q c_{n,2n-2r-1,q} P_beta(2n-2r-1, q; h)` with `w_q` the
/// coefficients of the plane-measure variation.
pub fn grassmann_density_combination(h: &SffMatrix, r: usize) -> Result<f64> {
    let n = h.n();
    let table = crofton_variation_coeffs(n, r)?.effective();
    let mut total = 0.0;
    for ((term, _), c) in &table.entries {
        let Term::Mu { k, q } = *term else { continue };
        total += c.to_f64() * form_norm_coeff(n, k, q)?.to_f64() * density_beta(k, q, h)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::GeodesicBall;
    use crate::valuations::{ball_closed_form, hermitian_volumes};
    use core::f64::consts::PI;

    fn ball(n: usize, eps: f64, radius: f64) -> Shape {
        Shape::Ball(GeodesicBall::new(n, eps, radius).unwrap())
    }

    #[test]
    fn flat_ball_hit_fraction() {
        // lines through the unit ball of C^2: foot points uniform in a disc
        let shape = ball(2, 0.0, 1.0);
        let est = chi_measure_estimate(&shape, 1, 40_000, 3).unwrap();
        assert!((est.mean - PI).abs() < 4.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn flat_kappa() {
        let shape = ball(2, 0.0, 1.0);
        let Shape::Ball(b) = &shape else { unreachable!() };
        let rhs = crofton_rhs(&ball_closed_form(b), 1).unwrap();
        assert!((rhs - PI * PI).abs() < 1e-12);
        let cal = calibrate(&chi_measure_estimate(&shape, 1, 40_000, 5).unwrap(), rhs).unwrap();
        assert!((cal.kappa - 1.0 / PI).abs() < 4.0 * cal.kappa_stderr, "{cal:?}");
    }

    #[test]
    fn projective_kappa() {
        let shape = ball(2, 1.0, 0.9);
        let Shape::Ball(b) = &shape else { unreachable!() };
        let rhs = crofton_rhs(&ball_closed_form(b), 1).unwrap();
        let cal = calibrate(&chi_measure_estimate(&shape, 1, 40_000, 7).unwrap(), rhs).unwrap();
        assert!((cal.kappa - 2.0 / (PI * PI)).abs() < 4.0 * cal.kappa_stderr, "{cal:?}");
    }

    #[test]
    fn translation_invariance() {
        let e = Ellipsoid::from_axes(&[1.0, 0.7, 0.5, 0.9]).unwrap();
        let moved = e.transformed(&DMatrix::identity(4, 4), &DVector::from_vec(alloc::vec![3.0, -1.0, 0.5, 2.0])).unwrap();
        let a = chi_measure_estimate(&Shape::Ellipsoid(e), 1, 20_000, 11).unwrap();
        let b = chi_measure_estimate(&Shape::Ellipsoid(moved), 1, 20_000, 11).unwrap();
        // same draws relative to the window
        assert!((a.mean - b.mean).abs() < 1e-9 * a.mean, "{a:?} {b:?}");
    }

    #[test]
    fn nested_shapes_monotone() {
        let small = Shape::Ellipsoid(Ellipsoid::from_axes(&[0.5, 0.4, 0.3, 0.6]).unwrap());
        let big = Shape::Ellipsoid(Ellipsoid::from_axes(&[1.0, 0.8, 0.6, 1.2]).unwrap());
        let sampler = PlaneSampler::new(&big, 1).unwrap();
        for i in 0..2000 {
            let p = sampler.sample(1, i);
            if meets(&small, &p).unwrap() {
                assert!(meets(&big, &p).unwrap());
            }
        }
    }

    #[test]
    fn crofton_on_ellipsoid_uses_flat_kappa() {
        let e = Ellipsoid::from_axes(&[1.0, 0.8, 0.6, 0.9]).unwrap();
        let shape = Shape::Ellipsoid(e);
        let rhs = crofton_rhs(&hermitian_volumes(&shape, 1), 1).unwrap();
        let est = chi_measure_estimate(&shape, 1, 40_000, 13).unwrap();
        let cal = Calibration { kappa: 1.0 / PI, kappa_stderr: 0.0 };
        assert!(z_score(&est, &cal, rhs).abs() < 4.0);
    }

    #[test]
    fn sections_have_full_curvature() {
        let e = Ellipsoid::from_axes(&[1.0, 0.8, 0.6, 0.9]).unwrap();
        let rep = total_gauss_estimate(&e, 1, 2000, 17, 64).unwrap();
        let o3 = 2.0 * PI;
        // very thin sections converge slowest
        assert!(rep.worst_section_error < 1e-4, "{rep:?}");
        assert!((rep.ratio - o3).abs() < 1e-6 * o3);
        // and the plane-measure side agrees with the valuation side
        let table = hermitian_volumes(&Shape::Ellipsoid(e), 1);
        assert!(total_gauss_rhs(&table, 1).unwrap() > 0.0);
    }

    #[test]
    fn grassmann_average_matches_densities() {
        let m = DMatrix::from_fn(5, 5, |i, j| if i == j { 1.0 + 0.3 * i as f64 } else { 0.1 * ((i + 2 * j) % 3) as f64 });
        let h = SffMatrix::new(3, &m + m.transpose());
        let mc = grassmann_sigma_average(&h, 1, 20_000, 19).unwrap();
        let formula = grassmann_density_combination(&h, 1).unwrap();
        assert!((mc.mean - formula).abs() < 4.0 * mc.stderr, "{mc:?} {formula}");
    }
}
