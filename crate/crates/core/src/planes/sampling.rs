//! Invariant sampling of complex planes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::coeffcore::ball_volume_coeff;
use crate::linalg::complex_gram_schmidt;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

/// Generator for sample `index` of the run `seed`: every sample owns a
/// ChaCha stream, so results do not depend on how indices are scheduled.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn complex_gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// Haar-distributed unitary `n x n` (Gram-Schmidt of a Gaussian matrix).
pub fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    loop {
        if let Some(q) = complex_gram_schmidt(&complex_gaussian(n, n, rng)) {
            return q;
        }
    }
}

/// Orthonormal basis (columns) of a Haar-random complex `r`-subspace of `C^n`.
pub fn haar_subspace(n: usize, r: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    loop {
        if let Some(q) = complex_gram_schmidt(&complex_gaussian(n, r, rng)) {
            return q;
        }
    }
}

/// Uniform point in the Euclidean ball of radius `rho` in `R^dim`.
pub fn uniform_in_ball(dim: usize, rho: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let mut g = DVector::from_fn(dim, |_, _| StandardNormal.sample(&mut *rng));
    let norm = g.norm();
    let u: f64 = rand_distr::Uniform::new(0.0f64, 1.0).expect("valid range").sample(rng);
    g *= rho * u.powf(1.0 / dim as f64) / norm;
    g
}

/// A complex r-plane. `Affine`: `{anchor + dirs s}` in `C^n` with
/// orthonormal `dirs` and `anchor` orthogonal to them. `Projective`: the
/// projectivisation of the span of the orthonormal columns of `span` in
/// `C^{n+1}` (Fubini-Study, holomorphic curvature 4).
#[derive(Clone, Debug, PartialEq)]
pub enum ComplexPlane {
    Affine { dirs: DMatrix<Complex64>, anchor: DVector<Complex64> },
    Projective { span: DMatrix<Complex64> },
}

/// Flat planes hitting the ball of radius `rho` about `center`: Haar
/// direction, foot point uniform in the radius-`rho` disc of the orthogonal
/// complement around the projected center. Returns the plane and the
/// translational mass `omega_{2n-2r} rho^{2n-2r}`.
pub fn sample_plane_flat(
    n: usize,
    r: usize,
    center: &DVector<Complex64>,
    rho: f64,
    rng: &mut ChaCha8Rng,
) -> (ComplexPlane, f64) {
    assert!(r >= 1 && r < n);
    let u = haar_unitary(n, rng);
    let dirs = u.columns(0, r).into_owned();
    let perp = u.columns(r, n - r);
    let offset = uniform_in_ball(2 * (n - r), rho, rng);
    let z = DVector::from_fn(n - r, |j, _| Complex64::new(offset[2 * j], offset[2 * j + 1]));
    let along = &dirs * (dirs.adjoint() * center);
    let anchor = center - along + perp * z;
    let weight = ball_volume_coeff(2 * (n - r) as u32).to_f64() * rho.powi(2 * (n - r) as i32);
    (ComplexPlane::Affine { dirs, anchor }, weight)
}

/// Haar-random projective r-plane of `CP^n`.
pub fn sample_plane_projective(n: usize, r: usize, rng: &mut ChaCha8Rng) -> ComplexPlane {
    assert!(r >= 1 && r < n);
    ComplexPlane::Projective { span: haar_subspace(n + 1, r + 1, rng) }
}

/// Fubini-Study distance from the point `[p]` (unit `p`) to a projective
/// plane: `arccos |P_W p|`.
pub fn projective_distance(span: &DMatrix<Complex64>, p: &DVector<Complex64>) -> f64 {
    let proj = span.adjoint() * p;
    proj.norm().clamp(0.0, 1.0).acos()
}
