//! Test domains, their boundary quadrature and second fundamental forms.

mod ellipsoid;
mod frame;
mod jacobi;
mod quadrature;
mod space;

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use ellipsoid::Ellipsoid;
pub use frame::{frame_sff, j_adapted_frame, rotate_frame};
pub use jacobi::jacobi_oracle;
pub use quadrature::{gauss_legendre, integrate_adaptive, SphereRule};
pub use space::{cs, geodesic_sphere_curvatures, sn, sphere_area, sphere_area_and_ball_volume, AmbientSpace};

use crate::error::{Error, Result};
use crate::extalg::SffMatrix;

/// Polar nodes per angle at level 0; level `L` uses `BASE_NODES * 2^L`.
pub const BASE_NODES: usize = 8;

/// A boundary sample: position, outward unit normal, J-adapted frame
/// `(JN, e_2, Je_2, ...)` as columns, `II` with respect to the inner normal
/// in that frame, and the quadrature weight.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub position: DVector<f64>,
    pub normal: DVector<f64>,
    pub frame: DMatrix<f64>,
    pub h: SffMatrix,
    pub weight: f64,
}

/// Geodesic ball of radius `radius` in `CK^n(eps)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicBall {
    pub space: AmbientSpace,
    pub radius: f64,
}

impl GeodesicBall {
    pub fn new(n: usize, eps: f64, radius: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidShape("complex dimension must be positive"));
        }
        let space = AmbientSpace::new(n, eps);
        space.check_radius(radius)?;
        Ok(Self { space, radius })
    }

    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::new(self.space.n, self.space.eps, radius)
    }

    /// `(hopf, lambda)`.
    pub fn curvatures(&self) -> (f64, f64) {
        geodesic_sphere_curvatures(self.space.eps, self.radius).expect("radius checked")
    }

    pub fn area(&self) -> f64 {
        sphere_area(self.space.eps, self.space.n, self.radius)
    }

    pub fn volume(&self) -> f64 {
        sphere_area_and_ball_volume(self.space.eps, self.space.n, self.radius).expect("radius checked").1
    }

    /// One representative boundary point (normal coordinates at the center)
    /// carrying the whole area; `II` is the same everywhere.
    pub fn boundary_point(&self) -> BoundaryPoint {
        let n = self.space.n;
        let mut normal = DVector::zeros(2 * n);
        normal[0] = 1.0;
        let frame = j_adapted_frame(&normal);
        let (hopf, lambda) = self.curvatures();
        BoundaryPoint {
            position: &normal * self.radius,
            normal,
            frame,
            h: SffMatrix::diagonal(n, hopf, lambda),
            weight: self.area(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// Flat ambient space only.
    Ellipsoid(Ellipsoid),
    Ball(GeodesicBall),
}

impl Shape {
    pub fn space(&self) -> AmbientSpace {
        match self {
            Shape::Ellipsoid(e) => AmbientSpace::new(e.n(), 0.0),
            Shape::Ball(b) => b.space,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Shape::Ellipsoid(e) => e.volume(),
            Shape::Ball(b) => b.volume(),
        }
    }

    /// Boundary quadrature at refinement `level`.
    pub fn boundary(&self, level: u32) -> Boundary<'_> {
        match self {
            Shape::Ellipsoid(e) => {
                let rule = SphereRule::new(2 * e.n(), BASE_NODES << level);
                Boundary::Ellipsoid(e, rule)
            }
            Shape::Ball(b) => Boundary::Ball(b.boundary_point()),
        }
    }
}

/// Indexable boundary rule, so callers can split the work into chunks.
pub enum Boundary<'a> {
    Ellipsoid(&'a Ellipsoid, SphereRule),
    Ball(BoundaryPoint),
}

impl Boundary<'_> {
    pub fn len(&self) -> usize {
        match self {
            Boundary::Ellipsoid(_, rule) => rule.len(),
            Boundary::Ball(_) => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> BoundaryPoint {
        match self {
            Boundary::Ellipsoid(e, rule) => {
                let (u, w) = rule.node(i);
                e.boundary_point(&DVector::from_vec(u), w)
            }
            Boundary::Ball(p) => {
                assert_eq!(i, 0);
                p.clone()
            }
        }
    }
}

pub fn sample_boundary(shape: &Shape, level: u32) -> Vec<BoundaryPoint> {
    let b = shape.boundary(level);
    (0..b.len()).map(|i| b.point(i)).collect()
}

/// Rotate the `D` part of the frame by the unitary `u`.
pub fn gauge_rotate_frame(point: &BoundaryPoint, u: &DMatrix<Complex64>) -> Result<BoundaryPoint> {
    let (frame, h) = rotate_frame(&point.frame, &point.h, u)?;
    Ok(BoundaryPoint { frame, h, ..point.clone() })
}
