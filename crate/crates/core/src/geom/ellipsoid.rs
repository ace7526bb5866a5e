use nalgebra::{DMatrix, DVector};

use super::frame::{frame_sff, j_adapted_frame};
use super::quadrature::SphereRule;
use super::BoundaryPoint;
use crate::coeffcore::ball_volume_coeff;
use crate::error::{Error, Result};

/// `{ center + A u : |u| <= 1 }` in `C^n = R^{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    center: DVector<f64>,
    map: DMatrix<f64>,
    inv: DMatrix<f64>,
}

impl Ellipsoid {
    /// Axis-aligned, one semi-axis per real coordinate (`2n` values).
    pub fn from_axes(axes: &[f64]) -> Result<Self> {
        if axes.is_empty() || axes.len() % 2 != 0 {
            return Err(Error::InvalidShape("ellipsoid needs 2n semi-axes"));
        }
        if axes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidShape("semi-axes must be positive"));
        }
        let map = DMatrix::from_diagonal(&DVector::from_column_slice(axes));
        Self::new(DVector::zeros(axes.len()), map)
    }

    pub fn new(center: DVector<f64>, map: DMatrix<f64>) -> Result<Self> {
        let dim = center.len();
        if dim == 0 || dim % 2 != 0 || map.nrows() != dim || map.ncols() != dim {
            return Err(Error::InvalidShape("ellipsoid dimensions"));
        }
        let inv = map.clone().try_inverse().ok_or(Error::InvalidShape("degenerate ellipsoid"))?;
        Ok(Self { center, map, inv })
    }

    pub fn n(&self) -> usize {
        self.center.len() / 2
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn map(&self) -> &DMatrix<f64> {
        &self.map
    }

    pub fn inverse_map(&self) -> &DMatrix<f64> {
        &self.inv
    }

    pub fn volume(&self) -> f64 {
        ball_volume_coeff(self.center.len() as u32).to_f64() * self.map.determinant().abs()
    }

    /// Largest distance from the center to the boundary.
    pub fn circumradius(&self) -> f64 {
        self.map.singular_values().max()
    }

    /// `|A^{-1}(x - c)|^2 <= 1`.
    pub fn contains(&self, x: &DVector<f64>) -> bool {
        (&self.inv * (x - &self.center)).norm_squared() <= 1.0
    }

    /// Image under `x -> m x + shift`.
    pub fn transformed(&self, m: &DMatrix<f64>, shift: &DVector<f64>) -> Result<Self> {
        Self::new(m * &self.center + shift, m * &self.map)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self::new(&self.center * t, &self.map * t).expect("nonzero scale")
    }

    /// Boundary point `c + A u` for a unit vector `u`, carrying the surface
    /// measure of `sphere_weight` (a weight on the unit sphere).
    pub fn boundary_point(&self, u: &DVector<f64>, sphere_weight: f64) -> BoundaryPoint {
        let n = self.n();
        let position = &self.center + &self.map * u;
        let grad = self.inv.transpose() * u;
        let gnorm = grad.norm();
        let normal = &grad / gnorm;
        let frame = j_adapted_frame(&normal);
        let shape = self.inv.transpose() * &self.inv / gnorm;
        let h = frame_sff(n, &frame, &shape);
        let weight = sphere_weight * self.map.determinant().abs() * gnorm;
        BoundaryPoint { position, normal, frame, h, weight }
    }

    /// `int sigma_{2n-1}(II)` over the boundary (the Gauss-Kronecker
    /// curvature integral), on the sphere rule with `nodes` polar nodes.
    pub fn total_gauss_curvature(&self, nodes: usize) -> f64 {
        let rule = SphereRule::new(self.center.len(), nodes);
        let mut u = DVector::zeros(self.center.len());
        let mut total = 0.0;
        for i in 0..rule.len() {
            let w = rule.node_into(i, u.as_mut_slice());
            let p = self.boundary_point(&u, w);
            total += p.weight * p.h.matrix().determinant();
        }
        total
    }
}
