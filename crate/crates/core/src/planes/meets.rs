use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::sampling::ComplexPlane;
use crate::error::{Error, Result};
use crate::geom::{Ellipsoid, Shape};
use crate::linalg::decomplexify;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

/// Real `2n x 2r` basis `(v_1, i v_1, ..., v_r, i v_r)` of a complex span.
pub fn real_basis(dirs: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = dirs.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * dirs.ncols());
    for j in 0..dirs.ncols() {
        let v = dirs.column(j).into_owned();
        let iv = v.map(|z| z * Complex64::i());
        out.set_column(2 * j, &decomplexify(&v));
        out.set_column(2 * j + 1, &decomplexify(&iv));
    }
    out
}

/// Section of an ellipsoid by the real affine plane `{p + basis s}` with
/// orthonormal `basis`: the minimiser `s*` of `|A^{-1}(p + basis s - c)|^2`,
/// the minimum, and the Gram matrix `G = M^T M`, `M = A^{-1} basis`.
pub struct Section {
    pub center: DVector<f64>,
    pub min: f64,
    pub gram: DMatrix<f64>,
}

pub fn ellipsoid_section(e: &Ellipsoid, point: &DVector<f64>, basis: &DMatrix<f64>) -> Section {
    let m = e.inverse_map() * basis;
    let b = e.inverse_map() * (point - e.center());
    let gram = m.transpose() * &m;
    let rhs = -(m.transpose() * &b);
    let chol = gram.clone().cholesky().expect("Gram matrix of an injective map is positive definite");
    let s = chol.solve(&rhs);
    let min = (&b + &m * &s).norm_squared();
    Section { center: s, min, gram }
}

/// Whether the plane meets the (closed, convex) shape; this is
/// `chi(shape cap plane)` as 0/1.
pub fn meets(shape: &Shape, plane: &ComplexPlane) -> Result<bool> {
    match (shape, plane) {
        (Shape::Ellipsoid(e), ComplexPlane::Affine { dirs, anchor }) => {
            let sec = ellipsoid_section(e, &decomplexify(anchor), &real_basis(dirs));
            Ok(sec.min <= 1.0)
        }
        (Shape::Ball(b), ComplexPlane::Affine { dirs, anchor }) if b.space.eps == 0.0 => {
            let along = dirs.adjoint() * anchor;
            let d2 = anchor.norm_squared() - along.norm_squared();
            Ok(d2 <= b.radius * b.radius)
        }
        (Shape::Ball(b), ComplexPlane::Projective { span }) if b.space.eps > 0.0 => {
            // ball centered at [1 : 0 : ... : 0]; distance scaled to curvature eps
            let proj = span.row(0).norm();
            Ok(proj >= (b.radius * b.space.eps.sqrt()).cos())
        }
        _ => Err(Error::Unsupported("shape and plane model do not match")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::GeodesicBall;

    fn line(dir: [f64; 4], anchor: [f64; 4]) -> ComplexPlane {
        let d = DVector::from_vec(alloc::vec![Complex64::new(dir[0], dir[1]), Complex64::new(dir[2], dir[3])]);
        let d = &d / Complex64::new(d.norm(), 0.0);
        ComplexPlane::Affine {
            dirs: DMatrix::from_columns(&[d]),
            anchor: DVector::from_vec(alloc::vec![Complex64::new(anchor[0], anchor[1]), Complex64::new(anchor[2], anchor[3])]),
        }
    }

    #[test]
    fn through_center_and_far_away() {
        let ball = Shape::Ball(GeodesicBall::new(2, 0.0, 1.0).unwrap());
        let ell = Shape::Ellipsoid(Ellipsoid::from_axes(&[1.0; 4]).unwrap());
        let hit = line([1.0, 0.0, 0.0, 0.0], [0.0; 4]);
        let miss = line([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 2.0, 0.0]);
        for s in [&ball, &ell] {
            assert!(meets(s, &hit).unwrap());
            assert!(!meets(s, &miss).unwrap());
        }
    }

    #[test]
    fn ellipsoid_section_minimum() {
        // z_2 = 1.5 against semi-axes (1, 1, 2, 2): hits, min = (1.5/2)^2
        let e = Ellipsoid::from_axes(&[1.0, 1.0, 2.0, 2.0]).unwrap();
        let p = line([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.5, 0.0]);
        let ComplexPlane::Affine { dirs, anchor } = &p else { unreachable!() };
        let sec = ellipsoid_section(&e, &decomplexify(anchor), &real_basis(dirs));
        assert!((sec.min - 0.5625).abs() < 1e-14);
        assert!(meets(&Shape::Ellipsoid(e), &p).unwrap());
    }

    #[test]
    fn projective_ball() {
        let ball = Shape::Ball(GeodesicBall::new(2, 1.0, 0.5).unwrap());
        let through = ComplexPlane::Projective { span: DMatrix::identity(3, 2).map(|x: f64| Complex64::new(x, 0.0)) };
        assert!(meets(&ball, &through).unwrap());
        // the line {z_0 = 0} is at distance pi/2 from the center
        let mut far = DMatrix::zeros(3, 2);
        far[(1, 0)] = Complex64::new(1.0, 0.0);
        far[(2, 1)] = Complex64::new(1.0, 0.0);
        assert!(!meets(&ball, &ComplexPlane::Projective { span: far }).unwrap());
    }

    #[test]
    fn unsupported_pairings() {
        let hyperbolic = Shape::Ball(GeodesicBall::new(2, -1.0, 0.5).unwrap());
        assert!(meets(&hyperbolic, &line([1.0, 0.0, 0.0, 0.0], [0.0; 4])).is_err());
    }
}
