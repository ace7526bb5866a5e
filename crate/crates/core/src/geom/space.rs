//! Complex space forms and the closed-form geometry of their geodesic balls.

use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use super::quadrature::integrate_adaptive;
use crate::coeffcore::sphere_volume_coeff;
use crate::error::{Error, Result};

/// `CK^n(eps)`: complex dimension `n`, holomorphic sectional curvature `4 eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientSpace {
    pub n: usize,
    pub eps: f64,
}

impl AmbientSpace {
    pub fn new(n: usize, eps: f64) -> Self {
        assert!(n >= 1, "complex dimension must be positive");
        Self { n, eps }
    }

    /// Largest admissible geodesic-ball radius (`pi / (2 sqrt eps)` for
    /// `eps > 0`).
    pub fn max_radius(&self) -> f64 {
        if self.eps > 0.0 {
            PI / (2.0 * self.eps.sqrt())
        } else {
            f64::INFINITY
        }
    }

    pub fn check_radius(&self, radius: f64) -> Result<()> {
        if radius > 0.0 && radius < self.max_radius() && radius.is_finite() {
            Ok(())
        } else {
            Err(Error::Radius { eps: self.eps, radius })
        }
    }
}

/// Solution of `f'' + kappa f = 0`, `f(0) = 0`, `f'(0) = 1`.
pub fn sn(kappa: f64, t: f64) -> f64 {
    if kappa > 0.0 {
        let s = kappa.sqrt();
        (s * t).sin() / s
    } else if kappa < 0.0 {
        let s = (-kappa).sqrt();
        (s * t).sinh() / s
    } else {
        t
    }
}

/// Derivative of [`sn`].
pub fn cs(kappa: f64, t: f64) -> f64 {
    if kappa > 0.0 {
        (kappa.sqrt() * t).cos()
    } else if kappa < 0.0 {
        ((-kappa).sqrt() * t).cosh()
    } else {
        1.0
    }
}

/// Principal curvatures `(hopf, lambda)` of the geodesic sphere of radius
/// `R`: `cs/sn` for curvature `4 eps` in the `JN` direction and `eps` on `D`.
pub fn geodesic_sphere_curvatures(eps: f64, radius: f64) -> Result<(f64, f64)> {
    AmbientSpace::new(1, eps).check_radius(radius)?;
    Ok((cs(4.0 * eps, radius) / sn(4.0 * eps, radius), cs(eps, radius) / sn(eps, radius)))
}

/// Area of the geodesic sphere, `O_{2n-1} sn_{4 eps}(R) sn_eps(R)^{2n-2}`.
pub fn sphere_area(eps: f64, n: usize, radius: f64) -> f64 {
    sphere_volume_coeff(2 * n as u32 - 1).to_f64() * sn(4.0 * eps, radius) * sn(eps, radius).powi(2 * n as i32 - 2)
}

/// `(area of the geodesic sphere, volume of the geodesic ball)`; the volume
/// is the radial integral of the area.
pub fn sphere_area_and_ball_volume(eps: f64, n: usize, radius: f64) -> Result<(f64, f64)> {
    AmbientSpace::new(n, eps).check_radius(radius)?;
    let area = sphere_area(eps, n, radius);
    let volume = integrate_adaptive(|t| sphere_area(eps, n, t), 0.0, radius, 1e-15);
    Ok((area, volume))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_curvatures() {
        assert_eq!(geodesic_sphere_curvatures(0.0, 2.0).unwrap(), (0.5, 0.5));
    }

    #[test]
    fn projective_curvatures() {
        let (hopf, lambda) = geodesic_sphere_curvatures(1.0, PI / 4.0).unwrap();
        assert!(hopf.abs() < 1e-15);
        assert!((lambda - 1.0).abs() < 1e-15);
        assert!(geodesic_sphere_curvatures(1.0, PI / 2.0).is_err());
        assert!(geodesic_sphere_curvatures(0.0, -1.0).is_err());
    }

    #[test]
    fn hyperbolic_curvatures() {
        let (hopf, lambda) = geodesic_sphere_curvatures(-1.0, 1.0).unwrap();
        assert!((hopf - 2.0 / 2f64.tanh()).abs() < 1e-14);
        assert!((lambda - 1.0 / 1f64.tanh()).abs() < 1e-14);
    }

    #[test]
    fn flat_area_volume() {
        let (a, v) = sphere_area_and_ball_volume(0.0, 2, 1.5).unwrap();
        assert!((a - 2.0 * PI * PI * 1.5f64.powi(3)).abs() < 1e-12);
        assert!((v - 0.5 * PI * PI * 1.5f64.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn projective_line_volume() {
        let (_, v) = sphere_area_and_ball_volume(1.0, 1, PI / 2.0 - 1e-9).unwrap();
        assert!((v - PI).abs() < 1e-12);
    }

    #[test]
    fn small_radius_area() {
        for eps in [-1.0, 1.0] {
            let r = 1e-4;
            let a = sphere_area(eps, 3, r);
            let flat = PI * PI * PI * r.powi(5);
            assert!((a / flat - 1.0).abs() < 1e-7);
        }
    }
}
