//! Independent Jacobi-field integrator: `f'' + kappa f = 0`, `f(0) = 0`,
//! `f'(0) = 1`, by adaptive Dormand-Prince 5(4).

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

const TOL: f64 = 1e-12;

// Dormand-Prince tableau

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// `(f(R), f'(R) / f(R))`. Fails if `f` reaches zero on `(0, R]`.
pub fn jacobi_oracle(kappa: f64, radius: f64) -> Result<(f64, f64)> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Radius { eps: kappa, radius });
    }
    let rhs = |y: [f64; 2]| [y[1], -kappa * y[0]];
    let mut t = 0.0;
    let mut y = [0.0, 1.0];
    let mut h = (radius / 100.0).min(1e-3);
    let mut peak: f64 = 0.0;
    while t < radius {
        if t + h > radius {
            h = radius - t;
        }
        let mut k = [[0.0; 2]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += h * A[s][j] * kj[0];
                ys[1] += h * A[s][j] * kj[1];
            }
            k[s] = rhs(ys);
        }

        let mut y5 = y;
        let mut err = [0.0; 2];
        for s in 0..7 {
            for c in 0..2 {
                y5[c] += h * B5[s] * k[s][c];
                err[c] += h * (B5[s] - B4[s]) * k[s][c];
            }
        }
        let scale = 1.0 + y5[0].abs().max(y5[1].abs());
        let e = err[0].abs().max(err[1].abs()) / scale;
        if e <= TOL || h < 1e-14 {
            t += h;
            y = y5;
            peak = peak.max(y[0].abs());
            if y[0] <= 1e-9 * peak {
                return Err(Error::ConjugatePoint { kappa, radius });
            }
        }
        let factor = if e == 0.0 { 5.0 } else { (0.9 * (TOL / e).powf(0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok((y[0], y[1] / y[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn flat() {
        let (f, ratio) = jacobi_oracle(0.0, 2.0).unwrap();
        assert!((f - 2.0).abs() < 1e-12 && (ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spherical() {
        let (f, ratio) = jacobi_oracle(1.0, PI / 3.0).unwrap();
        assert!((f - (PI / 3.0).sin()).abs() < 1e-11);
        assert!((ratio - 1.0 / (PI / 3.0).tan()).abs() < 1e-10);
    }

    #[test]
    fn hyperbolic() {
        let (f, ratio) = jacobi_oracle(-1.0, 1.0).unwrap();
        assert!((f - 1f64.sinh()).abs() < 1e-11);
        assert!((ratio - 1.0 / 1f64.tanh()).abs() < 1e-10);
    }

    #[test]
    fn conjugate_point() {
        assert!(matches!(jacobi_oracle(4.0, PI / 2.0), Err(Error::ConjugatePoint { .. })));
        assert!(matches!(jacobi_oracle(1.0, 4.0), Err(Error::ConjugatePoint { .. })));
    }
}
