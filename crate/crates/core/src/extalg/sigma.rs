use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `sigma_{2r}` of `h_d` restricted to the span of the orthonormal columns
/// of `v`, i.e. `det(V^T h_d V)`.
pub fn sigma_restricted(h_d: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    assert_eq!(h_d.nrows(), v.nrows());
    let gram = v.transpose() * v;
    let defect = (gram - DMatrix::identity(v.ncols(), v.ncols())).amax();
    if defect > 1e-10 {
        return Err(Error::NotOrthonormal { defect });
    }
    Ok((v.transpose() * h_d * v).determinant())
}
