use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extalg::SffMatrix;
use crate::linalg::{apply_j, realify, unitary_defect};

/// Orthonormal frame `(JN, e_2, Je_2, ..., e_n, Je_n)` of the tangent space
/// at a point with unit normal `normal`, as the columns of a
/// `2n x (2n-1)` matrix. The `e_j` come from Gram-Schmidt of the real
/// coordinate vectors `x_0, x_2, ...` against everything built so far;
/// candidates whose remainder has norm below `1e-8` are skipped.
pub fn j_adapted_frame(normal: &DVector<f64>) -> DMatrix<f64> {
    let dim = normal.len();
    let n = dim / 2;
    let mut basis: alloc::vec::Vec<DVector<f64>> = alloc::vec![normal.clone(), apply_j(normal)];
    for j in 0..n {
        if basis.len() == dim {
            break;
        }
        let mut v = DVector::zeros(dim);
        v[2 * j] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&v);
                v.axpy(-c, b, 1.0);
            }
        }
        let norm = v.norm();
        if norm < 1e-8 {
            continue;
        }
        v /= norm;
        let jv = apply_j(&v);
        basis.push(v);
        basis.push(jv);
    }
    assert_eq!(basis.len(), dim, "frame construction ran out of candidates");
    DMatrix::from_columns(&basis[1..])
}

/// `II` in the frame, from the ambient bilinear form `shape` (inner normal).
pub fn frame_sff(n: usize, frame: &DMatrix<f64>, shape: &DMatrix<f64>) -> SffMatrix {
    SffMatrix::new(n, frame.transpose() * shape * frame)
}

/// Apply the unitary `u` of `D` to the frame slots `e_2 .. Je_n` and return
/// the rotated frame and the conjugated `II`.
pub fn rotate_frame(
    frame: &DMatrix<f64>,
    h: &SffMatrix,
    u: &DMatrix<Complex64>,
) -> Result<(DMatrix<f64>, SffMatrix)> {
    let n = h.n();
    assert_eq!(u.nrows(), n - 1);
    let defect = unitary_defect(u);
    if defect > 1e-10 {
        return Err(Error::NotUnitary { defect });
    }
    let d = 2 * n - 1;
    let mut t = DMatrix::zeros(d, d);
    t[(0, 0)] = 1.0;
    t.view_mut((1, 1), (d - 1, d - 1)).copy_from(&realify(u));
    let new_frame = frame * &t;
    let new_h = SffMatrix::new(n, t.transpose() * h.matrix() * &t);
    Ok((new_frame, new_h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_is_orthonormal_and_j_adapted() {
        let normal = DVector::from_vec(alloc::vec![0.3, -0.1, 0.5, 0.2, -0.7, 0.25]).normalize();
        let f = j_adapted_frame(&normal);
        assert_eq!(f.ncols(), 5);
        assert!((f.transpose() * &f - DMatrix::identity(5, 5)).amax() < 1e-12);
        assert!((f.transpose() * &normal).amax() < 1e-12);
        assert!((f.column(0) - apply_j(&normal)).amax() < 1e-15);
        for j in 0..2 {
            let e = f.column(1 + 2 * j).into_owned();
            assert!((apply_j(&e) - f.column(2 + 2 * j)).amax() < 1e-15);
        }
    }

    #[test]
    fn degenerate_candidate_skipped() {
        let mut normal = DVector::zeros(4);
        normal[0] = 1.0;
        let f = j_adapted_frame(&normal);
        assert_eq!(f.column(1)[2], 1.0);
        assert_eq!(f.column(2)[3], 1.0);
    }
}
