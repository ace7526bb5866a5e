//! Small dense helpers on top of nalgebra that the `no_std` build lacks or
//! that several modules share.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

/// Complex structure on `R^{2n}`: `J(x_{2j}, x_{2j+1}) = (-x_{2j+1}, x_{2j})`,
/// i.e. multiplication by `i` on `z_j = x_{2j} + i x_{2j+1}`.
pub fn apply_j(v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for j in 0..v.len() / 2 {
        out[2 * j] = -v[2 * j + 1];
        out[2 * j + 1] = v[2 * j];
    }
    out
}

/// The real `2n x 2n` matrix of `J`.
pub fn j_matrix(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        m[(2 * j + 1, 2 * j)] = 1.0;
        m[(2 * j, 2 * j + 1)] = -1.0;
    }
    m
}

/// Real form of a complex matrix, each entry `a + ib` becoming the block
/// `[[a, -b], [b, a]]`.
pub fn realify(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(2 * m.nrows(), 2 * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

/// Complex vector of length `n` from real coordinates of length `2n`.
pub fn complexify(v: &DVector<f64>) -> DVector<Complex64> {
    DVector::from_fn(v.len() / 2, |j, _| Complex64::new(v[2 * j], v[2 * j + 1]))
}

pub fn decomplexify(v: &DVector<Complex64>) -> DVector<f64> {
    DVector::from_fn(2 * v.len(), |i, _| if i % 2 == 0 { v[i / 2].re } else { v[i / 2].im })
}

/// Modified Gram-Schmidt on the columns with the Hermitian inner product;
/// returns `None` if a column is (numerically) dependent.
pub fn complex_gram_schmidt(m: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for i in 0..j {
            let proj: Complex64 = q.column(i).iter().zip(q.column(j).iter()).map(|(a, b)| a.conj() * b).sum();
            let qi = q.column(i).into_owned();
            let mut col = q.column_mut(j);
            col -= qi * proj;
        }
        let norm = q.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return None;
        }
        let mut col = q.column_mut(j);
        col.unscale_mut(norm);
    }
    Some(q)
}

/// Largest entry of `U^* U - I`.
pub fn unitary_defect(u: &DMatrix<Complex64>) -> f64 {
    let g = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// `exp(a)` by scaling and squaring of a degree-18 Taylor polynomial.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.iter().map(|x| x.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a / 2f64.powi(squarings as i32);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=18 {
        term = &term * &scaled / k as f64;
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_rotation_generator() {
        let t = 2.3;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&a);
        let expect = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!((e - expect).amax() < 1e-14);
    }

    #[test]
    fn exp_of_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![1.5, -0.25, 3.0]));
        let e = expm(&a);
        for (i, x) in [1.5f64, -0.25, 3.0].iter().enumerate() {
            assert!((e[(i, i)] - x.exp()).abs() < 1e-13 * x.exp());
        }
    }

    #[test]
    fn j_squares_to_minus_one() {
        let j = j_matrix(3);
        assert_eq!(&j * &j, -DMatrix::identity(6, 6));
        let v = DVector::from_fn(6, |i, _| i as f64 + 1.0);
        assert_eq!(&j * &v, apply_j(&v));
    }

    #[test]
    fn realify_is_multiplicative() {
        let a = DMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64 + 1.0, j as f64 - 0.5));
        let b = DMatrix::from_fn(2, 2, |i, j| Complex64::new(j as f64, 2.0 - i as f64));
        assert!((realify(&(&a * &b)) - realify(&a) * realify(&b)).amax() < 1e-14);
        let z = DVector::from_fn(2, |i, _| Complex64::new(i as f64, 1.0));
        assert!((decomplexify(&(&a * &z)) - realify(&a) * decomplexify(&z)).amax() < 1e-14);
    }
}
