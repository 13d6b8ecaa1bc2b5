//! Thin wrappers over faer for the dense problems this crate solves.

use alloc::format;
use alloc::vec::Vec;

use faer::{c64, Mat, Side};

use crate::error::{Error, Result};
use crate::math;

pub type Mat4 = [[c64; 4]; 4];

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub const I: c64 = c64 { re: 0.0, im: 1.0 };

pub fn mat4_to_faer(m: &Mat4) -> Mat<c64> {
    Mat::from_fn(4, 4, |i, j| m[i][j])
}

pub fn mat4_apply(m: &Mat4, v: &[c64; 4]) -> [c64; 4] {
    let mut out = [ZERO; 4];
    for (o, row) in out.iter_mut().zip(m.iter()) {
        *o = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    }
    out
}

/// Largest entry of `|M − M†|`.
pub fn hermiticity_defect(m: &Mat<c64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            let d = m[(i, j)] - m[(j, i)].conj();
            worst = worst.max(math::modulus(d));
        }
    }
    worst
}

pub fn max_abs(m: &Mat<c64>) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            worst = worst.max(math::modulus(m[(i, j)]));
        }
    }
    worst
}

/// Hermitian eigendecomposition, eigenvalues ascending.
pub fn hermitian_eigen(m: &Mat<c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let eig = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let values = (0..s.nrows()).map(|i| s[i].re).collect();
    Ok((values, eig.U().to_owned()))
}

pub fn hermitian_eigenvalues(m: &Mat<c64>) -> Result<Vec<f64>> {
    let vals = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    Ok(vals)
}

/// General complex eigendecomposition: eigenvalues and unit eigenvectors.
pub fn general_eigen(m: &Mat<c64>) -> Result<(Vec<c64>, Mat<c64>)> {
    let eig = m.eigen().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let values = (0..s.nrows()).map(|i| s[i]).collect();
    let mut vecs = eig.U().to_owned();
    for j in 0..vecs.ncols() {
        let norm = math::sqrt((0..vecs.nrows()).map(|i| vecs[(i, j)].norm_sqr()).sum());
        for i in 0..vecs.nrows() {
            vecs[(i, j)] /= norm;
        }
    }
    Ok((values, vecs))
}

/// Singular values (descending) and right singular vectors of a real matrix.
pub fn real_svd(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let svd = m.svd().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let values = (0..s.nrows()).map(|i| s[i]).collect();
    Ok((values, svd.V().to_owned()))
}

pub fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[c64]) -> f64 {
    math::sqrt(a.iter().map(|z| z.norm_sqr()).sum())
}

/// `y = M x` for a dense column-major matrix.
pub fn matvec(m: &Mat<c64>, x: &[c64], y: &mut [c64]) {
    let xs = faer::ColRef::from_slice(x);
    let ys = faer::ColMut::from_slice_mut(y);
    faer::linalg::matmul::matmul(
        ys.as_mat_mut(),
        faer::Accum::Replace,
        m.as_ref(),
        xs.as_mat(),
        ONE,
        faer::Par::Seq,
    );
}

/// `y = M† x`.
pub fn adjoint_matvec(m: &Mat<c64>, x: &[c64], y: &mut [c64]) {
    let xs = faer::ColRef::from_slice(x);
    let ys = faer::ColMut::from_slice_mut(y);
    faer::linalg::matmul::matmul(
        ys.as_mat_mut(),
        faer::Accum::Replace,
        m.adjoint(),
        xs.as_mat(),
        ONE,
        faer::Par::Seq,
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_eigen_reconstructs() {
        let m = Mat::<c64>::from_fn(5, 5, |i, j| {
            let re = 1.0 / (1.0 + (i + j) as f64);
            let im = if i < j { 0.3 } else if i > j { -0.3 } else { 0.0 };
            c64::new(re, im)
        });
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for (k, e) in vals.iter().enumerate() {
            let v: Vec<c64> = (0..5).map(|i| vecs[(i, k)]).collect();
            let mut y = vec![ZERO; 5];
            matvec(&m, &v, &mut y);
            for i in 0..5 {
                assert!(math::modulus(y[i] - v[i] * e) < 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_matvec_matches_manual() {
        let m = Mat::<c64>::from_fn(3, 3, |i, j| c64::new(i as f64, j as f64 + 1.0));
        let x = [ONE, I, c64::new(2.0, -1.0)];
        let mut y = [ZERO; 3];
        adjoint_matvec(&m, &x, &mut y);
        for j in 0..3 {
            let want: c64 = (0..3).map(|i| m[(i, j)].conj() * x[i]).sum();
            assert!(math::modulus(y[j] - want) < 1e-13);
        }
    }

    #[test]
    fn real_svd_finds_null_vector() {
        let m = Mat::<f64>::from_fn(4, 3, |i, j| [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0]][i][j]);
        let (s, v) = real_svd(&m).unwrap();
        assert!(s[2] < 1e-12 * s[0]);
        let null: Vec<f64> = (0..3).map(|i| v[(i, 2)]).collect();
        for i in 0..4 {
            let r: f64 = (0..3).map(|j| m[(i, j)] * null[j]).sum();
            assert!(r.abs() < 1e-12);
        }
    }
}
