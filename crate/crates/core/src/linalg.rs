//! Small dense f64 matrices for the post-processing fits.
//!
//! Covers exactly what whitening and correlation alignment need: population
//! covariance, symmetric (Jacobi) eigendecomposition, and matrix functions
//! of symmetric PSD matrices. Dimensions here are representation widths
//! (tens to a few hundred), so the cyclic Jacobi method is plenty.

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    a: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(n: usize, a: Vec<f64>) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::invalid(
                "mat",
                format!("{} elements cannot form a {n}x{n} matrix", a.len()),
            ));
        }
        Ok(Mat { n, a })
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = d[i];
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.a
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n, "matmul dims");
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * other.a[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "mul_vec dims");
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += self.a[i * n + j] * x[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.a[i * self.n + i]).sum()
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    fn off_diagonal_norm(&self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self.a[i * n + j] * self.a[i * n + j];
                }
            }
        }
        s.sqrt()
    }
}

/// Eigendecomposition of a symmetric matrix: `a = V diag(values) V^T`.
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: Mat,
}

/// Cyclic Jacobi rotations until the off-diagonal norm is negligible.
pub fn sym_eigen(a: &Mat) -> Result<SymEigen> {
    let n = a.dim();
    for i in 0..n {
        for j in (i + 1)..n {
            if (a.get(i, j) - a.get(j, i)).abs() > 1e-9 * (1.0 + a.get(i, j).abs()) {
                return Err(Error::invalid(
                    "sym_eigen",
                    format!("matrix not symmetric at ({i},{j})"),
                ));
            }
        }
    }
    let mut m = a.clone();
    let mut v = Mat::identity(n);
    let scale = 1.0 + m.data().iter().map(|x| x.abs()).fold(0.0, f64::max);
    let tol = 1e-14 * scale;

    for _sweep in 0..128 {
        if m.off_diagonal_norm() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Rotate rows and columns p, q of m.
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                // Accumulate the rotation into the eigenvector columns.
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let values = (0..n).map(|i| m.get(i, i)).collect();
    Ok(SymEigen { values, vectors: v })
}

/// `V f(λ) V^T` for a symmetric matrix; clamps eigenvalues at zero first
/// so PSD inputs stay PSD under roundoff.
pub fn sym_matrix_fn(a: &Mat, f: impl Fn(f64) -> f64) -> Result<Mat> {
    let eig = sym_eigen(a)?;
    let n = a.dim();
    let fv: Vec<f64> = eig.values.iter().map(|&l| f(l.max(0.0))).collect();
    // out = V diag(fv) V^T
    let mut out = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += eig.vectors.get(i, k) * fv[k] * eig.vectors.get(j, k);
            }
            out.set(i, j, s);
        }
    }
    Ok(out)
}

pub fn sqrt_psd(a: &Mat) -> Result<Mat> {
    sym_matrix_fn(a, f64::sqrt)
}

pub fn inv_sqrt_psd(a: &Mat) -> Result<Mat> {
    sym_matrix_fn(a, |l| {
        if l > 0.0 {
            1.0 / l.sqrt()
        } else {
            0.0
        }
    })
}

/// Mean vector and population covariance (divide by n) of a vector set.
pub fn mean_and_covariance(vectors: &[Vec<f64>]) -> Result<(Vec<f64>, Mat)> {
    if vectors.is_empty() {
        return Err(Error::invalid("covariance", "empty vector set"));
    }
    let d = vectors[0].len();
    for v in vectors {
        if v.len() != d {
            return Err(Error::invalid("covariance", "ragged vector set"));
        }
    }
    let n = vectors.len() as f64;
    let mut mean = vec![0.0; d];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    let mut cov = Mat::zeros(d);
    for v in vectors {
        for i in 0..d {
            let di = v[i] - mean[i];
            for j in i..d {
                let dj = v[j] - mean[j];
                cov.a[i * d + j] += di * dj;
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let val = cov.a[i * d + j] / n;
            cov.a[i * d + j] = val;
            cov.a[j * d + i] = val;
        }
    }
    Ok((mean, cov))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diagonal() {
        let m = Mat::from_diag(&[2.0, 0.5]);
        let eig = sym_eigen(&m).unwrap();
        let mut vals = eig.values.clone();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] - 0.5).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_reconstructs() {
        // Symmetric 3x3 with known structure.
        let m = Mat::from_rows(3, vec![4.0, 1.0, 0.5, 1.0, 3.0, -0.25, 0.5, -0.25, 2.0]).unwrap();
        let rebuilt = sym_matrix_fn(&m, |l| l).unwrap();
        assert!(m.max_abs_diff(&rebuilt) < 1e-10);
    }

    #[test]
    fn inv_sqrt_inverts_sqrt() {
        let m = Mat::from_rows(2, vec![2.0, 0.3, 0.3, 1.0]).unwrap();
        let s = sqrt_psd(&m).unwrap();
        let si = inv_sqrt_psd(&m).unwrap();
        let prod = s.matmul(&si);
        assert!(prod.max_abs_diff(&Mat::identity(2)) < 1e-10);
        // sqrt squared gives the matrix back.
        assert!(s.matmul(&s).max_abs_diff(&m) < 1e-10);
    }

    #[test]
    fn covariance_population_convention() {
        let vecs = vec![vec![2.0, 0.0], vec![-2.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let (mean, cov) = mean_and_covariance(&vecs).unwrap();
        assert_eq!(mean, vec![0.0, 0.0]);
        assert!((cov.get(0, 0) - 2.0).abs() < 1e-12);
        assert!((cov.get(1, 1) - 0.5).abs() < 1e-12);
        assert!(cov.get(0, 1).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_input_rejected() {
        let m = Mat::from_rows(2, vec![1.0, 0.5, 0.2, 1.0]).unwrap();
        assert!(sym_eigen(&m).is_err());
    }
}
