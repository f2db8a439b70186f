//! Small dense linear algebra: row-major matrices, partial-pivot LU and a
//! cyclic Jacobi eigensolver for symmetric matrices.
//!
//! Everything here is sized for desk-scale problems (tens to a few hundred rows).

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from nested rows. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Domain("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let conv: Vec<Vec<T>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| T::of(x)).collect())
            .collect();
        Self::from_rows(&conv)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for p in 0..self.cols {
                let a = self[(i, p)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(p, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn scale(&self, s: T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// Rows `rs`, columns `cs`, in the given order.
    pub fn select(&self, rs: &[usize], cs: &[usize]) -> Self {
        Self::from_fn(rs.len(), cs.len(), |i, j| self[(rs[i], cs[j])])
    }

    pub fn principal(&self, idx: &[usize]) -> Self {
        self.select(idx, idx)
    }

    pub fn select_rows(&self, rs: &[usize]) -> Self {
        Self::from_fn(rs.len(), self.cols, |i, j| self[(rs[i], j)])
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetric_part(&self) -> Self {
        let half = T::of(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)]) * half
        })
    }

    pub fn lu(&self) -> Lu<T> {
        Lu::factor(self)
    }

    /// Determinant by partial-pivot LU. The empty matrix has determinant 1.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "det of non-square matrix");
        if self.rows == 0 {
            return T::one();
        }
        self.lu().det()
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of non-square matrix");
        self.lu().inverse()
    }

    /// Largest singular value, via the symmetric eigenproblem of `AᵀA`.
    pub fn spectral_norm(&self) -> T {
        let gram = self.transpose().matmul(self);
        let eig = symmetric_eigenvalues(&gram);
        eig.first()
            .copied()
            .unwrap_or(T::zero())
            .max(T::zero())
            .sqrt()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Packed LU factors with row permutation, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: T,
    singular: bool,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &Matrix<T>) -> Self {
        assert!(a.is_square(), "LU of non-square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut singular = false;
        for col in 0..n {
            let (piv, best) = (col..n)
                .map(|r| (r, lu[(r, col)].abs()))
                .fold((col, -T::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == T::zero() {
                singular = true;
                continue;
            }
            if piv != col {
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
                perm.swap(col, piv);
                sign = -sign;
            }
            let d = lu[(col, col)];
            for r in col + 1..n {
                let f = lu[(r, col)] / d;
                lu[(r, col)] = f;
                if f != T::zero() {
                    for j in col + 1..n {
                        let v = lu[(col, j)];
                        lu[(r, j)] -= f * v;
                    }
                }
            }
        }
        Lu {
            lu,
            perm,
            sign,
            singular,
        }
    }

    pub fn det(&self) -> T {
        if self.singular {
            return T::zero();
        }
        (0..self.lu.rows()).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve_vec(&self, b: &[T]) -> Option<Vec<T>> {
        if self.singular {
            return None;
        }
        let n = self.lu.rows();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let v = x[j];
                x[i] -= self.lu[(i, j)] * v;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let v = x[j];
                x[i] -= self.lu[(i, j)] * v;
            }
            x[i] /= self.lu[(i, i)];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<T>> {
        let n = self.lu.rows();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve_vec(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Some(inv)
    }
}

/// Eigenvalues of a symmetric matrix, sorted in decreasing order.
///
/// Cyclic Jacobi rotations; only the upper triangle is read after symmetrizing.
pub fn symmetric_eigenvalues<T: Scalar>(a: &Matrix<T>) -> Vec<T> {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.symmetric_part();
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let diag: T = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum();
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    eig
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Laplace expansion along the first row.
    fn cofactor_det(m: &Matrix<f64>) -> f64 {
        let n = m.rows();
        if n == 0 {
            return 1.0;
        }
        (0..n)
            .map(|j| {
                let rest: Vec<usize> = (1..n).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[(0, j)] * cofactor_det(&m.select(&rest, &cols))
            })
            .sum()
    }

    #[test]
    fn lu_det_matches_cofactor_expansion() {
        let m = Matrix::<f64>::from_f64_rows(&[
            vec![2.0, -1.0, 0.5, 3.0],
            vec![0.0, 4.0, 1.0, -2.0],
            vec![1.5, 0.0, -3.0, 1.0],
            vec![-1.0, 2.0, 0.0, 0.25],
        ])
        .unwrap();
        let a = m.det();
        let b = cofactor_det(&m);
        assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn singular_and_empty() {
        let m = Matrix::<f64>::from_f64_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(m.det().abs() < 1e-15);
        assert_eq!(Matrix::<f64>::zeros(0, 0).det(), 1.0);
        assert!(Matrix::<f64>::zeros(2, 2).inverse().is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::<f64>::from_f64_rows(&[
            vec![4.0, 1.0, 0.0],
            vec![-1.0, 3.0, 2.0],
            vec![0.5, 0.0, 1.0],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv).sub(&Matrix::identity(3));
        assert!(prod.max_abs() < 1e-12);
    }

    #[test]
    fn jacobi_eigenvalues_known() {
        let m = Matrix::<f64>::from_f64_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = symmetric_eigenvalues(&m);
        assert!((e[0] - 3.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
        let z = Matrix::<f64>::from_f64_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = symmetric_eigenvalues(&z);
        assert!((e[1] + 1.0).abs() < 1e-12);
    }
}
