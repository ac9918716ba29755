//! Small dense complex linear algebra.
//!
//! The matrices handled here are tiny (one row and column per base-station
//! antenna), so a plain row-major `Vec` and an unblocked Cholesky
//! factorization are all that is needed.

use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type C<T> = Complex<T>;

/// `x^H y`.
#[inline]
pub fn dotc<T: Real>(x: &[C<T>], y: &[C<T>]) -> C<T> {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
}

/// `||x||^2`.
#[inline]
pub fn norm_sqr<T: Real>(x: &[C<T>]) -> T {
    x.iter().map(|v| v.norm_sqr()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::new(T::zero(), T::zero()); rows * cols],
        }
    }

    /// `scale * I_n`.
    pub fn scaled_identity(n: usize, scale: T) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::new(scale, T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Adds `weight * x x^H` in place.
    pub fn add_outer(&mut self, weight: T, x: &[C<T>]) {
        assert!(self.rows == x.len() && self.cols == x.len());
        for i in 0..self.rows {
            let xi = x[i] * weight;
            for j in 0..self.cols {
                self[(i, j)] += xi * x[j].conj();
            }
        }
    }

    pub fn mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `||A - A^H||_F`.
    pub fn hermitian_defect(&self) -> T {
        if self.rows != self.cols {
            return T::infinity();
        }
        let mut acc = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Cholesky factor `A = L L^H` of a Hermitian positive definite matrix.
///
/// Only the lower triangle of the input is read.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    lower: Vec<C<T>>,
}

impl<T: Real> Cholesky<T> {
    pub fn new(a: &CMatrix<T>) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "cholesky of a {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let zero = C::new(T::zero(), T::zero());
        let mut l = vec![zero; n * n];
        for j in 0..n {
            let mut diag = a[(j, j)].re;
            for k in 0..j {
                diag -= l[j * n + k].norm_sqr();
            }
            if !diag.is_finite() || diag <= T::zero() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let ljj = diag.sqrt();
            l[j * n + j] = C::new(ljj, T::zero());
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / ljj;
            }
        }
        Ok(Self { n, lower: l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let l = &self.lower;
        // forward: L y = b
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i].re;
        }
        // backward: L^H x = y
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[k * n + i].conj() * y[k];
            }
            y[i] = s / l[i * n + i].re;
        }
        y
    }
}
