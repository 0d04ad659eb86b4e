//! Dense row-major complex matrices.
//!
//! Products are split into fixed 32-row blocks that run in parallel; the block
//! layout does not depend on the thread count, so results are bit-identical
//! for any pool size.

use num_complex::Complex;
use rayon::prelude::*;

use crate::scalar::Real;

const ROW_BLOCK: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex<T> + Sync) -> Self {
        let mut data = vec![Complex::new(T::zero(), T::zero()); rows * cols];
        data.par_chunks_mut(cols.max(1)).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(i, j);
            }
        });
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Self { rows, cols, data }
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let (k, n) = (self.cols, rhs.cols);
        let mut out = Self::zeros(self.rows, n);
        if k == 0 || n == 0 || self.rows == 0 {
            return out;
        }
        out.data
            .par_chunks_mut(ROW_BLOCK * n)
            .zip(self.data.par_chunks(ROW_BLOCK * k))
            .for_each(|(c, a)| T::complex_gemm(k, n, a, &rhs.data, c));
        out
    }

    /// `self^n` by repeated squaring; `n = 0` gives the identity.
    pub fn pow(&self, mut n: usize) -> Self {
        assert!(self.is_square(), "pow of a non-square matrix");
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.matmul(&base),
                });
            }
            n >>= 1;
            if n > 0 {
                base = base.matmul(&base);
            }
        }
        result.unwrap_or_else(|| Self::identity(self.rows))
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.cols, "vector length does not match");
        self.data
            .par_chunks(self.cols.max(1))
            .map(|row| {
                let (mut re, mut im) = (T::zero(), T::zero());
                for (a, b) in row.iter().zip(v) {
                    re = re + a.re * b.re - a.im * b.im;
                    im = im + a.re * b.im + a.im * b.re;
                }
                Complex::new(re, im)
            })
            .collect()
    }

    /// `diag(d) · self`
    pub fn scale_rows(&mut self, d: &[Complex<T>]) {
        assert_eq!(d.len(), self.rows);
        let cols = self.cols.max(1);
        self.data.par_chunks_mut(cols).zip(d.par_iter()).for_each(|(row, s)| {
            for v in row {
                *v = *v * s;
            }
        });
    }

    /// `self · diag(d)`
    pub fn scale_cols(&mut self, d: &[Complex<T>]) {
        assert_eq!(d.len(), self.cols);
        let cols = self.cols.max(1);
        self.data.par_chunks_mut(cols).for_each(|row| {
            for (v, s) in row.iter_mut().zip(d) {
                *v = *v * s;
            }
        });
    }

    pub fn scale(&mut self, s: Complex<T>) {
        self.data.par_iter_mut().for_each(|v| *v = *v * s);
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}
