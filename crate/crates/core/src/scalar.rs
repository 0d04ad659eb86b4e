//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Converts an `f64` literal. Every constant used by the crate fits in `f32`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// `c = a · b` for row-major blocks: `a` is `rows × k`, `b` is `k × n`,
    /// `c` is `rows × n` with `rows = a.len() / k`.
    fn complex_gemm(k: usize, n: usize, a: &[Complex<Self>], b: &[Complex<Self>], c: &mut [Complex<Self>]);
}

fn check_gemm_shapes<T>(k: usize, n: usize, a: &[T], b: &[T], c: &[T]) -> usize {
    assert!(k > 0 && n > 0, "empty gemm");
    assert_eq!(a.len() % k, 0);
    let rows = a.len() / k;
    assert_eq!(b.len(), k * n);
    assert_eq!(c.len(), rows * n);
    rows
}

// Complex<T> is #[repr(C)] { re, im }, the same layout as [T; 2].
impl Real for f32 {
    fn complex_gemm(k: usize, n: usize, a: &[Complex<f32>], b: &[Complex<f32>], c: &mut [Complex<f32>]) {
        let m = check_gemm_shapes(k, n, a, b, c);
        unsafe {
            matrixmultiply::cgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                m,
                k,
                n,
                [1.0, 0.0],
                a.as_ptr().cast(),
                k as isize,
                1,
                b.as_ptr().cast(),
                n as isize,
                1,
                [0.0, 0.0],
                c.as_mut_ptr().cast(),
                n as isize,
                1,
            );
        }
    }
}

impl Real for f64 {
    fn complex_gemm(k: usize, n: usize, a: &[Complex<f64>], b: &[Complex<f64>], c: &mut [Complex<f64>]) {
        let m = check_gemm_shapes(k, n, a, b, c);
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                m,
                k,
                n,
                [1.0, 0.0],
                a.as_ptr().cast(),
                k as isize,
                1,
                b.as_ptr().cast(),
                n as isize,
                1,
                [0.0, 0.0],
                c.as_mut_ptr().cast(),
                n as isize,
                1,
            );
        }
    }
}
