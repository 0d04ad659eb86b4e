use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::grid::LatticeSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Complex amplitude sampled on a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexField1D<T> {
    pub lattice: LatticeSpec<T>,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> ComplexField1D<T> {
    pub fn new(lattice: LatticeSpec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        lattice.validate()?;
        if values.len() != lattice.points {
            return Err(Error::domain(format!(
                "field has {} values for {} lattice points",
                values.len(),
                lattice.points
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::domain("field values must be finite"));
        }
        Ok(Self { lattice, values })
    }

    pub fn zeros(lattice: LatticeSpec<T>) -> Self {
        Self {
            values: vec![Complex::new(T::zero(), T::zero()); lattice.points],
            lattice,
        }
    }

    pub fn from_fn(lattice: LatticeSpec<T>, f: impl Fn(T) -> Complex<T>) -> Result<Self> {
        let values = lattice.positions().into_iter().map(f).collect();
        Self::new(lattice, values)
    }

    /// Normalized packet `ψ ∝ exp(−(x−x0)²/(4σ0²) + i p0 x)`, so that
    /// `|ψ|²` has standard deviation `σ0`.
    pub fn gaussian_packet(lattice: LatticeSpec<T>, x0: T, p0: T, sigma0: T) -> Result<Self> {
        if !(sigma0 > T::zero()) {
            return Err(Error::domain("packet width must be > 0"));
        }
        let four = T::lit(4.0);
        let mut f = Self::from_fn(lattice, |x| {
            let d = x - x0;
            Complex::from_polar((-(d * d) / (four * sigma0 * sigma0)).exp(), p0 * x)
        })?;
        let n = f.norm();
        if !(n > T::zero()) {
            return Err(Error::domain("packet does not overlap the lattice"));
        }
        f.scale(Complex::new(n.recip(), T::zero()));
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sqrt(Σ|f_j|² dx)`
    pub fn norm(&self) -> T {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<T>() * self.lattice.dx()).sqrt()
    }

    /// `Σ |f_j|² dx` restricted to lattice points where `select(x)` holds.
    pub fn probability_where(&self, select: impl Fn(T) -> bool) -> T {
        let dx = self.lattice.dx();
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| select(self.lattice.x(*i)))
            .map(|(_, v)| v.norm_sqr())
            .sum::<T>()
            * dx
    }

    pub fn mean_position(&self) -> T {
        let (mut w, mut s) = (T::zero(), T::zero());
        for (i, v) in self.values.iter().enumerate() {
            let p = v.norm_sqr();
            w = w + p;
            s = s + p * self.lattice.x(i);
        }
        s / w
    }

    /// Standard deviation of `|f|²` as a position distribution.
    pub fn width(&self) -> T {
        let mean = self.mean_position();
        let (mut w, mut s) = (T::zero(), T::zero());
        for (i, v) in self.values.iter().enumerate() {
            let p = v.norm_sqr();
            let d = self.lattice.x(i) - mean;
            w = w + p;
            s = s + p * d * d;
        }
        (s / w).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Largest edge-cell amplitude relative to the field's peak amplitude.
    pub fn edge_ratio(&self) -> T {
        let peak = self.max_abs();
        if peak == T::zero() {
            return T::zero();
        }
        let edge = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.lattice.is_edge(*i))
            .fold(T::zero(), |m, (_, v)| m.max(v.norm()));
        edge / peak
    }

    pub fn scale(&mut self, s: Complex<T>) {
        for v in &mut self.values {
            *v = *v * s;
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.lattice != rhs.lattice {
            return Err(Error::domain("fields live on different lattices"));
        }
        Ok(Self {
            lattice: self.lattice,
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect(),
        })
    }

    /// `Σ conj(f_j) g_j dx`
    pub fn inner(&self, rhs: &Self) -> Result<Complex<T>> {
        if self.lattice != rhs.lattice {
            return Err(Error::domain("fields live on different lattices"));
        }
        let s: Complex<T> = self.values.iter().zip(&rhs.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.lattice.dx())
    }
}
