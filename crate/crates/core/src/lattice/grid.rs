use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform time slicing of `[t_a, t_b]` into `slices` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid<T> {
    pub t_a: T,
    pub t_b: T,
    pub slices: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(t_a: T, t_b: T, slices: usize) -> Result<Self> {
        let g = Self { t_a, t_b, slices };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t_a.is_finite() || !self.t_b.is_finite() || !(self.t_b > self.t_a) {
            return Err(Error::domain(format!(
                "time grid needs finite t_b > t_a, got [{}, {}]",
                self.t_a, self.t_b
            )));
        }
        if self.slices == 0 {
            return Err(Error::domain("time grid needs slices >= 1"));
        }
        Ok(())
    }

    pub fn duration(&self) -> T {
        self.t_b - self.t_a
    }

    pub fn epsilon(&self) -> T {
        self.duration() / T::from_usize_lossy(self.slices)
    }

    /// Time of slice endpoint `j`, `0 ≤ j ≤ slices`.
    pub fn time(&self, j: usize) -> T {
        if j == self.slices {
            return self.t_b;
        }
        self.t_a + self.epsilon() * T::from_usize_lossy(j)
    }

    /// The first `k` slices and the remainder, sharing the same ε.
    pub fn split(&self, k: usize) -> Result<(Self, Self)> {
        if k == 0 || k >= self.slices {
            return Err(Error::domain(format!("cannot split {} slices at {k}", self.slices)));
        }
        let mid = self.time(k);
        Ok((
            Self {
                t_a: self.t_a,
                t_b: mid,
                slices: k,
            },
            Self {
                t_a: mid,
                t_b: self.t_b,
                slices: self.slices - k,
            },
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Boundary<T> {
    /// Hard walls one cell outside the outermost points.
    #[default]
    Hard,
    /// Hard walls plus a `−iW` layer of the given width at each open edge,
    /// `W = strength · s²` with `s` the fractional depth into the layer.
    Absorbing { width: T, strength: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    #[default]
    Line,
    /// s-wave radial reduction `u(r) = r ψ(r)` with `u(0) = 0`; the points are
    /// `r_j = j·dx`, `j = 1..=points`.
    Radial,
}

/// Uniform spatial lattice, `dx = (x_max − x_min)/(points − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Deserialize<'de>"))]
pub struct LatticeSpec<T> {
    pub x_min: T,
    pub x_max: T,
    pub points: usize,
    #[serde(default)]
    pub boundary: Boundary<T>,
    #[serde(default)]
    pub geometry: Geometry,
}

impl<T: Real> LatticeSpec<T> {
    pub fn new(x_min: T, x_max: T, points: usize) -> Result<Self> {
        let l = Self {
            x_min,
            x_max,
            points,
            boundary: Boundary::Hard,
            geometry: Geometry::Line,
        };
        l.validate()?;
        Ok(l)
    }

    /// Radial lattice on `(0, r_max]`.
    pub fn radial(r_max: T, points: usize) -> Result<Self> {
        if points < 8 {
            return Err(Error::domain(format!("points must be >= 8, got {points}")));
        }
        let l = Self {
            x_min: r_max / T::from_usize_lossy(points),
            x_max: r_max,
            points,
            boundary: Boundary::Hard,
            geometry: Geometry::Radial,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn with_boundary(mut self, boundary: Boundary<T>) -> Result<Self> {
        self.boundary = boundary;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 8 {
            return Err(Error::domain(format!("points must be >= 8, got {}", self.points)));
        }
        if !self.x_min.is_finite() || !self.x_max.is_finite() || !(self.x_max > self.x_min) {
            return Err(Error::domain(format!(
                "lattice needs finite x_max > x_min, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.geometry == Geometry::Radial {
            let dx = self.dx();
            if (self.x_min - dx).abs() > T::lit(1e-6) * dx {
                return Err(Error::domain("radial lattice must start at r = dx"));
            }
        }
        if let Boundary::Absorbing { width, strength } = self.boundary {
            let span = self.x_max - self.x_min;
            if !(width > T::zero()) || !(width < span / T::lit(2.0)) {
                return Err(Error::domain(format!(
                    "absorbing width must lie in (0, {}), got {width}",
                    span / T::lit(2.0)
                )));
            }
            if !(strength >= T::zero()) || !strength.is_finite() {
                return Err(Error::domain("absorbing strength must be finite and >= 0"));
            }
        }
        Ok(())
    }

    pub fn dx(&self) -> T {
        (self.x_max - self.x_min) / T::from_usize_lossy(self.points - 1)
    }

    pub fn x(&self, i: usize) -> T {
        if i + 1 == self.points {
            return self.x_max;
        }
        self.x_min + self.dx() * T::from_usize_lossy(i)
    }

    pub fn positions(&self) -> Vec<T> {
        (0..self.points).map(|i| self.x(i)).collect()
    }

    /// Index of the lattice point closest to `x`, if `x` lies on the lattice span.
    pub fn nearest_index(&self, x: T) -> Option<usize> {
        let dx = self.dx();
        let half = dx / T::lit(2.0);
        if !(x >= self.x_min - half && x <= self.x_max + half) {
            return None;
        }
        let i = ((x - self.x_min) / dx).round().to_usize()?;
        Some(i.min(self.points - 1))
    }

    /// Absorbing rate `W(x_i) ≥ 0` (zero for hard walls).
    pub fn absorber(&self, i: usize) -> T {
        let Boundary::Absorbing { width, strength } = self.boundary else {
            return T::zero();
        };
        let x = self.x(i);
        let mut depth = (x - (self.x_max - width)) / width;
        if self.geometry == Geometry::Line {
            depth = depth.max((self.x_min + width - x) / width);
        }
        if depth > T::zero() {
            let s = depth.min(T::one());
            strength * s * s
        } else {
            T::zero()
        }
    }

    /// Cells treated as the lattice edge by leak detection.
    pub fn edge_cells(&self) -> usize {
        (self.points / 64).max(2)
    }

    pub(crate) fn is_edge(&self, i: usize) -> bool {
        let e = self.edge_cells();
        match self.geometry {
            Geometry::Line => i < e || i + e >= self.points,
            Geometry::Radial => i + e >= self.points,
        }
    }

    pub(crate) fn is_central(&self, i: usize) -> bool {
        let q = self.points / 4;
        match self.geometry {
            Geometry::Line => i >= q && i < self.points - q,
            Geometry::Radial => i < self.points - 2 * q,
        }
    }
}
