//! Free propagators, the one-slice kinetic factor and the slice transfer
//! matrices built from it.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::grid::{Geometry, LatticeSpec};
use super::matrix::CMatrix;
use crate::error::{Error, Result};
use crate::potentials::LinePotential;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    D1,
    D3,
}

/// Closed-form free propagator
/// `(m/(2πiΔt))^{d/2} exp(i m |x_b − x_a|² / (2Δt))`, principal branch.
/// For `D3` only the separation `|x_b − x_a|` enters.
pub fn free_propagator<T: Real>(x_b: T, t_b: T, x_a: T, t_a: T, mass: T, dim: Dimension) -> Result<Complex<T>> {
    let dt = t_b - t_a;
    if !(dt > T::zero()) {
        return Err(Error::domain(format!("free propagator needs t_b > t_a, got Δt = {dt}")));
    }
    if !(mass > T::zero()) {
        return Err(Error::domain("mass must be > 0"));
    }
    let d = match dim {
        Dimension::D1 => T::one(),
        Dimension::D3 => T::lit(3.0),
    };
    let two = T::lit(2.0);
    let modulus = (mass / (two * T::PI() * dt)).powf(d / two);
    let r = x_b - x_a;
    let phase = mass * r * r / (two * dt) - T::PI() * d / T::lit(4.0);
    Ok(Complex::from_polar(modulus, phase))
}

/// Free propagator of the s-wave radial function `u = rψ` (hard wall at the
/// origin): `K₁(r_b − r_a) − K₁(r_b + r_a)`. Dividing by `4π r_b r_a` gives
/// the angle-averaged three-dimensional kernel.
pub fn radial_free_kernel<T: Real>(r_b: T, r_a: T, dt: T, mass: T) -> Result<Complex<T>> {
    let direct = free_propagator(r_b, dt, r_a, T::zero(), mass, Dimension::D1)?;
    let image = free_propagator(r_b, dt, -r_a, T::zero(), mass, Dimension::D1)?;
    Ok(direct - image)
}

/// How the one-slice kinetic factor is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KineticScheme {
    /// `exp(−iεp²/2m)` applied exactly in the lattice's sine eigenbasis.
    #[default]
    Spectral,
    /// The closed-form short-time kernel times `dx`, entry by entry.
    /// Aliases once `m |x − x'| dx / ε` exceeds `π` anywhere on the lattice,
    /// so it is only usable for slices that are long compared with `m L dx`.
    Feynman,
}

/// Where the potential is sampled within each slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PotentialSampling {
    /// Full weight at the later point of each slice.
    Endpoint,
    /// Half weight at each end of the slice. Over the whole interval this is
    /// the trapezoidal weighting of the sum over all `N + 1` slice endpoints.
    #[default]
    Trapezoid,
    /// At the midpoint `(x_j + x_{j−1})/2` of each step.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagatorOptions {
    pub scheme: KineticScheme,
    pub sampling: PotentialSampling,
    /// Edge-to-centre amplitude ratio above which a leak warning is attached.
    pub leak_tolerance: f64,
}

impl Default for PropagatorOptions {
    fn default() -> Self {
        Self {
            scheme: KineticScheme::Spectral,
            sampling: PotentialSampling::Trapezoid,
            leak_tolerance: 1e-3,
        }
    }
}

/// Orthonormal sine eigenbasis of the lattice Laplacian with hard walls one
/// cell outside the outermost points.
#[derive(Debug, Clone)]
pub struct SineBasis<T> {
    s: CMatrix<T>,
    k: Vec<T>,
}

impl<T: Real> SineBasis<T> {
    pub fn new(lattice: &LatticeSpec<T>) -> Self {
        let p = lattice.points;
        let period = 2 * (p + 1);
        let norm = (T::lit(2.0) / T::from_usize_lossy(p + 1)).sqrt();
        let step = T::PI() / T::from_usize_lossy(p + 1);
        // reduce (j+1)(n+1) mod 2(P+1) before scaling to keep the sines exact
        let s = CMatrix::from_fn(p, p, |j, n| {
            let m = ((j + 1) * (n + 1)) % period;
            Complex::new(norm * (step * T::from_usize_lossy(m)).sin(), T::zero())
        });
        let box_len = lattice.dx() * T::from_usize_lossy(p + 1);
        let k = (1..=p).map(|n| T::from_usize_lossy(n) * T::PI() / box_len).collect();
        Self { s, k }
    }

    pub fn wavenumbers(&self) -> &[T] {
        &self.k
    }

    pub fn k_max(&self) -> T {
        *self.k.last().expect("non-empty basis")
    }

    /// `S diag(f(k)) S`
    pub fn operator(&self, f: impl Fn(T) -> Complex<T>) -> CMatrix<T> {
        let d: Vec<Complex<T>> = self.k.iter().map(|&k| f(k)).collect();
        let mut a = self.s.clone();
        a.scale_cols(&d);
        a.matmul(&self.s)
    }

    /// Smooth low-pass projector: unity below `0.35 k_max`, zero above
    /// `0.7 k_max`, C^∞ in between. Turns lattice delta functions into
    /// band-limited point sources whose wall images are negligible.
    pub fn smoothing_filter(&self) -> CMatrix<T> {
        let k1 = T::lit(FILTER_BAND.0) * self.k_max();
        let k2 = T::lit(FILTER_BAND.1) * self.k_max();
        self.operator(|k| Complex::new(smooth_window(k, k1, k2), T::zero()))
    }
}

/// Pass band of the point-source filter as fractions of `k_max`.
pub const FILTER_BAND: (f64, f64) = (0.35, 0.7);

/// C^∞ step from 1 (below `k1`) to 0 (above `k2`).
pub fn smooth_window<T: Real>(k: T, k1: T, k2: T) -> T {
    let a = ((k - k1) / (k2 - k1)).max(T::zero()).min(T::one());
    let bump = |s: T| if s > T::zero() { (-s.recip()).exp() } else { T::zero() };
    let (f0, f1) = (bump(a), bump(T::one() - a));
    T::one() - f0 / (f0 + f1)
}

/// One-slice kinetic transfer matrix `T_ε` (entries carry the `dx` measure).
pub fn kinetic_factor<T: Real>(
    lattice: &LatticeSpec<T>,
    epsilon: T,
    mass: T,
    scheme: KineticScheme,
) -> Result<CMatrix<T>> {
    lattice.validate()?;
    if !(epsilon > T::zero()) {
        return Err(Error::domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    if !(mass > T::zero()) {
        return Err(Error::domain("mass must be > 0"));
    }
    Ok(match scheme {
        KineticScheme::Spectral => {
            let basis = SineBasis::new(lattice);
            let two = T::lit(2.0);
            basis.operator(|k| Complex::from_polar(T::one(), -epsilon * k * k / (two * mass)))
        }
        KineticScheme::Feynman => {
            let dx = lattice.dx();
            let xs = lattice.positions();
            let radial = lattice.geometry == Geometry::Radial;
            let k = |a: T, b: T| free_propagator(a, epsilon, b, T::zero(), mass, Dimension::D1).expect("validated");
            CMatrix::from_fn(lattice.points, lattice.points, |i, j| {
                let mut v = k(xs[i], xs[j]);
                if radial {
                    v = v - k(xs[i], -xs[j]);
                }
                v * dx
            })
        }
    })
}

/// `exp(−i·w·ε·(V(x) − iW(x)))` at each lattice point.
pub fn phase_factors<T: Real>(
    lattice: &LatticeSpec<T>,
    epsilon: T,
    pot: &dyn LinePotential<T>,
    weight: T,
) -> Result<Vec<Complex<T>>> {
    let we = weight * epsilon;
    (0..lattice.points)
        .map(|i| {
            let x = lattice.x(i);
            let v = pot.value(x);
            if !v.is_finite() {
                return Err(Error::domain(format!("potential is not finite at x = {x}")));
            }
            Ok(Complex::from_polar((-we * lattice.absorber(i)).exp(), -we * v))
        })
        .collect()
}

/// The orthonormal sine transform `S` of [`SineBasis`] applied in
/// `O(P log P)` through an FFT of length `2(P + 1)`.
pub struct FastSine<T: Real> {
    fft: Arc<dyn Fft<T>>,
    points: usize,
    scale: T,
}

impl<T: Real> FastSine<T> {
    pub fn new(points: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            fft: planner.plan_fft_forward(2 * (points + 1)),
            points,
            scale: (T::lit(2.0) / T::from_usize_lossy(points + 1)).sqrt() / T::lit(2.0),
        }
    }

    pub fn apply(&self, v: &mut [Complex<T>]) {
        assert_eq!(v.len(), self.points);
        let p = self.points;
        let zero = Complex::new(T::zero(), T::zero());
        let mut buf = vec![zero; 2 * (p + 1)];
        for (j, x) in v.iter().enumerate() {
            buf[j + 1] = *x;
            buf[2 * (p + 1) - (j + 1)] = -*x;
        }
        self.fft.process(&mut buf);
        // FFT of the odd extension is −2i Σ v_j sin(·)
        let factor = Complex::new(T::zero(), self.scale);
        for (n, x) in v.iter_mut().enumerate() {
            *x = buf[n + 1] * factor;
        }
    }
}

/// Builds slice transfer matrices for a fixed lattice, step and mass.
pub struct SliceBuilder<T> {
    lattice: LatticeSpec<T>,
    epsilon: T,
    options: PropagatorOptions,
    kinetic: CMatrix<T>,
}

impl<T: Real> SliceBuilder<T> {
    pub fn new(lattice: &LatticeSpec<T>, epsilon: T, mass: T, options: PropagatorOptions) -> Result<Self> {
        Ok(Self {
            lattice: *lattice,
            epsilon,
            options,
            kinetic: kinetic_factor(lattice, epsilon, mass, options.scheme)?,
        })
    }

    pub fn lattice(&self) -> &LatticeSpec<T> {
        &self.lattice
    }

    pub fn kinetic(&self) -> &CMatrix<T> {
        &self.kinetic
    }

    pub fn phase_factors(&self, pot: &dyn LinePotential<T>, weight: T) -> Result<Vec<Complex<T>>> {
        phase_factors(&self.lattice, self.epsilon, pot, weight)
    }

    /// Transfer matrix of one slice whose potential is `prev` at its start and
    /// `next` at its end.
    pub fn transfer(&self, prev: &dyn LinePotential<T>, next: &dyn LinePotential<T>) -> Result<CMatrix<T>> {
        let half = T::lit(0.5);
        let mut g = self.kinetic.clone();
        match self.options.sampling {
            PotentialSampling::Endpoint => {
                g.scale_rows(&self.phase_factors(next, T::one())?);
            }
            PotentialSampling::Trapezoid => {
                g.scale_rows(&self.phase_factors(next, half)?);
                g.scale_cols(&self.phase_factors(prev, half)?);
            }
            PotentialSampling::Midpoint => {
                let xs = self.lattice.positions();
                let eps = self.epsilon;
                let phase = CMatrix::from_fn(xs.len(), xs.len(), |i, j| {
                    let xm = (xs[i] + xs[j]) * half;
                    let v = (prev.value(xm) + next.value(xm)) * half;
                    Complex::from_polar(T::one(), -eps * v)
                });
                if !phase.all_finite() {
                    return Err(Error::domain("potential is not finite at a step midpoint"));
                }
                g = CMatrix::from_fn(xs.len(), xs.len(), |i, j| g.get(i, j) * phase.get(i, j));
                let free = crate::potentials::LatticePotential::Free;
                g.scale_rows(&self.phase_factors(&free, half)?);
                g.scale_cols(&self.phase_factors(&free, half)?);
            }
        }
        Ok(g)
    }
}
