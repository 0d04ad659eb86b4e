//! Central potential families and their momentum-space transforms
//! `v(q) = ∫ d³r V(|r|) exp(i q·r)` (ħ = 1).
//!
//! Yukawa, Gaussian and square-well transforms are closed form. Every family
//! can also be transformed by radial quadrature,
//! `v(q) = (4π/q) ∫₀^∞ r V(r) sin(qr) dr`, which is the only route for the
//! screened and soft-core Coulomb families.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Estimate, Tolerance};
use crate::scalar::Real;

/// `|V(R_cut)| R_cut²` must drop below this before the radial integral is cut.
const TAIL_THRESHOLD: f64 = 1e-14;
/// Upper bound on oscillation half-periods handled by one transform.
const MAX_HALF_PERIODS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CentralPotential<T> {
    /// `V0 e^{-αr} / r`
    Yukawa { v0: T, alpha: T },
    /// `V0 e^{-r²/(2w²)}`
    Gaussian { v0: T, width: T },
    /// `Z / sqrt(r² + s²)`; long ranged, `v(0)` diverges.
    SoftCoulomb { z: T, soft: T },
    /// `Z e^{-λr} / r`
    ScreenedCoulomb { z: T, screen: T },
    /// `V0` for `r < radius`, zero outside.
    SquareWell { v0: T, radius: T },
}

impl<T: Real> CentralPotential<T> {
    pub fn validate(&self) -> Result<()> {
        let (name, v) = match *self {
            Self::Yukawa { alpha, .. } => ("alpha", alpha),
            Self::Gaussian { width, .. } => ("width", width),
            Self::SoftCoulomb { soft, .. } => ("soft", soft),
            Self::ScreenedCoulomb { screen, .. } => ("screen", screen),
            Self::SquareWell { radius, .. } => ("radius", radius),
        };
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::domain(format!("{name} must be finite and > 0, got {v}")));
        }
        let strength = self.strength();
        if !strength.is_finite() {
            return Err(Error::domain("potential strength must be finite"));
        }
        Ok(())
    }

    /// Overall coupling constant (`V0` or `Z`).
    pub fn strength(&self) -> T {
        match *self {
            Self::Yukawa { v0, .. } | Self::Gaussian { v0, .. } | Self::SquareWell { v0, .. } => v0,
            Self::SoftCoulomb { z, .. } | Self::ScreenedCoulomb { z, .. } => z,
        }
    }

    /// The same family with its coupling multiplied by `k`.
    pub fn scaled(&self, k: T) -> Self {
        match *self {
            Self::Yukawa { v0, alpha } => Self::Yukawa { v0: v0 * k, alpha },
            Self::Gaussian { v0, width } => Self::Gaussian { v0: v0 * k, width },
            Self::SoftCoulomb { z, soft } => Self::SoftCoulomb { z: z * k, soft },
            Self::ScreenedCoulomb { z, screen } => Self::ScreenedCoulomb { z: z * k, screen },
            Self::SquareWell { v0, radius } => Self::SquareWell { v0: v0 * k, radius },
        }
    }

    /// `V(r)`. Yukawa and screened Coulomb return `±∞` at `r = 0`.
    pub fn evaluate(&self, r: T) -> T {
        let r = r.abs();
        match *self {
            Self::Yukawa { v0, alpha } => v0 * (-alpha * r).exp() / r,
            Self::Gaussian { v0, width } => v0 * (-(r * r) / (T::lit(2.0) * width * width)).exp(),
            Self::SoftCoulomb { z, soft } => z / (r * r + soft * soft).sqrt(),
            Self::ScreenedCoulomb { z, screen } => z * (-screen * r).exp() / r,
            Self::SquareWell { v0, radius } => {
                if r < radius {
                    v0
                } else {
                    T::zero()
                }
            }
        }
    }

    /// `r V(r)`, finite at the origin for every family.
    fn r_times_v(&self, r: T) -> T {
        match *self {
            Self::Yukawa { v0, alpha } => v0 * (-alpha * r).exp(),
            Self::ScreenedCoulomb { z, screen } => z * (-screen * r).exp(),
            _ => r * self.evaluate(r),
        }
    }

    /// Length scale beyond which the potential is negligible; `None` for the
    /// long-ranged soft Coulomb family.
    pub fn range(&self) -> Option<T> {
        match *self {
            Self::Yukawa { alpha, .. } => Some(alpha.recip()),
            Self::Gaussian { width, .. } => Some(width),
            Self::ScreenedCoulomb { screen, .. } => Some(screen.recip()),
            Self::SquareWell { radius, .. } => Some(radius),
            Self::SoftCoulomb { .. } => None,
        }
    }

    pub fn has_closed_form_transform(&self) -> bool {
        matches!(
            self,
            Self::Yukawa { .. } | Self::Gaussian { .. } | Self::SquareWell { .. }
        )
    }

    /// Closed-form `v(q)` where one exists.
    pub fn analytic_transform(&self, q: T) -> Option<T> {
        let four_pi = T::lit(4.0) * T::PI();
        match *self {
            Self::Yukawa { v0, alpha } => Some(four_pi * v0 / (alpha * alpha + q * q)),
            Self::Gaussian { v0, width } => {
                let two_pi = T::lit(2.0) * T::PI();
                Some(v0 * two_pi.powf(T::lit(1.5)) * width.powi(3) * (-(q * q * width * width) / T::lit(2.0)).exp())
            }
            Self::SquareWell { v0, radius } => {
                let x = q * radius;
                let shape = if x < T::lit(1e-2) {
                    let x2 = x * x;
                    T::one() / T::lit(3.0) - x2 / T::lit(30.0) + x2 * x2 / T::lit(840.0)
                } else {
                    (x.sin() - x * x.cos()) / (x * x * x)
                };
                Some(four_pi * v0 * radius.powi(3) * shape)
            }
            _ => None,
        }
    }

    /// `v(q)`; closed form where available, radial quadrature otherwise.
    pub fn fourier_transform(&self, q: T, tol: &Tolerance<T>) -> Result<Complex<T>> {
        check_momentum(q)?;
        self.validate()?;
        if let Some(v) = self.analytic_transform(q) {
            return Ok(Complex::new(v, T::zero()));
        }
        self.fourier_transform_quadrature(q, tol)
            .map(|e| Complex::new(e.value, T::zero()))
    }

    /// `v(q)` by radial quadrature regardless of family.
    pub fn fourier_transform_quadrature(&self, q: T, tol: &Tolerance<T>) -> Result<Estimate<T>> {
        check_momentum(q)?;
        self.validate()?;
        if let Self::SoftCoulomb { z, soft } = *self {
            return soft_coulomb_transform(z, soft, q, tol);
        }
        let (r_cut, breaks) = match *self {
            Self::SquareWell { radius, .. } => (radius, vec![]),
            _ => (self.cutoff_radius(), vec![]),
        };
        radial_fourier(|r| self.r_times_v(r), q, r_cut, &breaks, tol)
    }

    fn cutoff_radius(&self) -> T {
        let scale = self.range().unwrap_or(T::one());
        let threshold = T::lit(TAIL_THRESHOLD);
        let mut r = scale;
        // Monotone tails: grow until |V| r² is below the threshold.
        while (self.evaluate(r).abs() * r * r) >= threshold {
            r = r * T::lit(1.25);
            if !r.is_finite() {
                break;
            }
        }
        r
    }
}

fn check_momentum<T: Real>(q: T) -> Result<()> {
    if !(q >= T::zero()) || !q.is_finite() {
        return Err(Error::domain(format!(
            "momentum transfer must be finite and >= 0, got {q}"
        )));
    }
    Ok(())
}

/// Radial Fourier transform of a central function `f` given as
/// `rf(r) = r f(r)`:
/// `(4π/q) ∫₀^{r_cut} rf(r) sin(qr) dr`, or `4π ∫₀^{r_cut} r·rf(r) dr` at `q = 0`.
///
/// The range is split at every half period `π/q` and at `breakpoints`; each
/// piece is integrated adaptively.
pub fn radial_fourier<T: Real, F: Fn(T) -> T>(
    rf: F,
    q: T,
    r_cut: T,
    breakpoints: &[T],
    tol: &Tolerance<T>,
) -> Result<Estimate<T>> {
    let four_pi = T::lit(4.0) * T::PI();
    let mut points = vec![T::zero(), r_cut];
    points.extend(breakpoints.iter().copied().filter(|&b| b > T::zero() && b < r_cut));
    if q > T::zero() {
        let half_period = T::PI() / q;
        let n = (r_cut / half_period).floor().to_usize().unwrap_or(usize::MAX);
        if n > MAX_HALF_PERIODS {
            return Err(Error::numerical(
                format!("radial transform needs {n} oscillation periods"),
                f64::INFINITY,
            ));
        }
        points.extend(
            (1..=n)
                .map(|k| T::from_usize_lossy(k) * half_period)
                .filter(|&x| x < r_cut),
        );
    }
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    points.dedup();

    let piece_tol = Tolerance {
        abs: tol.abs / T::from_usize_lossy(points.len()),
        ..*tol
    };
    let mut total = Estimate {
        value: T::zero(),
        error: T::zero(),
    };
    for w in points.windows(2) {
        let est = if q > T::zero() {
            quadrature::integrate(|r| rf(r) * (q * r).sin(), w[0], w[1], &piece_tol)?
        } else {
            quadrature::integrate(|r| r * rf(r), w[0], w[1], &piece_tol)?
        };
        total = total + est;
    }
    let scale = if q > T::zero() { four_pi / q } else { four_pi };
    let out = Estimate {
        value: total.value * scale,
        error: total.error * scale,
    };
    if out.error > tol.target(out.value) * T::lit(10.0) {
        return Err(Error::numerical(
            "radial transform missed its tolerance",
            out.error.as_f64(),
        ));
    }
    Ok(out)
}

/// Soft-core Coulomb: `r V(r) = Z (1 − g(r))` with `g = 1 − r/sqrt(r²+s²)`.
/// The constant part transforms (in the Abel sense) to `1/q`; `g` decays as
/// `s²/2r²` and its tail beyond the cut is added by its asymptotic series.
fn soft_coulomb_transform<T: Real>(z: T, soft: T, q: T, tol: &Tolerance<T>) -> Result<Estimate<T>> {
    if q == T::zero() {
        return Err(Error::numerical(
            "soft Coulomb transform diverges at q = 0",
            f64::INFINITY,
        ));
    }
    let s2 = soft * soft;
    let g = move |r: T| {
        let h = (r * r + s2).sqrt();
        s2 / (h * (h + r))
    };
    let r_cut = (T::lit(20.0) * soft)
        .max(T::lit(10.0) / q)
        .max((T::lit(6e13) * s2 / q.powi(4)).powf(T::one() / T::lit(6.0)));
    let body = radial_fourier(g, q, r_cut, &[soft], tol)?;
    // radial_fourier returned (4π/q)∫ g sin; strip the prefactor back out.
    let four_pi = T::lit(4.0) * T::PI();
    let body_int = body.value * q / four_pi;

    let r = r_cut;
    let s4 = s2 * s2;
    let d1 = -s2 / r.powi(3) + T::lit(1.5) * s4 / r.powi(5);
    let d2 = T::lit(3.0) * s2 / r.powi(4) - T::lit(7.5) * s4 / r.powi(6);
    let d3 = T::lit(-12.0) * s2 / r.powi(5);
    let (sn, cs) = (q * r).sin_cos();
    let tail = g(r) * cs / q - d1 * sn / (q * q) - d2 * cs / q.powi(3) + d3 * sn / q.powi(4);
    let tail_err = (T::lit(60.0) * s2 / r.powi(6) / q.powi(5)).abs();

    let value = four_pi * z / q * (q.recip() - body_int - tail);
    let error = body.error * z.abs() + four_pi * z.abs() / q * tail_err;
    Ok(Estimate { value, error })
}

/// A potential that can be sampled on a one-dimensional lattice.
pub trait LinePotential<T>: Sync {
    fn value(&self, x: T) -> T;
}

/// Potentials available to the lattice propagators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LatticePotential<T> {
    Free,
    Constant {
        value: T,
    },
    /// `½ m ω² x²`
    Harmonic {
        mass: T,
        omega: T,
    },
    /// `V0 e^{-α|x|}`, the one-dimensional analogue of the Yukawa form.
    ExponentialWell {
        v0: T,
        alpha: T,
    },
    /// A central family evaluated at `|x − center|`.
    Central {
        potential: CentralPotential<T>,
        center: T,
    },
}

impl<T: Real> LatticePotential<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Harmonic { mass, .. } if !(mass > T::zero()) => Err(Error::domain("harmonic mass must be > 0")),
            Self::ExponentialWell { alpha, .. } if !(alpha > T::zero()) => Err(Error::domain("alpha must be > 0")),
            Self::Central { potential, .. } => potential.validate(),
            _ => Ok(()),
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Self::Free)
    }

    pub fn scaled(&self, k: T) -> Self {
        match *self {
            Self::Free => Self::Free,
            Self::Constant { value } => Self::Constant { value: value * k },
            Self::Harmonic { mass, omega } => Self::Harmonic {
                mass,
                omega: omega * k.sqrt(),
            },
            Self::ExponentialWell { v0, alpha } => Self::ExponentialWell { v0: v0 * k, alpha },
            Self::Central { potential, center } => Self::Central {
                potential: potential.scaled(k),
                center,
            },
        }
    }
}

impl<T: Real> LinePotential<T> for LatticePotential<T> {
    fn value(&self, x: T) -> T {
        match *self {
            Self::Free => T::zero(),
            Self::Constant { value } => value,
            Self::Harmonic { mass, omega } => T::lit(0.5) * mass * omega * omega * x * x,
            Self::ExponentialWell { v0, alpha } => v0 * (-alpha * x.abs()).exp(),
            Self::Central { potential, center } => potential.evaluate(x - center),
        }
    }
}

impl<T: Real> LinePotential<T> for CentralPotential<T> {
    fn value(&self, x: T) -> T {
        self.evaluate(x)
    }
}

/// Adapter for ad-hoc closures.
pub struct FnPotential<F>(pub F);

impl<T, F: Fn(T) -> T + Sync> LinePotential<T> for FnPotential<F> {
    fn value(&self, x: T) -> T {
        (self.0)(x)
    }
}

/// Electron–A⁺, electron–B⁺ and A⁺–B⁺ interactions of the three-body system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairPotentials<T> {
    pub v_a: LatticePotential<T>,
    pub v_b: LatticePotential<T>,
    pub v_ab: LatticePotential<T>,
}

impl<T: Real> PairPotentials<T> {
    pub fn validate(&self) -> Result<()> {
        self.v_a.validate()?;
        self.v_b.validate()?;
        self.v_ab.validate()
    }
}
