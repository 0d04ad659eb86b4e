//! First-order Born elastic scattering by a central potential.
//!
//! Amplitude convention: `f(θ) = −(m/2π) v(q)` with the outgoing wave
//! `f e^{ipr}/r`. Only `|f|²` enters the observables.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ComplexField1D;
use crate::potentials::{CentralPotential, LatticePotential};
use crate::quadrature::{GaussLegendre, Tolerance};
use crate::scalar::Real;

/// Incident plane wave `exp(i p·r − iEt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveState<T> {
    pub p: [T; 3],
    pub energy: T,
    pub mass: T,
}

impl<T: Real> PlaneWaveState<T> {
    pub fn new(p: [T; 3], mass: T) -> Result<Self> {
        if !(mass > T::zero()) {
            return Err(Error::domain("mass must be > 0"));
        }
        let p2 = dot(&p, &p);
        Ok(Self {
            p,
            energy: p2 / (T::lit(2.0) * mass),
            mass,
        })
    }

    pub fn momentum(&self) -> T {
        dot(&self.p, &self.p).sqrt()
    }

    /// Incident flux density `|p|/m` for unit amplitude.
    pub fn flux(&self) -> T {
        self.momentum() / self.mass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringAngles<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> ScatteringAngles<T> {
    pub fn new(theta: T, phi: T) -> Result<Self> {
        check_theta(theta)?;
        let two_pi = T::lit(2.0) * T::PI();
        if !(phi >= T::zero() && phi < two_pi) {
            return Err(Error::domain(format!("phi must lie in [0, 2π), got {phi}")));
        }
        Ok(Self { theta, phi })
    }

    /// Unit vector of the scattering direction relative to incidence along `z`.
    pub fn direction(&self) -> [T; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

pub(crate) fn check_theta<T: Real>(theta: T) -> Result<()> {
    if !(theta >= T::zero() && theta <= T::PI()) {
        return Err(Error::domain(format!("theta must lie in [0, π], got {theta}")));
    }
    Ok(())
}

pub(crate) fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `|q| = 2p sin(θ/2)` for elastic scattering.
pub fn momentum_transfer<T: Real>(p: T, theta: T) -> Result<T> {
    if !(p >= T::zero()) || !p.is_finite() {
        return Err(Error::domain(format!("momentum must be finite and >= 0, got {p}")));
    }
    check_theta(theta)?;
    Ok(T::lit(2.0) * p * (theta / T::lit(2.0)).sin())
}

fn check_p_mass<T: Real>(p: T, mass: T) -> Result<()> {
    if !(p > T::zero()) || !p.is_finite() {
        return Err(Error::domain(format!("momentum must be finite and > 0, got {p}")));
    }
    if !(mass > T::zero()) || !mass.is_finite() {
        return Err(Error::domain(format!("mass must be finite and > 0, got {mass}")));
    }
    Ok(())
}

/// `f(θ) = −(m/2π) v(2p sin(θ/2))`
pub fn scattering_amplitude<T: Real>(
    pot: &CentralPotential<T>,
    p: T,
    mass: T,
    theta: T,
    tol: &Tolerance<T>,
) -> Result<Complex<T>> {
    check_p_mass(p, mass)?;
    let q = momentum_transfer(p, theta)?;
    let v = pot.fourier_transform(q, tol)?;
    Ok(v * (-mass / (T::lit(2.0) * T::PI())))
}

/// `dσ/dΩ = (m/2π)² |v(q)|²`
pub fn born_differential_cross_section<T: Real>(
    pot: &CentralPotential<T>,
    p: T,
    mass: T,
    theta: T,
    tol: &Tolerance<T>,
) -> Result<T> {
    Ok(scattering_amplitude(pot, p, mass, theta, tol)?.norm_sqr())
}

/// Azimuth is carried for generality; central potentials ignore it.
pub fn born_differential_cross_section_at<T: Real>(
    pot: &CentralPotential<T>,
    p: T,
    mass: T,
    angles: &ScatteringAngles<T>,
    tol: &Tolerance<T>,
) -> Result<T> {
    born_differential_cross_section(pot, p, mass, angles.theta, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalCrossSection<T> {
    pub value: T,
    /// `|σ(n) − σ(2n)|`
    pub error: T,
    pub nodes: usize,
}

/// `σ = 2π ∫₀^π dσ/dΩ sinθ dθ` by `n_theta`-point Gauss–Legendre; the error
/// estimate compares with `2·n_theta` nodes, whose value is returned.
pub fn born_total_cross_section<T: Real>(
    pot: &CentralPotential<T>,
    p: T,
    mass: T,
    n_theta: usize,
    tol: &Tolerance<T>,
) -> Result<TotalCrossSection<T>> {
    check_p_mass(p, mass)?;
    if n_theta < 16 {
        return Err(Error::domain(format!("n_theta must be >= 16, got {n_theta}")));
    }
    let integrate = |n: usize| -> Result<T> {
        let gl = GaussLegendre::new(n);
        let mut acc = T::zero();
        for (theta, w) in gl.mapped(T::zero(), T::PI()) {
            let d = born_differential_cross_section(pot, p, mass, theta, tol)?;
            acc = acc + w * d * theta.sin();
        }
        Ok(acc * T::lit(2.0) * T::PI())
    };
    let coarse = integrate(n_theta)?;
    let fine = integrate(2 * n_theta)?;
    if !fine.is_finite() {
        return Err(Error::numerical("total cross section is not finite", f64::INFINITY));
    }
    Ok(TotalCrossSection {
        value: fine,
        error: (fine - coarse).abs(),
        nodes: 2 * n_theta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FarFieldOptions {
    /// `r_b` must be at least this multiple of the potential's range.
    pub validity_factor: f64,
}

impl Default for FarFieldOptions {
    fn default() -> Self {
        Self { validity_factor: 100.0 }
    }
}

/// Asymptotic scattered wave at distance `r_b` in direction `n_b` and time `t_b`:
/// `−(m/2π) (1/r_b) v(|p_a − p n_b|) exp(i(p r_b − E t_b))`.
pub fn far_field_scattered_wave<T: Real>(
    pot: &CentralPotential<T>,
    incident: &PlaneWaveState<T>,
    r_b: T,
    n_b: [T; 3],
    t_b: T,
    options: &FarFieldOptions,
    tol: &Tolerance<T>,
) -> Result<Complex<T>> {
    let range = pot
        .range()
        .ok_or_else(|| Error::domain("far-field form needs a short-ranged potential"))?;
    let min_r = T::lit(options.validity_factor) * range;
    if !(r_b >= min_r) {
        return Err(Error::domain(format!(
            "r_b = {r_b} is inside the far-field threshold {min_r}"
        )));
    }
    let n_len = dot(&n_b, &n_b).sqrt();
    if (n_len - T::one()).abs() > T::lit(1e-6) {
        return Err(Error::domain("n_b must be a unit vector"));
    }
    let p = incident.momentum();
    check_p_mass(p, incident.mass)?;
    let q = [
        incident.p[0] - p * n_b[0],
        incident.p[1] - p * n_b[1],
        incident.p[2] - p * n_b[2],
    ];
    let v = pot.fourier_transform(dot(&q, &q).sqrt(), tol)?;
    let phase = Complex::from_polar(T::one(), p * r_b - incident.energy * t_b);
    Ok(v * phase * (-incident.mass / (T::lit(2.0) * T::PI() * r_b)))
}

/// Radial current `(1/2mi)(ψ* ∂ψ − ψ ∂ψ*) = Im(ψ* ∂ψ)/m` at the interior
/// samples of `psi` (central differences); entry `k` belongs to sample `k + 1`.
pub fn radial_flux<T: Real>(psi: &ComplexField1D<T>, mass: T) -> Result<Vec<T>> {
    if psi.len() < 3 {
        return Err(Error::domain("radial flux needs at least 3 samples"));
    }
    if !(mass > T::zero()) {
        return Err(Error::domain("mass must be > 0"));
    }
    let two_dx = T::lit(2.0) * psi.lattice.dx();
    Ok(psi
        .values
        .windows(3)
        .map(|w| {
            let d = (w[2] - w[0]) / two_dx;
            (w[1].conj() * d).im / mass
        })
        .collect())
}

/// First-order reflection probability of a one-dimensional potential,
/// `R = (m/p)² |Ṽ(2p)|²` with `Ṽ(k) = ∫ V(x) e^{ikx} dx`.
pub fn born_reflection_1d<T: Real>(pot: &LatticePotential<T>, p: T, mass: T) -> Result<T> {
    check_p_mass(p, mass)?;
    let k = T::lit(2.0) * p;
    let vt = match *pot {
        LatticePotential::Free => T::zero(),
        LatticePotential::ExponentialWell { v0, alpha } => T::lit(2.0) * v0 * alpha / (alpha * alpha + k * k),
        _ => {
            return Err(Error::domain(
                "1-D reflection needs a free or exponential-well potential",
            ))
        }
    };
    let r = mass / p * vt;
    Ok(r * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn momentum_transfer_examples() {
        assert!((momentum_transfer(1.0, PI).unwrap() - 2.0f64).abs() < 1e-15);
        assert_eq!(momentum_transfer(1.0, 0.0).unwrap(), 0.0);
        assert!((momentum_transfer(2.0, PI / 2.0).unwrap() - 8.0f64.sqrt()).abs() < 1e-15);
        assert!(momentum_transfer(1.0, 4.0).is_err());
        assert!(momentum_transfer(-1.0, 1.0).is_err());
    }

    #[test]
    fn plane_wave_energy_and_flux() {
        let s = PlaneWaveState::new([0.0, 3.0, 4.0], 2.0).unwrap();
        assert_eq!(s.energy, 25.0 / 4.0);
        assert_eq!(s.flux(), 2.5);
        assert!(ScatteringAngles::new(1.0, 7.0).is_err());
    }

    #[test]
    fn real_fields_carry_no_current() {
        let l = crate::lattice::LatticeSpec::new(1.0, 2.0, 16).unwrap();
        let f = ComplexField1D::from_fn(l, |x: f64| Complex::new(x.sin(), 0.0)).unwrap();
        assert!(radial_flux(&f, 1.0).unwrap().iter().all(|&j| j == 0.0));
    }
}
