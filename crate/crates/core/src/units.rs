//! Hartree atomic units, collision masses and channel energetics for the
//! rearrangement `B⁺ + A → B + A⁺`.
//!
//! Coordinates follow the centre-of-mass convention: `R` is the position of
//! B relative to the centre of mass of (A + e), `R'` the position of A
//! relative to the centre of mass of (B + e). The lab-frame variant with a
//! resting target is not implemented.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// CODATA proton-to-electron mass ratio.
pub const PROTON_ELECTRON_MASS_RATIO: f64 = 1836.152673;

/// Atomic units: `ħ = m_e = e = 1`. Only the proton mass is adjustable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem<T> {
    proton_mass_ratio: T,
}

impl<T: Real> Default for UnitSystem<T> {
    fn default() -> Self {
        Self {
            proton_mass_ratio: T::lit(PROTON_ELECTRON_MASS_RATIO),
        }
    }
}

impl<T: Real> UnitSystem<T> {
    pub fn with_proton_mass_ratio(ratio: T) -> Result<Self> {
        if !(ratio > T::one()) || !ratio.is_finite() {
            return Err(Error::domain(format!(
                "proton_mass_ratio must be finite and > 1, got {ratio}"
            )));
        }
        Ok(Self {
            proton_mass_ratio: ratio,
        })
    }

    #[inline]
    pub fn hbar(&self) -> T {
        T::one()
    }

    #[inline]
    pub fn electron_mass(&self) -> T {
        T::one()
    }

    #[inline]
    pub fn proton_mass(&self) -> T {
        self.proton_mass_ratio
    }
}

/// Masses of the three-body system and the channel reduced masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionKinematics<T> {
    /// Target nuclear mass in proton masses.
    pub a: T,
    /// Projectile nuclear mass in proton masses.
    pub b: T,
    pub proton_mass: T,
    pub electron_mass: T,
    /// Reduced mass of B⁺ relative to (A⁺ + e⁻).
    pub mu_a: T,
    /// Reduced mass of A⁺ relative to (B⁺ + e⁻).
    pub mu_b: T,
    /// Electron reduced mass in the A atom.
    pub m_a: T,
    /// Electron reduced mass in the B atom.
    pub m_b: T,
}

impl<T: Real> CollisionKinematics<T> {
    /// Builds the kinematics from explicit proton and electron masses. The
    /// electron mass may be zero (the nuclear reduced-mass limit).
    pub fn with_masses(a: T, b: T, proton_mass: T, electron_mass: T) -> Result<Self> {
        for (name, v) in [("A", a), ("B", b), ("proton mass", proton_mass)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if electron_mass < T::zero() || !electron_mass.is_finite() {
            return Err(Error::domain(format!(
                "electron mass must be finite and non-negative, got {electron_mass}"
            )));
        }
        let ma = a * proton_mass;
        let mb = b * proton_mass;
        let m = electron_mass;
        let total = ma + mb + m;
        Ok(Self {
            a,
            b,
            proton_mass,
            electron_mass,
            mu_a: mb * (ma + m) / total,
            mu_b: ma * (mb + m) / total,
            m_a: ma * m / (ma + m),
            m_b: mb * m / (mb + m),
        })
    }

    pub fn target_mass(&self) -> T {
        self.a * self.proton_mass
    }

    pub fn projectile_mass(&self) -> T {
        self.b * self.proton_mass
    }
}

/// Reduced masses for target mass number `a` and projectile mass number `b`.
pub fn reduced_masses<T: Real>(a: T, b: T, units: &UnitSystem<T>) -> Result<CollisionKinematics<T>> {
    CollisionKinematics::with_masses(a, b, units.proton_mass(), units.electron_mass())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelStatus {
    Open,
    Closed,
}

/// Energies and momenta of the entrance and exit channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelEnergetics<T> {
    pub e_a: T,
    pub eps_a: T,
    pub eps_b: T,
    pub e_b: T,
    pub p_a: T,
    /// Zero when the channel is closed.
    pub p_b: T,
    pub status: ChannelStatus,
}

impl<T: Real> ChannelEnergetics<T> {
    pub fn is_open(&self) -> bool {
        self.status == ChannelStatus::Open
    }

    pub fn total_energy(&self) -> T {
        self.e_a + self.eps_a
    }
}

/// Exit-channel energy from energy conservation, `E_b = E_a + ε_a − ε_b`.
pub fn channel_energetics<T: Real>(
    e_a: T,
    eps_a: T,
    eps_b: T,
    kin: &CollisionKinematics<T>,
) -> Result<ChannelEnergetics<T>> {
    if !(e_a >= T::zero()) || !e_a.is_finite() {
        return Err(Error::domain(format!("E_a must be finite and >= 0, got {e_a}")));
    }
    if !eps_a.is_finite() || !eps_b.is_finite() {
        return Err(Error::domain("binding energies must be finite"));
    }
    // grouped so that equal binding energies leave E_a untouched
    let e_b = e_a + (eps_a - eps_b);
    let two = T::lit(2.0);
    let p_a = (two * kin.mu_a * e_a).sqrt();
    let (status, p_b) = if e_b >= T::zero() {
        (ChannelStatus::Open, (two * kin.mu_b * e_b).sqrt())
    } else {
        (ChannelStatus::Closed, T::zero())
    };
    Ok(ChannelEnergetics {
        e_a,
        eps_a,
        eps_b,
        e_b,
        p_a,
        p_b,
        status,
    })
}
