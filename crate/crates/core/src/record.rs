//! Angle-resolved and total cross sections with their provenance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::born::{born_differential_cross_section, born_total_cross_section, ScatteringAngles, TotalCrossSection};
use crate::capture::{ct_differential_cross_section, ct_total_cross_section, CaptureChannelSpec, CaptureQuadrature};
use crate::error::{Error, Result};
use crate::potentials::CentralPotential;
use crate::quadrature::Tolerance;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossSectionKind {
    ElasticBorn,
    ChargeTransferBorn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de>"))]
pub struct CrossSectionRecord<T> {
    pub kind: CrossSectionKind,
    pub angles: Vec<ScatteringAngles<T>>,
    /// `dσ/dΩ` at each entry of `angles`.
    pub dsigma: Vec<T>,
    pub sigma_total: TotalCrossSection<T>,
    /// Inputs needed to reproduce the record.
    pub params: serde_json::Value,
}

/// Header of [`CrossSectionRecord::to_csv`].
pub const CROSS_SECTION_CSV_HEADER: &str = "theta_rad,dsigma_dOmega_au";

impl<T: Real> CrossSectionRecord<T> {
    pub fn validate(&self) -> Result<()> {
        if self.angles.len() != self.dsigma.len() {
            return Err(Error::domain(format!(
                "{} angles but {} cross sections",
                self.angles.len(),
                self.dsigma.len()
            )));
        }
        if let Some(bad) = self.dsigma.iter().find(|d| !(**d >= T::zero()) || !d.is_finite()) {
            return Err(Error::domain(format!("dsigma must be finite and >= 0, got {bad}")));
        }
        Ok(())
    }

    /// One row per angle, values with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CROSS_SECTION_CSV_HEADER);
        out.push('\n');
        for (a, d) in self.angles.iter().zip(&self.dsigma) {
            out.push_str(&format!("{:.16e},{:.16e}\n", a.theta.as_f64(), d.as_f64()));
        }
        out
    }
}

/// First-Born elastic record over `thetas` (azimuth zero).
pub fn elastic_record<T: Real + Serialize>(
    pot: &CentralPotential<T>,
    p: T,
    mass: T,
    thetas: &[T],
    n_theta: usize,
    tol: &Tolerance<T>,
) -> Result<CrossSectionRecord<T>> {
    let angles = thetas
        .iter()
        .map(|&t| ScatteringAngles::new(t, T::zero()))
        .collect::<Result<Vec<_>>>()?;
    let dsigma = thetas
        .par_iter()
        .map(|&t| born_differential_cross_section(pot, p, mass, t, tol))
        .collect::<Result<Vec<_>>>()?;
    let sigma_total = born_total_cross_section(pot, p, mass, n_theta, tol)?;
    let params = serde_json::json!({
        "potential": serde_json::to_value(pot).unwrap_or_default(),
        "p": p.as_f64(),
        "mass": mass.as_f64(),
        "n_theta": n_theta,
        "tolerance": {"rel": tol.rel.as_f64(), "abs": tol.abs.as_f64(), "max_subdivisions": tol.max_subdivisions},
    });
    let rec = CrossSectionRecord {
        kind: CrossSectionKind::ElasticBorn,
        angles,
        dsigma,
        sigma_total,
        params,
    };
    rec.validate()?;
    Ok(rec)
}

/// First-Born capture record over `thetas` (azimuth zero).
pub fn charge_transfer_record(
    spec: &CaptureChannelSpec,
    thetas: &[f64],
    quad: &CaptureQuadrature,
) -> Result<CrossSectionRecord<f64>> {
    let angles = thetas
        .iter()
        .map(|&t| ScatteringAngles::new(t, 0.0))
        .collect::<Result<Vec<_>>>()?;
    let dsigma = thetas
        .par_iter()
        .map(|&t| ct_differential_cross_section(spec, t, quad))
        .collect::<Result<Vec<_>>>()?;
    let sigma_total = ct_total_cross_section(spec, quad)?;
    let params = serde_json::json!({
        "channel": serde_json::to_value(spec).unwrap_or_default(),
        "quadrature": serde_json::to_value(quad).unwrap_or_default(),
    });
    let rec = CrossSectionRecord {
        kind: CrossSectionKind::ChargeTransferBorn,
        angles,
        dsigma,
        sigma_total,
        params,
    };
    rec.validate()?;
    Ok(rec)
}
