//! Dispatch of a validated configuration to the library.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use pathscatter::born::ScatteringAngles;
use pathscatter::capture::{brute_force_oracle, capture_amplitude, OracleEstimate};
use pathscatter::influence::{influence_k1, influence_k2};
use pathscatter::lattice::{
    evolve_sliced, field_leak_warning, free_propagator, time_sliced_propagator, ComplexField1D, Dimension,
    PropagatorOptions, SineBasis,
};
use pathscatter::record::{charge_transfer_record, elastic_record};
use pathscatter::{ComplexField64, CrossSectionRecord64, Error, InfluenceResult64, LatticeSpec64, Result, TimeGrid64};
use serde::{Deserialize, Serialize};

use crate::config::{Functional, RunConfig};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: String,
    /// Library name and version that produced the document.
    pub generator: String,
    pub config: RunConfig,
    pub payload: Payload,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub warnings: Vec<String>,
    /// Named scalar checks and error estimates.
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    Propagator(PropagatorExport),
    Field(ComplexField64),
    CrossSection(CrossSectionRecord64),
    Influence(InfluenceResult64),
    Oracle(OracleExport),
}

/// One column `K(x_i, t_b; x_a, t_a)` of the point-source kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagatorExport {
    pub lattice: LatticeSpec64,
    pub grid: TimeGrid64,
    pub mass: f64,
    pub options: PropagatorOptions,
    pub source_index: usize,
    pub source_x: f64,
    pub column: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub theta: f64,
    pub estimate: OracleEstimate,
    /// Momentum-space amplitude at the same angle.
    pub momentum_route: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleExport {
    pub rows: Vec<OracleRow>,
}

/// Result document plus its plot-ready CSV table.
pub struct Outcome {
    pub document: ResultDocument,
    pub csv: String,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn field_csv(lattice: &LatticeSpec64, values: &[Complex64]) -> String {
    let mut out = String::from("index,x,re,im\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{},{},{}\n", fmt(lattice.x(i)), fmt(v.re), fmt(v.im)));
    }
    out
}

fn uniform(n: usize, hi: f64) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect()
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    let mut diag = Diagnostics::default();
    let (payload, csv) = match config {
        RunConfig::Propagator(c) => {
            let k = time_sliced_propagator(&c.potential, &c.lattice, &c.time, c.mass, c.options)?;
            diag.warnings.extend(k.warnings.iter().cloned());
            diag.metrics.insert("symmetry_deviation".into(), k.symmetry_deviation());
            diag.metrics.insert("leak_ratio".into(), k.leak_ratio());
            let l = &c.lattice;
            let a = l
                .nearest_index(c.source)
                .ok_or_else(|| Error::Domain(format!("source {} lies outside the lattice", c.source)))?;
            let f = SineBasis::new(l).smoothing_filter();
            let src: Vec<Complex64> = (0..l.points).map(|i| f.get(i, a) / l.dx()).collect();
            let column = f.mul_vec(&k.transfer.mul_vec(&src));
            if c.potential.is_free() {
                diag.metrics.insert(
                    "max_rel_deviation_from_free".into(),
                    free_deviation(c.mass, l, &c.time, a, &column)?,
                );
            }
            let csv = field_csv(l, &column);
            let export = PropagatorExport {
                lattice: *l,
                grid: c.time,
                mass: c.mass,
                options: c.options,
                source_index: a,
                source_x: l.x(a),
                column,
            };
            (Payload::Propagator(export), csv)
        }
        RunConfig::Evolve(c) => {
            let psi0 = ComplexField1D::gaussian_packet(c.lattice, c.packet.x0, c.packet.p0, c.packet.sigma0)?;
            let psi = evolve_sliced(&psi0, &c.potential, &c.time, c.mass, c.options)?;
            if let Some(w) = field_leak_warning(&psi, c.options.leak_tolerance) {
                diag.warnings.push(w);
            }
            diag.metrics.insert("norm".into(), psi.norm());
            diag.metrics.insert("mean_position".into(), psi.mean_position());
            diag.metrics.insert("width".into(), psi.width());
            let csv = field_csv(&psi.lattice, &psi.values);
            (Payload::Field(psi), csv)
        }
        RunConfig::BornElastic(c) => {
            let rec = elastic_record(
                &c.potential,
                c.p,
                c.mass,
                &uniform(c.angles, PI),
                c.n_theta,
                &c.tolerance,
            )?;
            diag.metrics.insert("sigma_total_error".into(), rec.sigma_total.error);
            let csv = rec.to_csv();
            (Payload::CrossSection(rec), csv)
        }
        RunConfig::Influence(c) => {
            let path = c.path.build(c.time)?;
            let [xa, xb] = c.endpoints;
            let r = match c.functional {
                Functional::K1 => influence_k1(
                    &c.potentials,
                    &path,
                    xa,
                    xb,
                    &c.lattice,
                    &c.time,
                    c.mass,
                    c.leak_tolerance,
                )?,
                Functional::K2 => influence_k2(
                    &c.potentials,
                    &path,
                    xa,
                    xb,
                    &c.lattice,
                    &c.time,
                    c.mass,
                    c.leak_tolerance,
                )?,
            };
            diag.warnings.extend(r.warnings.iter().cloned());
            let csv = format!(
                "amplitude_re,amplitude_im,free_amplitude_re,free_amplitude_im,effective_phase_re,effective_phase_im\n{},{},{},{},{},{}\n",
                fmt(r.amplitude.re),
                fmt(r.amplitude.im),
                fmt(r.free_amplitude.re),
                fmt(r.free_amplitude.im),
                fmt(r.effective_phase.re),
                fmt(r.effective_phase.im)
            );
            (Payload::Influence(r), csv)
        }
        RunConfig::ChargeTransfer(c) => {
            let spec = c.channel.build()?;
            let rec = charge_transfer_record(&spec, &uniform(c.angles, c.theta_max), &c.quadrature)?;
            diag.metrics.insert("sigma_total_error".into(), rec.sigma_total.error);
            let csv = rec.to_csv();
            (Payload::CrossSection(rec), csv)
        }
        RunConfig::Oracle(c) => {
            let spec = c.channel.build()?;
            let mut rows = Vec::with_capacity(c.thetas.len());
            let mut csv = String::from("theta_rad,re,im,error,momentum_re,momentum_im\n");
            for (i, &theta) in c.thetas.iter().enumerate() {
                ScatteringAngles::new(theta, 0.0)?;
                let estimate = brute_force_oracle(&spec, theta, c.samples, c.seed.wrapping_add(i as u64))?;
                let main = capture_amplitude(&spec, theta, &c.quadrature)?.value;
                let gap = (main - estimate.value).norm();
                if gap > (0.02 * main.norm()).max(3.0 * estimate.error) {
                    diag.warnings.push(format!(
                        "theta {theta}: oracle and momentum route differ by {gap:.3e} (oracle error {:.3e})",
                        estimate.error
                    ));
                }
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt(theta),
                    fmt(estimate.value.re),
                    fmt(estimate.value.im),
                    fmt(estimate.error),
                    fmt(main.re),
                    fmt(main.im)
                ));
                rows.push(OracleRow {
                    theta,
                    estimate,
                    momentum_route: main,
                });
            }
            (Payload::Oracle(OracleExport { rows }), csv)
        }
    };
    Ok(Outcome {
        document: ResultDocument {
            schema_version: SCHEMA_VERSION.into(),
            generator: format!("pathscatter {}", env!("CARGO_PKG_VERSION")),
            config: config.clone(),
            payload,
            diagnostics: diag,
        },
        csv,
    })
}

/// Largest relative deviation of a point-kernel column from the closed-form
/// free propagator over the central half of the lattice, restricted to the
/// points the readout filter resolves with a margin of four Fresnel widths
/// `sqrt(m/Δt)` below its pass band edge.
fn free_deviation(mass: f64, l: &LatticeSpec64, grid: &TimeGrid64, a: usize, column: &[Complex64]) -> Result<f64> {
    let (xa, dt) = (l.x(a), grid.duration());
    let k_limit = 0.35 * SineBasis::new(l).k_max() - 4.0 * (mass / dt).sqrt();
    let quarter = l.points / 4;
    let mut worst: f64 = 0.0;
    for (i, k) in column.iter().enumerate().take(l.points - quarter).skip(quarter) {
        let x = l.x(i);
        if mass * (x - xa).abs() / dt >= k_limit {
            continue;
        }
        let exact = free_propagator(x, grid.t_b, xa, grid.t_a, mass, Dimension::D1)?;
        worst = worst.max((k - exact).norm() / exact.norm());
    }
    Ok(worst)
}
