//! First-Born (OBK-type) electron capture `B⁺ + A(1s) → B(1s) + A⁺`.
//!
//! With the electron at `r` from A and at `s` from B, both plane-wave
//! exponents are linear in `(r, s)`: `p_a·R − p_b·R'' = c·r − a·s`, where
//! `R''` is the exit-channel atom B relative to A⁺. One-centre interactions
//! then factor into hydrogenic transforms; the internuclear term is a 3-D
//! momentum integral. Everything here is `f64`.

use std::cell::RefCell;
use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::born::{check_theta, TotalCrossSection};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_kronrod21, integrate_with_breakpoints, Estimate, GaussLegendre, Tolerance};
use crate::units::{channel_energetics, reduced_masses, ChannelEnergetics, CollisionKinematics, UnitSystem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydrogenicState {
    pub z_eff: f64,
    /// Principal quantum number. Only `n = 1` is supported.
    pub n: u32,
    pub binding_energy: f64,
}

impl HydrogenicState {
    pub fn ground(z_eff: f64) -> Result<Self> {
        let s = Self {
            z_eff,
            n: 1,
            binding_energy: -0.5 * z_eff * z_eff,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z_eff > 0.0) || !self.z_eff.is_finite() {
            return Err(Error::domain(format!(
                "z_eff must be finite and positive, got {}",
                self.z_eff
            )));
        }
        if self.n != 1 {
            return Err(Error::domain(format!(
                "only n = 1 states are supported, got n = {}",
                self.n
            )));
        }
        if self.binding_energy != -0.5 * self.z_eff * self.z_eff {
            return Err(Error::domain(format!(
                "binding_energy must equal -z_eff^2/2 = {}, got {}",
                -0.5 * self.z_eff * self.z_eff,
                self.binding_energy
            )));
        }
        Ok(())
    }

    fn norm(&self) -> f64 {
        (self.z_eff.powi(3) / PI).sqrt()
    }

    /// `φ(r) = (Z³/π)^{1/2} e^{−Zr}`
    pub fn wavefunction(&self, r: f64) -> f64 {
        self.norm() * (-self.z_eff * r).exp()
    }

    /// `∫ e^{ik·r} φ(r) d³r = 8πZN/(Z² + k²)²`
    pub fn momentum_wavefunction(&self, k: f64) -> f64 {
        let z = self.z_eff;
        let d = z * z + k * k;
        8.0 * PI * z * self.norm() / (d * d)
    }

    /// `∫ e^{ik·r} φ(r)·(−charge/r) d³r = −4π·charge·N/(Z² + k²)`, the state
    /// times the attraction of a bare nucleus at its own centre.
    pub fn coulomb_transform(&self, charge: f64, k: f64) -> f64 {
        let z = self.z_eff;
        -4.0 * PI * charge * self.norm() / (z * z + k * k)
    }

    /// `∫|φ|² d³r` by adaptive quadrature.
    pub fn normalization(&self, tol: &Tolerance<f64>) -> Result<Estimate<f64>> {
        let z = self.z_eff;
        integrate_with_breakpoints(
            |r| 4.0 * PI * r * r * self.wavefunction(r).powi(2),
            &[0.0, 1.0 / z, 5.0 / z, 20.0 / z, 60.0 / z],
            tol,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interaction {
    /// Electron attraction to the nucleus it is not bound to: `−Z_B/|r−R|`
    /// in the prior form, `−Z_A/|r|` in the post form.
    ProtonElectron,
    /// `Z_A·Z_B/|R|`
    Internuclear,
    Sum,
}

impl Interaction {
    fn has_electron_term(self) -> bool {
        matches!(self, Self::ProtonElectron | Self::Sum)
    }

    fn has_internuclear_term(self) -> bool {
        matches!(self, Self::Internuclear | Self::Sum)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionForm {
    #[default]
    Prior,
    Post,
}

/// How the two plane-wave exponents are tied to the particle coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateMode {
    /// The same internuclear vector in both exponents.
    #[default]
    Literal,
    /// Entrance and exit channels use their own Jacobi vectors.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaptureChannelSpec {
    pub kin: CollisionKinematics<f64>,
    pub energetics: ChannelEnergetics<f64>,
    /// Bound to A before the collision.
    pub initial: HydrogenicState,
    /// Bound to B after the collision.
    pub final_state: HydrogenicState,
    pub interaction: Interaction,
    pub form: InteractionForm,
    pub mode: CoordinateMode,
    /// Bare nuclear charge of A.
    pub z_a: f64,
    /// Bare nuclear charge of B.
    pub z_b: f64,
    /// Overall multiplier of the interaction.
    pub coupling: f64,
    /// Exponent of `p_b/p_a` in the cross section, 1 or 2.
    pub flux_ratio_power: u8,
}

impl CaptureChannelSpec {
    /// Channel with bare charges equal to the effective charges, prior form,
    /// unit coupling and `(p_b/p_a)²`.
    pub fn new(
        kin: CollisionKinematics<f64>,
        e_a: f64,
        initial: HydrogenicState,
        final_state: HydrogenicState,
        interaction: Interaction,
        mode: CoordinateMode,
    ) -> Result<Self> {
        initial.validate()?;
        final_state.validate()?;
        let energetics = channel_energetics(e_a, initial.binding_energy, final_state.binding_energy, &kin)?;
        let spec = Self {
            kin,
            energetics,
            initial,
            final_state,
            interaction,
            form: InteractionForm::Prior,
            mode,
            z_a: initial.z_eff,
            z_b: final_state.z_eff,
            coupling: 1.0,
            flux_ratio_power: 2,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `p + H(1s) → H(1s) + p` at relative velocity `v`.
    pub fn proton_hydrogen(
        v: f64,
        interaction: Interaction,
        mode: CoordinateMode,
        units: &UnitSystem<f64>,
    ) -> Result<Self> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("velocity must be finite and positive, got {v}")));
        }
        let kin = reduced_masses(1.0, 1.0, units)?;
        let h = HydrogenicState::ground(1.0)?;
        Self::new(kin, 0.5 * kin.mu_a * v * v, h, h, interaction, mode)
    }

    pub fn with_form(mut self, form: InteractionForm) -> Self {
        self.form = form;
        self
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_flux_ratio_power(mut self, power: u8) -> Self {
        self.flux_ratio_power = power;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.initial.validate()?;
        self.final_state.validate()?;
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs());
        if !close(self.energetics.eps_a, self.initial.binding_energy) {
            return Err(Error::domain("energetics.eps_a must equal the initial binding energy"));
        }
        if !close(self.energetics.eps_b, self.final_state.binding_energy) {
            return Err(Error::domain("energetics.eps_b must equal the final binding energy"));
        }
        if !self.energetics.is_open() {
            return Err(Error::domain(format!(
                "exit channel is closed (E_b = {} < 0)",
                self.energetics.e_b
            )));
        }
        if !(self.energetics.p_a > 0.0) {
            return Err(Error::domain("incident momentum must be positive"));
        }
        for (name, z) in [("z_a", self.z_a), ("z_b", self.z_b)] {
            if !(z > 0.0) || !z.is_finite() {
                return Err(Error::domain(format!("{name} must be finite and positive, got {z}")));
            }
        }
        if !self.coupling.is_finite() {
            return Err(Error::domain("coupling must be finite"));
        }
        if !matches!(self.flux_ratio_power, 1 | 2) {
            return Err(Error::domain(format!(
                "flux_ratio_power must be 1 or 2, got {}",
                self.flux_ratio_power
            )));
        }
        Ok(())
    }

    /// Relative velocity `p_a/μ_a`.
    pub fn velocity(&self) -> f64 {
        self.energetics.p_a / self.kin.mu_a
    }

    /// `p_a` along z and `p_b` at polar angle `θ` in the xz-plane.
    pub fn channel_momenta(&self, theta: f64) -> (Vector3<f64>, Vector3<f64>) {
        let (pa, pb) = (self.energetics.p_a, self.energetics.p_b);
        (
            Vector3::new(0.0, 0.0, pa),
            Vector3::new(pb * theta.sin(), 0.0, pb * theta.cos()),
        )
    }

    /// `(a, c)` such that the plane-wave phase is `c·r − a·s`.
    pub fn transfer_vectors(&self, pa: &Vector3<f64>, pb: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
        match self.mode {
            CoordinateMode::Literal => {
                let a = pa - pb;
                (a, a)
            }
            CoordinateMode::Jacobi => {
                let m = self.kin.electron_mass;
                let (ma, mb) = (self.kin.target_mass(), self.kin.projectile_mass());
                let a = pa - pb * (mb / (mb + m));
                let b = -(pa * (m / (ma + m)) + pb * (m / (mb + m)));
                (a, a + b)
            }
        }
    }
}

/// Quadrature settings for the capture amplitude and cross section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaptureQuadrature {
    /// Tolerance of the nested internuclear momentum integrals.
    pub tol: Tolerance<f64>,
    /// Largest screening constant λ₀ of the internuclear extrapolation over
    /// λ₀, λ₀/2, λ₀/4.
    pub screening: f64,
    /// Relative error the extrapolated internuclear term must reach.
    pub extrapolation_rel: f64,
    /// Smallest nonzero θ breakpoint of the logarithmic forward grid.
    pub theta_min: f64,
    /// Logarithmic θ breakpoints on `[theta_min, 0.1]`.
    pub log_nodes: usize,
    /// Relative tolerance of the angular integral.
    pub total_rel: f64,
}

impl Default for CaptureQuadrature {
    fn default() -> Self {
        Self {
            tol: Tolerance::new(1e-10, 1e-300),
            screening: 0.002,
            extrapolation_rel: 1e-4,
            theta_min: 1e-7,
            log_nodes: 64,
            total_rel: 1e-8,
        }
    }
}

impl CaptureQuadrature {
    pub fn validate(&self) -> Result<()> {
        if !(self.screening > 0.0) || !self.screening.is_finite() {
            return Err(Error::domain(format!(
                "screening must be finite and positive, got {}",
                self.screening
            )));
        }
        if !(self.extrapolation_rel > 0.0) || !(self.total_rel > 0.0) || !(self.tol.rel > 0.0) {
            return Err(Error::domain("tolerances must be positive"));
        }
        if !(self.theta_min > 0.0 && self.theta_min < 0.1) {
            return Err(Error::domain(format!(
                "theta_min must lie in (0, 0.1), got {}",
                self.theta_min
            )));
        }
        if self.log_nodes < 64 {
            return Err(Error::domain(format!(
                "log_nodes must be >= 64, got {}",
                self.log_nodes
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaptureAmplitude {
    pub value: Complex64,
    /// Absolute error estimate (quadrature plus screening extrapolation).
    pub error: f64,
}

/// `A(θ) = ∫dR dr e^{−ip_b·R''} φ_b*(s) V φ_a(r) e^{ip_a·R}` with `p_b` at
/// angle `θ` to `p_a`.
pub fn capture_amplitude(spec: &CaptureChannelSpec, theta: f64, quad: &CaptureQuadrature) -> Result<CaptureAmplitude> {
    spec.validate()?;
    check_theta(theta)?;
    let (pa, pb) = spec.channel_momenta(theta);
    capture_amplitude_vectors(spec, &pa, &pb, quad)
}

/// As [`capture_amplitude`] for arbitrarily oriented channel momenta, whose
/// magnitudes must match the channel energetics.
pub fn capture_amplitude_vectors(
    spec: &CaptureChannelSpec,
    pa: &Vector3<f64>,
    pb: &Vector3<f64>,
    quad: &CaptureQuadrature,
) -> Result<CaptureAmplitude> {
    spec.validate()?;
    quad.validate()?;
    for (v, p) in [(pa, spec.energetics.p_a), (pb, spec.energetics.p_b)] {
        if (v.norm() - p).abs() > 1e-10 * p {
            return Err(Error::domain(format!(
                "momentum vector length {} does not match the channel momentum {p}",
                v.norm()
            )));
        }
    }
    let (a, c) = spec.transfer_vectors(pa, pb);
    let mut value = 0.0;
    let mut error = 0.0;
    if spec.interaction.has_electron_term() {
        value += match spec.form {
            InteractionForm::Prior => {
                spec.initial.momentum_wavefunction(c.norm()) * spec.final_state.coulomb_transform(spec.z_b, a.norm())
            }
            InteractionForm::Post => {
                spec.initial.coulomb_transform(spec.z_a, c.norm()) * spec.final_state.momentum_wavefunction(a.norm())
            }
        };
    }
    if spec.interaction.has_internuclear_term() {
        let e = internuclear_extrapolated(spec, &a, &c, quad)?;
        value += e.value;
        error += e.error;
    }
    Ok(CaptureAmplitude {
        value: Complex64::new(spec.coupling * value, 0.0),
        error: spec.coupling.abs() * error,
    })
}

/// Richardson extrapolation of the screened internuclear term to λ → 0,
/// assuming `A(λ) = A₀ + c₁λ + c₂λ² + O(λ³)`.
fn internuclear_extrapolated(
    spec: &CaptureChannelSpec,
    a: &Vector3<f64>,
    c: &Vector3<f64>,
    quad: &CaptureQuadrature,
) -> Result<Estimate<f64>> {
    let l0 = quad.screening;
    let e1 = internuclear_screened(spec, a, c, l0, &quad.tol)?;
    let e2 = internuclear_screened(spec, a, c, 0.5 * l0, &quad.tol)?;
    let e4 = internuclear_screened(spec, a, c, 0.25 * l0, &quad.tol)?;
    let r1_coarse = 2.0 * e2.value - e1.value;
    let r1_fine = 2.0 * e4.value - e2.value;
    let value = (4.0 * r1_fine - r1_coarse) / 3.0;
    let error = (value - r1_fine).abs() + (8.0 * e4.error + 6.0 * e2.error + e1.error) / 3.0;
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::numerical("internuclear term is not finite", f64::INFINITY));
    }
    if error > quad.extrapolation_rel * value.abs() + quad.tol.abs {
        return Err(Error::numerical(
            format!("screening extrapolation did not converge (value {value:e})"),
            error,
        ));
    }
    Ok(Estimate { value, error })
}

/// `Z_A Z_B (2π)^{-3} ∫d³u 4π/(u²+λ²) φ̃_a(|c−u|) φ̃_b(|u−a|)` in spherical
/// coordinates about `â`; the azimuthal integral is done in closed form.
fn internuclear_screened(
    spec: &CaptureChannelSpec,
    a: &Vector3<f64>,
    c: &Vector3<f64>,
    lambda: f64,
    tol: &Tolerance<f64>,
) -> Result<Estimate<f64>> {
    let axis = if a.norm() > 0.0 {
        a.normalize()
    } else if c.norm() > 0.0 {
        c.normalize()
    } else {
        Vector3::z()
    };
    let an = a.dot(&axis);
    let c_par = c.dot(&axis);
    let c_perp = (c - axis * c_par).norm();
    let (za, zb) = (spec.initial.z_eff, spec.final_state.z_eff);
    let scale_a = 8.0 * PI * za * spec.initial.norm();
    let scale_b = 8.0 * PI * zb * spec.final_state.norm();

    // u along (sinα, 0, cosα) at azimuth 0, x = cosα
    let kernel = |u: f64, x: f64| -> f64 {
        let sx = (1.0 - x * x).max(0.0).sqrt();
        let db = zb * zb + (u * sx).powi(2) + (u * x - an).powi(2);
        let minus = za * za + (u * sx - c_perp).powi(2) + (u * x - c_par).powi(2);
        let plus = za * za + (u * sx + c_perp).powi(2) + (u * x - c_par).powi(2);
        let big_a = 0.5 * (minus + plus);
        // ∫₀^{2π} dβ (A − B cos β)^{-2} = 2πA/(A² − B²)^{3/2}
        let azimuthal = 2.0 * PI * big_a / (minus * plus).powf(1.5);
        scale_b / (db * db) * scale_a * azimuthal
    };

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let mut x_points = vec![-1.0, 1.0];
    if c.norm() > 0.0 {
        let xc = c_par / c.norm();
        if xc > -1.0 && xc < 1.0 {
            x_points.insert(1, xc);
        }
    }
    let inner = |u: f64| -> f64 {
        match integrate_with_breakpoints(|x| kernel(u, x), &x_points, tol) {
            Ok(e) => e.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let cn = c.norm();
    let u_max = an.max(cn) + 200.0 * za.max(zb);
    let mut u_points = vec![0.0, lambda, an, cn, 0.5 * (an + cn), u_max];
    u_points.retain(|&u| u >= 0.0 && u <= u_max);
    u_points.sort_by(f64::total_cmp);
    u_points.dedup();
    let outer = integrate_with_breakpoints(|u| u * u / (u * u + lambda * lambda) * inner(u), &u_points, tol);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    let pref = spec.z_a * spec.z_b * 4.0 * PI / (2.0 * PI).powi(3);
    Ok(Estimate {
        value: pref * outer.value,
        error: pref.abs() * outer.error,
    })
}

/// `dσ/dΩ = (μ_b/2π)²·(p_b/p_a)^k·|A(θ)|²` with `k = flux_ratio_power`.
pub fn ct_differential_cross_section(spec: &CaptureChannelSpec, theta: f64, quad: &CaptureQuadrature) -> Result<f64> {
    let amp = capture_amplitude(spec, theta, quad)?;
    Ok(cross_section_factor(spec) * amp.value.norm_sqr())
}

fn cross_section_factor(spec: &CaptureChannelSpec) -> f64 {
    let e = &spec.energetics;
    (spec.kin.mu_b / (2.0 * PI)).powi(2) * (e.p_b / e.p_a).powi(spec.flux_ratio_power as i32)
}

/// θ breakpoints: 0, `log_nodes` logarithmically spaced points on
/// `[theta_min, 0.1]`, and π.
pub fn forward_theta_grid(quad: &CaptureQuadrature) -> Vec<f64> {
    let n = quad.log_nodes;
    let (lo, hi) = (quad.theta_min.ln(), 0.1f64.ln());
    let mut pts = vec![0.0];
    pts.extend((0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()));
    pts.push(PI);
    pts
}

/// `σ = 2π ∫₀^π dσ/dΩ sinθ dθ`, adaptively per panel of the forward grid.
/// `nodes` reports the number of θ breakpoints.
pub fn ct_total_cross_section(spec: &CaptureChannelSpec, quad: &CaptureQuadrature) -> Result<TotalCrossSection<f64>> {
    spec.validate()?;
    quad.validate()?;
    let factor = cross_section_factor(spec);
    let pts = forward_theta_grid(quad);
    let panel = |lo: f64, hi: f64, abs: f64| -> Result<Estimate<f64>> {
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let f = |theta: f64| match capture_amplitude(spec, theta, quad) {
            Ok(a) => 2.0 * PI * theta.sin() * factor * a.value.norm_sqr(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let out = if abs.is_nan() {
            let (v, e) = gauss_kronrod21(&f, lo, hi);
            Ok(Estimate { value: v, error: e })
        } else {
            let tol = Tolerance {
                rel: quad.total_rel,
                abs,
                max_subdivisions: quad.tol.max_subdivisions,
            };
            integrate_with_breakpoints(f, &[lo, hi], &tol)
        };
        match failure.into_inner() {
            Some(e) => Err(e),
            None => out,
        }
    };
    // one Kronrod pass sets the absolute floor shared by all panels
    let coarse = pts
        .par_windows(2)
        .map(|w| panel(w[0], w[1], f64::NAN))
        .collect::<Result<Vec<_>>>()?;
    let scale: f64 = coarse.iter().map(|e| e.value.abs()).sum();
    let abs = quad.total_rel * scale / (pts.len() - 1) as f64;
    let parts = pts
        .par_windows(2)
        .map(|w| panel(w[0], w[1], abs))
        .collect::<Result<Vec<_>>>()?;
    let total = parts
        .iter()
        .fold(Estimate { value: 0.0, error: 0.0 }, |acc, e| acc + *e);
    if !total.value.is_finite() {
        return Err(Error::numerical("total cross section is not finite", f64::INFINITY));
    }
    Ok(TotalCrossSection {
        value: total.value,
        error: total.error,
        nodes: pts.len(),
    })
}

/// Radial importance density on ℝ³ with an exponential tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ImportanceDensity {
    /// `ρ(x) = z³/(8π)·e^{−z|x|}`
    Exponential { z: f64 },
    /// `ρ(x) = z²/(4π)·e^{−z|x|}/|x|`
    CoulombExponential { z: f64 },
}

impl ImportanceDensity {
    fn z(&self) -> f64 {
        match *self {
            Self::Exponential { z } | Self::CoulombExponential { z } => z,
        }
    }

    /// Gamma shape of the radial distribution.
    fn shape(&self) -> f64 {
        match self {
            Self::Exponential { .. } => 3.0,
            Self::CoulombExponential { .. } => 2.0,
        }
    }

    pub fn density(&self, x: &Vector3<f64>) -> f64 {
        let r = x.norm();
        match *self {
            Self::Exponential { z } => z.powi(3) / (8.0 * PI) * (-z * r).exp(),
            Self::CoulombExponential { z } => z * z / (4.0 * PI) * (-z * r).exp() / r,
        }
    }

    fn radial(&self) -> Result<Gamma<f64>> {
        let z = self.z();
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::domain(format!(
                "importance density decay must be positive, got {z}"
            )));
        }
        Gamma::new(self.shape(), 1.0 / z).map_err(|e| Error::domain(e.to_string()))
    }
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub value: Complex64,
    pub error: f64,
    pub samples: usize,
}

/// Samples per independently seeded block.
pub const ORACLE_BLOCK: usize = 8192;

/// `∫d³x d³y f(x, y)` by importance sampling `x ~ first`, `y ~ second`.
///
/// Block `k` draws from ChaCha8 with the given seed on stream `k`, and block
/// sums are reduced in block order, so the result does not depend on the
/// number of threads.
pub fn monte_carlo_6d<F>(
    integrand: F,
    first: ImportanceDensity,
    second: ImportanceDensity,
    samples: usize,
    seed: u64,
) -> Result<OracleEstimate>
where
    F: Fn(&Vector3<f64>, &Vector3<f64>) -> Complex64 + Sync,
{
    if samples < 2 {
        return Err(Error::domain(format!("need at least 2 samples, got {samples}")));
    }
    let (g1, g2) = (first.radial()?, second.radial()?);
    let draw = |g: &Gamma<f64>, rng: &mut ChaCha8Rng| -> Vector3<f64> {
        let r = g.sample(rng);
        let d: [f64; 3] = UnitSphere.sample(rng);
        Vector3::from(d) * r
    };
    let blocks = samples.div_ceil(ORACLE_BLOCK);
    let partial: Vec<(Complex64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let n = ORACLE_BLOCK.min(samples - k * ORACLE_BLOCK);
            let mut sum = Complex64::new(0.0, 0.0);
            let mut sq = 0.0;
            for _ in 0..n {
                let x = draw(&g1, &mut rng);
                let y = draw(&g2, &mut rng);
                let w = integrand(&x, &y) / (first.density(&x) * second.density(&y));
                sum += w;
                sq += w.norm_sqr();
            }
            (sum, sq)
        })
        .collect();
    let (sum, sq) = partial
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(s, q), (a, b)| (s + a, q + b));
    let n = samples as f64;
    let mean = sum / n;
    let var = (sq / n - mean.norm_sqr()).max(0.0) * n / (n - 1.0);
    let error = (var / n).sqrt();
    if !mean.re.is_finite() || !mean.im.is_finite() || !error.is_finite() {
        return Err(Error::numerical("Monte-Carlo estimate is not finite", f64::INFINITY));
    }
    Ok(OracleEstimate {
        value: mean,
        error,
        samples,
    })
}

/// Smallest sample count accepted by [`brute_force_oracle`].
pub const ORACLE_MIN_SAMPLES: usize = 100_000;

/// Direct Monte-Carlo evaluation of the 6-D capture integral in particle
/// coordinates, importance-sampled on the hydrogenic decay (and on the
/// `1/distance` singularity of the electron–nucleus term).
pub fn brute_force_oracle(spec: &CaptureChannelSpec, theta: f64, samples: usize, seed: u64) -> Result<OracleEstimate> {
    spec.validate()?;
    check_theta(theta)?;
    if samples < ORACLE_MIN_SAMPLES {
        return Err(Error::domain(format!(
            "oracle needs at least {ORACLE_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let (pa, pb) = spec.channel_momenta(theta);
    let m = spec.kin.electron_mass;
    let (ma, mb) = (spec.kin.target_mass(), spec.kin.projectile_mass());
    let (za, zb) = (spec.z_a, spec.z_b);
    let electron = spec.interaction.has_electron_term();
    let internuclear = spec.interaction.has_internuclear_term();
    let prior = spec.form == InteractionForm::Prior;
    let (ia, fb) = (spec.initial, spec.final_state);

    // r: electron from A, s: electron from B
    let integrand = |r: &Vector3<f64>, s: &Vector3<f64>| -> Complex64 {
        let r_ab = r - s;
        let (r_in, r_out) = match spec.mode {
            CoordinateMode::Literal => (r_ab, r_ab),
            CoordinateMode::Jacobi => (r_ab - r * (m / (ma + m)), (r_ab * mb + r * m) / (mb + m)),
        };
        let phase = pa.dot(&r_in) - pb.dot(&r_out);
        let mut v = 0.0;
        if electron {
            v += if prior { -zb / s.norm() } else { -za / r.norm() };
        }
        if internuclear {
            v += za * zb / r_ab.norm();
        }
        let amp = spec.coupling * ia.wavefunction(r.norm()) * fb.wavefunction(s.norm()) * v;
        Complex64::from_polar(1.0, phase) * amp
    };
    let first = if electron && !prior {
        ImportanceDensity::CoulombExponential { z: ia.z_eff }
    } else {
        ImportanceDensity::Exponential { z: ia.z_eff }
    };
    let second = if electron && prior {
        ImportanceDensity::CoulombExponential { z: fb.z_eff }
    } else {
        ImportanceDensity::Exponential { z: fb.z_eff }
    };
    monte_carlo_6d(integrand, first, second, samples, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCrossSection {
    pub value: f64,
    pub error: f64,
    pub samples: usize,
}

/// `σ` restricted to `θ ≤ theta_max` from oracle amplitudes at `nodes`
/// Gauss–Legendre angles. Each `|A|²` is the product of two independent
/// half-sample estimates, which removes the variance bias.
pub fn brute_force_total_cross_section(
    spec: &CaptureChannelSpec,
    theta_max: f64,
    nodes: usize,
    samples_per_node: usize,
    seed: u64,
) -> Result<OracleCrossSection> {
    spec.validate()?;
    if !(theta_max > 0.0 && theta_max <= PI) {
        return Err(Error::domain(format!("theta_max must lie in (0, pi], got {theta_max}")));
    }
    if nodes == 0 {
        return Err(Error::domain("nodes must be positive"));
    }
    let half = samples_per_node / 2;
    let factor = cross_section_factor(spec);
    let gl = GaussLegendre::new(nodes);
    let mut value = 0.0;
    let mut var = 0.0;
    for (i, (theta, w)) in gl.mapped(0.0, theta_max).enumerate() {
        let s1 = seed.wrapping_add(2 * i as u64);
        let a1 = brute_force_oracle(spec, theta, half, s1)?;
        let a2 = brute_force_oracle(spec, theta, half, s1.wrapping_add(1))?;
        let g = 2.0 * PI * theta.sin() * factor * w;
        value += g * (a1.value * a2.value.conj()).re;
        var += g * g * (a2.value.norm_sqr() * a1.error.powi(2) + a1.value.norm_sqr() * a2.error.powi(2));
    }
    Ok(OracleCrossSection {
        value,
        error: var.sqrt(),
        samples: 2 * half * nodes,
    })
}
