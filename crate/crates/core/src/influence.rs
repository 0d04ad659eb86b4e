//! Influence functionals of the two-body problem on one-dimensional lattices.
//!
//! With the electron held on a fixed path `r(τ)`, the ion sums over its own
//! paths in the slice-dependent potential `V_B(r(τ_j) − R) + V_AB(R)`
//! ([`influence_k1`]); the mirror image fixes the ion path and sums over
//! electron paths in `V_A(r) + V_B(r − R(τ_j))` ([`influence_k2`]).
//!
//! Only the integrated phase is exposed: `amplitude = free · exp(−iΦ)`, so
//! `Φ` plays the role of `∫U dτ`. A pointwise effective potential is not
//! defined by this construction.
//!
//! Amplitudes are read out between band-limited point sources (see
//! [`PropagatorMatrix::point_kernel`](crate::lattice::PropagatorMatrix::point_kernel)),
//! and the free reference is computed on the same lattice, so `Φ` carries
//! no discretization offset.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{phase_factors, smooth_window, FastSine, LatticeSpec, TimeGrid, FILTER_BAND};
use crate::potentials::{LatticePotential, LinePotential, PairPotentials};
use crate::scalar::Real;

/// Companion trajectory sampled at the `N + 1` slice endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPath<T> {
    pub grid: TimeGrid<T>,
    pub samples: Vec<T>,
}

impl<T: Real> FixedPath<T> {
    pub fn new(grid: TimeGrid<T>, samples: Vec<T>) -> Result<Self> {
        grid.validate()?;
        if samples.len() != grid.slices + 1 {
            return Err(Error::domain(format!(
                "fixed path needs {} samples, got {}",
                grid.slices + 1,
                samples.len()
            )));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("fixed path samples must be finite"));
        }
        Ok(Self { grid, samples })
    }

    pub fn stationary(grid: TimeGrid<T>, x: T) -> Result<Self> {
        Self::new(grid, vec![x; grid.slices + 1])
    }

    pub fn from_fn(grid: TimeGrid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let samples = (0..=grid.slices).map(|j| f(grid.time(j))).collect();
        Self::new(grid, samples)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceResult<T> {
    pub amplitude: Complex<T>,
    /// Same readout with every potential switched off.
    pub free_amplitude: Complex<T>,
    /// `Φ` with `amplitude = free_amplitude · exp(−iΦ)`; the real part is
    /// unwrapped continuously across slices.
    pub effective_phase: Complex<T>,
    /// `(x_b, x_a)` snapped to the nearest lattice points.
    pub endpoints: (T, T),
    pub grid: TimeGrid<T>,
    pub warnings: Vec<String>,
}

/// Slice-by-slice propagation of a band-limited point source with the
/// kinetic factor applied in the sine basis.
struct SourcePropagator<T: Real> {
    lattice: LatticeSpec<T>,
    sine: FastSine<T>,
    kinetic: Vec<Complex<T>>,
    filter: Vec<Complex<T>>,
}

impl<T: Real> SourcePropagator<T> {
    fn new(lattice: &LatticeSpec<T>, epsilon: T, mass: T) -> Self {
        let p = lattice.points;
        let box_len = lattice.dx() * T::from_usize_lossy(p + 1);
        let ks: Vec<T> = (1..=p).map(|n| T::from_usize_lossy(n) * T::PI() / box_len).collect();
        let k_max = ks[p - 1];
        let two_m = T::lit(2.0) * mass;
        Self {
            lattice: *lattice,
            sine: FastSine::new(p),
            kinetic: ks
                .iter()
                .map(|&k| Complex::from_polar(T::one(), -epsilon * k * k / two_m))
                .collect(),
            filter: ks
                .iter()
                .map(|&k| {
                    let (lo, hi) = FILTER_BAND;
                    Complex::new(smooth_window(k, T::lit(lo) * k_max, T::lit(hi) * k_max), T::zero())
                })
                .collect(),
        }
    }

    fn in_basis(&self, v: &mut [Complex<T>], diag: &[Complex<T>]) {
        self.sine.apply(v);
        for (a, d) in v.iter_mut().zip(diag) {
            *a = *a * d;
        }
        self.sine.apply(v);
    }

    fn filtered(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = v.to_vec();
        self.in_basis(&mut out, &self.filter);
        out
    }

    /// `F e_a / dx`
    fn source(&self, index: usize) -> Vec<Complex<T>> {
        let mut v = vec![Complex::new(T::zero(), T::zero()); self.lattice.points];
        v[index] = Complex::new(self.lattice.dx().recip(), T::zero());
        self.filtered(&v)
    }

    /// `(F v)_b`
    fn read(&self, v: &[Complex<T>], b: usize) -> Complex<T> {
        self.filtered(v)[b]
    }
}

fn index_of<T: Real>(lattice: &LatticeSpec<T>, x: T, name: &str) -> Result<usize> {
    lattice
        .nearest_index(x)
        .ok_or_else(|| Error::domain(format!("{name} = {x} lies outside the lattice")))
}

fn wrap_angle<T: Real>(a: T) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    a - two_pi * (a / two_pi).round()
}

/// Path sum over one particle's trajectories in a potential that changes
/// from slice endpoint to slice endpoint.
fn slice_dependent_amplitude<T: Real, P: LinePotential<T>>(
    pot_at: impl Fn(usize) -> P,
    x_a: T,
    x_b: T,
    lattice: &LatticeSpec<T>,
    grid: &TimeGrid<T>,
    mass: T,
    leak_tolerance: f64,
) -> Result<InfluenceResult<T>> {
    lattice.validate()?;
    grid.validate()?;
    if !(mass > T::zero()) {
        return Err(Error::domain("mass must be > 0"));
    }
    let ia = index_of(lattice, x_a, "start point")?;
    let ib = index_of(lattice, x_b, "end point")?;
    let eps = grid.epsilon();
    let prop = SourcePropagator::new(lattice, eps, mass);
    let half = T::lit(0.5);
    let free = LatticePotential::Free;
    let free_half = phase_factors(lattice, eps, &free, half)?;

    let mut psi = prop.source(ia);
    let mut psi0 = psi.clone();
    let mut prev = phase_factors(lattice, eps, &pot_at(0), half)?;
    let (mut arg, mut last_arg) = (T::zero(), T::zero());
    let (mut amp, mut amp0) = (Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()));
    for j in 1..=grid.slices {
        let next = phase_factors(lattice, eps, &pot_at(j), half)?;
        for (v, d) in psi.iter_mut().zip(&prev) {
            *v = *v * d;
        }
        prop.in_basis(&mut psi, &prop.kinetic);
        for (v, d) in psi.iter_mut().zip(&next) {
            *v = *v * d;
        }
        for (v, d) in psi0.iter_mut().zip(&free_half) {
            *v = *v * d;
        }
        prop.in_basis(&mut psi0, &prop.kinetic);
        for (v, d) in psi0.iter_mut().zip(&free_half) {
            *v = *v * d;
        }
        prev = next;

        amp = prop.read(&psi, ib);
        amp0 = prop.read(&psi0, ib);
        let ratio = amp / amp0;
        let a = ratio.arg();
        arg = arg + wrap_angle(a - last_arg);
        last_arg = a;
    }
    let ratio = amp / amp0;
    if !(ratio.norm() > T::zero()) || !ratio.norm().is_finite() {
        return Err(Error::numerical("influence amplitude vanished or overflowed", f64::NAN));
    }
    let mut warnings = Vec::new();
    let edge = edge_ratio(lattice, &psi);
    if edge.as_f64() > leak_tolerance {
        warnings.push(format!(
            "boundary leak: edge amplitude ratio {:.3e} exceeds tolerance {:.3e}",
            edge.as_f64(),
            leak_tolerance
        ));
    }
    Ok(InfluenceResult {
        amplitude: amp,
        free_amplitude: amp0,
        effective_phase: Complex::new(-arg, ratio.norm().ln()),
        endpoints: (lattice.x(ib), lattice.x(ia)),
        grid: *grid,
        warnings,
    })
}

fn edge_ratio<T: Real>(lattice: &LatticeSpec<T>, v: &[Complex<T>]) -> T {
    let peak = v.iter().fold(T::zero(), |m, x| m.max(x.norm()));
    let e = lattice.edge_cells();
    let edge = v[..e]
        .iter()
        .chain(&v[v.len() - e..])
        .fold(T::zero(), |m, x| m.max(x.norm()));
    if peak > T::zero() {
        edge / peak
    } else {
        T::zero()
    }
}

struct SumPotential<'a, T> {
    parts: Vec<(&'a LatticePotential<T>, T)>,
}

impl<T: Real> LinePotential<T> for SumPotential<'_, T> {
    fn value(&self, x: T) -> T {
        self.parts
            .iter()
            .fold(T::zero(), |acc, (p, shift)| acc + p.value(x - *shift))
    }
}

fn check_path<T: Real>(path: &FixedPath<T>, grid: &TimeGrid<T>) -> Result<()> {
    if path.grid != *grid {
        return Err(Error::domain("fixed path lives on a different time grid"));
    }
    if path.samples.len() != grid.slices + 1 {
        return Err(Error::domain("fixed path has the wrong number of samples"));
    }
    Ok(())
}

/// Ion amplitude `𝒦₁(R_b, R_a)` for a fixed electron path, per-slice
/// potential `V_B(r(τ_j) − R) + V_AB(R)`, ion mass `M`.
#[allow(clippy::too_many_arguments)]
pub fn influence_k1<T: Real>(
    pots: &PairPotentials<T>,
    electron_path: &FixedPath<T>,
    r_a: T,
    r_b: T,
    lattice: &LatticeSpec<T>,
    grid: &TimeGrid<T>,
    ion_mass: T,
    leak_tolerance: f64,
) -> Result<InfluenceResult<T>> {
    pots.validate()?;
    check_path(electron_path, grid)?;
    // V_B(r − R) = v_b evaluated at R − r by central symmetry
    slice_dependent_amplitude(
        |j| SumPotential {
            parts: vec![(&pots.v_b, electron_path.samples[j]), (&pots.v_ab, T::zero())],
        },
        r_a,
        r_b,
        lattice,
        grid,
        ion_mass,
        leak_tolerance,
    )
}

/// Electron amplitude `𝒦₂(r_b, r_a)` for a fixed ion path, per-slice
/// potential `V_A(r) + V_B(r − R(τ_j))`, electron mass `m`.
#[allow(clippy::too_many_arguments)]
pub fn influence_k2<T: Real>(
    pots: &PairPotentials<T>,
    ion_path: &FixedPath<T>,
    r_a: T,
    r_b: T,
    lattice: &LatticeSpec<T>,
    grid: &TimeGrid<T>,
    electron_mass: T,
    leak_tolerance: f64,
) -> Result<InfluenceResult<T>> {
    pots.validate()?;
    check_path(ion_path, grid)?;
    slice_dependent_amplitude(
        |j| SumPotential {
            parts: vec![(&pots.v_a, T::zero()), (&pots.v_b, ion_path.samples[j])],
        },
        r_a,
        r_b,
        lattice,
        grid,
        electron_mass,
        leak_tolerance,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullAmplitude<T> {
    pub amplitude: Complex<T>,
    /// `(r_b, r_a)`
    pub electron_endpoints: (T, T),
    /// `(R_b, R_a)`
    pub ion_endpoints: (T, T),
    pub grid: TimeGrid<T>,
}

/// Default bound on `n_e · n_i` for the product lattice (256 × 256).
pub const PRODUCT_LATTICE_CAP: usize = 256 * 256;

/// Two-particle amplitude `K(r_b, R_b; r_a, R_a)` by direct contraction on
/// the product lattice, potential `V_A(r) + V_B(r − R) + V_AB(R)`.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct_full_amplitude<T: Real>(
    pots: &PairPotentials<T>,
    electron: (T, T),
    ion: (T, T),
    lattice_e: &LatticeSpec<T>,
    lattice_i: &LatticeSpec<T>,
    grid: &TimeGrid<T>,
    electron_mass: T,
    ion_mass: T,
    cap: usize,
) -> Result<FullAmplitude<T>> {
    pots.validate()?;
    lattice_e.validate()?;
    lattice_i.validate()?;
    grid.validate()?;
    let (ne, ni) = (lattice_e.points, lattice_i.points);
    if ne.saturating_mul(ni) > cap {
        return Err(Error::domain(format!(
            "product lattice {ne} × {ni} exceeds the cap of {cap} points"
        )));
    }
    if !(electron_mass > T::zero()) || !(ion_mass > T::zero()) {
        return Err(Error::domain("masses must be > 0"));
    }
    let (r_a, r_b) = electron;
    let (big_ra, big_rb) = ion;
    let (ea, eb) = (index_of(lattice_e, r_a, "r_a")?, index_of(lattice_e, r_b, "r_b")?);
    let (ia, ib) = (index_of(lattice_i, big_ra, "R_a")?, index_of(lattice_i, big_rb, "R_b")?);
    let eps = grid.epsilon();
    let pe = SourcePropagator::new(lattice_e, eps, electron_mass);
    let pi = SourcePropagator::new(lattice_i, eps, ion_mass);

    // Ψ[e][i], row-major over the electron index
    let se = pe.source(ea);
    let si = pi.source(ia);
    let mut psi: Vec<Complex<T>> = se.iter().flat_map(|a| si.iter().map(move |b| a * b)).collect();

    let xe = lattice_e.positions();
    let xi = lattice_i.positions();
    let half_eps = T::lit(0.5) * eps;
    let mut diag = Vec::with_capacity(ne * ni);
    for (e, &r) in xe.iter().enumerate() {
        let va = pots.v_a.value(r);
        let we = lattice_e.absorber(e);
        for (i, &big_r) in xi.iter().enumerate() {
            let v = va + pots.v_b.value(r - big_r) + pots.v_ab.value(big_r);
            if !v.is_finite() {
                return Err(Error::domain(format!(
                    "potential is not finite at r = {r}, R = {big_r}"
                )));
            }
            let w = we + lattice_i.absorber(i);
            diag.push(Complex::from_polar((-half_eps * w).exp(), -half_eps * v));
        }
    }

    let mut column = vec![Complex::new(T::zero(), T::zero()); ne];
    for _ in 0..grid.slices {
        for (v, d) in psi.iter_mut().zip(&diag) {
            *v = *v * d;
        }
        for row in psi.chunks_mut(ni) {
            pi.in_basis(row, &pi.kinetic);
        }
        for i in 0..ni {
            for e in 0..ne {
                column[e] = psi[e * ni + i];
            }
            pe.in_basis(&mut column, &pe.kinetic);
            for e in 0..ne {
                psi[e * ni + i] = column[e];
            }
        }
        for (v, d) in psi.iter_mut().zip(&diag) {
            *v = *v * d;
        }
    }

    // readout (F_e Ψ F_iᵀ)[e_b][i_b]
    let mut at_ib = vec![Complex::new(T::zero(), T::zero()); ne];
    for (e, row) in psi.chunks(ni).enumerate() {
        at_ib[e] = pi.read(row, ib);
    }
    Ok(FullAmplitude {
        amplitude: pe.read(&at_ib, eb),
        electron_endpoints: (lattice_e.x(eb), lattice_e.x(ea)),
        ion_endpoints: (lattice_i.x(ib), lattice_i.x(ia)),
        grid: *grid,
    })
}

/// One-particle amplitude in a static potential with the same point-source
/// readout as the influence functionals.
pub fn point_amplitude<T: Real>(
    pot: &LatticePotential<T>,
    x_a: T,
    x_b: T,
    lattice: &LatticeSpec<T>,
    grid: &TimeGrid<T>,
    mass: T,
) -> Result<Complex<T>> {
    let r = slice_dependent_amplitude(|_| *pot, x_a, x_b, lattice, grid, mass, f64::INFINITY)?;
    Ok(r.amplitude)
}
