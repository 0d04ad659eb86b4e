//! Time-sliced path integrals on a spatial lattice.
//!
//! Each slice contributes a transfer matrix `G = e^{−iεU/2} T_ε e^{−iεU/2}`
//! (for the default trapezoidal sampling), and the propagator over `N` slices
//! is the ordered product. Transfer-matrix entries carry the `dx` measure of
//! the intermediate-point integrals; pointwise kernels are `G/dx`.

mod field;
mod grid;
mod kernel;
mod matrix;

pub use field::ComplexField1D;
pub use grid::{Boundary, Geometry, LatticeSpec, TimeGrid};
pub use kernel::{
    free_propagator, kinetic_factor, phase_factors, radial_free_kernel, smooth_window, Dimension, FastSine,
    KineticScheme, PotentialSampling, PropagatorOptions, SineBasis, SliceBuilder, FILTER_BAND,
};
pub use matrix::CMatrix;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::potentials::{LatticePotential, LinePotential};
use crate::scalar::Real;

/// Lattice propagator `K(x_i, t_b; x_j, t_a)` stored as its transfer matrix.
#[derive(Debug, Clone)]
pub struct PropagatorMatrix<T> {
    pub lattice: LatticeSpec<T>,
    pub grid: TimeGrid<T>,
    pub mass: T,
    pub options: PropagatorOptions,
    pub transfer: CMatrix<T>,
    pub warnings: Vec<String>,
}

impl<T: Real> PropagatorMatrix<T> {
    /// Raw lattice kernel `G_ij / dx`.
    pub fn kernel(&self, i: usize, j: usize) -> Complex<T> {
        self.transfer.get(i, j) / self.lattice.dx()
    }

    /// Kernel between band-limited point sources, `F G F / dx` with `F` the
    /// smooth low-pass projector of [`SineBasis::smoothing_filter`]. This is
    /// the quantity to compare with continuum kernels at lattice points. The
    /// filter passes local wavenumbers below `0.35 k_max` untouched, so the
    /// comparison holds while `m |x_b − x_a| / Δt` stays below that.
    pub fn point_kernel(&self) -> CMatrix<T> {
        let f = SineBasis::new(&self.lattice).smoothing_filter();
        let mut k = f.matmul(&self.transfer).matmul(&f);
        k.scale(Complex::new(self.lattice.dx().recip(), T::zero()));
        k
    }

    /// `self` followed by `later`.
    pub fn then(&self, later: &Self) -> Result<Self> {
        if self.lattice != later.lattice || self.mass != later.mass {
            return Err(Error::domain("propagators live on different lattices or masses"));
        }
        let tol = T::lit(1e-12) * (T::one() + self.grid.t_b.abs());
        if (self.grid.t_b - later.grid.t_a).abs() > tol {
            return Err(Error::domain("propagator time intervals are not contiguous"));
        }
        let grid = TimeGrid::new(self.grid.t_a, later.grid.t_b, self.grid.slices + later.grid.slices)?;
        let mut out = Self {
            lattice: self.lattice,
            grid,
            mass: self.mass,
            options: self.options,
            transfer: later.transfer.matmul(&self.transfer),
            warnings: Vec::new(),
        };
        out.check_leak();
        Ok(out)
    }

    /// `max|G_ij − G_ji| / max|G|`
    pub fn symmetry_deviation(&self) -> T {
        let g = &self.transfer;
        g.max_abs_diff(&g.transpose()) / g.max_abs()
    }

    /// Largest edge-row amplitude reached from central sources, relative to
    /// the largest central amplitude.
    pub fn leak_ratio(&self) -> T {
        let l = &self.lattice;
        let (mut edge, mut centre) = (T::zero(), T::zero());
        for i in 0..l.points {
            for j in (0..l.points).filter(|&j| l.is_central(j)) {
                let a = self.transfer.get(i, j).norm();
                if l.is_edge(i) {
                    edge = edge.max(a);
                } else if l.is_central(i) {
                    centre = centre.max(a);
                }
            }
        }
        if centre > T::zero() {
            edge / centre
        } else {
            T::zero()
        }
    }

    fn check_leak(&mut self) {
        let r = self.leak_ratio().as_f64();
        if r > self.options.leak_tolerance {
            self.warnings.push(format!(
                "boundary leak: edge amplitude ratio {r:.3e} exceeds tolerance {:.3e}",
                self.options.leak_tolerance
            ));
        }
    }
}

fn check_mass<T: Real>(mass: T) -> Result<()> {
    if !(mass > T::zero()) || !mass.is_finite() {
        return Err(Error::domain(format!("mass must be finite and > 0, got {mass}")));
    }
    Ok(())
}

/// One-slice propagator over `[0, ε]`.
pub fn short_time_kernel<T: Real>(
    pot: &dyn LinePotential<T>,
    lattice: &LatticeSpec<T>,
    epsilon: T,
    mass: T,
    options: PropagatorOptions,
) -> Result<PropagatorMatrix<T>> {
    check_mass(mass)?;
    let builder = SliceBuilder::new(lattice, epsilon, mass, options)?;
    Ok(PropagatorMatrix {
        lattice: *lattice,
        grid: TimeGrid::new(T::zero(), epsilon, 1)?,
        mass,
        options,
        transfer: builder.transfer(pot, pot)?,
        warnings: Vec::new(),
    })
}

/// `N`-fold product of identical slices for a time-independent potential.
pub fn time_sliced_propagator<T: Real>(
    pot: &dyn LinePotential<T>,
    lattice: &LatticeSpec<T>,
    grid: &TimeGrid<T>,
    mass: T,
    options: PropagatorOptions,
) -> Result<PropagatorMatrix<T>> {
    check_mass(mass)?;
    grid.validate()?;
    let builder = SliceBuilder::new(lattice, grid.epsilon(), mass, options)?;
    let g = builder.transfer(pot, pot)?;
    let mut out = PropagatorMatrix {
        lattice: *lattice,
        grid: *grid,
        mass,
        options,
        transfer: g.pow(grid.slices),
        warnings: Vec::new(),
    };
    if !out.transfer.all_finite() {
        return Err(Error::numerical("propagator overflowed", f64::INFINITY));
    }
    out.check_leak();
    Ok(out)
}

/// Ordered product of slice-dependent transfer matrices; slice `j` runs from
/// endpoint `j` to `j + 1` and sees `pot_at(j)` / `pot_at(j + 1)` there.
pub fn time_dependent_propagator<T: Real, P: LinePotential<T>>(
    pot_at: impl Fn(usize) -> P,
    lattice: &LatticeSpec<T>,
    grid: &TimeGrid<T>,
    mass: T,
    options: PropagatorOptions,
) -> Result<PropagatorMatrix<T>> {
    check_mass(mass)?;
    grid.validate()?;
    let builder = SliceBuilder::new(lattice, grid.epsilon(), mass, options)?;
    let mut acc: Option<CMatrix<T>> = None;
    let mut prev = pot_at(0);
    for j in 0..grid.slices {
        let next = pot_at(j + 1);
        let g = builder.transfer(&prev, &next)?;
        acc = Some(match acc {
            None => g,
            Some(a) => g.matmul(&a),
        });
        prev = next;
    }
    let mut out = PropagatorMatrix {
        lattice: *lattice,
        grid: *grid,
        mass,
        options,
        transfer: acc.expect("at least one slice"),
        warnings: Vec::new(),
    };
    out.check_leak();
    Ok(out)
}

/// `ψ_b(x_i) = Σ_j K_ij ψ_a(x_j) dx`
pub fn evolve<T: Real>(psi_a: &ComplexField1D<T>, k: &PropagatorMatrix<T>) -> Result<ComplexField1D<T>> {
    if psi_a.lattice != k.lattice {
        return Err(Error::domain("field and propagator live on different lattices"));
    }
    Ok(ComplexField1D {
        lattice: k.lattice,
        values: k.transfer.mul_vec(&psi_a.values),
    })
}

/// Slice-by-slice evolution without forming the full propagator.
pub fn evolve_sliced<T: Real>(
    psi_a: &ComplexField1D<T>,
    pot: &dyn LinePotential<T>,
    grid: &TimeGrid<T>,
    mass: T,
    options: PropagatorOptions,
) -> Result<ComplexField1D<T>> {
    check_mass(mass)?;
    grid.validate()?;
    let lattice = &psi_a.lattice;
    let eps = grid.epsilon();
    let mut values = psi_a.values.clone();
    let fast = options.scheme == KineticScheme::Spectral && options.sampling != PotentialSampling::Midpoint;
    if !fast {
        let g = SliceBuilder::new(lattice, eps, mass, options)?.transfer(pot, pot)?;
        for _ in 0..grid.slices {
            values = g.mul_vec(&values);
        }
    } else {
        lattice.validate()?;
        let (pre, post) = match options.sampling {
            PotentialSampling::Endpoint => (
                vec![Complex::new(T::one(), T::zero()); lattice.points],
                kernel::phase_factors(lattice, eps, pot, T::one())?,
            ),
            _ => {
                let h = kernel::phase_factors(lattice, eps, pot, T::lit(0.5))?;
                (h.clone(), h)
            }
        };
        let box_len = lattice.dx() * T::from_usize_lossy(lattice.points + 1);
        let two_m = T::lit(2.0) * mass;
        let kinetic: Vec<Complex<T>> = (1..=lattice.points)
            .map(|n| {
                let k = T::from_usize_lossy(n) * T::PI() / box_len;
                Complex::from_polar(T::one(), -eps * k * k / two_m)
            })
            .collect();
        let sine = FastSine::new(lattice.points);
        for _ in 0..grid.slices {
            mul_diag(&mut values, &pre);
            sine.apply(&mut values);
            mul_diag(&mut values, &kinetic);
            sine.apply(&mut values);
            mul_diag(&mut values, &post);
        }
    }
    Ok(ComplexField1D {
        lattice: *lattice,
        values,
    })
}

fn mul_diag<T: Real>(v: &mut [Complex<T>], d: &[Complex<T>]) {
    for (a, b) in v.iter_mut().zip(d) {
        *a = *a * b;
    }
}

/// `(K − K⁰) ψ_a`: the part of the evolved state produced by the potential.
pub fn scattered_component<T: Real>(
    psi_a: &ComplexField1D<T>,
    pot: &dyn LinePotential<T>,
    grid: &TimeGrid<T>,
    mass: T,
    options: PropagatorOptions,
) -> Result<ComplexField1D<T>> {
    let full = evolve_sliced(psi_a, pot, grid, mass, options)?;
    let free = evolve_sliced(psi_a, &LatticePotential::Free, grid, mass, options)?;
    full.sub(&free)
}

/// Leak warning for an evolved field, if its edge amplitude is too large.
pub fn field_leak_warning<T: Real>(psi: &ComplexField1D<T>, tolerance: f64) -> Option<String> {
    let r = psi.edge_ratio().as_f64();
    (r > tolerance).then(|| format!("boundary leak: edge amplitude ratio {r:.3e} exceeds tolerance {tolerance:.3e}"))
}
