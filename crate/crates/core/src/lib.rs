//! Time-sliced path integrals for non-relativistic scattering and electron
//! charge transfer, in Hartree atomic units.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`); the
//! aliases below fix it to `f64`. Charge transfer is `f64` only.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod born;
pub mod capture;
pub mod error;
pub mod influence;
pub mod lattice;
pub mod potentials;
pub mod quadrature;
pub mod record;
pub mod scalar;
pub mod units;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CollisionKinematics64 = units::CollisionKinematics<f64>;
pub type ChannelEnergetics64 = units::ChannelEnergetics<f64>;
pub type CentralPotential64 = potentials::CentralPotential<f64>;
pub type LatticePotential64 = potentials::LatticePotential<f64>;
pub type PairPotentials64 = potentials::PairPotentials<f64>;
pub type LatticeSpec64 = lattice::LatticeSpec<f64>;
pub type TimeGrid64 = lattice::TimeGrid<f64>;
pub type ComplexField64 = lattice::ComplexField1D<f64>;
pub type PropagatorMatrix64 = lattice::PropagatorMatrix<f64>;
pub type FixedPath64 = influence::FixedPath<f64>;
pub type InfluenceResult64 = influence::InfluenceResult<f64>;
pub type CrossSectionRecord64 = record::CrossSectionRecord<f64>;
