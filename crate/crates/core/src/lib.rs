//! Conformal maps of the disk and of rectangles onto symmetric circular-arc
//! quadrilaterals, their accessory parameters, univalence intervals, and the
//! covering groups of twice punctured disks.
//!
//! Everything is generic over the scalar type (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod elliptic;
pub mod error;
pub mod fuchsian;
pub mod geometry;
pub mod mobius;
pub mod ode;
pub mod poly;
pub mod quad;
pub mod real;
pub mod schwarzian;
pub mod solver;
pub mod spps;

pub use error::{Error, Result};
pub use real::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type HalfPeriods64 = elliptic::HalfPeriods<f64>;
pub type AccessoryParams64 = schwarzian::AccessoryParams<f64>;
pub type RectParams64 = schwarzian::RectParams<f64>;
pub type ScqGeometry64 = geometry::ScqGeometry<f64>;
pub type MapData64 = solver::MapData<f64>;
pub type UnivalenceInterval64 = solver::UnivalenceInterval<f64>;
pub type DiskSolver64 = solver::DiskSolver<f64>;
pub type SppsBasis64 = spps::SppsBasis<f64>;
pub type MobiusTransform64 = mobius::MobiusTransform<f64>;
pub type CoverData64 = fuchsian::CoverData<f64>;
