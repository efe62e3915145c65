//! Weierstrass `℘` for rectangular lattices and the elliptic integral that
//! maps the disk onto the period rectangle.

mod integral;
mod jacobi;
mod weierstrass;
mod zeros;

pub use integral::{elliptic_E, EndpointMode, QuadraturePath};
pub use jacobi::{agm, complete_k, sn_complex, sncndn};
pub use weierstrass::{e_from_t, normalized_half_periods, phi, t_from_e3, theta_constants, wp, HalfPeriods};
pub use zeros::{wp_zero, wp_zero_phi, wp_zero_sn};

pub(crate) use weierstrass::{check_t, guard_pole, prevertex_poly};
