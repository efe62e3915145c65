use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quad::adaptive_complex;
use crate::real::{lit, Real};

/// How the integrand is treated at the far end of the segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum EndpointMode {
    /// Plain Gauss-Legendre panels.
    Smooth,
    /// Substitute `s = 1 − u²`, which removes an inverse square-root
    /// singularity at a prevertex endpoint.
    Singular,
    /// `Singular` when the endpoint is within `1e-3` of a prevertex.
    #[default]
    Auto,
}

/// Straight segment from 0 to `endpoint` with a node budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraturePath<T> {
    pub endpoint: Complex<T>,
    /// Maximum number of integrand evaluations.
    pub max_nodes: usize,
    pub mode: EndpointMode,
}

impl<T: Real> QuadraturePath<T> {
    pub fn to(endpoint: Complex<T>) -> Self {
        Self { endpoint, max_nodes: 200_000, mode: EndpointMode::Auto }
    }

    pub fn with_mode(mut self, mode: EndpointMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_max_nodes(mut self, n: usize) -> Self {
        self.max_nodes = n;
        self
    }
}

fn prevertices<T: Real>(t: T) -> [Complex<T>; 4] {
    let p = Complex::from_polar(T::one(), t);
    [p, -p, p.conj(), -p.conj()]
}

/// `E(z) = ∫₀^z dζ / √(ζ⁴ − 2 cos(2t) ζ² + 1)` along `path`, principal branch
/// with `E′(0) = 1`.
///
/// The square root is taken as `∏ √(1 − ζ/r)` over the four prevertices `r`;
/// each factor has nonnegative real part in the closed disk so the product is
/// continuous along the segment.
#[allow(non_snake_case)]
pub fn elliptic_E<T: Real>(t: T, path: &QuadraturePath<T>) -> Result<Complex<T>> {
    super::weierstrass::check_t(t)?;
    let z = path.endpoint;
    let zero = Complex::new(T::zero(), T::zero());
    if z == zero {
        return Ok(zero);
    }
    let roots = prevertices(t);
    // 1 − s z/r for each root, split so that the singular factor is exact.
    let gaps: Vec<Complex<T>> = roots.iter().map(|r| Complex::new(T::one(), T::zero()) - z / r).collect();
    let singular = match path.mode {
        EndpointMode::Smooth => false,
        EndpointMode::Singular => true,
        EndpointMode::Auto => roots.iter().any(|r| (z - r).norm() < lit(1e-3)),
    };
    let budget = (path.max_nodes / 45).max(1);
    let tol: T = lit::<T>(1e-14).max(T::epsilon() * lit(8.0));
    if singular {
        let g = |u: T| {
            let s = T::one() - u * u;
            let mut den = Complex::new(T::one(), T::zero());
            for gap in &gaps {
                den *= (Complex::new(u * u, T::zero()) + gap * s).sqrt();
            }
            z * (u * lit(2.0)) / den
        };
        adaptive_complex(g, T::zero(), T::one(), tol, budget)
    } else {
        let g = |s: T| {
            let mut den = Complex::new(T::one(), T::zero());
            for r in &roots {
                den *= (Complex::new(T::one(), T::zero()) - z * s / r).sqrt();
            }
            z / den
        };
        adaptive_complex(g, T::zero(), T::one(), tol, budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{complete_k, HalfPeriods};
    use crate::error::Error;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn zero_endpoint() {
        let v = elliptic_E(0.4, &QuadraturePath::to(c(0.0, 0.0))).unwrap();
        assert_eq!(v, c(0.0, 0.0));
    }

    #[test]
    fn square_case_matches_direct_quadrature() {
        let oracle =
            crate::quad::adaptive(|x: f64| 1.0 / (1.0 + x.powi(4)).sqrt(), 0.0, 1.0, 1e-14, 1000).unwrap();
        let v = elliptic_E(FRAC_PI_4, &QuadraturePath::to(c(1.0, 0.0))).unwrap();
        assert!((v.re - oracle).abs() < 1e-12 && v.im.abs() < 1e-15);
        assert!((v.re - 0.9270374).abs() < 1e-7);
    }

    #[test]
    fn imaginary_endpoint_is_imaginary() {
        for k in 1..8 {
            let t = k as f64 * PI / 16.0;
            let v = elliptic_E(t, &QuadraturePath::to(c(0.0, 1.0))).unwrap();
            assert!(v.re.abs() < 1e-10, "t={t}");
            assert!(v.im > 0.0);
        }
    }

    #[test]
    fn half_periods_match_complete_integrals() {
        let t = 0.35;
        let w1 = elliptic_E(t, &QuadraturePath::to(c(1.0, 0.0))).unwrap();
        let w2 = elliptic_E(t, &QuadraturePath::to(c(0.0, 1.0))).unwrap();
        let hp = HalfPeriods::for_prevertex(t).unwrap();
        assert!((w1.re - hp.omega1).abs() < 1e-11);
        assert!((w2.im - hp.omega2_mag).abs() < 1e-11);
        assert!((hp.omega1 - complete_k(t.cos().powi(2)) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn prevertex_endpoint_hits_vertex() {
        let t = 0.6;
        let z = Complex::from_polar(1.0, t);
        let path = QuadraturePath::to(z).with_mode(EndpointMode::Singular);
        let v = elliptic_E(t, &path).unwrap();
        let hp = HalfPeriods::for_prevertex(t).unwrap();
        assert!((v - hp.omega3()).norm() < 1e-10, "{v}");
    }

    #[test]
    fn singular_mode_agrees_on_smooth_endpoints() {
        let z = c(0.3, 0.5);
        let a = elliptic_E(0.9, &QuadraturePath::to(z).with_mode(EndpointMode::Smooth)).unwrap();
        let b = elliptic_E(0.9, &QuadraturePath::to(z).with_mode(EndpointMode::Singular)).unwrap();
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn derivative_at_origin_is_one() {
        let h = 1e-4;
        let v = elliptic_E(1.1, &QuadraturePath::to(c(h, 0.0))).unwrap();
        assert!((v.re / h - 1.0).abs() < 1e-8);
    }

    #[test]
    fn tiny_budget_reports_accuracy_error() {
        let z = Complex::from_polar(1.0, 0.6);
        let path = QuadraturePath::to(z).with_mode(EndpointMode::Smooth).with_max_nodes(45);
        assert!(matches!(elliptic_E(0.6, &path), Err(Error::Accuracy(_))));
    }
}
