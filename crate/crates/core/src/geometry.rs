//! Symmetric circular quadrilaterals from the right-edge data
//! `(p₁ = 1, κ₁, θ₁)` and the vertex angle `απ`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{lit, sgn, Real};

/// Which degenerate configuration, if any, the quadrilateral realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremal {
    None,
    /// `v = v̄` on the real axis.
    VerticesMeet,
    /// The upper edge is a horizontal line through `∞`.
    EdgeThroughInfinity,
}

/// Geometric description of a quadrilateral with vertices `±v, ±v̄`,
/// normalized so the right edge crosses the real axis at `p₁ = 1`.
///
/// Infinite radii and centers (straight edges) are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScqGeometry<T> {
    pub alpha: T,
    pub p1: T,
    pub kappa1: T,
    /// Half-angle of the right edge; `None` for a straight edge.
    pub theta1: Option<T>,
    pub r1: Option<T>,
    #[serde(rename = "O1")]
    pub o1: Option<Complex<T>>,
    pub v: Complex<T>,
    pub sgn_kappa2: i8,
    #[serde(rename = "O2")]
    pub o2: Option<Complex<T>>,
    pub kappa2: T,
    pub r2: Option<T>,
    pub p2: Complex<T>,
    pub theta2: Option<T>,
    pub extremal: Extremal,
}

impl<T: Real> ScqGeometry<T> {
    /// Unit tangent of the right edge at `v`, pointing towards `p₁`.
    pub fn right_tangent(&self) -> Complex<T> {
        match self.o1 {
            Some(o) => {
                let d = self.v - o;
                Complex::new(T::zero(), -sgn(self.kappa1)) * d / d.norm()
            }
            None => Complex::new(T::zero(), -T::one()),
        }
    }

    /// Unit tangent of the upper edge at `v`, pointing towards `p₂`.
    pub fn upper_tangent(&self) -> Complex<T> {
        match self.o2 {
            Some(o) => {
                let d = self.v - o;
                Complex::new(T::zero(), lit(self.sgn_kappa2 as f64)) * d / d.norm()
            }
            None => {
                // straight upper edge: leftwards, or rightwards through ∞
                let dir = if self.extremal == Extremal::EdgeThroughInfinity { T::one() } else { -T::one() };
                Complex::new(dir, T::zero())
            }
        }
    }

    /// Interior angle at `v` recovered from the two edge tangents, in `[0, 2π)`.
    pub fn interior_angle(&self) -> T {
        let a = (self.right_tangent() / self.upper_tangent()).arg();
        if a < T::zero() {
            a + T::TAU()
        } else {
            a
        }
    }
}

const TOL: f64 = 1e-12;

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha >= T::zero() && alpha <= lit(2.0) {
        Ok(())
    } else {
        Err(Error::Geometry(format!("α = {alpha} outside [0, 2]")))
    }
}

/// Runs the forward chain from the right edge `(κ₁, θ₁)` and `α`.
///
/// `κ₁ = 0` is rejected here because `θ₁` is undefined for a straight edge;
/// use [`scq_vertical_edge`] instead.
pub fn scq_from_params<T: Real>(kappa1: T, theta1: T, alpha: T) -> Result<ScqGeometry<T>> {
    check_alpha(alpha)?;
    if !(theta1 > T::zero() && theta1 <= T::PI()) {
        return Err(Error::Geometry(format!("θ₁ = {theta1} outside (0, π]")));
    }
    if kappa1 == T::zero() || !kappa1.is_finite() {
        return Err(Error::Geometry(
            "κ₁ must be finite and nonzero; straight right edges use the vertical-edge constructor".into(),
        ));
    }
    let r1 = T::one() / kappa1.abs();
    if kappa1 > T::zero() && T::one() - r1 * (T::one() - theta1.cos()) < -lit::<T>(TOL) {
        return Err(Error::Geometry(
            "right edge leaves the right half-plane (p₁ − r₁(1 − cos θ₁) < 0)".into(),
        ));
    }
    let o1 = Complex::new(T::one() - T::one() / kappa1, T::zero());
    let s1 = sgn(kappa1);
    let v = o1 + Complex::from_polar(r1, T::FRAC_PI_2() + s1 * (theta1 - T::FRAC_PI_2()));
    finish(alpha, kappa1, Some(theta1), Some(r1), Some(o1), v)
}

/// Chain for a straight right edge `Re w = 1` with vertex `v = 1 + i·height`.
pub fn scq_vertical_edge<T: Real>(height: T, alpha: T) -> Result<ScqGeometry<T>> {
    check_alpha(alpha)?;
    if !(height >= T::zero()) || !height.is_finite() {
        return Err(Error::Geometry(format!("vertex height {height} must be finite and nonnegative")));
    }
    finish(alpha, T::zero(), None, None, None, Complex::new(T::one(), height))
}

fn finish<T: Real>(
    alpha: T,
    kappa1: T,
    theta1: Option<T>,
    r1: Option<T>,
    o1: Option<Complex<T>>,
    v: Complex<T>,
) -> Result<ScqGeometry<T>> {
    let s1 = sgn(kappa1);
    let phase = s1 * theta1.unwrap_or(T::zero());
    let tol: T = lit(TOL);
    let raw = (phase - (lit::<T>(0.5) + alpha) * T::PI()).sin();
    let sgn_kappa2: i8 = if raw.abs() < tol {
        0
    } else if raw > T::zero() {
        1
    } else {
        -1
    };
    let (o2, kappa2, r2, p2, theta2) = if sgn_kappa2 == 0 {
        (None, T::zero(), None, Complex::new(T::zero(), v.im), None)
    } else {
        let s2: T = lit(sgn_kappa2 as f64);
        let shift = (s2 - T::one()) * lit(0.5) * T::PI();
        let o2 = Complex::new(T::zero(), v.im - v.re * (phase + shift - alpha * T::PI()).tan());
        let r2 = (v - o2).norm();
        let kappa2 = s2 / r2;
        let p2 = o2 + Complex::new(T::zero(), T::one() / kappa2);
        let theta2 = s2 * ((p2 - o2) / (v - o2)).arg();
        (Some(o2), kappa2, Some(r2), p2, Some(theta2))
    };
    // upper-edge tangent at v towards p₂, used to orient straight edges
    let upper = Complex::from_polar(T::one(), phase - T::FRAC_PI_2() - alpha * T::PI());
    let extremal = if v.im.abs() < tol {
        Extremal::VerticesMeet
    } else if sgn_kappa2 == 0 && upper.re > T::zero() {
        Extremal::EdgeThroughInfinity
    } else {
        Extremal::None
    };
    if p2.im < -tol {
        return Err(Error::Geometry(format!("p₂ = {p2} lies in the lower half-plane")));
    }
    if kappa1 > T::zero() && alpha * T::PI() > lit::<T>(1.5) * T::PI() + phase + tol {
        return Err(Error::Geometry("απ exceeds 3π/2 + θ₁".into()));
    }
    if kappa1 < T::zero() && alpha > lit(0.5) && phase.abs() > (lit::<T>(1.5) - alpha) * T::PI() + tol {
        return Err(Error::Geometry("θ₁ exceeds 3π/2 − απ".into()));
    }
    if v.re < -tol || v.im < -tol {
        return Err(Error::Geometry(format!("vertex {v} outside the closed first quadrant")));
    }
    Ok(ScqGeometry {
        alpha,
        p1: T::one(),
        kappa1,
        theta1,
        r1,
        o1,
        v,
        sgn_kappa2,
        o2,
        kappa2,
        r2,
        p2,
        theta2,
        extremal,
    })
}

/// Extremal type of an existing description.
pub fn classify_extremal<T: Real>(g: &ScqGeometry<T>) -> Extremal {
    g.extremal
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

    #[test]
    fn hand_computed_example() {
        let g = scq_from_params(1.0, FRAC_PI_4, 0.5).unwrap();
        assert!((g.v - Complex::from_polar(1.0, FRAC_PI_4)).norm() < 1e-15);
        assert!((g.o2.unwrap() - Complex::new(0.0, SQRT_2)).norm() < 1e-15);
        assert!((g.kappa2 + 1.0).abs() < 1e-15);
        assert!((g.p2 - Complex::new(0.0, SQRT_2 - 1.0)).norm() < 1e-15);
        assert!((g.theta2.unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(g.extremal, Extremal::None);
        assert_eq!(classify_extremal(&g), Extremal::None);
    }

    #[test]
    fn vertices_meet_on_the_real_axis() {
        let g = scq_from_params(-0.5, PI, 0.25).unwrap();
        assert_eq!(g.extremal, Extremal::VerticesMeet);
        assert!(g.v.im.abs() < 1e-12);
    }

    #[test]
    fn convex_edge_through_infinity() {
        let theta1 = 0.3;
        let alpha = (1.5 * PI + theta1) / PI;
        let g = scq_from_params(0.8, theta1, alpha).unwrap();
        assert_eq!(g.extremal, Extremal::EdgeThroughInfinity);
        assert!((g.v.im - g.p2.im).abs() < 1e-12);
    }

    #[test]
    fn concave_edge_through_infinity() {
        let alpha = 1.25;
        let g = scq_from_params(-0.7, 1.5 * PI - alpha * PI, alpha).unwrap();
        assert_eq!(g.extremal, Extremal::EdgeThroughInfinity);
    }

    #[test]
    fn square_has_straight_edges() {
        let g = scq_vertical_edge(1.0f64, 0.5).unwrap();
        assert_eq!(g.sgn_kappa2, 0);
        assert_eq!(g.kappa2, 0.0);
        assert!((g.p2 - Complex::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(g.extremal, Extremal::None);
        assert!((g.interior_angle() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn vertical_edge_with_curved_top() {
        let g = scq_vertical_edge(0.5f64, 0.3).unwrap();
        assert!(g.kappa2.is_finite() && g.kappa2 != 0.0);
        assert!((g.interior_angle() - 0.3 * PI).abs() < 1e-10);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(scq_from_params(3.0, 2.0, 0.5), Err(Error::Geometry(_))));
        assert!(scq_from_params(1.0, 0.0, 0.5).is_err());
        assert!(scq_from_params(1.0, 0.5, 2.5).is_err());
        assert!(scq_from_params(0.0, 0.5, 0.5).is_err());
        assert!(scq_from_params(0.8, 0.3, 1.99).is_err());
    }

    #[test]
    fn json_uses_pairs() {
        let g = scq_from_params(1.0, FRAC_PI_4, 0.5).unwrap();
        let j = serde_json::to_value(g).unwrap();
        assert!(j["v"].is_array() && j["v"].as_array().unwrap().len() == 2);
        assert_eq!(j["extremal"], "none");
        assert!(j["O2"].is_array());
    }

    fn offset_free_center(g: &ScqGeometry<f64>) -> Option<f64> {
        let phase = g.kappa1.signum() * g.theta1?;
        Some(g.v.im - g.v.re * (phase - g.alpha * PI).tan())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn tangents_meet_at_the_vertex_angle(
            kappa1 in prop_oneof![-3.0f64..-0.05, 0.05f64..0.95],
            theta_frac in 0.02f64..0.98,
            alpha_frac in 0.02f64..0.98,
        ) {
            let theta1 = theta_frac * PI;
            // stay clear of the validity boundaries
            let alpha = alpha_frac * 2.0;
            match scq_from_params(kappa1, theta1, alpha) {
                Ok(g) if g.sgn_kappa2 != 0 && g.extremal == Extremal::None => {
                    let a = g.interior_angle();
                    let err = ((a - alpha * PI + PI).rem_euclid(2.0 * PI) - PI).abs();
                    prop_assert!(err < 1e-10, "angle {a} vs {}", alpha * PI);
                    // the π-offset inside the tangent does not matter
                    let o2 = offset_free_center(&g).unwrap();
                    prop_assert!((o2 - g.o2.unwrap().im).abs() < 1e-12 * (1.0 + o2.abs()));
                    prop_assert!(g.p2.im >= -1e-12);
                }
                _ => {}
            }
        }
    }
}
