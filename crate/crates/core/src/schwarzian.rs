//! Closed-form Schwarzian derivatives of the disk map, the elliptic integral
//! and the rectangle map.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::elliptic::{check_t, guard_pole, prevertex_poly, wp, HalfPeriods};
use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Accessory parameters `(α, t, λ)` of the disk problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessoryParams<T> {
    /// Interior angle at each vertex in units of π.
    pub alpha: T,
    /// Prevertex parameter, prevertices at `±e^{±it}`.
    pub t: T,
    pub lambda: T,
}

impl<T: Real> AccessoryParams<T> {
    pub fn new(alpha: T, t: T, lambda: T) -> Result<Self> {
        check_alpha(alpha)?;
        check_t(t)?;
        if !lambda.is_finite() {
            return Err(Error::Domain(format!("λ = {lambda} is not finite")));
        }
        Ok(Self { alpha, t, lambda })
    }

    /// Parameters describing the same map rotated by a quarter turn:
    /// `(α, π/2 − t, −λ)`.
    pub fn rotated(&self) -> Self {
        Self { alpha: self.alpha, t: T::FRAC_PI_2() - self.t, lambda: -self.lambda }
    }

    pub fn mu(&self) -> T {
        mu_from_lambda(self)
    }
}

pub(crate) fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha >= T::zero() && alpha <= lit(2.0) {
        Ok(())
    } else {
        Err(Error::Domain(format!("α = {alpha} outside [0, 2]")))
    }
}

/// Parameters `(α, τ, μ)` of the rectangle problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectParams<T> {
    pub alpha: T,
    pub hp: HalfPeriods<T>,
    pub mu: T,
}

impl<T: Real> RectParams<T> {
    pub fn new(alpha: T, hp: HalfPeriods<T>, mu: T) -> Result<Self> {
        check_alpha(alpha)?;
        if !hp.normalized {
            return Err(Error::Domain("rectangle problem needs normalized half-periods".into()));
        }
        Ok(Self { alpha, hp, mu })
    }

    /// Rectangle parameters equivalent to a disk problem.
    pub fn from_disk(p: &AccessoryParams<T>) -> Result<Self> {
        Self::new(p.alpha, HalfPeriods::for_prevertex(p.t)?, mu_from_lambda(p))
    }
}

fn checked_denominator<T: Real>(z: Complex<T>, t: T) -> Result<Complex<T>> {
    let d = prevertex_poly(z, t);
    guard_pole(d, z)?;
    Ok(d)
}

/// `(cos 2t · z⁴ − 2z² + cos 2t) / (z⁴ − 2 cos 2t · z² + 1)²`.
pub fn psi0<T: Real>(z: Complex<T>, t: T) -> Result<Complex<T>> {
    let d = checked_denominator(z, t)?;
    let c = (t * lit(2.0)).cos();
    let z2 = z * z;
    Ok((z2 * z2 * c - z2 * lit::<T>(2.0) + c) / (d * d))
}

/// `2 sin 2t / (z⁴ − 2 cos 2t · z² + 1)`.
pub fn psi1<T: Real>(z: Complex<T>, t: T) -> Result<Complex<T>> {
    let d = checked_denominator(z, t)?;
    Ok(Complex::new((t * lit(2.0)).sin() * lit(2.0), T::zero()) / d)
}

/// Schwarzian of the disk map: `4(1 − α²) ψ₀ − 2λ ψ₁`.
#[allow(non_snake_case)]
pub fn R<T: Real>(z: Complex<T>, p: &AccessoryParams<T>) -> Result<Complex<T>> {
    let a = (T::one() - p.alpha * p.alpha) * lit(4.0);
    Ok(psi0(z, p.t)? * a - psi1(z, p.t)? * (p.lambda * lit(2.0)))
}

/// Schwarzian of the elliptic integral `E`.
#[allow(non_snake_case)]
pub fn S_E<T: Real>(z: Complex<T>, t: T) -> Result<Complex<T>> {
    let d = checked_denominator(z, t)?;
    let c = (t * lit(2.0)).cos();
    let c4 = (t * lit(4.0)).cos();
    let z2 = z * z;
    Ok((z2 * z2 * (c * lit(2.0)) + z2 * (c4 - lit(5.0)) + c * lit(2.0)) / (d * d))
}

/// Schwarzian of the rectangle map: `(1 − 4α²)/2 · ℘(ζ + ω₃) − 2μ`.
#[allow(non_snake_case)]
pub fn S_g<T: Real>(zeta: Complex<T>, p: &RectParams<T>) -> Result<Complex<T>> {
    let q = (T::one() - p.alpha * p.alpha * lit(4.0)) * lit(0.5);
    let shift = -p.mu * lit(2.0);
    if q == T::zero() {
        return Ok(Complex::new(shift, T::zero()));
    }
    Ok(wp(zeta + p.hp.omega3(), &p.hp)? * q + shift)
}

/// The disk Schwarzian written through `μ`, as obtained by composing
/// `S_g ∘ E` with `S_E`. Agrees with [`R`] when `μ = mu_from_lambda`.
pub fn schwarzian_via_mu<T: Real>(z: Complex<T>, alpha: T, t: T, mu: T) -> Result<Complex<T>> {
    let d = checked_denominator(z, t)?;
    let c = (t * lit(2.0)).cos();
    let s = (t * lit(2.0)).sin();
    let c4 = (t * lit(4.0)).cos();
    let q = T::one() - alpha * alpha * lit(4.0);
    let z2 = z * z;
    let first = Complex::new(q * c * lit(2.0 / 3.0) - mu * lit(2.0), T::zero()) / d;
    let mid = c4 - q * s * s * lit(2.0) - lit(5.0);
    let second = (z2 * z2 * (c * lit(2.0)) + z2 * mid + c * lit(2.0)) / (d * d);
    Ok(first + second)
}

/// `μ = (2(α² − 1)/3) cos 2t + 2λ sin 2t`.
pub fn mu_from_lambda<T: Real>(p: &AccessoryParams<T>) -> T {
    let two_t = p.t * lit(2.0);
    (p.alpha * p.alpha - T::one()) * lit(2.0 / 3.0) * two_t.cos() + p.lambda * lit(2.0) * two_t.sin()
}

/// Inverse of [`mu_from_lambda`] for fixed `(α, t)`.
pub fn lambda_from_mu<T: Real>(alpha: T, t: T, mu: T) -> T {
    let two_t = t * lit(2.0);
    (mu - (alpha * alpha - T::one()) * lit(2.0 / 3.0) * two_t.cos()) / (two_t.sin() * lit(2.0))
}
