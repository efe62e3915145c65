use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::jacobi::{complete_k, sn_complex_parts};
use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Theta null values `(ϑ₂(0), ϑ₃(0), ϑ₄(0))` for a real nome `0 < q < 1`.
///
/// Series are summed until a term falls below `1e-16` relative to the sum.
pub fn theta_constants<T: Real>(q: T) -> Result<(T, T, T)> {
    if !(q > T::zero() && q < T::one()) {
        return Err(Error::Domain(format!("nome q = {q} outside (0, 1)")));
    }
    let cut: T = lit(1e-16);
    let two: T = lit(2.0);
    let lnq = q.ln();
    let mut th2 = T::zero();
    let mut th3 = T::one();
    let mut th4 = T::one();
    for n in 0..10_000u32 {
        let nf: T = lit(n as f64);
        let half = nf + lit(0.5);
        let t2 = two * (lnq * half * half).exp();
        th2 += t2;
        let mut small = t2 <= cut * th2.max(T::min_positive_value());
        if n >= 1 {
            let t = two * (lnq * nf * nf).exp();
            th3 += t;
            th4 += if n % 2 == 1 { -t } else { t };
            small = small && t <= cut;
        }
        if small && n >= 1 {
            break;
        }
    }
    Ok((th2, th3, th4))
}

/// A pair of half-periods `ω₁ > 0`, `ω₂ ∈ iℝ₊` of a rectangular lattice and the
/// values `e_i = ℘(ω_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPeriods<T> {
    pub omega1: T,
    /// `ω₂ = i · omega2_mag`.
    pub omega2_mag: T,
    pub e1: T,
    pub e2: T,
    pub e3: T,
    /// `Im τ` where `τ = ω₂/ω₁`.
    pub tau: T,
    /// Whether `e₁ − e₂ = 4`.
    pub normalized: bool,
}

impl<T: Real> HalfPeriods<T> {
    /// Normalized half-periods of the rectangle `E(𝔻_t)` for prevertex
    /// parameter `t`: `ω₁ = K(cos²t)/2`, `|ω₂| = K(sin²t)/2`.
    pub fn for_prevertex(t: T) -> Result<Self> {
        check_t(t)?;
        let (e1, e2, e3) = e_from_t(t);
        let m = t.cos().powi(2);
        let omega1 = complete_k(m) * lit(0.5);
        let omega2_mag = complete_k(T::one() - m) * lit(0.5);
        Ok(Self { omega1, omega2_mag, e1, e2, e3, tau: omega2_mag / omega1, normalized: true })
    }

    pub fn omega2(&self) -> Complex<T> {
        Complex::new(T::zero(), self.omega2_mag)
    }

    pub fn omega3(&self) -> Complex<T> {
        Complex::new(self.omega1, self.omega2_mag)
    }

    pub fn g2(&self) -> T {
        -lit::<T>(4.0) * (self.e1 * self.e2 + self.e1 * self.e3 + self.e2 * self.e3)
    }

    pub fn g3(&self) -> T {
        lit::<T>(4.0) * self.e1 * self.e2 * self.e3
    }

    /// Jacobi parameter `k² = (e₃ − e₂)/(e₁ − e₂)`; equals `cos² t`.
    pub fn modulus_sq(&self) -> T {
        (self.e3 - self.e2) / (self.e1 - self.e2)
    }

    /// Prevertex parameter `t` recovered from `e₃` (normalized pairs only).
    pub fn prevertex(&self) -> Result<T> {
        t_from_e3(self.e3)
    }
}

pub(crate) fn check_t<T: Real>(t: T) -> Result<()> {
    if t > T::zero() && t < T::FRAC_PI_2() {
        Ok(())
    } else {
        Err(Error::Domain(format!("prevertex parameter t = {t} outside (0, π/2)")))
    }
}

/// Unique normalized half-period pair with ratio `τ = ω₂/ω₁` (purely imaginary).
pub fn normalized_half_periods<T: Real>(tau: Complex<T>) -> Result<HalfPeriods<T>> {
    if !(tau.im > T::zero()) || tau.re.abs() > T::epsilon() * lit::<T>(16.0) * tau.im.max(T::one()) {
        return Err(Error::Domain(format!(
            "τ = {} + {}i must lie on the positive imaginary axis",
            tau.re, tau.im
        )));
    }
    let q = (-T::PI() * tau.im).exp();
    let (th2, th3, th4) = theta_constants(q)?;
    let pi2_3 = T::PI() * T::PI() / lit(3.0);
    // lattice with primitive periods 1 and τ
    let wp_half = pi2_3 * (th3.powi(4) + th4.powi(4));
    let wp_tau_half = -pi2_3 * (th3.powi(4) + th2.powi(4));
    let r = (wp_half - wp_tau_half).sqrt() / lit(4.0);
    let scale = T::one() / (lit::<T>(4.0) * r * r);
    let e1 = wp_half * scale;
    let e2 = wp_tau_half * scale;
    Ok(HalfPeriods {
        omega1: r,
        omega2_mag: r * tau.im,
        e1,
        e2,
        e3: -(e1 + e2),
        tau: tau.im,
        normalized: true,
    })
}

/// Weierstrass `℘(z)` via `℘(z) = e₂ + (e₁ − e₂)/sn²(√(e₁ − e₂) z | k²)`.
pub fn wp<T: Real>(z: Complex<T>, hp: &HalfPeriods<T>) -> Result<Complex<T>> {
    let diff = hp.e1 - hp.e2;
    let root = diff.sqrt();
    let (num, den) = sn_complex_parts(z * root, hp.modulus_sq());
    let nn = num.norm();
    if nn <= lit::<T>(1e-12) * den.abs().max(T::min_positive_value()) {
        return Err(Error::Pole(format!("℘ has a pole at lattice point {z}")));
    }
    let ratio = Complex::new(den, T::zero()) / num;
    Ok(ratio * ratio * diff + hp.e2)
}

/// `(e₁, e₂, e₃)` of the normalized lattice attached to prevertex parameter `t`.
pub fn e_from_t<T: Real>(t: T) -> (T, T, T) {
    let c = (t * lit(2.0)).cos();
    let two: T = lit(2.0);
    let two_thirds: T = lit(2.0 / 3.0);
    (two - two_thirds * c, -two - two_thirds * c, lit::<T>(4.0 / 3.0) * c)
}

/// Inverse of `e₃ = (4/3) cos 2t`.
pub fn t_from_e3<T: Real>(e3: T) -> Result<T> {
    let arg = e3 * lit(0.75);
    if !(arg.abs() < T::one()) {
        return Err(Error::Domain(format!("e3 = {e3} outside (-4/3, 4/3)")));
    }
    Ok(arg.acos() * lit(0.5))
}

/// Denominator `z⁴ − 2 cos(2t) z² + 1` shared by the rational Schwarzians.
pub(crate) fn prevertex_poly<T: Real>(z: Complex<T>, t: T) -> Complex<T> {
    let z2 = z * z;
    z2 * z2 - z2 * ((t * lit(2.0)).cos() * lit(2.0)) + T::one()
}

pub(crate) fn guard_pole<T: Real>(d: Complex<T>, z: Complex<T>) -> Result<()> {
    if d.norm() < lit(1e-12) {
        Err(Error::Pole(format!("{z} is a prevertex")))
    } else {
        Ok(())
    }
}

/// `φ(z) = ℘(E(z) + ω₃)` in closed form:
/// `(4/3) cos 2t − 4 sin²(2t) z² / (z⁴ − 2 cos(2t) z² + 1)`.
pub fn phi<T: Real>(z: Complex<T>, t: T) -> Result<Complex<T>> {
    let d = prevertex_poly(z, t);
    guard_pole(d, z)?;
    let two_t = t * lit(2.0);
    let s2 = two_t.sin();
    Ok(-(z * z) * (s2 * s2 * lit(4.0)) / d + two_t.cos() * lit(4.0 / 3.0))
}
