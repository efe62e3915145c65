//! Zeros of `℘` for normalized rectangular lattices, by two independent
//! elliptic-integral formulas.

use num_complex::Complex;

use super::jacobi::complete_k;
use super::weierstrass::HalfPeriods;
use crate::error::{Error, Result};
use crate::quad::adaptive;
use crate::real::{lit, to_f64, Real};

const AGREEMENT: f64 = 1e-8;

/// Below this `|e₃|` the zero is taken to be `ω₃` itself; the residual
/// `|℘(ω₃)| = |e₃|` is then far below any reported tolerance.
const SQUARE_LIMIT: f64 = 1e-12;

fn square_limit<T: Real>(hp: &HalfPeriods<T>) -> bool {
    hp.e3.abs() < lit(SQUARE_LIMIT)
}

fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T) -> Result<T> {
    adaptive(f, a, b, lit::<T>(1e-14).max(T::epsilon() * lit(8.0)), 4000)
}

fn require_normalized<T: Real>(hp: &HalfPeriods<T>) -> Result<()> {
    if hp.normalized && (hp.e1 - hp.e2 - lit(4.0)).abs() < lit(1e-8) {
        Ok(())
    } else {
        Err(Error::Domain("zero formulas need a normalized half-period pair".into()))
    }
}

/// The pair for the lattice `iΛ`, where `℘(iz; iΛ) = −℘(z; Λ)`.
fn turned<T: Real>(hp: &HalfPeriods<T>) -> HalfPeriods<T> {
    HalfPeriods {
        omega1: hp.omega2_mag,
        omega2_mag: hp.omega1,
        e1: -hp.e2,
        e2: -hp.e1,
        e3: -hp.e3,
        tau: T::one() / hp.tau,
        normalized: hp.normalized,
    }
}

/// Zero of `℘` through the inversion of `sn² = (e₁ − e₂)/(−e₂)`.
///
/// The target value `V > 1` of `sn` is reached on the right edge `K + iy` when
/// `m V² ≤ 1` and on the top edge `x + iK′` otherwise.
pub fn wp_zero_sn<T: Real>(hp: &HalfPeriods<T>) -> Result<Complex<T>> {
    require_normalized(hp)?;
    if square_limit(hp) {
        return Ok(hp.omega3());
    }
    if hp.e3 > T::zero() {
        // the integrands degenerate as t → 0; use the lattice turned by i
        let z = wp_zero_sn(&turned(hp))?;
        return Ok(Complex::new(z.im, z.re));
    }
    let diff = hp.e1 - hp.e2;
    let m = hp.modulus_sq();
    let v_top = (diff / -hp.e2).sqrt();
    let k = complete_k(m);
    let kp = complete_k(T::one() - m);
    let half: T = lit(0.5);
    // 1 − m V² without cancellation
    let gap = -hp.e3 * lit(2.0) / (hp.e3 + lit(4.0));
    let u = if gap >= T::zero() {
        // v = 1 + (V − 1) sin²(θ/2)
        let span = v_top - T::one();
        let j = integrate(
            |th: T| {
                let (s, c) = (th * half).sin_cos();
                let v = T::one() + span * s * s;
                span.sqrt() * c
                    / ((v + T::one()).sqrt() * (gap + m * span * c * c * (v_top + v)).max(T::zero()).sqrt())
            },
            T::zero(),
            T::PI(),
        )?;
        Complex::new(k, j)
    } else {
        let lo = T::one() / m.sqrt();
        let span = -gap / m / (v_top + lo);
        let j = integrate(
            |th: T| {
                let (s, c) = (th * half).sin_cos();
                let v = lo + span * s * s;
                span.sqrt() * c / ((v * v - T::one()).sqrt() * m.sqrt() * (v + lo).sqrt())
            },
            T::zero(),
            T::PI(),
        )?;
        Complex::new(k - j, kp)
    };
    Ok(u / diff.sqrt())
}

/// Zero of `℘` as `ω₃` minus an integral of `E` along the imaginary axis
/// from the root `y₀` of `φ(−i y₀) = 0`.
///
/// For `cos 2t > 0` the root is imaginary and the zero moves to the top edge.
pub fn wp_zero_phi<T: Real>(hp: &HalfPeriods<T>) -> Result<Complex<T>> {
    require_normalized(hp)?;
    let omega3 = hp.omega3();
    if square_limit(hp) {
        return Ok(omega3);
    }
    let c = hp.e3 * lit(0.75);
    let s = (T::one() - c * c).sqrt();
    // rationalized form of (−3 + c² + s√(9 − c²)) / (2c)
    let y0_sq = -c * lit(2.0) / (s * (lit::<T>(9.0) - c * c).sqrt() + lit(3.0) - c * c);
    let m = hp.modulus_sq();
    let half: T = lit(0.5);
    if y0_sq > T::zero() {
        // v = sin φ, upper limit asin(2y₀/(1+y₀²)) = 2 atan y₀
        let top = y0_sq.sqrt().atan() * lit(2.0);
        let j = integrate(
            |p: T| {
                let (sn, cs) = p.sin_cos();
                T::one() / (cs * cs + m * sn * sn).sqrt()
            },
            T::zero(),
            top,
        )?;
        Ok(omega3 - Complex::new(T::zero(), j * half))
    } else {
        // w = tan φ, upper limit atan(2η/(1−η²)) = 2 atan η
        let top = (-y0_sq).sqrt().atan() * lit(2.0);
        let j = integrate(
            |p: T| {
                let (sn, cs) = p.sin_cos();
                T::one() / (cs * cs + (T::one() - m) * sn * sn).sqrt()
            },
            T::zero(),
            top,
        )?;
        Ok(omega3 - Complex::new(j * half, T::zero()))
    }
}

/// Zero of `℘` in the closed upper-right quarter of the period rectangle.
///
/// Both formulas are evaluated; disagreement beyond `1e-8` is an accuracy error.
pub fn wp_zero<T: Real>(hp: &HalfPeriods<T>) -> Result<Complex<T>> {
    let a = wp_zero_sn(hp)?;
    let b = wp_zero_phi(hp)?;
    let gap = to_f64((a - b).norm());
    let scale = to_f64(hp.omega3().norm());
    if gap > AGREEMENT * scale.max(1.0) {
        return Err(Error::Accuracy(format!("℘-zero formulas disagree by {gap:e}")));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::wp;
    use std::f64::consts::PI;

    #[test]
    fn square_lattice_zero_is_omega3() {
        let hp = HalfPeriods::for_prevertex(PI / 4.0).unwrap();
        let z = wp_zero(&hp).unwrap();
        assert!((z - hp.omega3()).norm() < 1e-10);
        let s = wp_zero_sn(&hp).unwrap();
        assert!((s - hp.omega3()).norm() < 1e-10, "{s} {}", hp.omega3());
    }

    #[test]
    fn routes_agree_and_vanish() {
        let extreme = [0.005, 0.02, 1.55, 1.565];
        let moderate = [
            PI / 8.0,
            PI / 6.0,
            0.7,
            0.9,
            PI / 3.0,
            3.0 * PI / 8.0,
            0.1,
            1.5,
            PI / 4.0 + 1e-4,
            PI / 4.0 - 1e-7,
        ];
        for &t in moderate.iter().chain(&extreme) {
            let hp = HalfPeriods::for_prevertex(t).unwrap();
            let a = wp_zero_sn(&hp).unwrap();
            let b = wp_zero_phi(&hp).unwrap();
            assert!((a - b).norm() < 1e-10, "t={t}: {a} vs {b}");
            assert!(wp(b, &hp).unwrap().norm() < 1e-9, "t={t}");
            assert!(b.re >= 0.0 && b.re <= hp.omega1 + 1e-12);
            assert!(b.im >= 0.0 && b.im <= hp.omega2_mag + 1e-12);
        }
    }

    #[test]
    fn complementary_prevertex_swaps_coordinates() {
        let z6 = wp_zero(&HalfPeriods::for_prevertex(PI / 6.0).unwrap()).unwrap();
        let z3 = wp_zero(&HalfPeriods::for_prevertex(PI / 3.0).unwrap()).unwrap();
        assert!((z3.re - z6.im).abs() < 1e-10 && (z3.im - z6.re).abs() < 1e-10);
    }

    #[test]
    fn rejects_unnormalized() {
        let mut hp = HalfPeriods::for_prevertex(0.5f64).unwrap();
        hp.normalized = false;
        assert!(wp_zero(&hp).is_err());
    }
}
