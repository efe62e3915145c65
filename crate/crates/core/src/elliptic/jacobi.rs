//! Jacobi elliptic functions by the arithmetic-geometric mean.

use num_complex::Complex;

use crate::real::{lit, Real};

/// Arithmetic-geometric mean of two positive numbers.
pub fn agm<T: Real>(mut a: T, mut b: T) -> T {
    for _ in 0..64 {
        let an = (a + b) * lit(0.5);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= an * T::epsilon() * lit(4.0) {
            return an;
        }
        a = an;
        b = bn;
    }
    a
}

/// Complete elliptic integral of the first kind `K(m)`, parameter `m = k²`.
pub fn complete_k<T: Real>(m: T) -> T {
    assert!(m < T::one(), "K(m) diverges at m = 1");
    T::FRAC_PI_2() / agm(T::one(), (T::one() - m).sqrt())
}

/// Real `(sn, cn, dn)(u | m)` for `0 ≤ m ≤ 1` by descending Landen transformation.
pub fn sncndn<T: Real>(u: T, m: T) -> (T, T, T) {
    let tol: T = lit::<T>(1e-14).max(T::epsilon() * lit(4.0));
    if m <= T::epsilon() {
        // first-order correction in m
        let (s, c) = (u.sin(), u.cos());
        let corr = m * (u - s * c) * lit(0.25);
        return (s - corr * c, c + corr * s, T::one() - m * s * s * lit(0.5));
    }
    if m >= T::one() - T::epsilon() {
        let sech = T::one() / u.cosh();
        return (u.tanh(), sech, sech);
    }
    let mut a = [T::zero(); 24];
    let mut c = [T::zero(); 24];
    a[0] = T::one();
    let mut b = (T::one() - m).sqrt();
    c[0] = m.sqrt();
    let mut n = 0;
    while n < 23 {
        let an = (a[n] + b) * lit(0.5);
        let cn = (a[n] - b) * lit(0.5);
        b = (a[n] * b).sqrt();
        n += 1;
        a[n] = an;
        c[n] = cn;
        if cn.abs() <= tol * an {
            break;
        }
    }
    let mut phi = T::from_f64(2f64.powi(n as i32)).unwrap() * a[n] * u;
    for j in (1..=n).rev() {
        let s = (c[j] / a[j] * phi.sin()).max(-T::one()).min(T::one());
        phi = (phi + s.asin()) * lit(0.5);
    }
    let sn = phi.sin();
    let cn = phi.cos();
    let dn = (T::one() - m * sn * sn).max(T::zero()).sqrt();
    (sn, cn, dn)
}

/// `sn(x + iy | m)` as an unreduced fraction `(numerator, denominator)`.
///
/// Returning the pair lets callers form `1/sn²` at the zeros of the
/// denominator (poles of sn) without overflow.
pub fn sn_complex_parts<T: Real>(z: Complex<T>, m: T) -> (Complex<T>, T) {
    let (s, c, d) = sncndn(z.re, m);
    let (s1, c1, d1) = sncndn(z.im, T::one() - m);
    let den = c1 * c1 + m * s * s * s1 * s1;
    (Complex::new(s * d1, c * d * s1 * c1), den)
}

/// Complex `sn(z | m)`.
pub fn sn_complex<T: Real>(z: Complex<T>, m: T) -> Complex<T> {
    let (num, den) = sn_complex_parts(z, m);
    num / den
}
