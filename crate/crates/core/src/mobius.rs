//! Möbius transformations as unimodular 2×2 complex matrices.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// `z ↦ (a z + b)/(c z + d)` with `ad − bc = 1`.
///
/// Serialized as the matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[[Complex<T>; 2]; 2]", from = "[[Complex<T>; 2]; 2]")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct MobiusTransform<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Real> From<MobiusTransform<T>> for [[Complex<T>; 2]; 2] {
    fn from(m: MobiusTransform<T>) -> Self {
        [[m.a, m.b], [m.c, m.d]]
    }
}

impl<T: Real> From<[[Complex<T>; 2]; 2]> for MobiusTransform<T> {
    fn from(m: [[Complex<T>; 2]; 2]) -> Self {
        Self { a: m[0][0], b: m[0][1], c: m[1][0], d: m[1][1] }
    }
}

impl<T: Real> MobiusTransform<T> {
    /// Scales the matrix to unit determinant.
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() <= T::epsilon() * (a.norm() * d.norm() + b.norm() * c.norm()) {
            return Err(Error::DegenerateGroup("singular Möbius matrix".into()));
        }
        let r = det.sqrt();
        Ok(Self { a: a / r, b: b / r, c: c / r, d: d / r })
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
        Self { a: o, b: z, c: z, d: o }
    }

    pub fn apply(&self, z: Complex<T>) -> Complex<T> {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn det(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex<T> {
        self.a + self.d
    }

    /// Roots of `c z² + (d − a) z − b = 0`; both infinite when `c = 0`
    /// except for the finite one of an affine map.
    pub fn fixed_points(&self) -> [Complex<T>; 2] {
        let two: T = lit(2.0);
        let diff = self.a - self.d;
        if self.c.norm() <= T::epsilon() * (self.a.norm() + self.d.norm()) {
            let inf = Complex::new(T::infinity(), T::zero());
            let finite = if diff.norm() > T::zero() { self.b / (self.d - self.a) } else { inf };
            return [finite, inf];
        }
        let disc = (diff * diff + self.b * self.c * lit::<T>(4.0)).sqrt();
        [(diff + disc) / (self.c * two), (diff - disc) / (self.c * two)]
    }

    /// Largest deviation of `|T(e^{iθ})|` from 1 over `n` equally spaced angles.
    pub fn disk_deviation(&self, n: usize) -> T {
        (0..n)
            .map(|k| {
                let th = T::TAU() * lit(k as f64) / lit(n as f64);
                (self.apply(Complex::from_polar(T::one(), th)).norm() - T::one()).abs()
            })
            .fold(T::zero(), T::max)
    }
}
