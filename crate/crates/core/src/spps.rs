//! Spectral parameter power series for `y″ + ψ₀ y = λ ψ₁ y` on `[0, L]`.
//!
//! A nonvanishing seed solution `y∞` at `λ∞` turns the two normalized
//! solutions into power series in `Δ = λ − λ∞` whose coefficients are iterated
//! integrals built from `1/y∞²` and `ψ₁ y∞²`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{linear_pair_on_segment, rk4_samples, StepControl};
use crate::quad::cumulative;
use crate::real::{lit, to_f64, Real};

pub const DEFAULT_INTERVALS: usize = 2048;
pub const DEFAULT_DEGREE: usize = 60;
pub const MAX_DEGREE: usize = 480;
pub const TAIL_TOLERANCE: f64 = 1e-12;

type CoefficientFn<T> = dyn Fn(T) -> Result<(T, T)> + Send + Sync;

/// The coefficient functions `(ψ₀, ψ₁)` on `[0, L]`, with samples on a uniform
/// grid at half the basis spacing.
#[derive(Clone)]
pub struct CoefficientPair<T> {
    pub length: T,
    pub intervals: usize,
    psi0: Vec<T>,
    psi1: Vec<T>,
    eval: Arc<CoefficientFn<T>>,
}

impl<T> fmt::Debug for CoefficientPair<T>
where
    T: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientPair")
            .field("length", &self.length)
            .field("intervals", &self.intervals)
            .finish_non_exhaustive()
    }
}

impl<T: Real> CoefficientPair<T> {
    /// Samples `f(x) = (ψ₀(x), ψ₁(x))` on `2·intervals + 1` points.
    pub fn new<F>(length: T, intervals: usize, f: F) -> Result<Self>
    where
        F: Fn(T) -> Result<(T, T)> + Send + Sync + 'static,
    {
        if intervals < 3 {
            return Err(Error::Domain(format!("grid needs at least 3 intervals, got {intervals}")));
        }
        if !(length > T::zero()) {
            return Err(Error::Domain(format!("segment length {length} must be positive")));
        }
        let fine = 2 * intervals;
        let h = length / lit(fine as f64);
        let mut psi0 = Vec::with_capacity(fine + 1);
        let mut psi1 = Vec::with_capacity(fine + 1);
        for j in 0..=fine {
            let x = h * lit(j as f64);
            let (a, b) = f(x)?;
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::Pole(format!("coefficient not finite at x = {x}")));
            }
            psi0.push(a);
            psi1.push(b);
        }
        Ok(Self { length, intervals, psi0, psi1, eval: Arc::new(f) })
    }

    /// Coefficients at an arbitrary point of the segment.
    pub fn at(&self, x: T) -> Result<(T, T)> {
        (self.eval)(x)
    }

    pub fn step(&self) -> T {
        self.length / lit(self.intervals as f64)
    }

    /// `ψ₁` at the basis grid nodes.
    fn psi1_nodes(&self) -> impl Iterator<Item = T> + '_ {
        self.psi1.iter().step_by(2).copied()
    }
}

/// Iterated integrals `I₀ = 1`, `Iₙ = ∫₀ˣ Iₙ₋₁ qₙ₋₁` with `q` alternating
/// between `q0` (even index) and `q1` (odd index). Returns `I₀..=I_n`.
pub fn iterated_integrals<T: Real>(q0: &[T], q1: &[T], n: usize, h: T) -> Vec<Vec<T>> {
    assert_eq!(q0.len(), q1.len());
    let mut out = Vec::with_capacity(n + 1);
    out.push(vec![T::one(); q0.len()]);
    extend_integrals(&mut out, q0, q1, n, h);
    out
}

fn extend_integrals<T: Real>(out: &mut Vec<Vec<T>>, q0: &[T], q1: &[T], n: usize, h: T) {
    let mut integrand = vec![T::zero(); q0.len()];
    while out.len() <= n {
        let k = out.len() - 1;
        let q = if k.is_multiple_of(2) { q0 } else { q1 };
        let prev = &out[k];
        for j in 0..q.len() {
            integrand[j] = prev[j] * q[j];
        }
        out.push(cumulative(&integrand, h));
    }
}

/// Endpoint values of the normalized solutions at one parameter value.
///
/// `y1(0) = 1, y1′(0) = 0` and `y2(0) = 0, y2′(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointData<T> {
    pub lambda: T,
    pub y1: T,
    pub y1p: T,
    pub y2: T,
    pub y2p: T,
    /// Largest neglected-term estimate relative to the sums; zero for the
    /// step integrator.
    pub tail: T,
}

impl<T: Real> EndpointData<T> {
    pub fn wronskian(&self) -> T {
        self.y1 * self.y2p - self.y1p * self.y2
    }

    /// Largest componentwise deviation from another evaluation.
    pub fn max_diff(&self, other: &Self) -> T {
        (self.y1 - other.y1)
            .abs()
            .max((self.y1p - other.y1p).abs())
            .max((self.y2 - other.y2).abs())
            .max((self.y2p - other.y2p).abs())
    }
}

/// Endpoint values as polynomials in `Δ = λ − λ∞` (coefficients ascending).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointSeries<T> {
    pub lambda_inf: T,
    pub y1: Vec<T>,
    pub y1p: Vec<T>,
    pub y2: Vec<T>,
    pub y2p: Vec<T>,
}

pub(crate) fn horner<T: Real>(c: &[T], x: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &a| acc * x + a)
}

/// Iterated-integral arrays for a fixed seed.
#[derive(Debug, Clone)]
pub struct SppsBasis<T> {
    pub lambda_inf: T,
    pub degree: usize,
    coeffs: CoefficientPair<T>,
    y_inf: Vec<T>,
    y_inf_p: Vec<T>,
    q0: Vec<T>,
    q1: Vec<T>,
    /// Generated by `(q₁, q₀)`.
    x_tilde: Vec<Vec<T>>,
    /// Generated by `(q₀, q₁)`.
    x: Vec<Vec<T>>,
    series: EndpointSeries<T>,
}

impl<T: Real> SppsBasis<T> {
    /// Builds the basis with `degree` powers of `Δ`.
    pub fn build(c: &CoefficientPair<T>, lambda_inf: T, degree: usize) -> Result<Self> {
        if degree < 1 {
            return Err(Error::Domain("series degree must be at least 1".into()));
        }
        let q_half: Vec<T> = c.psi0.iter().zip(&c.psi1).map(|(&a, &b)| a - lambda_inf * b).collect();
        let samples = rk4_samples(&q_half, c.length, (T::one(), T::zero()));
        let h = c.step();
        let mut prev = T::one();
        for (j, &(y, _)) in samples.iter().enumerate() {
            if !(y.abs() > lit::<T>(1e-8)) || (y * prev < T::zero()) {
                return Err(Error::Seed { at: to_f64(h * lit(j as f64)) });
            }
            prev = y;
        }
        let y_inf: Vec<T> = samples.iter().map(|s| s.0).collect();
        let y_inf_p: Vec<T> = samples.iter().map(|s| s.1).collect();
        let q0: Vec<T> = y_inf.iter().map(|&y| T::one() / (y * y)).collect();
        let q1: Vec<T> = y_inf.iter().zip(c.psi1_nodes()).map(|(&y, p)| p * y * y).collect();
        let x_tilde = iterated_integrals(&q1, &q0, 2 * degree + 1, h);
        let x = iterated_integrals(&q0, &q1, 2 * degree + 1, h);
        let mut b = Self {
            lambda_inf,
            degree,
            coeffs: c.clone(),
            y_inf,
            y_inf_p,
            q0,
            q1,
            x_tilde,
            x,
            series: EndpointSeries { lambda_inf, y1: vec![], y1p: vec![], y2: vec![], y2p: vec![] },
        };
        b.series = b.compute_series();
        Ok(b)
    }

    /// A copy with twice the degree (capped at [`MAX_DEGREE`]).
    pub fn escalated(&self) -> Result<Self> {
        if self.degree >= MAX_DEGREE {
            return Err(Error::Truncation { tail: f64::INFINITY });
        }
        let degree = (self.degree * 2).min(MAX_DEGREE);
        let h = self.coeffs.step();
        let mut b = self.clone();
        extend_integrals(&mut b.x_tilde, &self.q1, &self.q0, 2 * degree + 1, h);
        extend_integrals(&mut b.x, &self.q0, &self.q1, 2 * degree + 1, h);
        b.degree = degree;
        b.series = b.compute_series();
        Ok(b)
    }

    fn compute_series(&self) -> EndpointSeries<T> {
        let end = self.y_inf.len() - 1;
        let (y, yp) = (self.y_inf[end], self.y_inf_p[end]);
        let at = |arr: &Vec<Vec<T>>, n: usize| arr[n][end];
        let n = self.degree;
        let mut s = EndpointSeries {
            lambda_inf: self.lambda_inf,
            y1: Vec::with_capacity(n + 1),
            y1p: Vec::with_capacity(n + 1),
            y2: Vec::with_capacity(n + 1),
            y2p: Vec::with_capacity(n + 1),
        };
        for k in 0..=n {
            let xt_even = at(&self.x_tilde, 2 * k);
            let x_odd = at(&self.x, 2 * k + 1);
            s.y1.push(y * xt_even);
            s.y2.push(y * x_odd);
            let xt_odd = if k >= 1 { at(&self.x_tilde, 2 * k - 1) } else { T::zero() };
            s.y1p.push(yp * xt_even + xt_odd / y);
            s.y2p.push(yp * x_odd + at(&self.x, 2 * k) / y);
        }
        s
    }

    pub fn coefficients(&self) -> &CoefficientPair<T> {
        &self.coeffs
    }

    /// Seed solution samples `(y∞, y∞′)` on the basis grid.
    pub fn seed(&self) -> (&[T], &[T]) {
        (&self.y_inf, &self.y_inf_p)
    }

    /// `X̃ₙ` on the grid (generated by `(ψ₁y∞², 1/y∞²)`).
    pub fn x_tilde(&self, n: usize) -> &[T] {
        &self.x_tilde[n]
    }

    /// `Xₙ` on the grid (generated by `(1/y∞², ψ₁y∞²)`).
    pub fn x(&self, n: usize) -> &[T] {
        &self.x[n]
    }

    pub fn endpoint_series(&self) -> &EndpointSeries<T> {
        &self.series
    }

    /// Sums the series at `λ`; fails when the last retained terms exceed the
    /// tail tolerance relative to the sums.
    pub fn eval_solutions(&self, lambda: T) -> Result<EndpointData<T>> {
        let d = lambda - self.lambda_inf;
        let s = &self.series;
        let vals = [horner(&s.y1, d), horner(&s.y1p, d), horner(&s.y2, d), horner(&s.y2p, d)];
        let n = self.degree;
        let dn = d.powi(n as i32);
        let lasts = [s.y1[n], s.y1p[n], s.y2[n], s.y2p[n]];
        let mut tail = T::zero();
        for (v, l) in vals.iter().zip(lasts) {
            tail = tail.max((l * dn).abs() / v.abs().max(T::one()));
        }
        if !tail.is_finite() || tail > lit(TAIL_TOLERANCE) || vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Truncation { tail: to_f64(tail) });
        }
        Ok(EndpointData { lambda, y1: vals[0], y1p: vals[1], y2: vals[2], y2p: vals[3], tail })
    }

    /// [`Self::eval_solutions`], escalating the degree on truncation failures.
    pub fn eval_escalating(&mut self, lambda: T) -> Result<EndpointData<T>> {
        loop {
            match self.eval_solutions(lambda) {
                Err(Error::Truncation { .. }) if self.degree < MAX_DEGREE => {
                    *self = self.escalated()?;
                }
                r => return r,
            }
        }
    }
}

/// The same endpoint data by adaptive Dormand-Prince integration.
pub fn ode_oracle<T: Real>(c: &CoefficientPair<T>, lambda: T) -> Result<EndpointData<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let out = linear_pair_on_segment(
        |z: Complex<T>| {
            let (a, b) = c.at(z.re)?;
            Ok(Complex::new(a - lambda * b, T::zero()))
        },
        zero,
        Complex::new(c.length, T::zero()),
        &[T::one()],
        [one, zero, zero, one],
        &StepControl::default(),
    )?;
    let y = out[0];
    Ok(EndpointData { lambda, y1: y[0].re, y1p: y[1].re, y2: y[2].re, y2p: y[3].re, tail: T::zero() })
}
