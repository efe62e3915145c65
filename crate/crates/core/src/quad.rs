//! Quadrature primitives: Gauss-Legendre rules, an adaptive bisection driver,
//! and a fourth-order cumulative rule for uniformly sampled data.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds an `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nt: T = lit(n as f64);
        let half = n.div_ceil(2);
        for i in 0..half {
            // Tricomi initial guess.
            let mut x = (T::PI() * (lit::<T>(i as f64) + lit(0.75)) / (nt + lit(0.5))).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= T::epsilon() * lit(4.0) {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != T::zero() { d } else { dp };
            let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) * lit(0.5);
        let mid = (a + b) * lit(0.5);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        self.mapped(a, b).fold(T::zero(), |acc, (x, w)| acc + w * f(x))
    }

    pub fn integrate_complex<F: FnMut(T) -> Complex<T>>(&self, a: T, b: T, mut f: F) -> Complex<T> {
        self.mapped(a, b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, w)| acc + f(x) * w)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kt: T = lit(k as f64);
        let p2 = ((lit::<T>(2.0) * kt - T::one()) * x * p1 - (kt - T::one()) * p0) / kt;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nt: T = lit(n as f64);
    let d = nt * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Adaptive Gauss-Legendre integration of a complex-valued integrand.
///
/// Each panel is accepted when a 15-point estimate and the sum of two 15-point
/// half-panel estimates agree to `tol` (absolute plus relative), or to
/// rounding level in the panel itself.
pub fn adaptive_complex<T, F>(f: F, a: T, b: T, tol: T, max_panels: usize) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    let rule = GaussLegendre::<T>::new(15);
    let mut stack = vec![(a, b, rule.integrate_complex(a, b, &f))];
    let mut total = Complex::new(T::zero(), T::zero());
    let mut panels = 0usize;
    let width = (b - a).abs();
    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = (lo + hi) * lit(0.5);
        let left = rule.integrate_complex(lo, mid, &f);
        let right = rule.integrate_complex(mid, hi, &f);
        let refined = left + right;
        let local_tol = tol * ((hi - lo).abs() / width).max(lit(1e-6)) * (T::one() + refined.norm());
        let rounding = T::epsilon() * lit(64.0) * (left.norm() + right.norm());
        if (refined - whole).norm() <= local_tol.max(rounding) || (hi - lo).abs() <= width * lit(1e-12) {
            total += refined;
            continue;
        }
        panels += 1;
        if panels > max_panels {
            return Err(Error::Accuracy(format!("adaptive quadrature exceeded {max_panels} panel splits")));
        }
        stack.push((lo, mid, left));
        stack.push((mid, hi, right));
    }
    Ok(total)
}

/// Real-valued convenience wrapper around [`adaptive_complex`].
pub fn adaptive<T, F>(f: F, a: T, b: T, tol: T, max_panels: usize) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    adaptive_complex(|x| Complex::new(f(x), T::zero()), a, b, tol, max_panels).map(|c| c.re)
}

/// Cumulative integral `G_j = ∫_0^{x_j} g` of samples on a uniform grid.
///
/// Interior intervals use the four-point cubic rule
/// `h/24 (-g_{j-1} + 13 g_j + 13 g_{j+1} - g_{j+2})`; the first and last
/// intervals use the matching one-sided cubic rules. Exact for cubics.
pub fn cumulative<T: Real>(g: &[T], h: T) -> Vec<T> {
    let m = g.len() - 1;
    assert!(m >= 3, "cumulative rule needs at least 3 intervals");
    let c = h / lit(24.0);
    let thirteen: T = lit(13.0);
    let mut out = Vec::with_capacity(m + 1);
    out.push(T::zero());
    let mut acc = T::zero();
    for j in 0..m {
        let piece = if j == 0 {
            c * (lit::<T>(9.0) * g[0] + lit::<T>(19.0) * g[1] - lit::<T>(5.0) * g[2] + g[3])
        } else if j == m - 1 {
            c * (g[m - 3] - lit::<T>(5.0) * g[m - 2] + lit::<T>(19.0) * g[m - 1] + lit::<T>(9.0) * g[m])
        } else {
            c * (-g[j - 1] + thirteen * g[j] + thirteen * g[j + 1] - g[j + 2])
        };
        acc += piece;
        out.push(acc);
    }
    out
}
