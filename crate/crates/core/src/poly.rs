//! Real polynomials and scalar root bracketing.

use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    pub coeffs: Vec<T>,
}

impl<T: Real> Poly<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &a| acc * x + a)
    }

    pub fn derivative(&self) -> Self {
        let c = self.coeffs.iter().enumerate().skip(1).map(|(k, &a)| a * lit(k as f64)).collect();
        Self { coeffs: c }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self { coeffs: vec![] };
        }
        let mut c = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self { coeffs: c }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&a| a * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &Vec<T>, k: usize| v.get(k).copied().unwrap_or(T::zero());
        Self { coeffs: (0..n).map(|k| get(&self.coeffs, k) + get(&other.coeffs, k)).collect() }
    }

    pub fn add_constant(&self, c: T) -> Self {
        let mut p = self.clone();
        if p.coeffs.is_empty() {
            p.coeffs.push(T::zero());
        }
        p.coeffs[0] += c;
        p
    }

    /// `p(−x)`.
    pub fn reflect(&self) -> Self {
        let c = self.coeffs.iter().enumerate().map(|(k, &a)| if k % 2 == 1 { -a } else { a }).collect();
        Self { coeffs: c }
    }

    /// Real roots in `[lo, hi]` located by sign changes on `samples` cells and
    /// refined by Newton steps safeguarded by bisection.
    pub fn real_roots_in(&self, lo: T, hi: T, samples: usize) -> Vec<T> {
        let d = self.derivative();
        sign_changes(|x| Ok(self.eval(x)), lo, hi, samples)
            .unwrap_or_default()
            .into_iter()
            .filter_map(|(a, b)| newton_bisect(|x| (self.eval(x), d.eval(x)), a, b, lit(1e-15)).ok())
            .collect()
    }
}

/// Cells `[a, b]` of a uniform subdivision of `[lo, hi]` across which `f`
/// changes sign (an exact zero at a node is reported as a degenerate cell).
pub fn sign_changes<T: Real, F: FnMut(T) -> Result<T>>(
    mut f: F,
    lo: T,
    hi: T,
    samples: usize,
) -> Result<Vec<(T, T)>> {
    let n = samples.max(1);
    let mut out = Vec::new();
    let step = (hi - lo) / lit(n as f64);
    let mut xa = lo;
    let mut fa = f(xa)?;
    for k in 1..=n {
        let xb = if k == n { hi } else { lo + step * lit(k as f64) };
        let fb = f(xb)?;
        if fa == T::zero() {
            out.push((xa, xa));
        } else if fa * fb < T::zero() {
            out.push((xa, xb));
        }
        xa = xb;
        fa = fb;
    }
    if fa == T::zero() {
        out.push((xa, xa));
    }
    Ok(out)
}

/// Bisection with secant acceleration (Illinois variant) on a bracket.
pub fn bracket_root<T: Real, F: FnMut(T) -> Result<T>>(mut f: F, a: T, b: T, tol: T) -> Result<T> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa * fb > T::zero() {
        return Err(Error::NoSolution(format!("no sign change on [{a}, {b}]")));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a.min(b) && c < a.max(b) { c } else { (a + b) * lit(0.5) };
        let fc = f(c)?;
        if fc == T::zero() || (b - a).abs() <= tol * (T::one() + c.abs()) {
            return Ok(c);
        }
        if fc * fb < T::zero() {
            a = b;
            fa = fb;
            b = c;
            fb = fc;
            side = 0;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= lit(0.5);
            }
            side = 1;
        }
    }
    Ok((a + b) * lit(0.5))
}

/// Newton iteration kept inside the bracket `[a, b]`, falling back to
/// bisection whenever a step leaves it.
pub fn newton_bisect<T: Real, F: FnMut(T) -> (T, T)>(mut f: F, a: T, b: T, tol: T) -> Result<T> {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let (flo, fhi) = (f(lo).0, f(hi).0);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if flo * fhi > T::zero() {
        return Err(Error::NoSolution(format!("no sign change on [{lo}, {hi}]")));
    }
    let rising = fhi > T::zero();
    let mut x = (lo + hi) * lit(0.5);
    for _ in 0..200 {
        let (fx, dx) = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if (fx > T::zero()) == rising {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - fx / dx;
        let next = if dx != T::zero() && newton > lo && newton < hi { newton } else { (lo + hi) * lit(0.5) };
        if (next - x).abs() <= tol * (T::one() + x.abs()) || hi - lo <= tol * (T::one() + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_roots() {
        // (x − 1)(x + 2)(x − 0.5)
        let p = Poly::new(vec![-1.0, 1.0]).mul(&Poly::new(vec![2.0, 1.0])).mul(&Poly::new(vec![-0.5, 1.0]));
        let r = p.real_roots_in(-3.0, 3.0, 100);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-2.0f64, 0.5, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn reflect_and_derivative() {
        let p = Poly::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.reflect().eval(2.0), p.eval(-2.0));
        assert_eq!(p.derivative().coeffs, vec![2.0, 6.0]);
        assert_eq!(p.add_constant(-1.0).eval(0.0), 0.0);
        assert_eq!(p.add(&Poly::new(vec![0.0, 0.0, 0.0, 1.0])).eval(1.0), 7.0);
    }

    #[test]
    fn bracketing_solvers() {
        let r = bracket_root(|x: f64| Ok(x.cos() - x), 0.0, 1.0, 1e-15).unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-14);
        let r = newton_bisect(|x: f64| (x * x - 2.0, 2.0 * x), 0.0, 5.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(bracket_root(|x: f64| Ok(x * x + 1.0), -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn sign_change_cells() {
        let cells = sign_changes(|x: f64| Ok(x.sin()), 0.5, 10.0, 50).unwrap();
        assert_eq!(cells.len(), 3);
    }
}
