//! Universal covering of the twice punctured disk `𝔻 − {−a, a}` by the
//! zero-angle symmetric quadrilateral map, its parabolic generators and the
//! simple closed geodesic around both punctures.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::MobiusTransform;
use crate::real::{lit, to_f64, Real};
use crate::schwarzian::AccessoryParams;
use crate::solver::{map_point, DiskSolver, SolverOptions};

/// Puncture positions of the rows of the reference table.
pub const TABLE_A: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Prevertex angle `asin((1 − a²)/(1 + a²))` for punctures at `±a`.
pub fn t_from_a<T: Real>(a: T) -> Result<T> {
    if !(a > T::zero() && a < T::one()) {
        return Err(Error::Domain(format!("puncture position {a} outside (0, 1)")));
    }
    // cos t = 2a/(1 + a²); the two-argument form keeps t < π/2 for tiny a
    Ok((T::one() - a * a).atan2(a * lit(2.0)))
}

/// `T₁(z) = (iz + 1)/(z + i)`, upper half-plane onto the disk.
pub fn t1<T: Real>(z: Complex<T>) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    (i * z + T::one()) / (z + i)
}

/// `T₁⁻¹(w) = (1 − iw)/(w − i)`.
pub fn t1_inv<T: Real>(w: Complex<T>) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    (-(i * w) + T::one()) / (w - i)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct CoverData<T> {
    pub a: T,
    pub t: T,
    pub lambda_max: T,
    pub w1: T,
    pub kappa1: T,
    /// Image of the prevertex, where the two vertices meet on the real axis.
    pub vertex: T,
    pub s: T,
    #[serde(rename = "Hprime0")]
    pub hprime0: T,
    #[serde(rename = "A1")]
    pub a1: MobiusTransform<T>,
    #[serde(rename = "A2")]
    pub a2: MobiusTransform<T>,
    /// `|tr(A₁ A₂⁻¹)|`.
    pub trace_comm: T,
    pub fixed_points: [Complex<T>; 2],
    pub geodesic_length: T,
}

impl<T: Real> CoverData<T> {
    pub fn params(&self) -> AccessoryParams<T> {
        AccessoryParams { alpha: T::zero(), t: self.t, lambda: self.lambda_max }
    }

    pub fn s_over_pi(&self) -> T {
        self.s / T::PI()
    }
}

/// Parabolic generators: `A₁` fixes 1 and sends `e^{−is}` to `e^{is}`;
/// `A₂(−ζ̄) = −conj(A₁(ζ))`.
pub fn generators<T: Real>(s: T) -> Result<(MobiusTransform<T>, MobiusTransform<T>)> {
    if !(s > T::zero() && s < T::PI()) {
        return Err(Error::DegenerateGroup(format!("angle {s} outside (0, π)")));
    }
    let c = |re: f64, im: f64| Complex::new(lit::<T>(re), lit::<T>(im));
    // Cayley map to the upper half-plane with 1 ↦ ∞; A₁ is a real translation there
    let cayley = MobiusTransform::new(c(0.0, 1.0), c(0.0, 1.0), c(-1.0, 0.0), c(1.0, 0.0))?;
    let shift = Complex::new(-lit::<T>(2.0) / (s * lit(0.5)).tan(), T::zero());
    let translate = MobiusTransform::new(c(1.0, 0.0), shift, c(0.0, 0.0), c(1.0, 0.0))?;
    let a1 = cayley.inverse().compose(&translate).compose(&cayley);
    let a2 = MobiusTransform { a: a1.a.conj(), b: -a1.b.conj(), c: -a1.c.conj(), d: a1.d.conj() };
    Ok((a1, a2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorData<T> {
    /// `|tr(A₁ A₂⁻¹)|`.
    pub trace: T,
    /// Fixed points from the eigenvectors of the matrix product.
    pub fixed_points: [Complex<T>; 2],
    /// Fixed points from the closed formula in `s`.
    pub fixed_points_closed: [Complex<T>; 2],
    /// Translation length `2 arccosh(|tr|/2)`.
    pub length: T,
}

pub fn commutator_data<T: Real>(
    a1: &MobiusTransform<T>,
    a2: &MobiusTransform<T>,
    s: T,
) -> Result<CommutatorData<T>> {
    let m = a1.compose(&a2.inverse());
    let trace = m.trace().norm();
    if trace <= lit::<T>(2.0) + lit(1e-9) {
        return Err(Error::NotHyperbolic { trace: to_f64(trace) });
    }
    let e = Complex::from_polar(T::one(), s);
    let root = (e * e * lit::<T>(2.0) + lit::<T>(2.0)).sqrt();
    let den = e + T::one();
    let closed = [(e - T::one() + root) / den, (e - T::one() - root) / den];
    let mut eig = m.fixed_points();
    if (eig[0] - closed[0]).norm() > (eig[1] - closed[0]).norm() {
        eig.swap(0, 1);
    }
    let gap = (eig[0] - closed[0]).norm().max((eig[1] - closed[1]).norm());
    if !(gap < lit(1e-9)) {
        return Err(Error::Accuracy(format!("fixed point formulas disagree by {}", to_f64(gap))));
    }
    let half: T = trace * lit(0.5);
    let length = (half + (half * half - T::one()).sqrt()).ln() * lit(2.0);
    Ok(CommutatorData { trace, fixed_points: eig, fixed_points_closed: closed, length })
}

/// Covering data for punctures at `±a`: the zero-angle map whose vertices
/// meet, the angle `s`, `H′(0)` and the generators.
pub fn cover_data<T: Real>(a: T) -> Result<CoverData<T>> {
    let t = t_from_a(a)?;
    let alpha = T::zero();
    let mut solver = DiskSolver::new(alpha, t, SolverOptions::default())?;
    let lambda_max = solver
        .upper_end()?
        .1
        .ok_or_else(|| Error::NoSolution(format!("no extremal parameter for a = {a}")))?;
    let m = solver.map_values(lambda_max)?;
    let (w1, kappa1) = (m.w1.re, m.kappa1);
    let vertex = w1 * (T::one() - lit::<T>(2.0) / kappa1);
    let s = -t1(Complex::new(w1 / vertex, T::zero())).arg();
    // f′(i) = 1/y₁(i)², and y₁ along the imaginary axis is the rotated solution
    let hprime0 = vertex * m.rotated.y1 * m.rotated.y1;
    let (a1, a2) = generators(s)?;
    let comm = commutator_data(&a1, &a2, s)?;
    Ok(CoverData {
        a,
        t,
        lambda_max,
        w1,
        kappa1,
        vertex,
        s,
        hprime0,
        a1,
        a2,
        trace_comm: comm.trace,
        fixed_points: comm.fixed_points,
        geodesic_length: comm.length,
    })
}

/// Rows for several `a`, computed in parallel, in input order.
pub fn table<T: Real>(a_values: &[T]) -> Vec<Result<CoverData<T>>> {
    a_values.par_iter().map(|&a| cover_data(a)).collect()
}

/// Inverse of the disk map at `w` by damped Newton iteration from `z0`,
/// restricted to the open unit disk.
pub fn invert_map<T: Real>(p: &AccessoryParams<T>, w: Complex<T>, z0: Complex<T>) -> Option<Complex<T>> {
    let tol = lit::<T>(1e-12) * w.norm().max(T::one());
    let mut z = z0;
    let (mut f, mut y1) = map_point(p, z).ok()?;
    for _ in 0..60 {
        let r = f - w;
        if r.norm() < tol {
            return Some(z);
        }
        let step = r * y1 * y1;
        let mut damp = T::one();
        loop {
            let zn = z - step * damp;
            if zn.norm() < T::one() {
                if let Ok((fnew, ynew)) = map_point(p, zn) {
                    if (fnew - w).norm() < r.norm() {
                        z = zn;
                        f = fnew;
                        y1 = ynew;
                        break;
                    }
                }
            }
            damp *= lit(0.5);
            if damp < lit(1e-8) {
                return None;
            }
        }
    }
    None
}

/// The closed geodesic of `𝔻 − {−a, a}` around both punctures, as a closed
/// polyline. Points where the inverse map fails to converge are `None`.
pub fn geodesic_polyline<T: Real>(a: T, n: usize) -> Result<Vec<Option<Complex<T>>>> {
    geodesic_from_cover(&cover_data(a)?, n)
}

/// Lower half of the geodesic from the part of the axis of `A₁ A₂⁻¹` inside
/// the fundamental domain, closed by reflection in the real axis.
pub fn geodesic_from_cover<T: Real>(cover: &CoverData<T>, n: usize) -> Result<Vec<Option<Complex<T>>>> {
    if n < 4 {
        return Err(Error::Domain(format!("need at least 4 points, got {n}")));
    }
    let p = cover.params();
    let [fp, fq] = cover.fixed_points;
    // axis of the hyperbolic element: ζ(σ) = S⁻¹(e^{iφ + σ}) with S(ζ) = (ζ − p)/(ζ − q)
    let s_inv = |u: Complex<T>| (fq * u - fp) / (u - T::one());
    let probe = (0..16)
        .map(|k| Complex::from_polar(T::one(), T::TAU() * lit(k as f64) / lit(16.0)))
        .max_by(|x, y| {
            let dx = (*x - fp).norm().min((*x - fq).norm());
            let dy = (*y - fp).norm().min((*y - fq).norm());
            dx.partial_cmp(&dy).unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or_else(|| Complex::new(T::one(), T::zero()));
    let circle_dir = (probe - fp) / (probe - fq);
    let i = Complex::new(T::zero(), T::one());
    let mut dir = circle_dir * i / circle_dir.norm();
    if s_inv(dir).norm() >= T::one() {
        dir = -dir;
    }
    let raw = |sigma: T| s_inv(dir * sigma.exp());
    let mid = crate::poly::bracket_root(|sg: T| Ok(raw(sg).re), lit(-60.0), lit(60.0), lit(1e-14))
        .map_err(|_| Error::Geometry("axis does not cross the imaginary diameter".into()))?;
    // the fundamental domain is the lower half-disk side; an axis crossing the
    // upper half is replaced by its mirror image, which has the same projection
    // up to the final symmetrization
    let flip = raw(mid).im > T::zero();
    let axis = |sigma: T| if flip { raw(sigma).conj() } else { raw(sigma) };
    let lift = |sigma: T, z0: Complex<T>| -> Option<Complex<T>> {
        let w = t1_inv(axis(sigma)) * cover.vertex;
        invert_map(&p, w, z0).filter(|z| z.im > T::zero())
    };
    let start = Complex::new(T::zero(), T::one());
    let z_mid = (0..=8)
        .find_map(|k| lift(mid, start * lit::<T>(0.1 + 0.1 * k as f64)))
        .ok_or_else(|| Error::NoSolution("could not invert the map on the imaginary axis".into()))?;
    let h = cover.geodesic_length / lit(64.0);
    // march outwards, then locate the boundary crossing by bisection
    let edge = |sign: T| -> (T, Complex<T>) {
        let (mut good, mut z) = (mid, z_mid);
        let mut bad = mid;
        for _ in 0..256 {
            let next = good + h * sign;
            match lift(next, z) {
                Some(zn) => {
                    good = next;
                    z = zn;
                }
                None => {
                    bad = next;
                    break;
                }
            }
        }
        for _ in 0..40 {
            let m = (good + bad) * lit(0.5);
            match lift(m, z) {
                Some(zn) => {
                    good = m;
                    z = zn;
                }
                None => bad = m,
            }
        }
        (good, z)
    };
    let ((lo, z_lo), (hi, z_hi)) = (edge(-T::one()), edge(T::one()));
    let half = n / 2;
    let sigmas: Vec<T> = (0..=half).map(|k| lo + (hi - lo) * lit(k as f64) / lit(half as f64)).collect();
    // continuation from the crossing towards both ends
    let k_mid = sigmas
        .iter()
        .enumerate()
        .min_by(|x, y| {
            (*x.1 - mid).abs().partial_cmp(&(*y.1 - mid).abs()).unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(k, _)| k)
        .unwrap_or(0);
    let mut zs: Vec<Option<Complex<T>>> = vec![None; sigmas.len()];
    zs[k_mid] = lift(sigmas[k_mid], z_mid);
    let mut prev = zs[k_mid].unwrap_or(z_mid);
    for k in k_mid + 1..half {
        zs[k] = lift(sigmas[k], prev);
        prev = zs[k].unwrap_or(prev);
    }
    prev = zs[k_mid].unwrap_or(z_mid);
    for k in (1..k_mid).rev() {
        zs[k] = lift(sigmas[k], prev);
        prev = zs[k].unwrap_or(prev);
    }
    zs[0] = Some(z_lo);
    zs[half] = Some(z_hi);
    let mut lower: Vec<Option<Complex<T>>> = zs.into_iter().map(|z| z.map(t1)).collect();
    // counter-clockwise: the lower half runs from left to right
    if let (Some(Some(first)), Some(Some(last))) = (lower.first(), lower.last()) {
        if first.re > last.re {
            lower.reverse();
        }
    }
    let mut out = lower.clone();
    out.extend(lower.iter().rev().map(|w| w.map(|w| w.conj())));
    out.push(out[0]);
    Ok(out)
}

/// Winding number of a closed polyline around `c`, skipping gaps.
pub fn winding_number<T: Real>(pts: &[Option<Complex<T>>], c: Complex<T>) -> i32 {
    let v: Vec<Complex<T>> = pts.iter().flatten().copied().collect();
    let total = v.windows(2).fold(T::zero(), |acc, w| acc + ((w[1] - c) / (w[0] - c)).arg());
    to_f64(total / T::TAU()).round() as i32
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn prevertex_from_puncture() {
        assert!((t_from_a(0.5f64).unwrap() - 0.643501).abs() < 1e-6);
        assert!((t_from_a(0.1f64).unwrap() - 1.371459).abs() < 1e-6);
        assert!(t_from_a(1e-9f64).unwrap() < PI / 2.0);
        assert!(t_from_a(1.0 - 1e-9f64).unwrap() < 1e-4);
        assert!(matches!(t_from_a(1.5f64), Err(Error::Domain(_))));
        assert!(t_from_a(0.0f64).is_err());
    }

    #[test]
    fn cayley_pair() {
        let z = Complex::new(0.3f64, 0.8);
        assert!((t1_inv(t1(z)) - z).norm() < 1e-14);
        assert!(t1(Complex::new(0.0f64, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn generator_conditions() {
        let s = 0.3 * PI;
        let (a1, a2) = generators(s).unwrap();
        let one = Complex::new(1.0, 0.0);
        assert!((a1.apply(one) - one).norm() < 1e-10);
        assert!((a1.trace().norm() - 2.0).abs() < 1e-10);
        let e = Complex::from_polar(1.0, s);
        assert!((a1.apply(e.conj()) - e).norm() < 1e-10);
        assert!((a2.apply(-one) + one).norm() < 1e-10);
        assert!(a1.disk_deviation(8) < 1e-10 && a2.disk_deviation(8) < 1e-10);
        assert!((a1.det() - one).norm() < 1e-12 && (a2.det() - one).norm() < 1e-12);
        let z = Complex::new(0.2, -0.4);
        assert!((a2.apply(-z.conj()) + a1.apply(z).conj()).norm() < 1e-12);
    }

    #[test]
    fn degenerate_angles() {
        assert!(matches!(generators(0.0f64), Err(Error::DegenerateGroup(_))));
        assert!(matches!(generators(PI), Err(Error::DegenerateGroup(_))));
    }

    #[test]
    fn quarter_turn_is_not_hyperbolic() {
        let s = PI / 2.0;
        let (a1, a2) = generators(s).unwrap();
        let e = Complex::from_polar(1.0, s);
        assert!((e * e * 2.0 + 2.0).norm() < 1e-15);
        assert!(matches!(commutator_data(&a1, &a2, s), Err(Error::NotHyperbolic { .. })));
    }

    #[test]
    fn fixed_points_agree() {
        let s = 0.2 * PI;
        let (a1, a2) = generators(s).unwrap();
        let c = commutator_data(&a1, &a2, s).unwrap();
        for p in c.fixed_points {
            assert!((p.norm() - 1.0).abs() < 1e-10);
        }
        assert!(c.trace > 2.0);
        assert!((c.length - 2.0 * (c.trace / 2.0).acosh()).abs() < 1e-12);
    }

    #[test]
    fn winding_of_circle() {
        let pts: Vec<Option<Complex<f64>>> =
            (0..=32).map(|k| Some(Complex::from_polar(0.5, 2.0 * PI * k as f64 / 32.0))).collect();
        assert_eq!(winding_number(&pts, Complex::new(0.1, 0.0)), 1);
        assert_eq!(winding_number(&pts, Complex::new(0.9, 0.0)), 0);
    }
}
