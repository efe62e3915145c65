//! Runge-Kutta integrators for the linear equation `y″ + Q y = 0`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{lit, to_f64, Real};

/// Step-size control for [`dopri5`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl<T> {
    pub rtol: T,
    pub atol: T,
    /// Smallest admissible step as a fraction of the interval length.
    pub min_step: T,
    pub max_steps: usize,
}

impl<T: Real> Default for StepControl<T> {
    fn default() -> Self {
        Self {
            rtol: lit::<T>(1e-12).max(T::epsilon() * lit(100.0)),
            atol: lit::<T>(1e-13).max(T::epsilon() * lit(10.0)),
            min_step: lit::<T>(1e-14).max(T::epsilon()),
            max_steps: 200_000,
        }
    }
}

type State<T, const N: usize> = [Complex<T>; N];

fn axpy<T: Real, const N: usize>(y: &State<T, N>, h: T, terms: &[(f64, &State<T, N>)]) -> State<T, N> {
    let mut out = *y;
    for (c, k) in terms {
        let w = h * lit::<T>(*c);
        for i in 0..N {
            out[i] += k[i] * w;
        }
    }
    out
}

/// Dormand-Prince 5(4) with error control on `[s0, s1]`, returning the state
/// at each of the increasing `checkpoints` (which must lie in `(s0, s1]`).
pub fn dopri5<T, const N: usize, F>(
    mut f: F,
    s0: T,
    checkpoints: &[T],
    y0: State<T, N>,
    ctl: &StepControl<T>,
) -> Result<Vec<State<T, N>>>
where
    T: Real,
    F: FnMut(T, &State<T, N>) -> Result<State<T, N>>,
{
    const A21: f64 = 1.0 / 5.0;
    const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
    const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
    const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
    const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
    const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
    const E: [f64; 7] =
        [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

    let end = *checkpoints.last().expect("at least one checkpoint");
    let length = (end - s0).abs();
    let h_min = ctl.min_step * length;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = 0usize;
    let mut s = s0;
    let mut y = y0;
    let mut h = length * lit(1e-3);
    let mut k1 = f(s, &y)?;
    let mut steps = 0usize;
    while next < checkpoints.len() {
        let target = checkpoints[next];
        let mut last = false;
        if s + h >= target {
            h = target - s;
            last = true;
        }
        let k2 = f(s + h * lit(C[0]), &axpy(&y, h, &[(A21, &k1)]))?;
        let k3 = f(s + h * lit(C[1]), &axpy(&y, h, &[(A3[0], &k1), (A3[1], &k2)]))?;
        let k4 = f(s + h * lit(C[2]), &axpy(&y, h, &[(A4[0], &k1), (A4[1], &k2), (A4[2], &k3)]))?;
        let k5 =
            f(s + h * lit(C[3]), &axpy(&y, h, &[(A5[0], &k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)]))?;
        let k6 =
            f(s + h, &axpy(&y, h, &[(A6[0], &k1), (A6[1], &k2), (A6[2], &k3), (A6[3], &k4), (A6[4], &k5)]))?;
        let y_new = axpy(&y, h, &[(B[0], &k1), (B[2], &k3), (B[3], &k4), (B[4], &k5), (B[5], &k6)]);
        let k7 = f(s + h, &y_new)?;
        let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
        let mut err = T::zero();
        for i in 0..N {
            let mut e = Complex::new(T::zero(), T::zero());
            for (c, k) in E.iter().zip(ks) {
                e += k[i] * (h * lit(*c));
            }
            let sc = ctl.atol + ctl.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / sc);
        }
        if y_new.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            err = T::nan();
        }
        steps += 1;
        if steps > ctl.max_steps {
            return Err(Error::Accuracy(format!("step budget of {} exhausted", ctl.max_steps)));
        }
        if !err.is_finite() {
            if h <= h_min {
                return Err(Error::Accuracy(format!("non-finite state near s = {}", to_f64(s))));
            }
            h *= lit(0.25);
            continue;
        }
        if err <= T::one() {
            s = if last { target } else { s + h };
            y = y_new;
            k1 = k7;
            if last {
                out.push(y);
                next += 1;
            }
        } else if h <= h_min {
            return Err(Error::Accuracy(format!("step size underflow at s = {}", to_f64(s))));
        }
        let factor = if err == T::zero() {
            lit(5.0)
        } else {
            (lit::<T>(0.9) * err.powf(lit(-0.2))).max(lit(0.2)).min(lit(5.0))
        };
        h = (h * factor).max(h_min);
        if last && next < checkpoints.len() {
            h = h.min(checkpoints[next] - s).max(h_min);
        }
    }
    Ok(out)
}

/// Integrates `y″ + Q(z) y = 0` along the segment `z0 → z1` for the state
/// `[y_a, y_a′, y_b, y_b′]`, returning the state at the given fractions of
/// the segment.
pub fn linear_pair_on_segment<T, Q>(
    q: Q,
    z0: Complex<T>,
    z1: Complex<T>,
    fractions: &[T],
    init: State<T, 4>,
    ctl: &StepControl<T>,
) -> Result<Vec<State<T, 4>>>
where
    T: Real,
    Q: Fn(Complex<T>) -> Result<Complex<T>>,
{
    let dz = z1 - z0;
    dopri5(
        |s, y: &State<T, 4>| {
            let qz = q(z0 + dz * s)?;
            Ok([y[1] * dz, -qz * y[0] * dz, y[3] * dz, -qz * y[2] * dz])
        },
        T::zero(),
        fractions,
        init,
        ctl,
    )
}

/// Classical RK4 for `y″ + Q(x) y = 0` on a uniform grid of `[0, length]`.
///
/// `q_half` holds `Q` at every half step (`2n + 1` values for `n` steps), so
/// the stage evaluations need no interpolation. Returns `(y, y′)` at the
/// `n + 1` grid nodes.
pub fn rk4_samples<T: Real>(q_half: &[T], length: T, init: (T, T)) -> Vec<(T, T)> {
    let n = (q_half.len() - 1) / 2;
    let h = length / lit(n as f64);
    let half = h * lit(0.5);
    let sixth = h / lit(6.0);
    let mut out = Vec::with_capacity(n + 1);
    let (mut y, mut d) = init;
    out.push((y, d));
    for j in 0..n {
        let (ql, qm, qr) = (q_half[2 * j], q_half[2 * j + 1], q_half[2 * j + 2]);
        let (k1y, k1d) = (d, -ql * y);
        let (k2y, k2d) = (d + half * k1d, -qm * (y + half * k1y));
        let (k3y, k3d) = (d + half * k2d, -qm * (y + half * k2y));
        let (k4y, k4d) = (d + h * k3d, -qr * (y + h * k3y));
        y += sixth * (k1y + (k2y + k3y) * lit(2.0) + k4y);
        d += sixth * (k1d + (k2d + k3d) * lit(2.0) + k4d);
        out.push((y, d));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn harmonic_oscillator_pair() {
        let one = c(1.0);
        let zero = c(0.0);
        let out = linear_pair_on_segment(
            |_| Ok(one),
            zero,
            c(2.0),
            &[0.5, 1.0],
            [one, zero, zero, one],
            &StepControl::default(),
        )
        .unwrap();
        let y = out[1];
        assert!((y[0].re - 2.0f64.cos()).abs() < 1e-11);
        assert!((y[1].re + 2.0f64.sin()).abs() < 1e-11);
        assert!((y[2].re - 2.0f64.sin()).abs() < 1e-11);
        assert!((out[0][0].re - 1.0f64.cos()).abs() < 1e-11);
    }

    #[test]
    fn complex_path_exponential() {
        // y″ = y along 0 → i: y_a = cosh z = cos y
        let m1 = c(-1.0);
        let (zero, one) = (c(0.0), c(1.0));
        let i = Complex::new(0.0, 1.0);
        let out = linear_pair_on_segment(
            |_| Ok(m1),
            zero,
            i,
            &[1.0],
            [one, zero, zero, one],
            &StepControl::default(),
        )
        .unwrap();
        assert!((out[0][0] - c(1.0f64.cos())).norm() < 1e-11);
        assert!((out[0][2] - i * 1.0f64.sin()).norm() < 1e-11);
    }

    #[test]
    fn underflow_is_reported() {
        let (zero, one) = (c(0.0), c(1.0));
        let r = linear_pair_on_segment(
            |_| Ok(c(-1e8)),
            zero,
            one,
            &[1.0],
            [one, zero, zero, one],
            &StepControl::default(),
        );
        assert!(matches!(r, Err(Error::Accuracy(_))));
    }

    #[test]
    fn rk4_fourth_order() {
        let err = |n: usize| {
            let s = rk4_samples(&vec![4.0f64; 2 * n + 1], 1.0, (1.0, 0.0));
            (s[n].0 - 2.0f64.cos()).abs()
        };
        let (e1, e2) = (err(50), err(100));
        assert!(e1 / e2 > 14.0 && e1 / e2 < 18.0);
        assert!(err(2048) < 1e-13);
    }
}
