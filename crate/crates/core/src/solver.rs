//! Accessory-parameter engine: geometric functionals of the disk and
//! rectangle maps as functions of `λ` or `μ`, root finding for prescribed
//! geometry, and univalence intervals with their a priori bounds.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::{check_t, e_from_t, t_from_e3, wp, HalfPeriods};
use crate::error::{Error, Result};
use crate::ode::{linear_pair_on_segment, rk4_samples, StepControl};
use crate::poly::{bracket_root, sign_changes, Poly};
use crate::real::{lit, to_f64, Real};
use crate::schwarzian::{check_alpha, lambda_from_mu, mu_from_lambda, AccessoryParams, RectParams, R};
use crate::spps::{ode_oracle, CoefficientPair, EndpointData, SppsBasis, DEFAULT_DEGREE, DEFAULT_INTERVALS};

/// Grid and series sizes shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Uniform intervals of the iterated-integral grid.
    pub intervals: usize,
    /// Initial number of powers of the spectral parameter.
    pub degree: usize,
    /// Cells used when scanning for sign changes.
    pub scan: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { intervals: DEFAULT_INTERVALS, degree: DEFAULT_DEGREE, scan: 240 }
    }
}

/// Values of the map at the axis points `1` and `i` and the derived edge data,
/// in the normalization `f(0) = 0`, `f′(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapData<T> {
    pub alpha: T,
    pub t: T,
    pub lambda: T,
    pub mu: T,
    /// `f(1)`.
    pub w1: Complex<T>,
    /// `f(i)`.
    pub w2: Complex<T>,
    /// Curvature of the right edge in units where `p₁ = 1`.
    pub kappa1: T,
    /// Curvature of the upper edge in the same units.
    pub kappa2: T,
    /// `w₂/w₁`.
    pub p2: Complex<T>,
    /// Solutions along the real axis segment.
    pub direct: EndpointData<T>,
    /// Solutions along the imaginary axis segment.
    pub rotated: EndpointData<T>,
}

fn curvature_disk<T: Real>(e: &EndpointData<T>) -> T {
    e.y1 * e.y2 - e.y2 * e.y1p * lit(2.0)
}

fn check_pole_free<T: Real>(e: &EndpointData<T>, axis: &str) -> Result<()> {
    if e.y1 > lit(1e-14) {
        Ok(())
    } else {
        Err(Error::Pole(format!("the map has a pole on the {axis} axis segment at parameter {}", e.lambda)))
    }
}

fn disk_map_data<T: Real>(
    alpha: T,
    t: T,
    lambda: T,
    d: EndpointData<T>,
    r: EndpointData<T>,
) -> Result<MapData<T>> {
    check_pole_free(&d, "real")?;
    check_pole_free(&r, "imaginary")?;
    let i = Complex::new(T::zero(), T::one());
    let w1 = Complex::new(d.y2 / d.y1, T::zero());
    let w2 = i * (r.y2 / r.y1);
    let p2 = i * (d.y1 * r.y2 / (r.y1 * d.y2));
    let kappa1 = curvature_disk(&d);
    let kappa2 = curvature_disk(&r) / p2.norm();
    let p = AccessoryParams { alpha, t, lambda };
    Ok(MapData {
        alpha,
        t,
        lambda,
        mu: mu_from_lambda(&p),
        w1,
        w2,
        kappa1,
        kappa2,
        p2,
        direct: d,
        rotated: r,
    })
}

/// `(ψ₀, ψ₁) = (2(1 − α²) ψ₀,t, ψ₁,t)` on `[0, 1]`, so that `y″ + (R/2) y = 0`
/// reads `y″ + ψ₀ y = λ ψ₁ y`.
pub fn disk_coefficients<T: Real>(alpha: T, t: T, intervals: usize) -> Result<CoefficientPair<T>> {
    check_alpha(alpha)?;
    check_t(t)?;
    let c = (t * lit(2.0)).cos();
    let s = (t * lit(2.0)).sin();
    let a = (T::one() - alpha * alpha) * lit(2.0);
    CoefficientPair::new(T::one(), intervals, move |x: T| {
        let x2 = x * x;
        let d = x2 * x2 - x2 * c * lit(2.0) + T::one();
        if d.abs() < lit(1e-12) {
            return Err(Error::Pole(format!("prevertex at x = {x}")));
        }
        Ok((a * (c * x2 * x2 - x2 * lit(2.0) + c) / (d * d), s * lit(2.0) / d))
    })
}

/// Which functional of `λ` a root search targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target<T> {
    /// Right-edge curvature `κ₁`.
    Kappa1(T),
    /// `Im p₂ = |w₂|/w₁`.
    P2Imag(T),
    /// `|w₂| κ₂`, the right-edge curvature of the quarter-turned map.
    Kappa1Rotated(T),
}

/// `(ψ₀, ψ₁)` samples for the problem `(α, t)` and the quarter-turned problem
/// `(α, π/2 − t)` with SPPS bases sharing the seed (`λ∞` and `−λ∞`).
#[derive(Debug, Clone)]
pub struct DiskSolver<T> {
    pub alpha: T,
    pub t: T,
    pub options: SolverOptions,
    direct: SppsBasis<T>,
    rotated: SppsBasis<T>,
}

/// `λ` range that contains every pole-free parameter, from the Sturm bounds
/// widened by a margin.
fn search_range<T: Real>(alpha: T, t: T) -> Result<(T, T)> {
    let hp = HalfPeriods::for_prevertex(t)?;
    let (slo, shi) = sturm_bounds(alpha, &hp);
    let (nlo, nhi) = nehari_bounds(alpha, t);
    let lo = lambda_from_mu(alpha, t, slo.min(nlo));
    let hi = lambda_from_mu(alpha, t, shi.max(nhi));
    let margin = (hi - lo) * lit(0.25) + T::one();
    Ok((lo - margin, hi + margin))
}

/// Candidate seeds in `μ`: the midpoint of the intersection of the Sturm and
/// Nehari intervals, the Nehari midpoint, then points spread across the union.
fn seed_candidates<T: Real>(alpha: T, hp: &HalfPeriods<T>, t: T) -> Vec<T> {
    let (slo, shi) = sturm_bounds(alpha, hp);
    let (nlo, nhi) = nehari_bounds(alpha, t);
    let mut out = Vec::new();
    let (ilo, ihi) = (slo.max(nlo), shi.min(nhi));
    if ilo < ihi {
        out.push((ilo + ihi) * lit(0.5));
    }
    out.push((nlo + nhi) * lit(0.5));
    let (ulo, uhi) = (slo.min(nlo), shi.max(nhi));
    for k in 1..16 {
        let f: T = lit(k as f64 / 16.0);
        out.push(ulo + (uhi - ulo) * f);
    }
    out
}

impl<T: Real> DiskSolver<T> {
    /// Builds bases at the default seed (see [`seed_candidates`]), trying the
    /// fallbacks when the seed solution vanishes on either axis segment.
    pub fn new(alpha: T, t: T, options: SolverOptions) -> Result<Self> {
        let hp = HalfPeriods::for_prevertex(t)?;
        let mut last = None;
        for mu in seed_candidates(alpha, &hp, t) {
            match Self::with_seed(alpha, t, lambda_from_mu(alpha, t, mu), options) {
                Ok(s) => return Ok(s),
                Err(e @ Error::Seed { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::NoSolution("no admissible seed".into())))
    }

    pub fn with_seed(alpha: T, t: T, seed: T, options: SolverOptions) -> Result<Self> {
        let direct =
            SppsBasis::build(&disk_coefficients(alpha, t, options.intervals)?, seed, options.degree)?;
        let rotated = SppsBasis::build(
            &disk_coefficients(alpha, T::FRAC_PI_2() - t, options.intervals)?,
            -seed,
            options.degree,
        )?;
        Ok(Self { alpha, t, options, direct, rotated })
    }

    pub fn seed(&self) -> T {
        self.direct.lambda_inf
    }

    pub fn direct_basis(&self) -> &SppsBasis<T> {
        &self.direct
    }

    pub fn rotated_basis(&self) -> &SppsBasis<T> {
        &self.rotated
    }

    /// Endpoint data on `[0, 1]` at `λ` and on the quarter-turned segment at `−λ`.
    pub fn endpoints(&mut self, lambda: T) -> Result<(EndpointData<T>, EndpointData<T>)> {
        Ok((self.direct.eval_escalating(lambda)?, self.rotated.eval_escalating(-lambda)?))
    }

    pub fn map_values(&mut self, lambda: T) -> Result<MapData<T>> {
        let (d, r) = self.endpoints(lambda)?;
        disk_map_data(self.alpha, self.t, lambda, d, r)
    }

    /// Scalar functional whose zero realizes `target`. Division-free.
    fn residual(&mut self, target: Target<T>, lambda: T) -> Result<T> {
        match target {
            Target::Kappa1(c) => Ok(curvature_disk(&self.direct.eval_escalating(lambda)?) - c),
            Target::Kappa1Rotated(c) => Ok(curvature_disk(&self.rotated.eval_escalating(-lambda)?) - c),
            Target::P2Imag(c) => {
                let (d, r) = self.endpoints(lambda)?;
                Ok(d.y1 * r.y2 - c * r.y1 * d.y2)
            }
        }
    }

    /// The residual as a polynomial in `Δ = λ − λ∞`.
    fn residual_poly(&self, target: Target<T>) -> Poly<T> {
        let ds = self.direct.endpoint_series();
        let rs = self.rotated.endpoint_series();
        let p = |v: &Vec<T>| Poly::new(v.clone());
        let kappa = |y1: &Vec<T>, y1p: &Vec<T>, y2: &Vec<T>| {
            p(y1).mul(&p(y2)).add(&p(y2).mul(&p(y1p)).scale(lit(-2.0)))
        };
        match target {
            Target::Kappa1(c) => kappa(&ds.y1, &ds.y1p, &ds.y2).add_constant(-c),
            Target::Kappa1Rotated(c) => kappa(&rs.y1, &rs.y1p, &rs.y2).add_constant(-c).reflect(),
            Target::P2Imag(c) => {
                p(&ds.y1).mul(&p(&rs.y2).reflect()).add(&p(&rs.y1).reflect().mul(&p(&ds.y2)).scale(-c))
            }
        }
    }

    /// `λ` realizing `target`: real zeros of the truncated series are located
    /// within the pole-free search range, the zero nearest the seed is taken
    /// and then polished on the full evaluation.
    pub fn solve(&mut self, target: Target<T>) -> Result<T> {
        let seed = self.seed();
        let (lo, hi) = search_range(self.alpha, self.t)?;
        let poly = self.residual_poly(target);
        let mut roots = poly.real_roots_in(lo - seed, hi - seed, self.options.scan * 4);
        roots.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap_or(std::cmp::Ordering::Equal));
        for delta in roots {
            let guess = seed + delta;
            if let Ok(l) = self.polish(target, guess, (hi - lo) / lit((self.options.scan * 4) as f64)) {
                let data = self.map_values(l);
                if data.is_ok() {
                    let res = self.residual(target, l)?;
                    let scale = match target {
                        Target::P2Imag(_) => {
                            let (d, r) = self.endpoints(l)?;
                            (r.y1 * d.y2).abs().max(T::min_positive_value())
                        }
                        _ => T::one(),
                    };
                    if (res / scale).abs() < lit(1e-10) {
                        return Ok(l);
                    }
                    return Err(Error::Accuracy(format!("residual {} after polishing", to_f64(res / scale))));
                }
            }
        }
        Err(Error::NoSolution(format!("no parameter realizes {target:?} in [{lo}, {hi}]")))
    }

    fn polish(&mut self, target: Target<T>, guess: T, width: T) -> Result<T> {
        let mut w = width;
        for _ in 0..20 {
            let (a, b) = (guess - w, guess + w);
            let (fa, fb) = (self.residual(target, a), self.residual(target, b));
            if let (Ok(fa), Ok(fb)) = (fa, fb) {
                if fa * fb <= T::zero() {
                    return bracket_root(|x| self.residual(target, x), a, b, lit(1e-15));
                }
            }
            w *= lit(2.0);
        }
        Err(Error::NoSolution(format!("could not bracket the zero near {guess}")))
    }

    /// First zero of `g` met when moving from the seed towards `end`.
    fn first_zero<G>(&mut self, mut g: G, end: T) -> Option<T>
    where
        G: FnMut(&mut Self, T) -> Result<T>,
    {
        let seed = self.seed();
        let n = self.options.scan;
        let step = (end - seed) / lit(n as f64);
        let mut xa = seed;
        let mut fa = g(self, xa).ok()?;
        for k in 1..=n {
            let xb = seed + step * lit(k as f64);
            let fb = match g(self, xb) {
                Ok(v) => v,
                Err(_) => return None,
            };
            if fa * fb <= T::zero() {
                return bracket_root(|x| g(self, x), xa, xb, lit(1e-15)).ok();
            }
            xa = xb;
            fa = fb;
        }
        None
    }

    /// Upper ends `(λ*_max, λ_max)` of the pole-free and univalence intervals.
    pub fn upper_end(&mut self) -> Result<(Option<T>, Option<T>)> {
        let (lo, hi) = search_range(self.alpha, self.t)?;
        let star = self.first_zero(|s, l| Ok(s.rotated.eval_escalating(-l)?.y1), hi);
        if self.alpha >= lit(0.5) {
            return Ok((star, star));
        }
        let target = Target::Kappa1Rotated(T::one() + (self.alpha * T::PI()).sin());
        let end =
            self.extremal_zero(target, star.unwrap_or(hi), lo, |s, l| Ok(s.direct.eval_escalating(l)?.y1))?;
        Ok((star, end))
    }

    /// Lower ends `(λ*_min, λ_min)`.
    pub fn lower_end(&mut self) -> Result<(Option<T>, Option<T>)> {
        let (lo, hi) = search_range(self.alpha, self.t)?;
        let star = self.first_zero(|s, l| Ok(s.direct.eval_escalating(l)?.y1), lo);
        if self.alpha >= lit(0.5) {
            return Ok((star, star));
        }
        let target = Target::Kappa1(T::one() + (self.alpha * T::PI()).sin());
        let end =
            self.extremal_zero(target, star.unwrap_or(lo), hi, |s, l| Ok(s.rotated.eval_escalating(-l)?.y1))?;
        Ok((star, end))
    }

    /// Zero of the extremal residual next to the seed. The residual is
    /// negative inside the univalence interval; when it is positive at the
    /// seed, the seed lies beyond this end and the scan runs the other way,
    /// up to the opposite pole-free end.
    fn extremal_zero<P>(
        &mut self,
        target: Target<T>,
        toward: T,
        away: T,
        opposite_pole: P,
    ) -> Result<Option<T>>
    where
        P: FnMut(&mut Self, T) -> Result<T>,
    {
        let r0 = self.residual(target, self.seed())?;
        if r0 < T::zero() {
            return Ok(self.first_zero(|s, l| s.residual(target, l), toward));
        }
        let limit = self.first_zero(opposite_pole, away).unwrap_or(away);
        Ok(self.first_zero(|s, l| s.residual(target, l), limit))
    }

    /// Univalence interval with the pole-free interval and the a priori bounds.
    pub fn univalence_interval(&mut self) -> Result<UnivalenceInterval<T>> {
        let (alpha, t) = (self.alpha, self.t);
        let hp = HalfPeriods::for_prevertex(t)?;
        let (sturm_lo, sturm_hi) = sturm_bounds(alpha, &hp);
        let (nehari_lo, nehari_hi) = nehari_bounds(alpha, t);
        let (star_max, lambda_max) = self.upper_end()?;
        let (star_min, lambda_min) = self.lower_end()?;
        Ok(UnivalenceInterval {
            alpha,
            t,
            seed: self.seed(),
            lambda_min,
            lambda_max,
            lambda_star_min: star_min,
            lambda_star_max: star_max,
            sturm_lo,
            sturm_hi,
            nehari_lo,
            nehari_hi,
            quarter_e3: (lit::<T>(0.25) - alpha * alpha) * hp.e3,
        })
    }
}

/// Map values through the SPPS bases at the default seed.
pub fn map_values<T: Real>(p: &AccessoryParams<T>) -> Result<MapData<T>> {
    map_values_with(p, SolverOptions::default())
}

pub fn map_values_with<T: Real>(p: &AccessoryParams<T>, options: SolverOptions) -> Result<MapData<T>> {
    let mut s = match DiskSolver::new(p.alpha, p.t, options) {
        Ok(s) => s,
        Err(Error::Seed { .. }) => DiskSolver::with_seed(p.alpha, p.t, p.lambda, options)?,
        Err(e) => return Err(e),
    };
    s.map_values(p.lambda)
}

/// Map values through adaptive step integration only.
pub fn map_values_oracle<T: Real>(p: &AccessoryParams<T>) -> Result<MapData<T>> {
    let d = ode_oracle(&disk_coefficients(p.alpha, p.t, 8)?, p.lambda)?;
    let r = ode_oracle(&disk_coefficients(p.alpha, T::FRAC_PI_2() - p.t, 8)?, -p.lambda)?;
    disk_map_data(p.alpha, p.t, p.lambda, d, r)
}

/// `λ` realizing `target` for the given `(α, t)`; `seed` overrides the
/// default seed.
pub fn solve_lambda<T: Real>(alpha: T, t: T, target: Target<T>, seed: Option<T>) -> Result<T> {
    let opts = SolverOptions::default();
    let mut s = match seed {
        Some(l) => DiskSolver::with_seed(alpha, t, l, opts)?,
        None => DiskSolver::new(alpha, t, opts)?,
    };
    s.solve(target)
}

/// Parameters for which the disk map is univalent, with bounds.
///
/// `None` marks an endpoint that could not be bracketed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnivalenceInterval<T> {
    pub alpha: T,
    pub t: T,
    pub seed: T,
    pub lambda_min: Option<T>,
    pub lambda_max: Option<T>,
    /// Ends of the interval on which the map has no pole on the axes.
    pub lambda_star_min: Option<T>,
    pub lambda_star_max: Option<T>,
    /// Bounds in `μ`.
    pub sturm_lo: T,
    pub sturm_hi: T,
    pub nehari_lo: T,
    pub nehari_hi: T,
    /// `(1/4 − α²) e₃`, reported for inspection only.
    pub quarter_e3: T,
}

impl<T: Real> UnivalenceInterval<T> {
    pub fn mu_min(&self) -> Option<T> {
        self.lambda_min.map(|l| mu_from_lambda(&AccessoryParams { alpha: self.alpha, t: self.t, lambda: l }))
    }

    pub fn mu_max(&self) -> Option<T> {
        self.lambda_max.map(|l| mu_from_lambda(&AccessoryParams { alpha: self.alpha, t: self.t, lambda: l }))
    }

    /// `λ*_min ≤ λ_min < λ_max ≤ λ*_max`, with absent pole-free ends read as
    /// `∓∞`. Fails when either univalence end is missing.
    pub fn ordering_holds(&self) -> bool {
        let tol: T = lit(1e-9);
        match (self.lambda_min, self.lambda_max) {
            (Some(lo), Some(hi)) => {
                lo < hi
                    && self.lambda_star_min.is_none_or(|s| s <= lo + tol)
                    && self.lambda_star_max.is_none_or(|s| hi <= s + tol)
            }
            _ => false,
        }
    }

    /// Whether `[μ_min, μ_max]` lies inside both bound intervals. The Sturm
    /// bounds are attained at `α = 1/2`, hence the tolerance.
    pub fn bounds_bracket(&self) -> bool {
        let tol: T = lit(1e-9);
        match (self.mu_min(), self.mu_max()) {
            (Some(lo), Some(hi)) => {
                self.sturm_lo <= lo + tol
                    && hi <= self.sturm_hi + tol
                    && self.nehari_lo <= lo + tol
                    && hi <= self.nehari_hi + tol
            }
            _ => false,
        }
    }
}

pub fn univalence_interval<T: Real>(alpha: T, t: T) -> Result<UnivalenceInterval<T>> {
    DiskSolver::new(alpha, t, SolverOptions::default())?.univalence_interval()
}

/// Univalence intervals over several `t`, computed in parallel and returned in
/// input order.
pub fn univalence_sweep<T: Real>(alpha: T, ts: &[T]) -> Vec<Result<UnivalenceInterval<T>>> {
    ts.par_iter().map(|&t| univalence_interval(alpha, t)).collect()
}

/// Comparison bounds `(μ_lo, μ_hi)` from the Sturm theorem on the two axes.
pub fn sturm_bounds<T: Real>(alpha: T, hp: &HalfPeriods<T>) -> (T, T) {
    let q = lit::<T>(0.25) - alpha * alpha;
    let horiz = (T::PI() / (hp.omega1 * lit(2.0))).powi(2);
    let vert = (T::PI() / (hp.omega2_mag * lit(2.0))).powi(2);
    if alpha <= lit(0.5) {
        (q * hp.e2 - horiz, q * hp.e1 + vert)
    } else {
        (q * hp.e3 - horiz, q * hp.e3 + vert)
    }
}

/// Bounds `(1 − α²) e₃ ∓ 3` implied by the Nehari criterion at the origin.
pub fn nehari_bounds<T: Real>(alpha: T, t: T) -> (T, T) {
    let (_, _, e3) = e_from_t(t);
    let mid = (T::one() - alpha * alpha) * e3;
    (mid - lit(3.0), mid + lit(3.0))
}

/// Chart coordinate `2 arccot(4λ) ∈ (0, 2π)` of a parameter value.
pub fn lambda_chart<T: Real>(lambda: T) -> T {
    T::PI() - (lambda * lit(4.0)).atan() * lit(2.0)
}

/// Inverse of [`lambda_chart`].
pub fn lambda_from_chart<T: Real>(m: T) -> T {
    T::one() / (m * lit(0.5)).tan() / lit(4.0)
}

/// `arccot(4λ) ∈ (0, π)`.
pub fn arccot4<T: Real>(lambda: T) -> T {
    T::FRAC_PI_2() - (lambda * lit(4.0)).atan()
}

/// Median curve `π + β(t − π/4) − π(1 − β/4) cos 2t` in the chart of
/// [`lambda_chart`]; returns the chart value and the parameter.
pub fn median_lambda<T: Real>(t: T, beta: T) -> (T, T) {
    let m =
        T::PI() + beta * (t - T::FRAC_PI_4()) - T::PI() * (T::one() - beta / lit(4.0)) * (t * lit(2.0)).cos();
    (m, lambda_from_chart(m))
}

/// Corner slope of the median curve for one `α`, fitted to the chart
/// midpoints of computed univalence intervals at small `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianCurve<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> MedianCurve<T> {
    pub fn estimate(alpha: T) -> Result<Self> {
        let mut num = T::zero();
        let mut den = T::zero();
        for t in [lit::<T>(0.02), lit(0.04)] {
            let u = univalence_interval(alpha, t)?;
            let (Some(lo), Some(hi)) = (u.lambda_min, u.lambda_max) else {
                return Err(Error::NoSolution(format!("univalence interval at t = {t} not bracketed")));
            };
            let m = (lambda_chart(lo) + lambda_chart(hi)) * lit(0.5);
            // m = π(1 − cos 2t) + β((t − π/4) + (π/4) cos 2t)
            let c = (t * lit(2.0)).cos();
            let g = t - T::FRAC_PI_4() + T::FRAC_PI_4() * c;
            num += g * (m - T::PI() * (T::one() - c));
            den += g * g;
        }
        Ok(Self { alpha, beta: num / den })
    }

    pub fn at(&self, t: T) -> (T, T) {
        median_lambda(t, self.beta)
    }
}

/// Images of `n` equally spaced boundary points (plus the closing point) by
/// radial integration to `1 − kε` (`k = 1, 2, 3`) and quadratic extrapolation.
/// Rays on which the integration fails or the map blows up yield `None`.
pub fn boundary_polyline<T: Real>(p: &AccessoryParams<T>, n: usize, eps: T) -> Vec<Option<Complex<T>>> {
    let fractions = [T::one() - eps * lit(3.0), T::one() - eps * lit(2.0), T::one() - eps];
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let ctl = StepControl::default();
    let ray = |k: usize| -> Option<Complex<T>> {
        let th = T::TAU() * lit(k as f64) / lit(n as f64);
        let end = Complex::from_polar(T::one(), th);
        let out = linear_pair_on_segment(
            |z: Complex<T>| Ok(R(z, p)? * lit::<T>(0.5)),
            zero,
            end,
            &fractions,
            [one, zero, zero, one],
            &ctl,
        )
        .ok()?;
        let f: Vec<Complex<T>> = out.iter().map(|s| s[2] / s[0]).collect();
        let w = f[2] * lit::<T>(3.0) - f[1] * lit::<T>(3.0) + f[0];
        (w.norm() < lit(1e8) && w.re.is_finite() && w.im.is_finite()).then_some(w)
    };
    let mut pts: Vec<Option<Complex<T>>> = (0..n).into_par_iter().map(ray).collect();
    pts.push(pts[0]);
    pts
}

/// `f(z)` and `y₁(z)` by integration along `[0, z]`; `f′(z) = 1/y₁(z)²`.
pub fn map_point<T: Real>(p: &AccessoryParams<T>, z: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let out = linear_pair_on_segment(
        |w: Complex<T>| Ok(R(w, p)? * lit::<T>(0.5)),
        zero,
        z,
        &[T::one()],
        [one, zero, zero, one],
        &StepControl::default(),
    )?;
    let s = out[0];
    if s[0].norm() == T::zero() {
        return Err(Error::Pole(format!("pole of the map at {z}")));
    }
    Ok((s[2] / s[0], s[0]))
}

/// Finds `(t, λ)` with prescribed `κ₁` and `Im p₂`: `λ` is solved for the
/// curvature at fixed `t`, and `t` is updated by the secant method on the
/// `p₂` residual.
pub fn solve_geometry<T: Real>(alpha: T, kappa1: T, p2_imag: T) -> Result<(T, T)> {
    let opts = SolverOptions::default();
    let eval = |t: T| -> Result<(T, T)> {
        let mut s = DiskSolver::new(alpha, t, opts)?;
        let l = s.solve(Target::Kappa1(kappa1))?;
        Ok((l, s.map_values(l)?.p2.im - p2_imag))
    };
    let lo_t: T = lit(0.01);
    let hi_t = T::FRAC_PI_2() - lit(0.01);
    let mut t0 = T::FRAC_PI_4();
    let (mut l0, mut r0) = eval(t0)?;
    let mut t1 = t0 + lit(0.05);
    let (mut l1, mut r1) = eval(t1)?;
    for _ in 0..60 {
        if r1.abs() < lit(1e-9) {
            return Ok((t1, l1));
        }
        let slope = (r1 - r0) / (t1 - t0);
        let mut t2 = if slope != T::zero() { t1 - r1 / slope } else { t1 + lit(0.05) };
        t2 = t2.max(lo_t).min(hi_t);
        let mut step = t2 - t1;
        let mut next = eval(t2);
        // shorten the step until the inner solve succeeds
        for _ in 0..8 {
            if next.is_ok() {
                break;
            }
            step *= lit(0.5);
            t2 = t1 + step;
            next = eval(t2);
        }
        let (l2, r2) = next?;
        t0 = t1;
        l0 = l1;
        r0 = r1;
        t1 = t2;
        l1 = l2;
        r1 = r2;
    }
    let _ = l0;
    Err(Error::NoSolution(format!("secant on t did not converge (residual {})", to_f64(r1))))
}

/// Coefficients of the rectangle problem on the horizontal segment
/// `[0, ω₁]` (`vertical = false`) or the vertical one `[0, |ω₂|]`, in the form
/// `η″ + ψ₀ η = μ ψ₁ η`.
pub fn rect_coefficients<T: Real>(
    alpha: T,
    hp: &HalfPeriods<T>,
    vertical: bool,
    intervals: usize,
) -> Result<CoefficientPair<T>> {
    let q = lit::<T>(0.25) - alpha * alpha;
    let hp = *hp;
    let w3 = hp.omega3();
    if vertical {
        CoefficientPair::new(hp.omega2_mag, intervals, move |u: T| {
            let z = w3 + Complex::new(T::zero(), u);
            Ok((-q * wp(z, &hp)?.re, -T::one()))
        })
    } else {
        CoefficientPair::new(hp.omega1, intervals, move |x: T| {
            let z = w3 + Complex::new(x, T::zero());
            Ok((q * wp(z, &hp)?.re, T::one()))
        })
    }
}

/// SPPS bases for the two axis segments of the rectangle problem.
#[derive(Debug, Clone)]
pub struct RectSolver<T> {
    pub alpha: T,
    pub hp: HalfPeriods<T>,
    horizontal: SppsBasis<T>,
    vertical: SppsBasis<T>,
}

impl<T: Real> RectSolver<T> {
    pub fn new(alpha: T, hp: HalfPeriods<T>, options: SolverOptions) -> Result<Self> {
        check_alpha(alpha)?;
        let t = t_from_e3(hp.e3)?;
        let mut last = None;
        for mu in seed_candidates(alpha, &hp, t) {
            match Self::with_seed(alpha, hp, mu, options) {
                Ok(s) => return Ok(s),
                Err(e @ Error::Seed { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::NoSolution("no admissible seed".into())))
    }

    pub fn with_seed(alpha: T, hp: HalfPeriods<T>, mu: T, options: SolverOptions) -> Result<Self> {
        let horizontal =
            SppsBasis::build(&rect_coefficients(alpha, &hp, false, options.intervals)?, mu, options.degree)?;
        let vertical =
            SppsBasis::build(&rect_coefficients(alpha, &hp, true, options.intervals)?, mu, options.degree)?;
        Ok(Self { alpha, hp, horizontal, vertical })
    }

    pub fn endpoints(&mut self, mu: T) -> Result<(EndpointData<T>, EndpointData<T>)> {
        Ok((self.horizontal.eval_escalating(mu)?, self.vertical.eval_escalating(mu)?))
    }

    pub fn map_values(&mut self, mu: T) -> Result<MapData<T>> {
        let (h, v) = self.endpoints(mu)?;
        rect_map_data(self.alpha, &self.hp, mu, h, v)
    }
}

fn rect_map_data<T: Real>(
    alpha: T,
    hp: &HalfPeriods<T>,
    mu: T,
    h: EndpointData<T>,
    v: EndpointData<T>,
) -> Result<MapData<T>> {
    check_pole_free(&h, "horizontal")?;
    check_pole_free(&v, "vertical")?;
    let t = t_from_e3(hp.e3)?;
    let i = Complex::new(T::zero(), T::one());
    let w1 = Complex::new(h.y2 / h.y1, T::zero());
    let w2 = i * (v.y2 / v.y1);
    let p2 = i * (h.y1 * v.y2 / (v.y1 * h.y2));
    // orientation fixed so that the identity map has unit curvature
    let kappa1 = -h.y2 * h.y1p * lit(2.0);
    let kappa2 = -v.y2 * v.y1p * lit(2.0) / p2.norm();
    Ok(MapData {
        alpha,
        t,
        lambda: lambda_from_mu(alpha, t, mu),
        mu,
        w1,
        w2,
        kappa1,
        kappa2,
        p2,
        direct: h,
        rotated: v,
    })
}

/// Map values of the rectangle problem at `p.mu`.
pub fn rect_map_values<T: Real>(p: &RectParams<T>) -> Result<MapData<T>> {
    let opts = SolverOptions::default();
    let mut s = match RectSolver::new(p.alpha, p.hp, opts) {
        Ok(s) => s,
        Err(Error::Seed { .. }) => RectSolver::with_seed(p.alpha, p.hp, p.mu, opts)?,
        Err(e) => return Err(e),
    };
    s.map_values(p.mu)
}

/// Whether `η₁` vanishes on the horizontal and on the vertical axis segment
/// (poles of the rectangle map on the respective axis).
pub fn axis_poles<T: Real>(alpha: T, hp: &HalfPeriods<T>, mu: T, intervals: usize) -> Result<(bool, bool)> {
    let has_zero = |vertical: bool| -> Result<bool> {
        let c = rect_coefficients(alpha, hp, vertical, intervals)?;
        let sign = if vertical { -T::one() } else { T::one() };
        let n = 2 * intervals + 1;
        let q: Vec<T> = (0..n)
            .map(|j| {
                let x = c.length * lit(j as f64) / lit((n - 1) as f64);
                c.at(x).map(|(a, _)| a - mu * sign)
            })
            .collect::<Result<_>>()?;
        let s = rk4_samples(&q, c.length, (T::one(), T::zero()));
        Ok(s.windows(2).any(|w| w[0].0 * w[1].0 <= T::zero()))
    };
    Ok((has_zero(false)?, has_zero(true)?))
}

/// Checks that no `μ` in `mus` gives poles on both axes at once.
pub fn pole_exclusivity<T: Real>(alpha: T, hp: &HalfPeriods<T>, mus: &[T], intervals: usize) -> Result<bool> {
    let flags: Vec<Result<(bool, bool)>> =
        mus.par_iter().map(|&m| axis_poles(alpha, hp, m, intervals)).collect();
    for f in flags {
        let (h, v) = f?;
        if h && v {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sign changes of `f` on `[lo, hi]`, exposed for sweeps over `μ`.
pub fn scan_sign_changes<T: Real, F: FnMut(T) -> Result<T>>(
    f: F,
    lo: T,
    hi: T,
    n: usize,
) -> Result<Vec<(T, T)>> {
    sign_changes(f, lo, hi, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

    #[test]
    fn identity_map() {
        for &t in &[0.3, FRAC_PI_4, 1.2] {
            let m = map_values(&AccessoryParams::new(1.0, t, 0.0).unwrap()).unwrap();
            assert!((m.w1 - Complex::new(1.0, 0.0)).norm() < 1e-10);
            assert!((m.kappa1 - 1.0).abs() < 1e-10);
            assert!((m.p2 - Complex::new(0.0, 1.0)).norm() < 1e-10);
            assert!((m.kappa2 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn square_symmetry() {
        let m = map_values(&AccessoryParams::new(0.5, FRAC_PI_4, 0.0).unwrap()).unwrap();
        assert!((m.p2 - Complex::new(0.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn spps_matches_oracle() {
        let p = AccessoryParams::new(0.5, FRAC_PI_3, 0.2).unwrap();
        let a = map_values(&p).unwrap();
        let b = map_values_oracle(&p).unwrap();
        assert!(a.direct.max_diff(&b.direct) < 1e-8);
        assert!(a.rotated.max_diff(&b.rotated) < 1e-8);
        assert!((a.kappa1 - b.kappa1).abs() < 1e-8);
    }

    #[test]
    fn curvature_roundtrip() {
        let (alpha, t) = (0.3, PI / 5.0);
        let k = map_values(&AccessoryParams::new(alpha, t, 0.1).unwrap()).unwrap().kappa1;
        let l = solve_lambda(alpha, t, Target::Kappa1(k), None).unwrap();
        assert!((l - 0.1).abs() < 1e-8, "{l}");
        assert!(solve_lambda(1.0f64, 0.7, Target::Kappa1(1.0), None).unwrap().abs() < 1e-8);
    }

    #[test]
    fn p2_roundtrip() {
        let (alpha, t) = (0.7f64, 0.6);
        let p = map_values(&AccessoryParams::new(alpha, t, -0.2).unwrap()).unwrap().p2.im;
        let l = solve_lambda(alpha, t, Target::P2Imag(p), None).unwrap();
        assert!((l + 0.2).abs() < 1e-8, "{l}");
    }

    #[test]
    fn interval_at_thirty_degrees() {
        let u = univalence_interval(0.2, FRAC_PI_6).unwrap();
        assert!((u.lambda_min.unwrap() + 0.479608).abs() < 1e-4, "{u:?}");
        assert!((u.lambda_max.unwrap() - 1.30611).abs() < 1e-4, "{u:?}");
        assert!(u.ordering_holds());
        assert!(u.bounds_bracket());
    }

    #[test]
    fn pole_outside_interval() {
        let u = univalence_interval(1.3, 3.0 * PI / 8.0).unwrap();
        let beyond = u.lambda_star_max.unwrap() + 0.1;
        let r = map_values(&AccessoryParams::new(1.3, 3.0 * PI / 8.0, beyond).unwrap());
        assert!(matches!(r, Err(Error::Pole(_))));
    }

    #[test]
    fn nehari_examples() {
        assert_eq!(nehari_bounds(1.0, 0.4), (-3.0, 3.0));
        let (lo, hi) = nehari_bounds(0.3, FRAC_PI_4);
        assert!((lo + 3.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
        let (lo, hi) = nehari_bounds(0.0, FRAC_PI_6);
        assert!((lo + 7.0 / 3.0).abs() < 1e-14 && (hi - 11.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn sturm_examples() {
        let hp = HalfPeriods::for_prevertex(FRAC_PI_4).unwrap();
        let w = (PI / (2.0 * 0.927_037_338_650_685_8)).powi(2);
        let (lo, hi) = sturm_bounds(0.5, &hp);
        assert!((lo + w).abs() < 1e-9 && (hi - w).abs() < 1e-9);
        assert!((lo + 2.871).abs() < 1e-3);
        let (lo, _) = sturm_bounds(0.0, &hp);
        assert!((lo - (-0.5 - w)).abs() < 1e-9);
    }

    #[test]
    fn median_chart() {
        let (m, _) = median_lambda(FRAC_PI_4, 3.0);
        assert!((m - PI).abs() < 1e-15);
        assert!(lambda_from_chart(m).abs() < 1e-15);
        let (m, _) = median_lambda(0.3, 4.0);
        assert!((m - (PI + 4.0 * (0.3 - FRAC_PI_4))).abs() < 1e-15);
        for &l in &[-3.0f64, -0.1, 0.0, 0.4, 7.0] {
            assert!((lambda_from_chart(lambda_chart(l)) - l).abs() < 1e-12);
            assert!(arccot4(l) > 0.0 && arccot4(l) < PI);
        }
    }

    #[test]
    fn identity_boundary_is_the_circle() {
        let p = AccessoryParams::new(1.0f64, 0.6, 0.0).unwrap();
        let pts = boundary_polyline(&p, 16, 1e-3);
        assert_eq!(pts.len(), 17);
        for w in pts.iter().map(|w| w.unwrap()) {
            assert!((w.norm() - 1.0).abs() < 1e-6);
        }
        assert_eq!(pts[0], pts[16]);
    }

    #[test]
    fn boundary_is_symmetric() {
        let p = AccessoryParams::new(0.4, 0.7, 0.3).unwrap();
        let n = 24;
        let pts = boundary_polyline(&p, n, 1e-4);
        for k in 0..n {
            let (a, b) = (pts[k].unwrap(), pts[(n - k) % n].unwrap());
            assert!((a - b.conj()).norm() < 1e-8);
            let c = pts[(k + n / 2) % n].unwrap();
            assert!((a + c).norm() < 1e-8);
        }
    }

    #[test]
    fn rectangle_half_angle_is_trigonometric() {
        // α = 1/2: η″ = μ η on both segments
        let hp = HalfPeriods::for_prevertex(0.6).unwrap();
        let mu = 0.7f64;
        let m = rect_map_values(&RectParams::new(0.5, hp, mu).unwrap()).unwrap();
        let k = mu.sqrt();
        let x = hp.omega1;
        let (e1, e1p, e2) = ((k * x).cosh(), k * (k * x).sinh(), (k * x).sinh() / k);
        assert!((m.kappa1 + 2.0 * e2 * e1p).abs() < 1e-9);
        assert!((m.w1.re - e2 / e1).abs() < 1e-9);
        assert!((m.direct.wronskian() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rectangle_matches_disk() {
        let p = AccessoryParams::new(0.3f64, 0.7, 0.25).unwrap();
        let disk = map_values(&p).unwrap();
        let rect = rect_map_values(&RectParams::from_disk(&p).unwrap()).unwrap();
        assert!((disk.kappa1 - rect.kappa1).abs() < 1e-7, "{} vs {}", disk.kappa1, rect.kappa1);
        assert!((disk.p2 - rect.p2).norm() < 1e-7);
        assert!((disk.w1 - rect.w1).norm() < 1e-7);
    }

    #[test]
    fn poles_never_on_both_axes() {
        let hp = HalfPeriods::for_prevertex(0.5).unwrap();
        let (lo, hi) = sturm_bounds(0.3, &hp);
        let mus: Vec<f64> = (0..=40).map(|k| lo - 2.0 + (hi - lo + 4.0) * k as f64 / 40.0).collect();
        assert!(pole_exclusivity(0.3, &hp, &mus, 512).unwrap());
    }
}
