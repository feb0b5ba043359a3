//! Double-exponential quadrature on `[0, ∞)` and finite intervals, the radial
//! integrals `∫ r^p g(r) e^{-c r^m} dr` built on it, and a periodic trapezoid
//! rule for angular integrals.
//!
//! Radial integrals are computed after the substitution `u = c r^m`, which
//! turns the weight into `u^{s-1} e^{-u}` with `s = (p+1)/m` for every `m`.
//! The `u`-integral then goes through exp-sinh nodes `u = exp(π/2 sinh t)`
//! with step halving until two consecutive levels agree.

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{require_nonnegative, require_positive, Error, Result};
use crate::special_fn::ln_gamma;

/// Value, error estimate and bookkeeping of a numerical integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// A bounded radial symbol `r ↦ g(r)` with its declared sup-norm.
///
/// The callable must be safe to invoke concurrently.
pub struct RadialSymbol<'a> {
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    sup_bound: f64,
}

impl<'a> RadialSymbol<'a> {
    pub fn new(sup_bound: f64, eval: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Self {
        Self {
            eval: Box::new(eval),
            sup_bound,
        }
    }

    /// The constant symbol `g ≡ value`.
    pub fn constant(value: f64) -> Self {
        Self::new(value.abs(), move |_| value)
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.eval)(r)
    }
}

impl std::fmt::Debug for RadialSymbol<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialSymbol")
            .field("sup_bound", &self.sup_bound)
            .finish_non_exhaustive()
    }
}

/// Values the double-exponential driver can accumulate.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Change of variables `x(t)` used by the double-exponential rules.
#[derive(Clone, Copy, Debug)]
pub(crate) enum DeMap {
    /// `x = start + exp(π/2 sinh t)` on `[start, ∞)`.
    ExpSinh { start: f64 },
    /// `x = (a+b)/2 + (b-a)/2 tanh(π/2 sinh t)` on `[a, b]`.
    TanhSinh { a: f64, b: f64 },
}

const T_MAX: f64 = 6.5;
const H0: f64 = 0.25;
/// Terms below this fraction of the peak are dropped from the `t` range.
const RANGE_CUTOFF_LN: f64 = -46.0; // ln(1e-20)

impl DeMap {
    /// Abscissa and Jacobian at `t`; `None` where the map degenerates in
    /// floating point.
    fn node(&self, t: f64) -> Option<(f64, f64)> {
        let u = FRAC_PI_2 * t.sinh();
        let dudt = FRAC_PI_2 * t.cosh();
        let (x, w) = match *self {
            DeMap::ExpSinh { start } => {
                let e = u.exp();
                (start + e, e * dudt)
            }
            DeMap::TanhSinh { a, b } => {
                let q = (-2.0 * u.abs()).exp();
                let frac = q / (1.0 + q);
                let x = if u < 0.0 {
                    a + (b - a) * frac
                } else {
                    b - (b - a) * frac
                };
                let w = (b - a) * dudt * 2.0 * q / ((1.0 + q) * (1.0 + q));
                if x <= a || x >= b {
                    return None;
                }
                (x, w)
            }
        };
        (x.is_finite() && w.is_finite() && w > 0.0).then_some((x, w))
    }

    /// Largest `ln(envelope(x) * w)` over the coarse grid.
    fn max_log_envelope(&self, log_env: &dyn Fn(f64) -> f64) -> f64 {
        level0()
            .filter_map(|t| self.node(t).map(|(x, w)| log_env(x) + w.ln()))
            .filter(|v| !v.is_nan())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn level0() -> impl Iterator<Item = f64> {
    let k = (T_MAX / H0) as i64;
    (-k..=k).map(|i| i as f64 * H0)
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct DeOptions {
    pub rel: f64,
    pub abs: f64,
    pub max_levels: usize,
}

impl DeOptions {
    pub fn from_tol(tol: &Tolerances) -> Self {
        Self {
            rel: tol.quad_rel,
            abs: tol.quad_abs,
            max_levels: tol.quad_max_levels,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct DeOutcome<T> {
    pub value: T,
    pub error: f64,
    /// `∫|f|` on the final level.
    pub l1: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Integrates `f` over the domain of `map` with level doubling.
///
/// When `log_env` is given it must bound `ln|f(x)|`; it fixes which nodes are
/// worth evaluating, so `f` may vanish on whole sub-intervals without the
/// range being cut short. Without it the range is taken from the coarse-grid
/// values of `f` itself.
pub(crate) fn de_integrate<T: QuadValue>(
    map: DeMap,
    mut f: impl FnMut(f64) -> T,
    log_env: Option<&dyn Fn(f64) -> f64>,
    opts: &DeOptions,
) -> DeOutcome<T> {
    let mut evaluations = 0usize;

    // coarse pass: candidate nodes, their terms and envelope values
    let mut coarse: Vec<(f64, f64, f64, f64)> = Vec::new(); // (t, x, w, ln env*w)
    for t in level0() {
        if let Some((x, w)) = map.node(t) {
            let le = match log_env {
                Some(env) => env(x) + w.ln(),
                None => 0.0,
            };
            coarse.push((t, x, w, le));
        }
    }
    let env_peak = coarse.iter().map(|c| c.3).fold(f64::NEG_INFINITY, f64::max);
    // never evaluate where even the envelope is below the double range
    coarse.retain(|c| log_env.is_none() || c.3 >= env_peak - 700.0);

    let mut terms: Vec<(f64, T)> = Vec::with_capacity(coarse.len());
    for &(t, x, w, _) in &coarse {
        let v = f(x) * w;
        evaluations += 1;
        terms.push((t, v));
    }
    let peak = terms.iter().map(|(_, v)| v.magnitude()).fold(0.0, f64::max);
    let zero = DeOutcome {
        value: T::default(),
        error: 0.0,
        l1: 0.0,
        evaluations,
        converged: true,
    };
    if coarse.is_empty() {
        return zero;
    }

    // t range kept for refinement
    let (t_lo, t_hi) = {
        let keep: Vec<f64> = match log_env {
            Some(_) => {
                let reference = if peak > 0.0 { peak.ln() } else { env_peak };
                coarse
                    .iter()
                    .filter(|c| c.3 >= reference + RANGE_CUTOFF_LN)
                    .map(|c| c.0)
                    .collect()
            }
            None => {
                if peak == 0.0 {
                    return zero;
                }
                terms
                    .iter()
                    .filter(|(_, v)| v.magnitude() >= peak * RANGE_CUTOFF_LN.exp())
                    .map(|(t, _)| *t)
                    .collect()
            }
        };
        match (keep.first(), keep.last()) {
            (Some(&lo), Some(&hi)) => (
                (lo - H0).max(coarse[0].0),
                (hi + H0).min(coarse[coarse.len() - 1].0),
            ),
            _ => return zero,
        }
    };

    let mut sum = T::default();
    let mut l1 = 0.0;
    for (t, v) in &terms {
        if *t >= t_lo && *t <= t_hi {
            sum = sum + *v;
            l1 += v.magnitude();
        }
    }
    let mut h = H0;
    let mut estimate = sum * h;
    let mut diff = f64::INFINITY;

    for level in 1..=opts.max_levels {
        h *= 0.5;
        let mut fresh = T::default();
        let mut fresh_l1 = 0.0;
        let first = (t_lo / h).ceil() as i64;
        let last = (t_hi / h).floor() as i64;
        for k in first..=last {
            if k.rem_euclid(2) == 0 {
                continue;
            }
            let t = k as f64 * h;
            if let Some((x, w)) = map.node(t) {
                let v = f(x) * w;
                evaluations += 1;
                fresh = fresh + v;
                fresh_l1 += v.magnitude();
            }
        }
        let next = estimate * 0.5 + fresh * h;
        l1 += fresh_l1;
        diff = (next - estimate).magnitude();
        estimate = next;
        let l1_int = l1 * h; // ∫|f| at this level
        let floor = 32.0 * f64::EPSILON * l1_int;
        let target = opts.abs.max(opts.rel * estimate.magnitude());
        if level >= 2 && (diff <= target || (level >= 3 && diff <= floor)) {
            return DeOutcome {
                value: estimate,
                error: diff.max(4.0 * f64::EPSILON * l1_int),
                l1: l1_int,
                evaluations,
                converged: true,
            };
        }
    }
    DeOutcome {
        value: estimate,
        error: diff,
        l1: l1 * h,
        evaluations,
        converged: false,
    }
}

/// Result of a radial integral carried as `value * exp(log_scale)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ScaledQuad {
    pub log_scale: f64,
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl ScaledQuad {
    pub fn to_quad(self) -> QuadResult {
        let s = self.log_scale.exp();
        QuadResult {
            value: self.value * s,
            abs_error_estimate: self.error * s,
            evaluations: self.evaluations,
            converged: self.converged,
        }
    }
}

/// `∫_0^∞ r^power · exp(log_weight(r)) · g(r) · e^{-c r^m} dr` with `|g| ≤ sup`.
///
/// `log_weight` must be a pointwise value, not a bound; it is folded into the
/// envelope that decides which nodes get evaluated.
pub(crate) fn radial_integral_scaled(
    c: f64,
    m: f64,
    power: f64,
    log_weight: &dyn Fn(f64) -> f64,
    g: &mut dyn FnMut(f64) -> f64,
    sup: f64,
    opts: &DeOptions,
) -> ScaledQuad {
    let s = (power + 1.0) / m;
    let inv_m = 1.0 / m;
    let r_of = |u: f64| (u / c).powf(inv_m);
    // ln of the u-integrand without g
    let log_w = |u: f64| (s - 1.0) * u.ln() - u + log_weight(r_of(u));
    let map = DeMap::ExpSinh { start: 0.0 };
    let sup_ln = if sup > 0.0 { sup.ln() } else { 0.0 };
    let env = |u: f64| log_w(u) + sup_ln;
    let shift = map.max_log_envelope(&env) - sup_ln;
    let prefactor = -m.ln() - s * c.ln();
    if !shift.is_finite() {
        return ScaledQuad {
            log_scale: prefactor,
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    // exp(x) carries a relative error of about ε|x|, where |x| is the size
    // of the pieces summed into x, not of x itself
    let exponent_size = Cell::new(0.0f64);
    let out = de_integrate(
        map,
        |u| {
            let r = r_of(u);
            let weight = log_weight(r);
            let lw = (s - 1.0) * u.ln() - u + weight - shift;
            if lw < -745.0 {
                0.0
            } else {
                let size = ((s - 1.0) * u.ln()).abs() + u + weight.abs() + shift.abs();
                exponent_size.set(exponent_size.get().max(size));
                lw.exp() * g(r)
            }
        },
        Some(&|u: f64| env(u) - shift),
        opts,
    );
    let amplified = f64::EPSILON * (exponent_size.get() + (prefactor + shift).abs()) * out.l1;
    ScaledQuad {
        log_scale: prefactor + shift,
        value: out.value,
        error: out.error + amplified,
        evaluations: out.evaluations,
        converged: out.converged,
    }
}

/// `∫_0^∞ r^power g(r) e^{-c r^m} dr`.
///
/// Returns `converged = false` (not an error) when the level cap is reached.
/// Fails if `g` is ever seen to exceed its declared bound.
pub fn integrate_radial(
    g: &RadialSymbol<'_>,
    c: f64,
    m: f64,
    power: f64,
    tol: &Tolerances,
) -> Result<QuadResult> {
    Ok(integrate_radial_scaled(g, c, m, power, tol)?.to_quad())
}

pub(crate) fn integrate_radial_scaled(
    g: &RadialSymbol<'_>,
    c: f64,
    m: f64,
    power: f64,
    tol: &Tolerances,
) -> Result<ScaledQuad> {
    require_positive("c", c)?;
    require_positive("m", m)?;
    require_nonnegative("power", power)?;
    let violation = Cell::new(None);
    let sup = g.sup_bound();
    let mut eval = |r: f64| {
        let v = g.eval(r);
        if v.abs() > sup * (1.0 + 1e-12) && violation.get().is_none() {
            violation.set(Some((v, r)));
        }
        v
    };
    let out = radial_integral_scaled(c, m, power, &|_| 0.0, &mut eval, sup, &DeOptions::from_tol(tol));
    if let Some((value, radius)) = violation.get() {
        return Err(Error::SymbolBound {
            value,
            radius,
            bound: sup,
        });
    }
    Ok(out)
}

/// `ln ∫_ℂ |w|^{2n} e^{-c|w|^m} dA(w) = ln[(2π/m) c^{-(2n+2)/m} Γ((2n+2)/m)]`.
pub fn radial_moment(c: f64, m: f64, n: usize) -> Result<f64> {
    require_positive("c", c)?;
    require_positive("m", m)?;
    Ok(log_radial_moment(c, m, n))
}

pub(crate) fn log_radial_moment(c: f64, m: f64, n: usize) -> f64 {
    let s = (2.0 * n as f64 + 2.0) / m;
    (2.0 * PI / m).ln() - s * c.ln() + ln_gamma(s)
}

/// `∫_0^{2π} f(θ) dθ` by the trapezoid rule, doubling the node count until two
/// successive sums differ by at most `abs_tol`. Returns `(value, error, evals)`.
pub(crate) fn periodic_trapezoid(
    mut f: impl FnMut(f64) -> f64,
    start_nodes: usize,
    abs_tol: f64,
    max_nodes: usize,
) -> (f64, f64, usize) {
    let mut n = start_nodes.max(2);
    let mut h = 2.0 * PI / n as f64;
    let mut sum: f64 = (0..n).map(|k| f(k as f64 * h)).sum();
    let mut evals = n;
    let mut value = sum * h;
    loop {
        let fresh: f64 = (0..n).map(|k| f((k as f64 + 0.5) * h)).sum();
        evals += n;
        sum += fresh;
        n *= 2;
        h *= 0.5;
        let next = sum * h;
        let diff = (next - value).abs();
        value = next;
        if diff <= abs_tol || n >= max_nodes {
            return (value, diff, evals);
        }
    }
}
