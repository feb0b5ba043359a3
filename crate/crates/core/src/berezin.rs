//! Berezin transform `(Bf)(z) = ∫ f(w) |K(z,w)|² / K(z,z) dμ(w)` of bounded
//! symbols, with `dμ = (m α^{2/m} / (2π Γ(2/m))) e^{-α|w|^m} dA`.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{require_nonnegative, Error, Result};
use crate::quadrature::{
    integrate_radial_scaled, periodic_trapezoid, radial_integral_scaled, DeOptions, QuadResult,
    RadialSymbol,
};
use crate::special_fn::FockSpace;

const ANGULAR_START: usize = 16;
const ANGULAR_MAX: usize = 1 << 16;
/// Normalized series terms below this are dropped from angular sums.
const NEGLIGIBLE: f64 = 1e-20;

/// Angular rules run well below the radial tolerance so their noise stays
/// under the radial rule's rounding floor.
fn angular_rel(tol: &crate::config::Tolerances) -> f64 {
    (1e-3 * tol.quad_rel).max(8.0 * f64::EPSILON)
}

/// A bounded symbol on the plane with its declared sup-norm.
///
/// The callable must be safe to invoke concurrently.
pub struct PlanarSymbol<'a> {
    eval: Box<dyn Fn(Complex64) -> f64 + Send + Sync + 'a>,
    sup_bound: f64,
}

impl<'a> PlanarSymbol<'a> {
    pub fn new(sup_bound: f64, eval: impl Fn(Complex64) -> f64 + Send + Sync + 'a) -> Self {
        Self {
            eval: Box::new(eval),
            sup_bound,
        }
    }

    /// `w ↦ g(|w|)`.
    pub fn from_radial(g: RadialSymbol<'a>) -> Self {
        let sup = g.sup_bound();
        Self::new(sup, move |w| g.eval(w.norm()))
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn eval(&self, w: Complex64) -> f64 {
        (self.eval)(w)
    }
}

impl std::fmt::Debug for PlanarSymbol<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PlanarSymbol")
            .field("sup_bound", &self.sup_bound)
            .finish_non_exhaustive()
    }
}

/// The test function `f_δ(w) = e^{-δ|w|^m}`; `δ = 0` is the constant `1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpSymbol {
    delta: f64,
}

impl ExpSymbol {
    pub fn new(delta: f64) -> Result<Self> {
        Ok(Self {
            delta: require_nonnegative("delta", delta)?,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn radial(&self, m: f64) -> RadialSymbol<'static> {
        let d = self.delta;
        RadialSymbol::new(1.0, move |r| (-d * r.powf(m)).exp())
    }

    pub fn planar(&self, m: f64) -> PlanarSymbol<'static> {
        let d = self.delta;
        PlanarSymbol::new(1.0, move |w| (-d * w.norm().powf(m)).exp())
    }
}

/// Either kind of symbol accepted by [`berezin_at_zero`].
#[derive(Debug)]
pub enum Symbol<'a> {
    Radial(RadialSymbol<'a>),
    Planar(PlanarSymbol<'a>),
}

/// Records the first sup-bound violation seen by a planar symbol.
struct Checked<'s, 'a> {
    f: &'s PlanarSymbol<'a>,
    violation: Cell<Option<(f64, f64)>>,
}

impl<'s, 'a> Checked<'s, 'a> {
    fn new(f: &'s PlanarSymbol<'a>) -> Self {
        Self {
            f,
            violation: Cell::new(None),
        }
    }

    fn eval(&self, w: Complex64) -> f64 {
        let v = self.f.eval(w);
        if v.abs() > self.f.sup_bound * (1.0 + 1e-12) && self.violation.get().is_none() {
            self.violation.set(Some((v, w.norm())));
        }
        v
    }

    fn finish(&self) -> Result<()> {
        match self.violation.get() {
            Some((value, radius)) => Err(Error::SymbolBound {
                value,
                radius,
                bound: self.f.sup_bound,
            }),
            None => Ok(()),
        }
    }
}

/// `ln(m α^{2/m} / 2π)`, the density constant without `1/Γ(2/m)`.
fn log_prefactor(space: &FockSpace) -> f64 {
    let p = space.params();
    p.m().ln() + p.order() * p.alpha().ln() - (2.0 * PI).ln()
}

/// `(Bf)(0) = ∫ f dμ`.
///
/// Radial symbols use one radial integral; planar symbols a radial
/// double-exponential rule over trapezoid-rule angular averages.
pub fn berezin_at_zero(space: &FockSpace, f: &Symbol<'_>) -> Result<QuadResult> {
    let p = *space.params();
    let tol = space.tolerances();
    let log_mu = space.params().log_density_constant();
    match f {
        Symbol::Radial(g) => {
            let q = integrate_radial_scaled(g, p.alpha(), p.m(), 1.0, tol)?;
            let mut out = q;
            out.log_scale += log_mu + (2.0 * PI).ln();
            Ok(out.to_quad())
        }
        Symbol::Planar(g) => {
            let checked = Checked::new(g);
            let sup = g.sup_bound();
            let ang_tol = angular_rel(tol) * 2.0 * PI * sup;
            let ang_err = Cell::new(0.0f64);
            let ang_evals = Cell::new(0usize);
            let mut angular = |r: f64| {
                let (v, e, n) = periodic_trapezoid(
                    |phi| checked.eval(Complex64::from_polar(r, phi)),
                    ANGULAR_START,
                    ang_tol,
                    ANGULAR_MAX,
                );
                ang_err.set(ang_err.get().max(e));
                ang_evals.set(ang_evals.get() + n);
                v
            };
            let opts = DeOptions::from_tol(tol);
            let mut q = radial_integral_scaled(
                p.alpha(),
                p.m(),
                1.0,
                &|_| 0.0,
                &mut angular,
                2.0 * PI * sup,
                &opts,
            );
            checked.finish()?;
            q.log_scale += log_mu;
            q.evaluations = ang_evals.get();
            let mut out = q.to_quad();
            out.abs_error_estimate += ang_err.get() / (2.0 * PI);
            Ok(out)
        }
    }
}

/// `(B f_δ)(z)` for `|z| = r` through the series in the monomial basis.
///
/// Expanding `|K(z,w)|²` in `|z|^{2n}|w|^{2n}` and integrating term by term
/// gives `m α^{2/m} / (2π S(r²)) Σ_n r^{2n} / s_n² · ∫|w|^{2n} e^{-(α+δ)|w|^m} dA`.
/// Since `Γ((2n+2)/m) = α^{2n/m} s_n`, the sum is `q S(q r²)` with
/// `q = (α/(α+δ))^{2/m}`, so the transform is a ratio of two positive kernel
/// series and is summed as such.
pub fn berezin_exp_radial(space: &FockSpace, delta: f64, r: f64) -> Result<QuadResult> {
    require_nonnegative("delta", delta)?;
    require_nonnegative("r", r)?;
    let p = space.params();
    let ln_q = p.order() * (p.alpha().ln() - (p.alpha() + delta).ln());
    let ln_r2 = 2.0 * r.ln();
    let num = space.sum_direct(ln_q + ln_r2, 0.0)?;
    let den = space.sum_direct(ln_r2, 0.0)?;
    let log_value = ln_q + num.log_scale - den.log_scale + (num.sum.re / den.sum.re).ln();
    let value = log_value.exp();
    let rel = (num.tail + num.rounding) / num.sum.re
        + (den.tail + den.rounding) / den.sum.re
        + f64::EPSILON * (4.0 + log_value.abs());
    Ok(QuadResult {
        value,
        abs_error_estimate: value * rel,
        evaluations: num.terms + den.terms,
        converged: true,
    })
}

/// `(Bf)(z)` for a general bounded symbol by polar quadrature in `w`.
///
/// For each radius `ρ` the angular integral of `f(ρe^{iφ}) |S(z ρ e^{-iφ})|²`
/// is taken by the trapezoid rule, with `S` normalized by `S(|z|ρ)` so the
/// integrand stays within `[-sup, sup]`; the normalization re-enters in log
/// form as a weight of the radial rule.
pub fn berezin_general(space: &FockSpace, f: &PlanarSymbol<'_>, z: Complex64) -> Result<QuadResult> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("evaluation point {z} is not finite")));
    }
    let p = *space.params();
    let tol = space.tolerances();
    let zr = z.norm();
    let ln_zr = zr.ln();
    let theta_z = z.arg();
    let zz = space.sum_direct(2.0 * ln_zr, 0.0)?;
    let ln_s_zz = zz.log_scale + zz.sum.re.ln();
    // the weight 2 ln S(|z|ρ) - ln S(|z|²) near its peak carries about this
    // relative rounding error
    let weight_rounding = 5.0 * zz.rounding / zz.sum.re + 16.0 * f64::EPSILON;

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let fail = |e: Error| {
        failure.borrow_mut().get_or_insert(e);
    };

    // near |z|, ln S(|z|ρ) ≈ α (|z|ρ)^{m/2}, so the radial integrand behaves
    // like exp(-α (ρ^{m/2} - |z|^{m/2})²); past rho_max it is below e^{-1200}
    // and skipping it keeps the series away from needlessly huge arguments
    let y = zr.powf(p.m() / 2.0) + (1200.0 / p.alpha()).sqrt();
    let rho_max = y.powf(2.0 / p.m());

    let log_weight = |rho: f64| -> f64 {
        if rho > rho_max {
            return f64::NEG_INFINITY;
        }
        match space.log_kernel_real(ln_zr + rho.ln()) {
            Ok(ls) => 2.0 * ls - ln_s_zz,
            Err(e) => {
                fail(e);
                f64::NEG_INFINITY
            }
        }
    };

    let checked = Checked::new(f);
    let sup = f.sup_bound();
    let mut terms = Vec::new();
    let ang_rel = Cell::new(0.0f64);
    let ang_evals = Cell::new(0usize);
    let mut angular = |rho: f64| -> f64 {
        if rho > rho_max {
            return 0.0;
        }
        let (_, total) = match space.normalized_terms(ln_zr + rho.ln(), &mut terms) {
            Ok(v) => v,
            Err(e) => {
                fail(e);
                return 0.0;
            }
        };
        // |Σ b_n u^n| is unchanged by dropping a common factor u^lo, so only
        // the window of non-negligible normalized terms is kept
        let inv = 1.0 / total;
        let lo = terms.iter().position(|t| t * inv >= NEGLIGIBLE).unwrap_or(0);
        let hi = terms.iter().rposition(|t| t * inv >= NEGLIGIBLE).unwrap_or(0);
        let b: Vec<f64> = terms[lo..=hi].iter().map(|t| t * inv).collect();
        let parseval: f64 = b.iter().map(|x| x * x).sum();
        let abs_tol = angular_rel(tol) * 2.0 * PI * sup * parseval;
        let (v, e, n) = angular_kernel_integral(
            &b,
            theta_z,
            |phi| checked.eval(Complex64::from_polar(rho, phi)),
            abs_tol,
        );
        ang_rel.set(ang_rel.get().max(e / (2.0 * PI * parseval)));
        ang_evals.set(ang_evals.get() + n);
        v
    };

    let opts = DeOptions::from_tol(tol);
    let mut q = radial_integral_scaled(
        p.alpha(),
        p.m(),
        1.0,
        &log_weight,
        &mut angular,
        2.0 * PI * sup,
        &opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    checked.finish()?;
    q.log_scale += log_prefactor(space);
    q.evaluations = ang_evals.get();
    let mut out = q.to_quad();
    out.abs_error_estimate += ang_rel.get() * sup + weight_rounding * out.value.abs();
    Ok(out)
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Trapezoid rule for `∫_0^{2π} f(φ) |Σ_j b_j e^{ij(θ-φ)}|² dφ`, doubling the
/// node count until two levels agree to `abs_tol`. The polynomial values at
/// `n` equispaced angles are one length-`n` FFT of the folded coefficients.
/// Returns `(value, error, evaluations of f)`.
fn angular_kernel_integral(
    b: &[f64],
    theta: f64,
    mut f: impl FnMut(f64) -> f64,
    abs_tol: f64,
) -> (f64, f64, usize) {
    let coeffs: Vec<Complex64> = b
        .iter()
        .enumerate()
        .map(|(j, &bj)| Complex64::from_polar(bj, j as f64 * theta))
        .collect();
    let mut n = b.len().next_power_of_two().max(ANGULAR_START);
    let mut fvals: Vec<f64> = (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect();
    let mut evals = n;
    let mut buf = Vec::new();
    let level = |n: usize, fvals: &[f64], buf: &mut Vec<Complex64>| -> f64 {
        buf.clear();
        buf.resize(n, Complex64::new(0.0, 0.0));
        for (j, c) in coeffs.iter().enumerate() {
            buf[j % n] += c;
        }
        let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
        fft.process(buf);
        let sum: f64 = buf.iter().zip(fvals).map(|(p, fv)| fv * p.norm_sqr()).sum();
        sum * 2.0 * PI / n as f64
    };
    let mut value = level(n, &fvals, &mut buf);
    loop {
        let mut next = Vec::with_capacity(2 * n);
        for (k, &fv) in fvals.iter().enumerate() {
            next.push(fv);
            next.push(f(2.0 * PI * (2 * k + 1) as f64 / (2 * n) as f64));
        }
        evals += n;
        n *= 2;
        fvals = next;
        let refined = level(n, &fvals, &mut buf);
        let diff = (refined - value).abs();
        value = refined;
        if diff <= abs_tol || n >= ANGULAR_MAX {
            return (value, diff, evals);
        }
    }
}
