//! Nested Berezin transforms at the origin and the commutator defect
//! `(B_β B_α f_δ)(0) - (B_α B_β f_δ)(0)`.
//!
//! Both nested values reduce to a series in the radial functionals
//!
//! ```text
//! U_{α,β}(n) = α^{4n/m} / Γ((2n+2)/m) · ∫_ℂ |z|^{2n} e^{-β|z|^m} / S_{α,m}(|z|²) dA(z),
//! (B_β B_α f_δ)(0) = m (αβ)^{2/m} / (2π Γ(2/m)) · Σ_n (δ+α)^{-(2n+2)/m} U_{α,β}(n).
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use crate::berezin::{berezin_at_zero, berezin_exp_radial, Symbol};
use crate::config::Tolerances;
use crate::error::{require_nonnegative, require_positive, Error, Result};
use crate::quadrature::{radial_integral_scaled, DeOptions, RadialSymbol};
use crate::special_fn::{ln_gamma, FockSpace, WeightParams};
use crate::sum::{log_add_exp, KahanSum};

/// `U_{α,β}(n)` with its absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UValue {
    pub n: usize,
    pub value: f64,
    pub error: f64,
}

/// A nested transform value at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NestedValue {
    pub value: f64,
    /// Series tail + propagated U errors + rounding.
    pub error_bound: f64,
    pub n_terms: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectReport {
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    pub delta: f64,
    /// `(B_β B_α f_δ)(0)`.
    pub forward: NestedValue,
    /// `(B_α B_β f_δ)(0)`.
    pub backward: NestedValue,
    pub defect: f64,
    pub combined_error: f64,
    pub significant: bool,
    pub kappa: f64,
}

/// `U_{α,β}(n) - U_{β,α}(n)` for one `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryGap {
    pub n: usize,
    pub gap: f64,
    pub error: f64,
}

impl SymmetryGap {
    pub fn significant(&self, kappa: f64) -> bool {
        self.gap.abs() > kappa * self.error
    }
}

/// One line of an identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_gap: f64,
    pub pass: bool,
}

/// Finite-difference side, closed-form side and their relative gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_gap: f64,
}

/// Log-log least-squares slopes of `I_0(β)` and `I_p(β)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticSlopes {
    pub p: usize,
    pub slope_0: f64,
    pub slope_p: f64,
    /// `(β, ln I_0, ln I_p)` per grid node.
    pub points: Vec<(f64, f64, f64)>,
}

#[derive(Default)]
struct UTable {
    values: Vec<UValue>,
}

type SpaceKey = (u64, u64);
type UKey = (u64, u64, u64);

/// Evaluates nested transforms and defects, sharing moment tables and
/// `U` values between calls. Safe to use from many threads.
pub struct Certifier {
    tol: Tolerances,
    kappa: f64,
    spaces: Mutex<HashMap<SpaceKey, Arc<FockSpace>>>,
    u_tables: Mutex<HashMap<UKey, Arc<Mutex<UTable>>>>,
}

impl std::fmt::Debug for Certifier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Certifier")
            .field("tol", &self.tol)
            .field("kappa", &self.kappa)
            .finish_non_exhaustive()
    }
}

impl Certifier {
    pub fn new(tol: Tolerances, kappa: f64) -> Self {
        Self {
            tol,
            kappa,
            spaces: Mutex::new(HashMap::new()),
            u_tables: Mutex::new(HashMap::new()),
        }
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// The shared space for `(alpha, m)`.
    pub fn space(&self, alpha: f64, m: f64) -> Result<Arc<FockSpace>> {
        let params = WeightParams::new(alpha, m)?;
        let mut spaces = self.spaces.lock().expect("space cache poisoned");
        Ok(spaces
            .entry((alpha.to_bits(), m.to_bits()))
            .or_insert_with(|| FockSpace::shared(params, self.tol))
            .clone())
    }

    fn u_table(&self, alpha: f64, beta: f64, m: f64) -> Arc<Mutex<UTable>> {
        let mut tables = self.u_tables.lock().expect("U cache poisoned");
        tables
            .entry((alpha.to_bits(), beta.to_bits(), m.to_bits()))
            .or_default()
            .clone()
    }

    /// `U_{α,β}(n)`, memoized per `(α, β, m)`.
    pub fn u_function(&self, alpha: f64, beta: f64, m: f64, n: usize) -> Result<UValue> {
        require_positive("beta", beta)?;
        let space = self.space(alpha, m)?;
        let table = self.u_table(alpha, beta, m);
        let mut table = table.lock().expect("U table poisoned");
        while table.values.len() <= n {
            let k = table.values.len();
            let u = u_uncached(&space, beta, k)?;
            table.values.push(u);
        }
        Ok(table.values[n])
    }

    /// `(B_β B_α f_δ)(0)` by the `U` series.
    pub fn nested_at_zero(&self, alpha: f64, beta: f64, m: f64, delta: f64) -> Result<NestedValue> {
        require_nonnegative("delta", delta)?;
        require_positive("beta", beta)?;
        let space = self.space(alpha, m)?;
        let a = space.params().order();
        let log_c = m.ln() + a * (alpha.ln() + beta.ln()) - (2.0 * PI).ln() - ln_gamma(a);
        let log_shift = (delta + alpha).ln();
        // limit of the term ratio: U(n+1)/U(n) → (α²/(α+β))^{2/m}
        let limit_ratio = (a * (2.0 * alpha.ln() - (alpha + beta).ln() - log_shift)).exp();

        let cap = self.tol.series_max_terms;
        let mut log_terms: Vec<f64> = Vec::new();
        let mut rel_errors: Vec<f64> = Vec::new();
        let mut log_partial = f64::NEG_INFINITY;
        let mut n = 0usize;
        let tail_ratio = loop {
            if n >= cap {
                return Err(Error::NonConvergence {
                    what: "nested transform series",
                    steps: n,
                    partial: log_partial.exp(),
                    bound: log_terms.last().map_or(f64::INFINITY, |t| t.exp()),
                });
            }
            let u = self.u_function(alpha, beta, m, n)?;
            let lt = log_c - a * (n as f64 + 1.0) * log_shift + u.value.ln();
            log_terms.push(lt);
            rel_errors.push(u.error / u.value);
            log_partial = log_add_exp(log_partial, lt);
            if n >= 4 {
                let observed = log_terms[n - 4..]
                    .windows(2)
                    .map(|w| (w[1] - w[0]).exp())
                    .fold(0.0, f64::max);
                let ratio = observed.max(limit_ratio);
                if ratio < 1.0
                    && lt <= self.tol.series.ln() + log_partial + (1.0 - ratio).ln()
                {
                    break ratio;
                }
            }
            n += 1;
        };

        let peak = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = KahanSum::new();
        let mut propagated = 0.0;
        for (lt, rel) in log_terms.iter().zip(&rel_errors) {
            let t = (lt - peak).exp();
            acc.add(t);
            propagated += t * rel;
        }
        let scale = peak.exp();
        let last = log_terms[log_terms.len() - 1];
        let value = acc.value() * scale;
        let tail = last.exp() * tail_ratio / (1.0 - tail_ratio);
        let rounding = value * f64::EPSILON * (4.0 + log_terms.len() as f64 + 2.0 * log_c.abs());
        Ok(NestedValue {
            value,
            error_bound: propagated * scale + tail + rounding,
            n_terms: log_terms.len(),
        })
    }

    /// Forward and backward nested transforms and the significance verdict.
    pub fn defect(&self, alpha: f64, beta: f64, m: f64, delta: f64) -> Result<DefectReport> {
        let forward = self.nested_at_zero(alpha, beta, m, delta)?;
        let backward = self.nested_at_zero(beta, alpha, m, delta)?;
        let defect = forward.value - backward.value;
        let combined_error = forward.error_bound + backward.error_bound;
        Ok(DefectReport {
            alpha,
            beta,
            m,
            delta,
            forward,
            backward,
            defect,
            combined_error,
            significant: defect.abs() > self.kappa * combined_error,
            kappa: self.kappa,
        })
    }

    /// `U_{α,β}(n) - U_{β,α}(n)` for every integer `0 ≤ n < m/2`.
    pub fn lemma1_witness(&self, alpha: f64, beta: f64, m: f64) -> Result<Vec<SymmetryGap>> {
        require_positive("m", m)?;
        let count = (m / 2.0).ceil() as usize;
        (0..count)
            .map(|n| {
                let ab = self.u_function(alpha, beta, m, n)?;
                let ba = self.u_function(beta, alpha, m, n)?;
                Ok(SymmetryGap {
                    n,
                    gap: ab.value - ba.value,
                    error: ab.error + ba.error,
                })
            })
            .collect()
    }

    /// At `m = 2`: `U_{α,β}(0) = U_{β,α}(0)` and
    /// `U_{α,β}(1) - U_{β,α}(1) = (α - β) U_{α,β}(0)`, each at relative
    /// tolerance `rel_tol`.
    pub fn tt_identities_m2(&self, alpha: f64, beta: f64, rel_tol: f64) -> Result<Vec<IdentityCheck>> {
        let u = |a: f64, b: f64, n: usize| self.u_function(a, b, 2.0, n).map(|u| u.value);
        let u0_ab = u(alpha, beta, 0)?;
        let u0_ba = u(beta, alpha, 0)?;
        let u1_ab = u(alpha, beta, 1)?;
        let u1_ba = u(beta, alpha, 1)?;
        let check = |name, lhs: f64, rhs: f64, scale: f64| {
            let rel_gap = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(scale);
            IdentityCheck {
                name,
                lhs,
                rhs,
                rel_gap,
                pass: rel_gap <= rel_tol,
            }
        };
        Ok(vec![
            check("U(0) symmetry", u0_ab, u0_ba, u0_ab),
            check("U(1) gap", u1_ab - u1_ba, (alpha - beta) * u0_ab, u1_ab.max(u1_ba)),
        ])
    }

    /// Central difference of `β ↦ U_{α,β}(n)` against
    /// `-((n+1)/(α² p)) U_{α,β}(n+p)` for `m = 2p`.
    pub fn derivative_identity_check(
        &self,
        alpha: f64,
        beta: f64,
        m: f64,
        n: usize,
        h_rel: f64,
    ) -> Result<DerivativeCheck> {
        let p = even_half(m)?;
        require_positive("h_rel", h_rel)?;
        let space = self.space(alpha, m)?;
        let h = h_rel * beta;
        let up = u_uncached(&space, beta + h, n)?.value;
        let down = u_uncached(&space, beta - h, n)?.value;
        let lhs = (up - down) / (2.0 * h);
        let rhs = -((n as f64 + 1.0) / (alpha * alpha * p as f64))
            * self.u_function(alpha, beta, m, n + p)?.value;
        Ok(DerivativeCheck {
            lhs,
            rhs,
            rel_gap: (lhs - rhs).abs() / rhs.abs(),
        })
    }

    /// Slopes of `ln I_0` and `ln I_p` against `ln β`, where
    /// `I_k(β) = ∫ |z|^{2k} e^{-β|z|^m} / S_{α,m}(|z|²) dA`, `m = 2p`.
    pub fn asymptotic_slopes(&self, m: f64, alpha: f64, betas: &[f64]) -> Result<AsymptoticSlopes> {
        let p = even_half(m)?;
        if betas.len() < 2 {
            return Err(Error::Domain("slope fit needs at least two β nodes".into()));
        }
        let space = self.space(alpha, m)?;
        let mut points = Vec::with_capacity(betas.len());
        for &beta in betas {
            require_positive("beta", beta)?;
            let i0 = log_weighted_integral(&space, beta, 0)?;
            let ip = log_weighted_integral(&space, beta, p)?;
            points.push((beta, i0.0, ip.0));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
        let y0: Vec<f64> = points.iter().map(|p| p.1).collect();
        let yp: Vec<f64> = points.iter().map(|p| p.2).collect();
        Ok(AsymptoticSlopes {
            p,
            slope_0: ols_slope(&xs, &y0),
            slope_p: ols_slope(&xs, &yp),
            points,
        })
    }

    /// `(B_β B_α f_δ)(0)` by applying the `β` transform at the origin, by
    /// quadrature, to the computed radial function `B_α f_δ`.
    pub fn nested_by_composition(&self, alpha: f64, beta: f64, m: f64, delta: f64) -> Result<f64> {
        let inner = self.space(alpha, m)?;
        let outer = self.space(beta, m)?;
        let failure = Mutex::new(None);
        let g = RadialSymbol::new(1.0, |r| match berezin_exp_radial(&inner, delta, r) {
            Ok(q) => q.value,
            Err(e) => {
                failure.lock().expect("poisoned").get_or_insert(e);
                0.0
            }
        });
        let q = berezin_at_zero(&outer, &Symbol::Radial(g))?;
        if let Some(e) = failure.into_inner().expect("poisoned") {
            return Err(e);
        }
        Ok(q.value)
    }
}

/// `p` for `m = 2p`, `p ≥ 1` an integer.
fn even_half(m: f64) -> Result<usize> {
    let p = (m / 2.0).round();
    if p >= 1.0 && m == 2.0 * p {
        Ok(p as usize)
    } else {
        Err(Error::InvalidParameter {
            name: "m",
            value: m,
            reason: "must be an even integer ≥ 2",
        })
    }
}

/// `ln ∫_ℂ |z|^{2k} e^{-β|z|^m} / S(|z|²) dA` and its relative error.
fn log_weighted_integral(space: &FockSpace, beta: f64, k: usize) -> Result<(f64, f64)> {
    let p = space.params();
    let m = p.m();
    let tol = space.tolerances();
    let s = (2.0 * k as f64 + 2.0) / m;
    let base = |u: f64| (s - 1.0) * u.ln() - u;
    let failure = Mutex::new(None);
    let log_inv_s = |r: f64| match space.log_kernel_real(2.0 * r.ln()) {
        Ok(ls) => -ls,
        Err(e) => {
            failure.lock().expect("poisoned").get_or_insert(e);
            f64::NEG_INFINITY
        }
    };
    let r_of = |u: f64| (u / beta).powf(1.0 / m);
    let u_ref = (s - 1.0).max(1.0);
    let reference = base(u_ref) + log_inv_s(r_of(u_ref));
    // S increases and u^{s-1} e^{-u} decreases past s-1, so once
    // base(u_j) + ln(1/S(r_j²)) is e^{-750} below the reference the integrand
    // is negligible for all r ≥ r_j
    let mut r_cut = r_of(u_ref);
    for _ in 0..400 {
        let u = beta * r_cut.powf(m);
        if base(u.max(s - 1.0)) + log_inv_s(r_cut) < reference - 750.0 {
            break;
        }
        r_cut *= 2f64.powf(0.25);
    }
    let log_weight = |r: f64| -> f64 {
        if r > r_cut {
            return f64::NEG_INFINITY;
        }
        log_inv_s(r)
    };
    let q = radial_integral_scaled(
        beta,
        m,
        2.0 * k as f64 + 1.0,
        &log_weight,
        &mut |_| 1.0,
        1.0,
        &DeOptions::from_tol(tol),
    );
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    if !q.converged {
        return Err(Error::NonConvergence {
            what: "U quadrature",
            steps: tol.quad_max_levels,
            partial: q.value,
            bound: q.error,
        });
    }
    // rounding of the pointwise weight ln S near the peak of the integrand
    let ln_s_peak = space.log_kernel_real(2.0 * r_of(u_ref).ln())?.abs();
    let log_value = (2.0 * PI).ln() + q.log_scale + q.value.ln();
    let rel = q.error / q.value + f64::EPSILON * (8.0 + 2.0 * ln_s_peak + q.log_scale.abs());
    Ok((log_value, rel))
}

fn u_uncached(space: &FockSpace, beta: f64, n: usize) -> Result<UValue> {
    let p = space.params();
    let s = (2.0 * n as f64 + 2.0) / p.m();
    let (log_int, rel) = log_weighted_integral(space, beta, n)?;
    let log_prefactor = 2.0 * p.order() * n as f64 * p.alpha().ln() - ln_gamma(s);
    let log_u = log_prefactor + log_int;
    let value = log_u.exp();
    let rel = rel + f64::EPSILON * (4.0 + 2.0 * log_prefactor.abs());
    Ok(UValue {
        n,
        value,
        error: value * rel,
    })
}

/// `count` points from `lo` to `hi` with constant ratio.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi / lo).ln() / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        hi
                    } else {
                        lo * (step * i as f64).exp()
                    }
                })
                .collect()
        }
    }
}

fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
