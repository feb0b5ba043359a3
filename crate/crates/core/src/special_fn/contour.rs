//! `E(x) = Σ_n x^n / Γ(a(n+1))` away from the positive axis, where the power
//! series cancels catastrophically.
//!
//! Writing `1/Γ` as a Hankel integral and summing the geometric series gives
//!
//! ```text
//! E(x) = (1/2πi) ∫_H e^s / (s^a - x) ds
//!      = (1/a) Σ_{|arg s_k| < φ} s_k^{1-a} e^{s_k}  +  (1/2πi) ∫_{rays ±φ} e^s / (s^a - x) ds,
//! ```
//!
//! with `s_k^a = x` on the Riemann surface of `log s` and the contour made of
//! the two rays `arg s = ±φ`, `π/2 < φ < 3π/2`. For integer `a` the integrand
//! is single valued, the ray integral vanishes and only the finite sum over
//! the `a`-th roots of `x` remains.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::quadrature::{de_integrate, DeMap, DeOptions};
use crate::sum::Scaled;

#[derive(Clone, Copy, Debug)]
pub(crate) enum AltMethod {
    Roots,
    Contour,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct AltValue {
    pub value: Scaled,
    /// Relative quadrature error (zero for the root sum).
    pub quad_error: f64,
    /// Relative rounding estimate.
    pub rounding: f64,
    pub method: AltMethod,
}

/// Evaluates `E(x)` for `x != 0` without the power series. `None` if the
/// quadrature does not converge.
pub(crate) fn evaluate(a: f64, x: Complex64, tol: &Tolerances) -> Option<AltValue> {
    debug_assert!(x.norm() > 0.0);
    let k = a.round();
    if (1.0..=64.0).contains(&k) && (a - k).abs() <= 1e-12 * a {
        Some(root_sum(k as usize, x))
    } else {
        contour(a, x, tol)
    }
}

/// `(1/k) Σ_j s_j^{1-k} e^{s_j}` over the `k` roots `s_j^k = x`.
fn root_sum(k: usize, x: Complex64) -> AltValue {
    let kf = k as f64;
    let rho = x.norm().powf(1.0 / kf);
    let theta = x.arg();
    let mut terms = Vec::with_capacity(k);
    let mut abs_sum_log = f64::NEG_INFINITY;
    for j in 0..k {
        let psi = (theta + 2.0 * PI * j as f64) / kf;
        let log_mag = -kf.ln() + (1.0 - kf) * rho.ln() + rho * psi.cos();
        let angle = (1.0 - kf) * psi + rho * psi.sin();
        terms.push(Scaled::new(log_mag, Complex64::from_polar(1.0, angle)));
        abs_sum_log = crate::sum::log_add_exp(abs_sum_log, log_mag);
    }
    let value = Scaled::sum(&terms);
    let cancellation = (abs_sum_log - value.log_abs()).exp();
    let per_term = f64::EPSILON * (8.0 + 2.0 * rho + (kf - 1.0) * rho.ln().abs());
    AltValue {
        value,
        quad_error: 0.0,
        rounding: per_term * cancellation,
        method: AltMethod::Roots,
    }
}

/// Ray angle keeping every pole argument at least a little away from `±φ`.
fn choose_ray_angle(pole_args: &[f64]) -> f64 {
    let distance = |phi: f64| {
        pole_args
            .iter()
            .map(|p| (p.abs() - phi).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let mut candidates: Vec<f64> = (0..=40).map(|i| PI * (0.6 + 0.02 * i as f64)).collect();
    candidates.sort_by(|p, q| (p - PI).abs().total_cmp(&(q - PI).abs()));
    if let Some(&phi) = candidates.iter().find(|&&phi| distance(phi) >= 0.05 * PI) {
        return phi;
    }
    candidates
        .into_iter()
        .max_by(|p, q| distance(*p).total_cmp(&distance(*q)))
        .unwrap_or(PI)
}

fn contour(a: f64, x: Complex64, tol: &Tolerances) -> Option<AltValue> {
    let theta = x.arg();
    let rho = x.norm().powf(1.0 / a);

    let k_lo = ((-1.5 * PI * a - theta) / (2.0 * PI)).floor() as i64 - 1;
    let k_hi = ((1.5 * PI * a - theta) / (2.0 * PI)).ceil() as i64 + 1;
    let pole_args: Vec<f64> = (k_lo..=k_hi)
        .map(|k| (theta + 2.0 * PI * k as f64) / a)
        .collect();
    let phi = choose_ray_angle(&pole_args);

    let mut terms = Vec::new();
    for &psi in pole_args.iter().filter(|p| p.abs() < phi) {
        let log_mag = -a.ln() + (1.0 - a) * rho.ln() + rho * psi.cos();
        let angle = (1.0 - a) * psi + rho * psi.sin();
        terms.push(Scaled::new(log_mag, Complex64::from_polar(1.0, angle)));
    }
    let residues = Scaled::sum(&terms);
    let residue_rounding = f64::EPSILON * (8.0 + 2.0 * rho + (a - 1.0).abs() * rho.ln().abs());

    let up = Complex64::from_polar(1.0, phi);
    let down = up.conj();
    let up_a = Complex64::from_polar(1.0, a * phi);
    let down_a = up_a.conj();
    let integrand = |r: f64| -> Complex64 {
        let ra = r.powf(a);
        let f_up = (up * r).exp() / (up_a * ra - x);
        let f_down = (down * r).exp() / (down_a * ra - x);
        f_up * up - f_down * down
    };

    let res_mag = if residues.value.norm() > 0.0 {
        residues.log_abs().exp()
    } else {
        0.0
    };
    let opts = DeOptions {
        rel: 0.1 * tol.series,
        abs: 0.1 * tol.series * res_mag,
        max_levels: tol.quad_max_levels,
    };
    let decay = -phi.cos();
    let (ray, err, converged) = if rho * decay < 60.0 {
        let head = de_integrate(DeMap::TanhSinh { a: 0.0, b: rho }, integrand, None, &opts);
        let tail = de_integrate(DeMap::ExpSinh { start: rho }, integrand, None, &opts);
        (
            head.value + tail.value,
            head.error + tail.error,
            head.converged && tail.converged,
        )
    } else {
        let whole = de_integrate(DeMap::ExpSinh { start: 0.0 }, integrand, None, &opts);
        (whole.value, whole.error, whole.converged)
    };
    if !converged {
        return None;
    }
    let ray = ray / Complex64::new(0.0, 2.0 * PI);
    let err = err / (2.0 * PI);

    let total = Scaled::sum(&[residues, Scaled::new(0.0, ray)]);
    let mag = total.log_abs().exp();
    if mag.is_nan() || mag <= 0.0 {
        return None;
    }
    let abs_in = res_mag + ray.norm();
    Some(AltValue {
        value: total,
        quad_error: err / mag,
        rounding: (residue_rounding * res_mag + 16.0 * f64::EPSILON * abs_in) / mag,
        method: AltMethod::Contour,
    })
}
