//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls into the library's numerics: moments come from
//! `statrs`, integrals from fixed Gauss-Legendre grids (`gauss-quad`) and
//! plain trapezoid sums, and the kernel series is summed term by term.
#![allow(dead_code)]

pub mod exact;
pub mod frozen;

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

pub fn ln_s(alpha: f64, m: f64, n: usize) -> f64 {
    -(2.0 * n as f64 / m) * alpha.ln() + ln_gamma(2.0 * (n as f64 + 1.0) / m)
}

/// Term-by-term `S_{α,m}`, each term formed from its own logarithm.
pub struct NaiveKernel {
    ln_s: Vec<f64>,
}

impl NaiveKernel {
    pub fn new(alpha: f64, m: f64, terms: usize) -> Self {
        Self { ln_s: (0..terms).map(|n| ln_s(alpha, m, n)).collect() }
    }

    /// `S(ζ) e^{-shift}` and `shift`, where `shift` is the log of the
    /// largest term. Sums until the terms have peaked and dropped below
    /// 1e-18 of the largest one.
    pub fn eval_scaled(&self, zeta: Complex64) -> (Complex64, f64) {
        let (r, theta) = zeta.to_polar();
        let ln_t = r.ln();
        let lt = |n: usize| if n == 0 { -self.ln_s[0] } else { n as f64 * ln_t - self.ln_s[n] };
        // n ln|ζ| - ln s_n is concave in n, so the scan stops at its peak.
        let mut peak = 0;
        while peak + 1 < self.ln_s.len() && lt(peak + 1) >= lt(peak) {
            peak += 1;
        }
        let shift = lt(peak);
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..self.ln_s.len() {
            let rel = lt(n) - shift;
            sum += Complex64::from_polar(rel.exp(), n as f64 * theta);
            if n > peak && rel < -41.5 {
                return (sum, shift);
            }
        }
        panic!("naive kernel ran out of terms at |ζ| = {r}");
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        let (v, shift) = self.eval_scaled(zeta);
        v * shift.exp()
    }

    pub fn ln_real(&self, t: f64) -> f64 {
        let (v, shift) = self.eval_scaled(Complex64::new(t, 0.0));
        v.re.ln() + shift
    }

    pub fn eval_real(&self, t: f64) -> f64 {
        self.ln_real(t).exp()
    }
}

pub fn gauss_legendre(nodes: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(NonZeroUsize::new(nodes).unwrap())
        .as_node_weight_pairs()
        .to_vec()
}

/// `∫_a^b f` on a fixed rule.
pub fn gl_integrate(rule: &[(f64, f64)], a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (h, c) = (0.5 * (b - a), 0.5 * (b + a));
    h * rule.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>()
}

/// Radius past which `e^{-α(ρ^{m/2} - r^{m/2})²}` is below `e^{-60}`.
fn outer_radius(alpha: f64, m: f64, r: f64) -> f64 {
    (r.powf(m / 2.0) + (60.0 / alpha).sqrt()).powf(2.0 / m)
}

/// Grid sizes for the polar oracle.
#[derive(Clone, Copy, Debug)]
pub struct PolarGrid {
    pub radial: usize,
    pub angular: usize,
}

impl PolarGrid {
    pub const BASE: PolarGrid = PolarGrid { radial: 128, angular: 64 };

    pub fn scaled(self, k: usize) -> PolarGrid {
        PolarGrid { radial: self.radial * k, angular: self.angular * k }
    }
}

/// `(B_{α,m} f)(r)` for a radial symbol `f`, as a plain double sum over a
/// polar grid: Gauss-Legendre in the radius (split at `r`), trapezoid in
/// the angle over `[0, π]` (the integrand is even in the angle).
///
/// `|S(rρ e^{iθ})|²` behaves like `exp(2α (rρ)^{m/2} cos(mθ/2))`, so each
/// ring gets enough angles to resolve that peak.
pub fn berezin_polar(
    alpha: f64,
    m: f64,
    r: f64,
    f: impl Fn(f64) -> f64,
    grid: PolarGrid,
    kernel: &NaiveKernel,
) -> f64 {
    let rule = gauss_legendre(grid.radial);
    let big = outer_radius(alpha, m, r);
    let ln_szz = kernel.ln_real(r * r);
    let ring = |rho: f64| {
        let sharp = 2.0 * alpha * (r * rho).powf(m / 2.0);
        let extra = ((m / 2.0).max(1.0) * (80.0 * sharp).sqrt() / 64.0).ceil() as usize;
        let count = grid.angular * (1 + extra);
        let half = count / 2;
        let mut acc = 0.0;
        let mut shift = 0.0;
        for j in 0..=half {
            let theta = 2.0 * PI * j as f64 / count as f64;
            let (v, s) = kernel.eval_scaled(Complex64::from_polar(r * rho, theta));
            shift = s;
            acc += if j == 0 || j == half { v.norm_sqr() } else { 2.0 * v.norm_sqr() };
        }
        let log_factor = 2.0 * shift - ln_szz - alpha * rho.powf(m);
        acc * 2.0 * PI / count as f64 * f(rho) * log_factor.exp() * rho
    };
    let split = r.min(big);
    let integral = if split > 0.0 {
        gl_integrate(&rule, 0.0, split, ring) + gl_integrate(&rule, split, big, ring)
    } else {
        gl_integrate(&rule, 0.0, big, ring)
    };
    m * alpha.powf(2.0 / m) / (2.0 * PI) * integral
}

/// `(B_{β,m} B_{α,m} f_δ)(0)`: the outer transform at the origin is a
/// radial integral of the polar oracle.
pub fn nested_polar(alpha: f64, beta: f64, m: f64, delta: f64, grid: PolarGrid) -> f64 {
    let inner_kernel = NaiveKernel::new(alpha, m, 20_000);
    let rule = gauss_legendre(grid.radial);
    let big = (40.0 / beta).powf(1.0 / m);
    let f = |rho: f64| (-delta * rho.powf(m)).exp();
    let (h, c) = (0.5 * big, 0.5 * big);
    let integral = h * rule
        .par_iter()
        .map(|&(x, w)| {
            let rho = c + h * x;
            w * berezin_polar(alpha, m, rho, f, grid, &inner_kernel) * (-beta * rho.powf(m)).exp() * rho
        })
        .sum::<f64>();
    m * beta.powf(2.0 / m) / ln_gamma(2.0 / m).exp() * integral
}

/// `U_{α,β}(n)` on a fixed Gauss-Legendre grid, split at the peak of
/// `r^{2n+1} e^{-β r^m}`.
pub fn u_oracle(alpha: f64, beta: f64, m: f64, n: usize, nodes: usize) -> f64 {
    let kernel = NaiveKernel::new(alpha, m, 4000);
    let rule = gauss_legendre(nodes);
    let k = 2.0 * n as f64 + 1.0;
    let peak = (k.max(1.0) / (m * beta)).powf(1.0 / m);
    let big = ((80.0 + 4.0 * k) / beta).powf(1.0 / m).max(3.0 * peak);
    let g = |r: f64| (k * r.ln() - beta * r.powf(m) - kernel.ln_real(r * r)).exp();
    let integral = gl_integrate(&rule, 0.0, peak, g) + gl_integrate(&rule, peak, big, g);
    (4.0 * n as f64 / m * alpha.ln() - ln_gamma((2.0 * n as f64 + 2.0) / m)).exp() * 2.0 * PI * integral
}
