use std::sync::Arc;

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::special_fn::contour::{self, AltMethod};
use crate::special_fn::gamma::ln_gamma;
use crate::special_fn::moments::{MomentTable, WeightParams};
use crate::sum::{log_add_exp, KahanComplex};

/// How a [`SeriesValue`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesMethod {
    /// Truncated power series.
    Direct,
    /// Finite sum over the roots `s^k = x` (integer `2/m`).
    Roots,
    /// Hankel-contour integral plus residues.
    Contour,
}

/// `S(ζ)` stored as `exp(log_magnitude) * phase`.
#[derive(Clone, Copy, Debug)]
pub struct SeriesValue {
    pub log_magnitude: f64,
    /// Unit complex number; exactly `1` for nonnegative real arguments.
    pub phase: Complex64,
    /// Number of series terms summed (0 for the integral representations).
    pub truncation_terms: usize,
    /// Relative bound on the discarded tail (or the quadrature error).
    pub truncation_error_bound: f64,
    /// Relative estimate of accumulated floating-point error.
    pub rounding_error_bound: f64,
    pub method: SeriesMethod,
}

impl SeriesValue {
    pub fn value(&self) -> Complex64 {
        self.phase * self.log_magnitude.exp()
    }

    /// Total relative error bound.
    pub fn error_bound(&self) -> f64 {
        self.truncation_error_bound + self.rounding_error_bound
    }

    fn conj(self) -> Self {
        Self {
            phase: self.phase.conj(),
            ..self
        }
    }
}

/// `K(z, w)` stored as `exp(log_magnitude) * phase`.
#[derive(Clone, Copy, Debug)]
pub struct KernelValue {
    pub log_magnitude: f64,
    pub phase: Complex64,
    /// Relative error bound.
    pub error_bound: f64,
}

impl KernelValue {
    pub fn value(&self) -> Complex64 {
        self.phase * self.log_magnitude.exp()
    }
}

/// Raw output of the truncated power series, scaled by `exp(log_scale)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct DirectSum {
    pub log_scale: f64,
    pub sum: Complex64,
    /// `Σ |a_n|` over the summed terms, same scale.
    pub majorant: f64,
    pub terms: usize,
    /// Absolute tail bound, same scale.
    pub tail: f64,
    /// Absolute rounding estimate, same scale.
    pub rounding: f64,
}

impl DirectSum {
    fn relative_error(&self) -> f64 {
        (self.tail + self.rounding) / self.sum.norm()
    }
}

/// The Fock space of `(alpha, m)`: moment table plus tolerances.
#[derive(Debug)]
pub struct FockSpace {
    moments: MomentTable,
    tol: Tolerances,
}

impl FockSpace {
    pub fn new(params: WeightParams, tol: Tolerances) -> Self {
        Self {
            moments: MomentTable::new(params),
            tol,
        }
    }

    pub fn shared(params: WeightParams, tol: Tolerances) -> Arc<Self> {
        Arc::new(Self::new(params, tol))
    }

    pub fn params(&self) -> &WeightParams {
        self.moments.params()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn moments(&self) -> &MomentTable {
        &self.moments
    }

    /// `ln s_n`.
    pub fn stieltjes_moment(&self, n: usize) -> f64 {
        self.moments.log_moment(n)
    }

    /// `S(ζ) = Σ ζ^n / s_n`.
    ///
    /// Nonnegative real arguments are always summed directly. Elsewhere the
    /// power series is used unless cancellation pushes its error past
    /// `tol.series`, in which case the integral representation is tried and
    /// the more accurate of the two is returned.
    pub fn kernel_series(&self, zeta: Complex64) -> Result<SeriesValue> {
        if !(zeta.re.is_finite() && zeta.im.is_finite()) {
            return Err(Error::Domain(format!("kernel argument {zeta} is not finite")));
        }
        // evaluate in the closed upper half plane so conjugation symmetry is exact
        if zeta.im < 0.0 {
            return Ok(self.kernel_series(zeta.conj())?.conj());
        }
        if zeta.im == 0.0 && zeta.re >= 0.0 {
            return self.kernel_series_real(zeta.re);
        }
        let modulus = zeta.norm();
        let direct = self.sum_direct(modulus.ln(), zeta.arg());
        if let Ok(d) = &direct {
            if d.relative_error() <= self.tol.series {
                return Ok(from_direct(d));
            }
        }
        let a = self.params().order();
        let x = zeta * self.params().alpha().powf(a);
        let alt = contour::evaluate(a, x, &self.tol);
        match (direct, alt) {
            (Ok(d), Some(v)) if v.quad_error + v.rounding < d.relative_error() => {
                Ok(from_alt(v))
            }
            (Ok(d), _) => Ok(from_direct(&d)),
            (Err(_), Some(v)) => Ok(from_alt(v)),
            (Err(e), None) => Err(e),
        }
    }

    /// `S(t)` for real `t ≥ 0`; the phase is exactly `+1`.
    pub fn kernel_series_real(&self, t: f64) -> Result<SeriesValue> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!(
                "real kernel argument {t} must be finite and nonnegative"
            )));
        }
        Ok(from_direct(&self.sum_direct(t.ln(), 0.0)?))
    }

    /// `ln S(e^{ln_t})`, for arguments whose logarithm is known more precisely
    /// than their value.
    pub fn log_kernel_real(&self, ln_t: f64) -> Result<f64> {
        let d = self.sum_direct(ln_t, 0.0)?;
        Ok(d.log_scale + d.sum.re.ln())
    }

    /// `K(z, w) = Γ(2/m) S(z conj(w))`.
    pub fn reproducing_kernel(&self, z: Complex64, w: Complex64) -> Result<KernelValue> {
        let s = self.kernel_series(z * w.conj())?;
        Ok(KernelValue {
            log_magnitude: s.log_magnitude + ln_gamma(self.params().order()),
            phase: s.phase,
            error_bound: s.error_bound() + 4.0 * f64::EPSILON,
        })
    }

    /// Truncated power series for `|ζ| = e^{ln_mod}`, `arg ζ = theta`.
    pub(crate) fn sum_direct(&self, ln_mod: f64, theta: f64) -> Result<DirectSum> {
        let eps = f64::EPSILON;
        if ln_mod == f64::NEG_INFINITY {
            let ls0 = self.moments.log_moment(0);
            return Ok(DirectSum {
                log_scale: -ls0,
                sum: Complex64::new(1.0, 0.0),
                majorant: 1.0,
                terms: 1,
                tail: 0.0,
                rounding: eps * (2.0 + ls0.abs()),
            });
        }
        let peak = self.peak_index(ln_mod)?;
        let cap = self.tol.series_max_terms;
        let tol = self.tol.series;
        let complex = theta != 0.0;
        let step = Complex64::from_polar(1.0, theta);

        let mut len = (2 * peak + 64).min(cap + 1);
        loop {
            let outcome = self.moments.with_prefix(len, |log_s| {
                let lt = |n: usize| n as f64 * ln_mod - log_s[n];
                let scale = lt(peak);
                let mut acc = KahanComplex::default();
                let mut majorant = 0.0;
                let mut rounding = 0.0;
                let mut rot = Complex64::new(1.0, 0.0);
                let limit = log_s.len().min(len);
                let mut n = 0;
                while n + 1 < limit {
                    let ltn = lt(n);
                    let mag = (ltn - scale).exp();
                    if complex && n % 32 == 0 {
                        rot = Complex64::from_polar(1.0, n as f64 * theta);
                    }
                    acc.add(rot * mag);
                    majorant += mag;
                    let mut c = 4.0 + 2.0 * (n as f64 * ln_mod).abs() + 4.0 * log_s[n].abs()
                        + (ltn - scale).abs();
                    if complex {
                        c += 40.0 + (n as f64 * theta).abs();
                    }
                    rounding += mag * eps * c;
                    if n >= peak {
                        let ratio = (lt(n + 1) - ltn).exp();
                        let sum = acc.value();
                        if ratio < 1.0 && mag <= tol * sum.norm() * (1.0 - ratio) {
                            return Some(DirectSum {
                                log_scale: scale,
                                sum,
                                majorant,
                                terms: n + 1,
                                tail: mag * ratio / (1.0 - ratio),
                                rounding: rounding + 2.0 * eps * majorant,
                            });
                        }
                    }
                    if complex {
                        rot *= step;
                    }
                    n += 1;
                }
                None
            });
            if let Some(d) = outcome {
                return Ok(d);
            }
            if len > cap {
                return Err(self.non_convergence(ln_mod, cap));
            }
            len = (2 * len).min(cap + 1);
        }
    }

    /// Fills `out[n] = |a_n| / |a_peak|` up to the truncation point and returns
    /// `(ln |a_peak|, Σ out)`. Used by hot loops that resum the series with
    /// varying phases.
    pub(crate) fn normalized_terms(&self, ln_mod: f64, out: &mut Vec<f64>) -> Result<(f64, f64)> {
        out.clear();
        if ln_mod == f64::NEG_INFINITY {
            out.push(1.0);
            return Ok((-self.moments.log_moment(0), 1.0));
        }
        let d = self.sum_direct(ln_mod, 0.0)?;
        self.moments.with_prefix(d.terms, |log_s| {
            out.extend((0..d.terms).map(|n| (n as f64 * ln_mod - log_s[n] - d.log_scale).exp()));
        });
        Ok((d.log_scale, d.majorant))
    }

    /// Index of the largest term `|ζ|^n / s_n`; terms increase before it and
    /// decrease after it since `ln s_n` is convex.
    fn peak_index(&self, ln_mod: f64) -> Result<usize> {
        let cap = self.tol.series_max_terms;
        let mut len = 64usize.min(cap + 1).max(2);
        let mut from = 0usize;
        loop {
            let found = self.moments.with_prefix(len, |log_s| {
                let lt = |n: usize| n as f64 * ln_mod - log_s[n];
                (from..log_s.len() - 1).find(|&n| lt(n + 1) <= lt(n))
            });
            if let Some(p) = found {
                return Ok(p);
            }
            if len > cap {
                return Err(self.non_convergence(ln_mod, cap));
            }
            from = len - 1;
            len = (2 * len).min(cap + 1);
        }
    }

    /// Both numbers are logarithms: the terms past the cap usually overflow.
    fn non_convergence(&self, ln_mod: f64, cap: usize) -> Error {
        let (partial, last) = self.moments.with_prefix(cap + 1, |log_s| {
            let lt = |n: usize| n as f64 * ln_mod - log_s[n];
            let partial = (1..cap).fold(lt(0), |acc, n| log_add_exp(acc, lt(n)));
            (partial, lt(cap))
        });
        Error::NonConvergence {
            what: "kernel series (partial and bound as ln of moduli)",
            steps: cap,
            partial,
            bound: last,
        }
    }
}

fn from_direct(d: &DirectSum) -> SeriesValue {
    let norm = d.sum.norm();
    SeriesValue {
        log_magnitude: d.log_scale + norm.ln(),
        phase: if d.sum.im == 0.0 {
            Complex64::new(d.sum.re.signum(), 0.0)
        } else {
            d.sum / norm
        },
        truncation_terms: d.terms,
        truncation_error_bound: d.tail / norm,
        rounding_error_bound: d.rounding / norm,
        method: SeriesMethod::Direct,
    }
}

fn from_alt(v: contour::AltValue) -> SeriesValue {
    SeriesValue {
        log_magnitude: v.value.log_abs(),
        phase: v.value.phase(),
        truncation_terms: 0,
        truncation_error_bound: v.quad_error,
        rounding_error_bound: v.rounding,
        method: match v.method {
            AltMethod::Roots => SeriesMethod::Roots,
            AltMethod::Contour => SeriesMethod::Contour,
        },
    }
}
