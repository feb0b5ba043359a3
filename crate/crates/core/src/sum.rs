//! Compensated accumulation and log-scaled values.

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// A complex number stored as `value * exp(log_scale)`, so that magnitudes far
/// outside the double range can be carried around.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub log_scale: f64,
    pub value: Complex64,
}

impl Scaled {
    pub fn new(log_scale: f64, value: Complex64) -> Self {
        Self { log_scale, value }
    }

    /// Natural log of the modulus.
    pub fn log_abs(&self) -> f64 {
        self.log_scale + self.value.norm().ln()
    }

    /// Unit phase factor (1 for a zero value).
    pub fn phase(&self) -> Complex64 {
        let r = self.value.norm();
        if r > 0.0 {
            self.value / r
        } else {
            Complex64::new(1.0, 0.0)
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.value * self.log_scale.exp()
    }

    /// Sum of log-scaled terms, rescaled by the largest one.
    pub fn sum(terms: &[Scaled]) -> Scaled {
        let top = terms
            .iter()
            .filter(|t| t.value.norm() > 0.0)
            .map(|t| t.log_abs())
            .fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Scaled::new(0.0, Complex64::new(0.0, 0.0));
        }
        let mut acc = KahanComplex::default();
        for t in terms {
            if t.value.norm() > 0.0 {
                acc.add(t.value * (t.log_scale - top).exp());
            }
        }
        Scaled::new(top, acc.value())
    }
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_addends() {
        let mut s = KahanSum::new();
        s.add(1.0);
        for _ in 0..10_000 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-12).abs() < 1e-24);
    }

    #[test]
    fn log_add_exp_matches_direct() {
        let v = log_add_exp(2.0_f64.ln(), 3.0_f64.ln());
        assert!((v - 5.0_f64.ln()).abs() < 1e-15);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 1.5), 1.5);
        assert!((log_add_exp(1000.0, 1000.0) - (1000.0 + 2.0_f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn scaled_sum_handles_huge_magnitudes() {
        let terms = [
            Scaled::new(800.0, Complex64::new(1.0, 0.0)),
            Scaled::new(800.0, Complex64::new(0.0, 1.0)),
        ];
        let s = Scaled::sum(&terms);
        assert!((s.log_abs() - (800.0 + 0.5 * 2.0_f64.ln())).abs() < 1e-12);
    }
}
