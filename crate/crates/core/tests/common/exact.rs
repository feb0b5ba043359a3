//! Fixed-point big-integer summation of the kernel series for parameter
//! pairs where every coefficient ratio is rational (up to one factor of
//! `1/√π`). Terms are summed one by one with no rescaling or cancellation
//! control: the working precision alone absorbs it.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Decimal digits after the point.
pub const DIGITS: u32 = 120;

fn scale() -> BigInt {
    BigInt::from(10).pow(DIGITS)
}

#[derive(Clone, Debug)]
struct Fixed {
    re: BigInt,
    im: BigInt,
}

impl Fixed {
    fn zero() -> Self {
        Self { re: BigInt::zero(), im: BigInt::zero() }
    }

    fn add(&mut self, o: &Fixed) {
        self.re += &o.re;
        self.im += &o.im;
    }

    /// `self · (p_re + i p_im) / q`.
    fn mul_rational(&self, p_re: &BigInt, p_im: &BigInt, q: &BigInt) -> Fixed {
        Fixed {
            re: (&self.re * p_re - &self.im * p_im) / q,
            im: (&self.re * p_im + &self.im * p_re) / q,
        }
    }

    fn is_tiny(&self) -> bool {
        self.re.abs() < BigInt::from(10) && self.im.abs() < BigInt::from(10)
    }
}

/// `ζ = (re + i·im) / den` with integer parts.
#[derive(Clone, Copy, Debug)]
pub struct Rational {
    pub re: i64,
    pub im: i64,
    pub den: i64,
}

/// Sums `Σ_n t_n` with `t_0 = first` and `t_n = t_{n-1} · ζ^k · num(n) / den(n)`
/// where `k` is the power of `ζ` per step (1 or 2). Stops once the term is
/// below the last digit and has been decreasing for a while.
fn recurrence_sum(
    first: Fixed,
    zeta: Rational,
    power: u32,
    ratio: impl Fn(u64) -> (BigInt, BigInt),
) -> Fixed {
    let (zr, zi, zq) = (BigInt::from(zeta.re), BigInt::from(zeta.im), BigInt::from(zeta.den));
    let (pr, pi, q) = if power == 1 {
        (zr, zi, zq)
    } else {
        (&zr * &zr - &zi * &zi, BigInt::from(2) * &zr * &zi, &zq * &zq)
    };
    let mut term = first;
    let mut sum = term.clone();
    let mut quiet = 0;
    for n in 1u64.. {
        let (num, den) = ratio(n);
        term = term.mul_rational(&(&pr * &num), &(&pi * &num), &(&q * &den));
        sum.add(&term);
        if term.is_tiny() {
            quiet += 1;
            if quiet > 20 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    sum
}

fn one() -> Fixed {
    Fixed { re: scale(), im: BigInt::zero() }
}

/// `atan(1/x) · 10^DIGITS` by its Taylor series.
fn atan_inv(x: i64) -> BigInt {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = scale() / &x;
    let mut sum = power.clone();
    let mut k = 1i64;
    loop {
        power /= &x2;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

/// `π · 10^DIGITS` by Machin's formula.
pub fn pi_fixed() -> BigInt {
    BigInt::from(16) * atan_inv(5) - BigInt::from(4) * atan_inv(239)
}

fn inv_sqrt_pi() -> BigInt {
    // sqrt(π · 10^{2D}) = √π · 10^D
    let root = (pi_fixed() * scale()).sqrt();
    scale() * scale() / root
}

/// `S_{α,m}(ζ)` for `m ∈ {1, 2}` with rational `α = a_num / a_den`, and
/// for `m = 4` with `α = a²`, `a = a_num / a_den`.
pub fn kernel_series(m: u32, a_num: i64, a_den: i64, zeta: Rational) -> (String, String) {
    let (an, ad) = (BigInt::from(a_num), BigInt::from(a_den));
    let total = match m {
        // s_n = n!/αⁿ
        2 => recurrence_sum(one(), zeta, 1, |n| (an.clone(), &ad * BigInt::from(n))),
        // s_n = (2n+1)!/α^{2n}
        1 => recurrence_sum(one(), zeta, 1, |n| {
            (&an * &an, &ad * &ad * BigInt::from(2 * n) * BigInt::from(2 * n + 1))
        }),
        // odd n = 2k+1: s_n = k!/a^{2k+1}; even n = 2k: s_n = (2k)!√π/(4^k k! a^{2k})
        4 => {
            let az = Rational { re: zeta.re * a_num, im: zeta.im * a_num, den: zeta.den * a_den };
            let first_odd = one().mul_rational(&BigInt::from(az.re), &BigInt::from(az.im), &BigInt::from(az.den));
            let mut odd = recurrence_sum(first_odd, az, 2, |k| (BigInt::from(1), BigInt::from(k)));
            let first_even = Fixed { re: inv_sqrt_pi(), im: BigInt::zero() };
            let even = recurrence_sum(first_even, az, 2, |k| (BigInt::from(2), BigInt::from(2 * k - 1)));
            odd.add(&even);
            odd
        }
        _ => panic!("unsupported m = {m}"),
    };
    (to_decimal(&total.re), to_decimal(&total.im))
}

/// Fixed-point value as a decimal string with all working digits.
pub fn to_decimal(v: &BigInt) -> String {
    let neg = v.is_negative();
    let digits = v.abs().to_string();
    let d = DIGITS as usize;
    let padded = if digits.len() <= d { format!("{}{}", "0".repeat(d + 1 - digits.len()), digits) } else { digits };
    let (int, frac) = padded.split_at(padded.len() - d);
    format!("{}{}.{}", if neg { "-" } else { "" }, int, frac)
}

/// First `sig` significant digits of a decimal string, in scientific form.
pub fn significant(decimal: &str, sig: usize) -> String {
    let neg = decimal.starts_with('-');
    let body = decimal.trim_start_matches('-');
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let all: String = format!("{int}{frac}");
    let lead = all.find(|c: char| c != '0');
    let Some(lead) = lead else { return "0".into() };
    let exp = int.len() as i64 - 1 - lead as i64;
    let mant = &all[lead..(lead + sig).min(all.len())];
    format!("{}{}.{}e{}", if neg { "-" } else { "" }, &mant[..1], &mant[1..], exp)
}

pub fn to_f64(decimal: &str) -> f64 {
    decimal.parse().expect("decimal")
}
