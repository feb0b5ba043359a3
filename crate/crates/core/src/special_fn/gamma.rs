//! Logarithm of the Euler gamma function on the positive axis.
//!
//! Three regimes:
//! - `x >= 10`: Stirling series with eight Bernoulli corrections,
//! - `0.5 <= x < 2.5`: Taylor series of `ln Γ(1 + e)` about the zeros at 1 and 2,
//!   which keeps the *relative* error small where `ln Γ` vanishes,
//! - everything else is pulled into one of those by the functional equation.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ζ(k) - 1` for `k = 2..=41`.
#[allow(clippy::excessive_precision)]
const ZETA_MINUS_ONE: [f64; 40] = [
    6.44934066848226406e-01,
    2.02056903159594292e-01,
    8.23232337111381857e-02,
    3.69277551433699266e-02,
    1.73430619844491402e-02,
    8.34927738192282713e-03,
    4.07735619794433960e-03,
    2.00839282608221426e-03,
    9.94575127818085256e-04,
    4.94188604119464529e-04,
    2.46086553308048320e-04,
    1.22713347578489145e-04,
    6.12481350587048277e-05,
    3.05882363070204933e-05,
    1.52822594086518710e-05,
    7.63719763789976257e-06,
    3.81729326499984022e-06,
    1.90821271655393897e-06,
    9.53962033872796212e-07,
    4.76932986787806447e-07,
    2.38450502727733004e-07,
    1.19219925965311064e-07,
    5.96081890512594801e-08,
    2.98035035146522793e-08,
    1.49015548283650427e-08,
    7.45071178983543006e-09,
    3.72533402478845728e-09,
    1.86265972351304914e-09,
    9.31327432419668166e-10,
    4.65662906503378366e-10,
    2.32831183367650534e-10,
    1.16415501727005193e-10,
    5.82077208790270145e-11,
    2.91038504449710001e-11,
    1.45519218910419849e-11,
    7.27595983505748180e-12,
    3.63797954737865086e-12,
    1.81898965030706607e-12,
    9.09494784026388841e-13,
    4.54747378304215422e-13,
];

/// `B_{2k} / (2k (2k - 1))` for `k = 1..=8`.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `ln Γ(x)` for `x > 0`.
///
/// Relative error is below `1e-13` on `(1e-3, 1e4]`, including next to the
/// zeros at `x = 1` and `x = 2`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma(x))
}

/// Unchecked version of [`log_gamma`]; caller guarantees `x > 0`.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        ln_gamma_1p(x) - x.ln()
    } else if x < 1.5 {
        ln_gamma_1p(x - 1.0)
    } else if x < 2.5 {
        let e = x - 2.0;
        e.ln_1p() + ln_gamma_1p(e)
    } else if x < 10.0 {
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        prod.ln() + ln_gamma(y)
    } else {
        stirling(x)
    }
}

/// `ln Γ(1 + e)` for `|e| <= 0.5`.
///
/// Uses `ln Γ(1+e) = -γe + (e - ln(1+e)) + Σ_{k≥2} (-1)^k (ζ(k)-1) e^k / k`, whose
/// coefficients decay like `2^-k`.
fn ln_gamma_1p(e: f64) -> f64 {
    debug_assert!(e.abs() <= 0.5 + 1e-15);
    let mut acc = 0.0;
    for (i, z) in ZETA_MINUS_ONE.iter().enumerate().rev() {
        let k = (i + 2) as f64;
        let c = if i % 2 == 0 { z / k } else { -z / k };
        acc = acc * e + c;
    }
    -EULER_GAMMA * e + (e - e.ln_1p()) + acc * e * e
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    for c in STIRLING.iter().rev() {
        corr = corr * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + corr * inv
}
