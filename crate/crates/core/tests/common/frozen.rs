//! Reference values, frozen from the oracles in this directory. The run
//! that produced them is logged in `tests/data/oracle_log.txt`.
#![allow(clippy::excessive_precision)]

use super::exact::Rational;

/// One exact kernel-series reference.
#[derive(Clone, Copy, Debug)]
pub struct KernelCase {
    pub m: u32,
    /// `α = a.0 / a.1` for `m ∈ {1, 2}`; `α = (a.0 / a.1)²` for `m = 4`.
    pub a: (i64, i64),
    pub zeta: Rational,
    pub re: &'static str,
    pub im: &'static str,
}

impl KernelCase {
    pub fn alpha(&self) -> f64 {
        let a = self.a.0 as f64 / self.a.1 as f64;
        if self.m == 4 {
            a * a
        } else {
            a
        }
    }
}

const fn z(re: i64, im: i64, den: i64) -> Rational {
    Rational { re, im, den }
}

pub const KERNEL_CASES: &[KernelCase] = &[
    KernelCase { m: 2, a: (1, 1), zeta: z(1, 0, 1), re: "2.718281828459045235360287471352662497757e0", im: "0" },
    KernelCase { m: 2, a: (1, 2), zeta: z(-30, 0, 1), re: "3.059023205018257883714794977022896393708e-7", im: "0" },
    KernelCase { m: 2, a: (1, 1), zeta: z(3, 4, 1), re: "-1.312878308146215808032755514537412835753e1", im: "-1.520078446306795456220348102334273780594e1" },
    KernelCase { m: 1, a: (1, 1), zeta: z(1, 0, 1), re: "1.175201193643801456882381850595600815155e0", im: "0" },
    KernelCase { m: 1, a: (1, 1), zeta: z(-25, 0, 1), re: "-1.917848549326276937786308812311987946704e-1", im: "0" },
    KernelCase { m: 1, a: (2, 1), zeta: z(5, -7, 1), re: "-9.349758348836200097977488740712348894836e0", im: "-1.260882716566125314973110472063351303673e1" },
    KernelCase { m: 4, a: (1, 1), zeta: z(1, 0, 1), re: "5.573169664310039753257904049775582400538e0", im: "0" },
    KernelCase { m: 4, a: (1, 1), zeta: z(-6, 0, 1), re: "7.530176744526160611159219612393036957128e-3", im: "0" },
    KernelCase { m: 4, a: (2, 1), zeta: z(2, 1, 1), re: "-1.059478766099380471315996173215990490455e6", im: "-9.983158402261341202043860747411593454011e5" },
    KernelCase { m: 4, a: (1, 1), zeta: z(1, 3, 2), re: "-4.361244704887853159625871954614742118370e-1", im: "3.762209501642381369825474664391883765956e-2" },
    KernelCase { m: 4, a: (1, 2), zeta: z(10, 0, 1), re: "7.200489933738693916364959278163585981713e11", im: "0" },
];

#[derive(Clone, Copy, Debug)]
pub struct UCase {
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    pub n: usize,
    pub value: f64,
}

/// `U_{α,β}(n)` from `u_oracle` at 200 nodes per half; 400 nodes moves
/// the last digit at most.
pub const U_CASES: &[UCase] = &[
    UCase { alpha: 1.0, beta: 1.0, m: 4.0, n: 0, value: 1.1766875384019653 },
    UCase { alpha: 1.0, beta: 2.0, m: 4.0, n: 0, value: 1.0341148806112932 },
    UCase { alpha: 2.0, beta: 1.0, m: 4.0, n: 0, value: 0.90732928289182868 },
    UCase { alpha: 1.0, beta: 2.0, m: 4.0, n: 1, value: 0.46654919487457347 },
    UCase { alpha: 2.0, beta: 1.0, m: 4.0, n: 1, value: 0.76369436162218352 },
];

/// `(B f)(1)` for `f = e^{-|w|^4}` at `m = 4`, `α = 1`, from
/// `berezin_polar` on the 4x grid.
pub const POLAR_M4: f64 = 3.2047925450293185e-1;

#[derive(Clone, Copy, Debug)]
pub struct NestedCase {
    pub m: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    /// `(B_β B_α f_δ)(0)`.
    pub forward: f64,
    /// `(B_α B_β f_δ)(0)`.
    pub backward: f64,
}

/// From `nested_polar` on the base grid; the doubled grid agrees to about
/// 1e-15. The last four are the largest significant defects found by the
/// library for `m = 1, 3, 4, 6`.
pub const NESTED_CASES: &[NestedCase] = &[
    NestedCase { m: 4.0, alpha: 1.0, beta: 2.0, delta: 1.0, forward: 5.5367001325825094e-1, backward: 5.6389461020085674e-1 },
    NestedCase { m: 1.0, alpha: 1.0, beta: 5.0, delta: 2.0, forward: 1.0746330735708805e-1, backward: 1.1719732773377947e-1 },
    NestedCase { m: 3.0, alpha: 0.5, beta: 4.0, delta: 0.5, forward: 5.7302166094040508e-1, backward: 5.8589872752251970e-1 },
    NestedCase { m: 4.0, alpha: 0.5, beta: 4.0, delta: 0.5, forward: 6.3111604706769220e-1, backward: 6.5617950774347478e-1 },
    NestedCase { m: 6.0, alpha: 0.5, beta: 4.0, delta: 0.5, forward: 6.9723455901948383e-1, backward: 7.3869981013736763e-1 },
];
