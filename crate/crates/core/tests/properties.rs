//! Invariants checked on random inputs.

mod common;

use std::f64::consts::PI;

use berezin_core::berezin::berezin_exp_radial;
use berezin_core::commutativity::Certifier;
use berezin_core::quadrature::{integrate_radial, RadialSymbol};
use berezin_core::scan::{parse_csv, write_csv, ScanRow};
use berezin_core::special_fn::{log_stieltjes_moment, GUARANTEED_ALPHA, GUARANTEED_M};
use berezin_core::{FockSpace, Tolerances, WeightParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn space(alpha: f64, m: f64) -> FockSpace {
    FockSpace::new(WeightParams::new(alpha, m).unwrap(), Tolerances::default())
}

fn log_alpha() -> impl Strategy<Value = f64> {
    (GUARANTEED_ALPHA.0.ln()..GUARANTEED_ALPHA.1.ln()).prop_map(f64::exp)
}

fn order() -> impl Strategy<Value = f64> {
    GUARANTEED_M.0..=GUARANTEED_M.1
}

/// Rough index of the largest series term at `t ≥ 0`. Direct summation
/// needs about twice that many terms, so past the term cap the kernel
/// reports non-convergence instead.
fn peak_index(alpha: f64, m: f64, t: f64) -> f64 {
    m / 2.0 * (alpha.powf(2.0 / m) * t).powf(m / 2.0)
}

const REACHABLE: f64 = 5000.0;

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn moments_are_log_convex(alpha in log_alpha(), m in order()) {
        let p = WeightParams::new(alpha, m).unwrap();
        let ln: Vec<f64> = (0..=201).map(|n| log_stieltjes_moment(&p, n)).collect();
        for n in 1..=200 {
            let slack = 1e-12 * ln[n].abs().max(1.0);
            prop_assert!(ln[n - 1] + ln[n + 1] >= 2.0 * ln[n] - slack, "n = {}", n);
        }
    }

    #[test]
    fn kernel_is_positive_on_the_half_line(alpha in log_alpha(), m in order(), t in 0.0..1e3f64) {
        prop_assume!(peak_index(alpha, m, t) < REACHABLE);
        let s = space(alpha, m).kernel_series(Complex64::new(t, 0.0)).unwrap();
        prop_assert!(s.log_magnitude.is_finite());
        prop_assert_eq!(s.phase, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn kernel_commutes_with_conjugation(
        alpha in 0.1..10.0f64,
        m in order(),
        r in 0.0..40.0f64,
        theta in -PI..PI,
    ) {
        prop_assume!(peak_index(alpha, m, r) < REACHABLE);
        let sp = space(alpha, m);
        let zeta = Complex64::from_polar(r, theta);
        let a = sp.kernel_series(zeta).unwrap();
        let b = sp.kernel_series(zeta.conj()).unwrap();
        prop_assert_eq!(a.log_magnitude, b.log_magnitude);
        prop_assert_eq!(a.phase, b.phase.conj());
    }

    #[test]
    fn m2_kernel_is_exponential(alpha in 0.1..10.0f64, r in 0.0..50.0f64, theta in -PI..PI) {
        let zeta = Complex64::from_polar(r, theta);
        let s = space(alpha, 2.0).kernel_series(zeta).unwrap();
        let want = (alpha * zeta).exp();
        prop_assert!((s.value() - want).norm() / want.norm() <= 1e-12);
    }

    #[test]
    fn kernel_matches_naive_sum(alpha in 0.2..5.0f64, m in 1.0..6.0f64, r in 0.0..20.0f64, theta in -1.0..1.0f64) {
        prop_assume!(peak_index(alpha, m, r) < REACHABLE);
        let zeta = Complex64::from_polar(r, theta);
        let naive = common::NaiveKernel::new(alpha, m, 20_000);
        let (want, shift) = naive.eval_scaled(zeta);
        let got = space(alpha, m).kernel_series(zeta).unwrap();
        // compared in scaled form: both values may overflow
        let ratio = got.phase * (got.log_magnitude - shift).exp() / want;
        // the naive sum loses digits in proportion to Σ|t_n| / |S|
        let condition = (naive.ln_real(r) - shift - want.norm().ln()).exp().max(1.0);
        prop_assert!((ratio - 1.0).norm() <= 1e-12 * condition, "{}", ratio);
    }

    #[test]
    fn transform_of_positive_symbol_is_positive(
        alpha in 0.2..5.0f64,
        m in 0.5..8.0f64,
        delta in 0.0..5.0f64,
        r in 0.0..3.0f64,
    ) {
        prop_assume!(peak_index(alpha, m, r * r) < REACHABLE);
        let q = berezin_exp_radial(&space(alpha, m), delta, r).unwrap();
        prop_assert!(q.value >= -q.abs_error_estimate);
        prop_assert!(q.value <= 1.0 + q.abs_error_estimate);
    }

    #[test]
    fn csv_round_trips_bit_exactly(
        rows in prop::collection::vec(
            (any::<f64>(), any::<f64>(), any::<f64>(), any::<f64>(), any::<f64>(), any::<bool>())
                .prop_filter("finite", |t| [t.0, t.1, t.2, t.3, t.4].iter().all(|v| v.is_finite())),
            0..20,
        ),
    ) {
        let rows: Vec<ScanRow> = rows
            .iter()
            .map(|&(a, b, c, d, e, s)| ScanRow {
                m: a.abs(),
                alpha: b.abs(),
                beta: c,
                delta: d,
                forward: e,
                backward: -e,
                defect: 2.0 * e,
                err_bound: c.abs(),
                significant: s,
            })
            .collect();
        let back = parse_csv(&write_csv(&rows)).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (x, y) in rows.iter().zip(&back) {
            for (u, v) in [
                (x.m, y.m), (x.alpha, y.alpha), (x.beta, y.beta), (x.delta, y.delta), (x.forward, y.forward),
                (x.backward, y.backward), (x.defect, y.defect), (x.err_bound, y.err_bound),
            ] {
                prop_assert_eq!(u.to_bits(), v.to_bits());
            }
            prop_assert_eq!(x.significant, y.significant);
        }
    }
}

proptest! {
    // nested series are the expensive part
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(12) })]

    #[test]
    fn defect_is_antisymmetric(alpha in 0.3..4.0f64, beta in 0.3..4.0f64, m in 1.0..6.0f64, delta in 0.1..3.0f64) {
        let c = Certifier::new(Tolerances::default(), 10.0);
        let ab = c.defect(alpha, beta, m, delta).unwrap();
        let ba = c.defect(beta, alpha, m, delta).unwrap();
        prop_assert_eq!(ab.defect, -ba.defect);
        prop_assert_eq!(ab.combined_error, ba.combined_error);
        prop_assert_eq!(ab.significant, ba.significant);
    }

    #[test]
    fn nested_value_is_in_unit_interval_and_decreasing(
        alpha in 0.3..4.0f64,
        beta in 0.3..4.0f64,
        m in 1.0..6.0f64,
        delta in 0.1..3.0f64,
    ) {
        let c = Certifier::new(Tolerances::default(), 10.0);
        let lo = c.nested_at_zero(alpha, beta, m, delta).unwrap().value;
        let hi = c.nested_at_zero(alpha, beta, m, delta / 2.0).unwrap().value;
        prop_assert!(0.0 < lo && lo < hi && hi <= 1.0 + 1e-12, "{} {}", lo, hi);
    }
}

#[test]
fn unreachable_arguments_report_finite_log_bounds() {
    let err = space(2.0, 8.0).kernel_series(Complex64::new(9.0, 0.0)).unwrap_err();
    match err {
        berezin_core::Error::NonConvergence { steps, partial, bound, .. } => {
            assert_eq!(steps, Tolerances::default().series_max_terms);
            assert!(partial.is_finite() && bound.is_finite() && bound < partial);
        }
        other => panic!("{other:?}"),
    }
}

/// `Γ(p/q)` for `q ∈ {1, 2, 3, 4, 6}` by the recurrence from tabulated
/// values at 1/3, 1/2, 2/3 and 1, so the reference is good to a few ulps.
fn gamma_at_thirds_and_halves(p: u32, q: u32) -> f64 {
    const GAMMA_THIRD: f64 = 2.678_938_534_707_747_6;
    const GAMMA_TWO_THIRDS: f64 = 1.354_117_939_426_400_4;
    let (mut x, mut g) = match (6 * p / q) % 6 {
        0 => (1.0, 1.0),
        2 => (1.0 / 3.0, GAMMA_THIRD),
        3 => (0.5, PI.sqrt()),
        4 => (2.0 / 3.0, GAMMA_TWO_THIRDS),
        _ => panic!("Γ({p}/{q}) not tabulated"),
    };
    let k = p as f64 / q as f64;
    while x + 0.5 < k {
        g *= x;
        x += 1.0;
    }
    g
}

/// `∫_0^∞ r^{2n+1} e^{-c r^m} dr = Γ((2n+2)/m) / (m c^{(2n+2)/m})`.
#[test]
fn radial_integral_matches_gamma_closed_form() {
    let tol = Tolerances::default();
    let one = RadialSymbol::constant(1.0);
    let mut worst = 0.0f64;
    for c in [0.5f64, 1.0, 2.0, 5.0, 10.0] {
        for m in [1.0, 2.0, 3.0, 4.0, 6.0] {
            for n in 0..5 {
                let k = (2.0 * n as f64 + 2.0) / m;
                let want = gamma_at_thirds_and_halves(2 * n + 2, m as u32) * c.powf(-k) / m;
                let q = integrate_radial(&one, c, m, 2.0 * n as f64 + 1.0, &tol).unwrap();
                let err = (q.value - want).abs();
                assert!(err <= 1e-11 * want, "c={c} m={m} n={n}: {} vs {want}", q.value);
                assert!(err <= 3.0 * q.abs_error_estimate.max(f64::EPSILON * want), "c={c} m={m} n={n}: {err:e} vs {q:?}");
                worst = worst.max(err / want);
            }
        }
    }
    // the polar bookkeeping: 2π times the radial integral is the area moment
    let area = 2.0 * PI * integrate_radial(&one, 2.0, 3.0, 5.0, &tol).unwrap().value;
    let ln = berezin_core::quadrature::radial_moment(2.0, 3.0, 2).unwrap();
    assert!((area.ln() - ln).abs() < 1e-12, "{worst:e}");
}
