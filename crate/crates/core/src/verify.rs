//! Named self-check suites with pinned tolerances, driven by `berezin verify`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::berezin::{
    berezin_at_zero, berezin_exp_radial, berezin_general, ExpSymbol, PlanarSymbol, Symbol,
};
use crate::commutativity::{geometric_grid, Certifier};
use crate::error::{Error, Result};

const SEED: u64 = 0x5eed_f0c5;

/// Outcome of one check inside a suite.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

pub struct Suite {
    pub name: &'static str,
    pub about: &'static str,
    run: fn(&Certifier, &mut Vec<Check>, &'static str) -> Result<()>,
}

pub const SUITES: &[Suite] = &[
    Suite { name: "kernel-m2", about: "S at m=2 against exp(αζ), random complex ζ", run: kernel_m2 },
    Suite { name: "moments", about: "Stieltjes moments: factorial case and log-convexity", run: moments },
    Suite { name: "unit-symbol", about: "B1 = 1 off the origin", run: unit_symbol },
    Suite { name: "berezin-at-zero", about: "(B f_δ)(0) = (α/(α+δ))^{2/m}", run: at_zero },
    Suite { name: "m2-closed-form", about: "Gaussian closed form of B f_δ at m=2", run: m2_closed_form },
    Suite { name: "dual-path", about: "series path against planar quadrature", run: dual_path },
    Suite { name: "radiality", about: "B of a radial symbol is radial", run: radiality },
    Suite { name: "contraction", about: "|Bf| ≤ sup|f| and positivity", run: contraction },
    Suite { name: "commutativity-m2", about: "defect vanishes at m=2", run: commutativity_m2 },
    Suite { name: "noncommutativity", about: "significant defect for m ≠ 2", run: noncommutativity },
    Suite { name: "symmetry-gap", about: "U symmetry gaps for n < m/2", run: symmetry_gap },
    Suite { name: "u-identities-m2", about: "U(0) symmetry and U(1) gap at m=2", run: u_identities_m2 },
    Suite { name: "derivative", about: "∂_β U(n) against U(n+p)", run: derivative },
    Suite { name: "bounded-u", about: "U(n)/α^{2n/m} stays bounded", run: bounded_u },
    Suite { name: "asymptotics", about: "large-β slopes of I_0 and I_p", run: asymptotics },
    Suite { name: "nested-consistency", about: "range, monotonicity and path agreement of nested transforms", run: nested_consistency },
];

/// Runs the selected suites in table order; `only = None` runs all of them.
///
/// A suite that errors contributes one failed check carrying the error.
pub fn run_suites(certifier: &Certifier, only: Option<&[String]>) -> Result<Vec<Check>> {
    if let Some(names) = only {
        if let Some(bad) = names.iter().find(|n| !SUITES.iter().any(|s| s.name == n.as_str())) {
            return Err(Error::Config(format!("unknown suite `{bad}`")));
        }
    }
    let mut checks = Vec::new();
    for suite in SUITES {
        if only.is_some_and(|names| !names.iter().any(|n| n == suite.name)) {
            continue;
        }
        if let Err(e) = (suite.run)(certifier, &mut checks, suite.name) {
            checks.push(Check {
                suite: suite.name,
                name: "suite".into(),
                pass: false,
                detail: e.to_string(),
            });
        }
    }
    Ok(checks)
}

pub fn render_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.suite.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status}  {:<width$}  {}: {}", c.suite, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(out, "{} checks, {} failed", checks.len(), failed);
    out
}

fn push(out: &mut Vec<Check>, suite: &'static str, name: impl Into<String>, pass: bool, detail: String) {
    out.push(Check {
        suite,
        name: name.into(),
        pass,
        detail,
    });
}

/// `value ≤ limit` as a check line.
fn bound(out: &mut Vec<Check>, suite: &'static str, name: impl Into<String>, value: f64, limit: f64) {
    push(out, suite, name, value <= limit, format!("{value:.3e} <= {limit:.1e}"));
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

const UNIT_MS: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
const UNIT_ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];
const UNIT_RADII: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 4.0];

pub const DUAL_MS: [f64; 3] = [1.0, 2.0, 4.0];
pub const DUAL_ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const DUAL_DELTAS: [f64; 3] = [0.5, 1.0, 3.0];
pub const DUAL_RADII: [f64; 3] = [0.5, 1.0, 2.0];

fn kernel_m2(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let alpha = rng.gen_range(0.1..=10.0);
        let zeta = Complex64::from_polar(rng.gen_range(0.0..=50.0), rng.gen_range(-PI..PI));
        let s = c.space(alpha, 2.0)?.kernel_series(zeta)?;
        let want = (alpha * zeta).exp();
        worst = worst.max((s.value() - want).norm() / want.norm());
    }
    bound(out, suite, "max rel error, 1000 samples", worst, 1e-12);
    let k = c.space(2.0, 2.0)?.reproducing_kernel(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0))?;
    let gap = (k.value() - Complex64::new(0.0, 4.0).exp()).norm();
    bound(out, suite, "K(1+i, 1-i) = exp(4i) at α=2", gap, 1e-13);
    Ok(())
}

fn moments(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let sp = c.space(1.0, 2.0)?;
    let mut ln_fact = 0.0f64;
    let mut worst = 0.0f64;
    for n in 0..=20 {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        worst = worst.max((sp.stieltjes_moment(n) - ln_fact).abs() / ln_fact.max(1.0));
    }
    bound(out, suite, "ln s_n = ln n! at m=2", worst, 1e-13);
    let mut violations = 0;
    for m in [0.5, 1.0, 2.0, 3.0, 6.0, 10.0] {
        for alpha in [1e-3, 1.0, 1e6] {
            let sp = c.space(alpha, m)?;
            for n in 1..200 {
                let lhs = sp.stieltjes_moment(n - 1) + sp.stieltjes_moment(n + 1);
                let rhs = 2.0 * sp.stieltjes_moment(n);
                if lhs < rhs - 1e-12 * rhs.abs().max(1.0) {
                    violations += 1;
                }
            }
        }
    }
    push(out, suite, "log-convexity, n < 200", violations == 0, format!("{violations} violations"));
    Ok(())
}

fn unit_symbol(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let one = PlanarSymbol::new(1.0, |_| 1.0);
    let mut worst = 0.0f64;
    for m in UNIT_MS {
        for alpha in UNIT_ALPHAS {
            let sp = c.space(alpha, m)?;
            for r in UNIT_RADII {
                let q = berezin_general(&sp, &one, Complex64::new(r, 0.0))?;
                worst = worst.max((q.value - 1.0).abs());
            }
        }
    }
    bound(out, suite, "max |B1 - 1|, 4x3x5 grid", worst, 1e-9);
    Ok(())
}

fn at_zero(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let mut worst = 0.0f64;
    for m in [1.0, 2.0, 3.0, 4.0, 6.0] {
        for alpha in [0.5, 1.0, 2.0] {
            let sp = c.space(alpha, m)?;
            for delta in [0.0, 0.5, 1.0, 4.0] {
                let f = ExpSymbol::new(delta)?;
                let q = berezin_at_zero(&sp, &Symbol::Radial(f.radial(m)))?;
                let want = (alpha / (alpha + delta)).powf(2.0 / m);
                worst = worst.max((q.value - want).abs());
            }
        }
    }
    bound(out, suite, "max abs error, 5x3x4 grid", worst, 1e-10);
    let sp = c.space(1.0, 3.0)?;
    let odd = PlanarSymbol::new(1.0, |w: Complex64| if w.norm() == 0.0 { 0.0 } else { w.re / w.norm() });
    let q = berezin_at_zero(&sp, &Symbol::Planar(odd))?;
    bound(out, suite, "cos(arg w) integrates to 0", q.value.abs(), 1e-12);
    Ok(())
}

fn m2_closed_form(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let mut worst = 0.0f64;
    for alpha in DUAL_ALPHAS {
        let sp = c.space(alpha, 2.0)?;
        for delta in DUAL_DELTAS {
            for r in DUAL_RADII {
                let q = berezin_exp_radial(&sp, delta, r)?;
                let want = alpha / (alpha + delta) * (-(alpha * delta / (alpha + delta)) * r * r).exp();
                worst = worst.max(rel(q.value, want));
            }
        }
    }
    bound(out, suite, "max rel error, 3x3x3 grid", worst, 1e-10);
    Ok(())
}

fn dual_path(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let mut worst = 0.0f64;
    for m in DUAL_MS {
        for alpha in DUAL_ALPHAS {
            let sp = c.space(alpha, m)?;
            for delta in DUAL_DELTAS {
                let f = ExpSymbol::new(delta)?.planar(m);
                for r in DUAL_RADII {
                    let series = berezin_exp_radial(&sp, delta, r)?;
                    let planar = berezin_general(&sp, &f, Complex64::new(r, 0.0))?;
                    worst = worst.max(rel(planar.value, series.value));
                }
            }
        }
    }
    bound(out, suite, "max rel gap, 3x3x3x3 grid", worst, 1e-8);
    Ok(())
}

fn radiality(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let mut worst = 0.0f64;
    for m in [1.0, 3.0, 4.0] {
        let sp = c.space(1.0, m)?;
        let f = ExpSymbol::new(0.5)?.planar(m);
        let z = Complex64::new(1.3, 0.0);
        let base = berezin_general(&sp, &f, z)?.value;
        for theta in [PI / 7.0, PI / 3.0] {
            let turned = berezin_general(&sp, &f, z * Complex64::from_polar(1.0, theta))?.value;
            worst = worst.max(rel(turned, base));
        }
    }
    bound(out, suite, "max rel gap under rotation", worst, 1e-9);
    Ok(())
}

fn contraction(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let symbols: [(&str, PlanarSymbol<'static>, bool); 3] = [
        ("cos(3 arg w) sin|w|", PlanarSymbol::new(1.0, wave), false),
        ("cos²(arg w) / (1 + |w|)", PlanarSymbol::new(1.0, lobe), true),
        ("-2 exp(-|w|³)", PlanarSymbol::new(2.0, |w: Complex64| -2.0 * (-w.norm().powi(3)).exp()), false),
    ];
    for m in [1.0, 3.0] {
        let sp = c.space(1.0, m)?;
        for (name, f, nonnegative) in &symbols {
            for z in [Complex64::new(0.4, 0.3), Complex64::new(-1.5, 1.0)] {
                let q = berezin_general(&sp, f, z)?;
                let ok = q.value.abs() <= f.sup_bound() + q.abs_error_estimate
                    && (!nonnegative || q.value >= -q.abs_error_estimate);
                push(
                    out,
                    suite,
                    format!("{name}, m={m}, z={z}"),
                    ok,
                    format!("Bf = {:.6e} (sup {})", q.value, f.sup_bound()),
                );
            }
        }
    }
    Ok(())
}

fn wave(w: Complex64) -> f64 {
    let (r, theta) = w.to_polar();
    (3.0 * theta).cos() * r.sin()
}

fn lobe(w: Complex64) -> f64 {
    let (r, theta) = w.to_polar();
    theta.cos().powi(2) / (1.0 + r)
}

pub const M2_GRID: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

fn commutativity_m2(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let (mut worst_abs, mut worst_ratio, mut worst_rel) = (0.0f64, 0.0f64, 0.0f64);
    let mut significant = 0;
    for alpha in M2_GRID {
        for beta in M2_GRID {
            for delta in M2_GRID {
                let r = c.defect(alpha, beta, 2.0, delta)?;
                let want = alpha * beta / (alpha * beta + alpha * delta + beta * delta);
                worst_abs = worst_abs.max(r.defect.abs());
                worst_ratio = worst_ratio.max(r.defect.abs() / r.combined_error);
                worst_rel = worst_rel.max(rel(r.forward.value, want)).max(rel(r.backward.value, want));
                significant += usize::from(r.significant);
            }
        }
    }
    bound(out, suite, "max |defect|", worst_abs, 1e-9);
    bound(out, suite, "max |defect| / combined error", worst_ratio, 10.0);
    bound(out, suite, "nested vs αβ/(αβ+αδ+βδ), max rel", worst_rel, 1e-9);
    push(out, suite, "no significant defect", significant == 0, format!("{significant} significant"));
    Ok(())
}

pub const NONCOMM_MS: [f64; 4] = [1.0, 3.0, 4.0, 6.0];
pub const NONCOMM_PAIRS: [(f64, f64); 3] = [(1.0, 2.0), (1.0, 5.0), (0.5, 4.0)];
pub const NONCOMM_DELTAS: [f64; 3] = [0.5, 1.0, 2.0];

fn noncommutativity(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    for m in NONCOMM_MS {
        let mut best: Option<crate::commutativity::DefectReport> = None;
        for (alpha, beta) in NONCOMM_PAIRS {
            for delta in NONCOMM_DELTAS {
                let r = c.defect(alpha, beta, m, delta)?;
                if r.significant && best.as_ref().is_none_or(|b| r.defect.abs() > b.defect.abs()) {
                    best = Some(r);
                }
            }
        }
        let Some(w) = best else {
            push(out, suite, format!("m={m}"), false, "no significant defect".into());
            continue;
        };
        let composed = c.nested_by_composition(w.alpha, w.beta, m, w.delta)?
            - c.nested_by_composition(w.beta, w.alpha, m, w.delta)?;
        let gap = rel(w.defect, composed);
        push(
            out,
            suite,
            format!("m={m}"),
            gap <= 1e-4,
            format!(
                "defect {:.6e} at (α,β,δ)=({},{},{}), err {:.1e}; composition rel gap {gap:.1e} <= 1e-4",
                w.defect, w.alpha, w.beta, w.delta, w.combined_error
            ),
        );
    }
    Ok(())
}

fn symmetry_gap(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let kappa = c.kappa();
    let gaps = c.lemma1_witness(1.0, 2.0, 4.0)?;
    let detail = gaps
        .iter()
        .map(|g| format!("n={}: {:.6e} ± {:.1e}", g.n, g.gap, g.error))
        .collect::<Vec<_>>()
        .join(", ");
    push(out, suite, "m=4, (α,β)=(1,2) certified", gaps.iter().any(|g| g.significant(kappa)), detail);
    let gaps = c.lemma1_witness(1.0, 2.0, 2.0)?;
    bound(out, suite, "m=2, (α,β)=(1,2), |gap(0)|", gaps[0].gap.abs(), 1e-10 * PI / 3.0);
    Ok(())
}

/// Four seeded pairs with `α, β ∈ [0.1, 10]` plus `α/β = 100`.
pub fn identity_pairs() -> Vec<(f64, f64)> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 0x77);
    let mut pairs: Vec<(f64, f64)> = (0..4)
        .map(|_| (10f64.powf(rng.gen_range(-1.0..=1.0)), 10f64.powf(rng.gen_range(-1.0..=1.0))))
        .collect();
    pairs.push((10.0, 0.1));
    pairs
}

fn u_identities_m2(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    for (alpha, beta) in identity_pairs() {
        for id in c.tt_identities_m2(alpha, beta, 1e-9)? {
            push(
                out,
                suite,
                format!("{} at (α,β)=({alpha:.4},{beta:.4})", id.name),
                id.pass,
                format!("rel gap {:.3e} <= 1e-9", id.rel_gap),
            );
        }
    }
    Ok(())
}

pub const DERIV_PAIRS: [(f64, f64); 3] = [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0)];

fn derivative(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let h = c.tolerances().fd_step_rel;
    for m in [2.0, 4.0] {
        for n in [0, 1] {
            for (alpha, beta) in DERIV_PAIRS {
                let d = c.derivative_identity_check(alpha, beta, m, n, h)?;
                let name = format!("m={m}, n={n}, (α,β)=({alpha},{beta})");
                if m == 2.0 {
                    let half = c.derivative_identity_check(alpha, beta, m, n, h / 2.0)?;
                    let ratio = d.rel_gap / half.rel_gap;
                    push(
                        out,
                        suite,
                        name,
                        d.rel_gap <= 1e-5 && (3.0..=5.0).contains(&ratio),
                        format!("rel gap {:.3e} <= 1e-5, halving ratio {ratio:.3} in [3, 5]", d.rel_gap),
                    );
                } else {
                    bound(out, suite, name, d.rel_gap, 1e-5);
                }
            }
        }
    }
    Ok(())
}

fn bounded_u(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let (alpha, beta, m) = (1.0, 2.0, 4.0);
    let mut scaled = Vec::with_capacity(101);
    for n in 0..=100 {
        let u = c.u_function(alpha, beta, m, n)?;
        scaled.push(u.value / alpha.powf(2.0 * n as f64 / m));
    }
    let (arg, max) = scaled
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (n, &v)| if v > acc.1 { (n, v) } else { acc });
    let head = scaled[..=50].iter().copied().fold(f64::MIN, f64::max);
    let tail = scaled[50..].iter().copied().fold(f64::MIN, f64::max);
    push(
        out,
        suite,
        "m=4, (α,β)=(1,2), n ≤ 100",
        arg <= 50 && tail <= 1.01 * head,
        format!("max {max:.6e} at n={arg}; tail max / head max = {:.3e}", tail / head),
    );
    Ok(())
}

fn asymptotics(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    let betas = geometric_grid(1e3, 1e5, 7);
    let s = c.asymptotic_slopes(4.0, 1.0, &betas)?;
    bound(out, suite, "m=4 slope_0 + 0.5", (s.slope_0 + 0.5).abs(), 0.05);
    bound(out, suite, "m=4 slope_p + 1.5", (s.slope_p + 1.5).abs(), 0.05);
    let s = c.asymptotic_slopes(2.0, 1.0, &betas)?;
    bound(out, suite, "m=2 slope_0 + 1", (s.slope_0 + 1.0).abs(), 0.05);
    let s = c.asymptotic_slopes(6.0, 1.0, &betas)?;
    bound(out, suite, "m=6 slope_0 + 1/3", (s.slope_0 + 1.0 / 3.0).abs(), 0.05);
    Ok(())
}

fn nested_consistency(c: &Certifier, out: &mut Vec<Check>, suite: &'static str) -> Result<()> {
    for m in [1.0, 3.0, 4.0] {
        let values = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&d| c.nested_at_zero(1.0, 2.0, m, d).map(|v| v.value))
            .collect::<Result<Vec<_>>>()?;
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        let in_range = values.iter().all(|&v| v > 0.0 && v <= 1.0 + 1e-12);
        push(
            out,
            suite,
            format!("m={m}: decreasing in δ, within (0, 1]"),
            decreasing && in_range && (values[0] - 1.0).abs() < 1e-10,
            format!("δ=0 → {:.15}, δ=4 → {:.6e}", values[0], values[5]),
        );
        let fwd = c.defect(1.0, 2.0, m, 1.0)?.defect;
        let bwd = c.defect(2.0, 1.0, m, 1.0)?.defect;
        push(
            out,
            suite,
            format!("m={m}: defect(α,β) = -defect(β,α)"),
            fwd == -bwd,
            format!("{fwd:.6e} vs {bwd:.6e}"),
        );
    }
    let series = c.nested_at_zero(1.0, 2.0, 2.0, 1.0)?.value;
    let composed = c.nested_by_composition(1.0, 2.0, 2.0, 1.0)?;
    bound(out, suite, "m=2 series vs composition, rel", rel(series, composed), 1e-7);
    bound(out, suite, "m=2 (α,β,δ)=(1,2,1) vs 0.4", rel(series, 0.4), 1e-9);
    let series = c.nested_at_zero(1.0, 2.0, 4.0, 1.0)?.value;
    let composed = c.nested_by_composition(1.0, 2.0, 4.0, 1.0)?;
    bound(out, suite, "m=4 series vs composition, rel", rel(series, composed), 1e-7);
    Ok(())
}
