//! Defect scans over `(m, δ)` grids and their CSV / SVG reports.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::commutativity::{Certifier, DefectReport};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "m,alpha,beta,delta,forward,backward,defect,err_bound,significant";

/// One CSV line; mirrors [`DefectReport`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub m: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub forward: f64,
    pub backward: f64,
    pub defect: f64,
    pub err_bound: f64,
    pub significant: bool,
}

impl From<&DefectReport> for ScanRow {
    fn from(r: &DefectReport) -> Self {
        Self {
            m: r.m,
            alpha: r.alpha,
            beta: r.beta,
            delta: r.delta,
            forward: r.forward.value,
            backward: r.backward.value,
            defect: r.defect,
            err_bound: r.combined_error,
            significant: r.significant,
        }
    }
}

/// Evaluates the defect at every `(m, δ)` pair for one `(α, β)` and returns
/// the rows sorted by `(m, δ)`.
///
/// Work items run on a pool of `threads` workers. Each row depends only on
/// its own parameters, so the output does not depend on the pool size.
pub fn run_scan(
    certifier: &Certifier,
    ms: &[f64],
    alpha: f64,
    beta: f64,
    deltas: &[f64],
    threads: usize,
) -> Result<Vec<ScanRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let items: Vec<(f64, f64)> = ms
        .iter()
        .flat_map(|&m| deltas.iter().map(move |&d| (m, d)))
        .collect();
    let mut rows = pool.install(|| {
        items
            .par_iter()
            .map(|&(m, delta)| certifier.defect(alpha, beta, m, delta).map(|r| ScanRow::from(&r)))
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by(|a, b| a.m.total_cmp(&b.m).then(a.delta.total_cmp(&b.delta)));
    Ok(rows)
}

/// CSV text with 17 significant digits per number.
pub fn write_csv(rows: &[ScanRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.m, r.alpha, r.beta, r.delta, r.forward, r.backward, r.defect, r.err_bound, r.significant
        );
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<ScanRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::Domain("missing or unexpected CSV header".into())),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Domain(format!("CSV line {}: {what}", i + 2));
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(bad("expected 9 fields"));
        }
        let num = |k: usize| fields[k].trim().parse::<f64>().map_err(|_| bad("bad number"));
        rows.push(ScanRow {
            m: num(0)?,
            alpha: num(1)?,
            beta: num(2)?,
            delta: num(3)?,
            forward: num(4)?,
            backward: num(5)?,
            defect: num(6)?,
            err_bound: num(7)?,
            significant: fields[8].trim().parse().map_err(|_| bad("bad boolean"))?,
        });
    }
    Ok(rows)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Line chart of defect against δ, one polyline per `m`.
pub fn render_svg(rows: &[ScanRow]) -> String {
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (70.0, 130.0, 30.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;

    let finite = |v: f64| v.is_finite();
    let xs = rows.iter().map(|r| r.delta).filter(|v| finite(*v));
    let ys = rows.iter().map(|r| r.defect).filter(|v| finite(*v));
    let (mut x0, mut x1) = min_max(xs).unwrap_or((0.0, 1.0));
    let (mut y0, mut y1) = min_max(ys).unwrap_or((-1.0, 1.0));
    y0 = y0.min(0.0);
    y1 = y1.max(0.0);
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= y0 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let px = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| top + (y1 - y) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let zero = py(0.0);
    let _ = writeln!(
        svg,
        r##"<line x1="{left}" y1="{zero:.2}" x2="{:.2}" y2="{zero:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
        left + pw
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(xv),
            top + ph + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 6.0,
            py(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">delta</text>"#,
        left + pw / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">defect</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );

    let mut ms: Vec<f64> = rows.iter().map(|r| r.m).collect();
    ms.sort_by(f64::total_cmp);
    ms.dedup();
    for (k, m) in ms.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = rows
            .iter()
            .filter(|r| r.m == *m && finite(r.delta) && finite(r.defect))
            .map(|r| format!("{:.2},{:.2}", px(r.delta), py(r.defect)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + 16.0 * (k as f64 + 1.0);
        let lx = left + pw + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 18.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">m = {m}</text>"#,
            lx + 24.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn min_max(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e-2 && v.abs() < 1e4 {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}
