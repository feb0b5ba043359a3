use std::path::{Path, PathBuf};
use std::process::ExitCode;

use berezin_core::commutativity::{geometric_grid, Certifier};
use berezin_core::{scan, verify, Error, RunConfig, WeightParams};
use clap::{Parser, Subcommand};
use num_complex::Complex64;

#[derive(Parser, Debug)]
#[command(name = "berezin", version, about = "Weighted Fock-space kernels and Berezin transform commutators")]
struct Cli {
    /// Config file of `key = value` lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for scans
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Override one config key, e.g. `--set tol.series=1e-14` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reproducing kernel K(z, w)
    Kernel {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        alpha: f64,
        /// `re,im`
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        /// `re,im`
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        w: Complex64,
    },
    /// Commutator defect of two Berezin transforms on e^{-δ|z|^m} at the origin
    Defect {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Defect over an (m, δ) grid, written as CSV
    Scan {
        /// Comma-separated weight exponents
        #[arg(long)]
        m: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        /// Comma-separated δ values; may be empty
        #[arg(long, default_value = "")]
        deltas: String,
        #[arg(long)]
        out: PathBuf,
        /// Also write a chart of defect against δ
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run the self-check suites
    Verify {
        /// Comma-separated suite names
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// List suite names and exit
        #[arg(long)]
        list: bool,
    },
    /// Table of ln s_n
    Moments {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n_max: usize,
    },
    /// Large-β slopes of the weighted integrals I_0 and I_p
    Asymptotics {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta_min: f64,
        #[arg(long)]
        beta_max: f64,
        #[arg(long, default_value_t = 7)]
        nodes: usize,
    },
}

/// Comma-separated reals; an empty string is an empty list.
fn parse_list(flag: &str, s: &str) -> Result<Vec<f64>, Error> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("--{flag}: `{t}` is not a number")))
        })
        .collect()
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let part = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{s}` is not `re,im`"));
    Ok(Complex64::new(part(re)?, part(im)?))
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for kv in &cli.overrides {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("`--set {kv}`: expected KEY=VALUE")))?;
        cfg.set(key.trim(), value.trim())?;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::NonConvergence { .. } => 3,
                _ => 2,
            })
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let cfg = load_config(cli)?;
    let certifier = Certifier::new(cfg.tol, cfg.tol.kappa);
    match &cli.command {
        Command::Kernel { m, alpha, z, w } => {
            let k = certifier.space(*alpha, *m)?.reproducing_kernel(*z, *w)?;
            let v = k.value();
            println!("K(z, w) = {:.16e} {:+.16e}i", v.re, v.im);
            println!("ln|K| = {:.16e}", k.log_magnitude);
            println!("arg K = {:.16e}", k.phase.arg());
            println!("relative error bound = {:.3e}", k.error_bound);
            if !WeightParams::new(*alpha, *m)?.is_guaranteed() {
                println!("note: (alpha, m) is outside the guaranteed-accuracy box");
            }
        }
        Command::Defect { m, alpha, beta, delta } => {
            let r = certifier.defect(*alpha, *beta, *m, *delta)?;
            println!("m = {}, alpha = {}, beta = {}, delta = {}", r.m, r.alpha, r.beta, r.delta);
            println!(
                "forward  (B_beta B_alpha f)(0) = {:.16e} ± {:.3e} ({} terms)",
                r.forward.value, r.forward.error_bound, r.forward.n_terms
            );
            println!(
                "backward (B_alpha B_beta f)(0) = {:.16e} ± {:.3e} ({} terms)",
                r.backward.value, r.backward.error_bound, r.backward.n_terms
            );
            println!("defect = {:.16e}", r.defect);
            println!("combined error = {:.3e}", r.combined_error);
            println!("significant = {} (kappa = {})", r.significant, r.kappa);
        }
        Command::Scan { m, alpha, beta, deltas, out, svg } => {
            let ms = parse_list("m", m)?;
            let deltas = parse_list("deltas", deltas)?;
            let rows = scan::run_scan(&certifier, &ms, *alpha, *beta, &deltas, cfg.threads)?;
            write_file(out, &scan::write_csv(&rows))?;
            if let Some(path) = svg {
                write_file(path, &scan::render_svg(&rows))?;
            }
            let significant = rows.iter().filter(|r| r.significant).count();
            println!("{} rows, {} significant -> {}", rows.len(), significant, out.display());
        }
        Command::Verify { only, list } => {
            if *list {
                for s in verify::SUITES {
                    println!("{:<20} {}", s.name, s.about);
                }
                return Ok(0);
            }
            let only = (!only.is_empty()).then_some(only.as_slice());
            let checks = verify::run_suites(&certifier, only)?;
            print!("{}", verify::render_table(&checks));
            return Ok(if checks.iter().all(|c| c.pass) { 0 } else { 1 });
        }
        Command::Moments { m, alpha, n_max } => {
            let space = certifier.space(*alpha, *m)?;
            println!("n,ln_s_n,s_n");
            for n in 0..=*n_max {
                let ln_s = space.stieltjes_moment(n);
                println!("{n},{ln_s:.16e},{:.16e}", ln_s.exp());
            }
        }
        Command::Asymptotics { m, alpha, beta_min, beta_max, nodes } => {
            if !(beta_min > &0.0 && beta_max > beta_min) {
                return Err(Error::Domain("need 0 < beta-min < beta-max".into()));
            }
            let s = certifier.asymptotic_slopes(*m, *alpha, &geometric_grid(*beta_min, *beta_max, *nodes))?;
            println!("beta,ln_I_0,ln_I_{}", s.p);
            for (beta, i0, ip) in &s.points {
                println!("{beta:.16e},{i0:.16e},{ip:.16e}");
            }
            println!("slope_0 = {:.6} (expected {:.6})", s.slope_0, -1.0 / s.p as f64);
            println!(
                "slope_p = {:.6} (expected {:.6})",
                s.slope_p,
                -(s.p as f64 + 1.0) / s.p as f64
            );
        }
    }
    Ok(0)
}
