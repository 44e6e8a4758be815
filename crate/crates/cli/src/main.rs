//! `modwave`: command-line front end of the modulational stability toolkit.
//!
//! Exit codes of `classify`: 0 stable, 10 unstable, 20 degenerate,
//! 30 hypothesis failed, 1 error. `bloch-check` and `validate` exit with 2
//! when a comparison fails.

mod commands;
mod record;
mod request;
mod validate;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use request::{AnalysisRequest, Format, Mode, Overrides};

/// Exit code of a failed `bloch-check` or `validate` comparison.
const EXIT_CHECK_FAILED: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "modwave", version, about = "Modulational stability of periodic traveling waves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify one wave; the exit code encodes the verdict.
    Classify(PointArgs),
    /// Classify every point of a parameter grid.
    Sweep(PointArgs),
    /// Small-amplitude tables: Γ(k) and Λ(k), fKdV α sweeps, ILW grids.
    Smallamp(SmallAmpArgs),
    /// Compare the theory's modulation slopes with the Floquet–Bloch spectrum.
    BlochCheck(PointArgs),
    /// Run the oracle suites and report per-check residuals.
    Validate(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Equation: kdv, mkdv-focusing, mkdv-defocusing, schamel, whitham,
    /// benjamin-ono, fkdv:<alpha> or ilw:<depth>.
    #[arg(long)]
    equation: Option<String>,
    /// JSON configuration document; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Quadrature tolerance.
    #[arg(long, allow_hyphen_values = true)]
    tol_quad: Option<f64>,
    /// Fourier truncation N of the Bloch matrices (modes −N..=N).
    #[arg(long)]
    modes: Option<usize>,
    /// Worker threads; the MODWAVE_JOBS environment variable takes precedence.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Parameter a: a value, or start:stop:count for sweeps.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Energy E: a value, or start:stop:count for sweeps.
    #[arg(long = "E", allow_hyphen_values = true)]
    e: Option<String>,
    /// Speed c: a value, or start:stop:count for sweeps.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Wave number of a Benjamin–Ono wave.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// Oscillation interval, counted from the left.
    #[arg(long)]
    branch: Option<usize>,
}

#[derive(Debug, Args)]
struct SmallAmpArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Wave numbers, start:stop:count (default 0.1:3:291, step 0.01).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// Fractional orders α of a Λ_fKdV sign table.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Depths H of an ILW Δ_ILW grid.
    #[arg(long, allow_hyphen_values = true)]
    depth: Option<String>,
}

fn overrides(c: &CommonArgs) -> Overrides {
    Overrides {
        equation: c.equation.clone(),
        tol_quad: c.tol_quad,
        modes: c.modes,
        jobs: c.jobs,
        out: c.out.clone(),
        format: c.format,
        ..Overrides::default()
    }
}

fn point_request(mode: Mode, p: &PointArgs) -> Result<AnalysisRequest> {
    let o = Overrides {
        a: p.a.clone(),
        e: p.e.clone(),
        c: p.c.clone(),
        k: p.k.clone(),
        branch: p.branch,
        ..overrides(&p.common)
    };
    AnalysisRequest::resolve(mode, p.common.config.as_deref(), &o)
}

/// Opens the output destination; files are written through a buffer.
fn output(req: &AnalysisRequest) -> Result<Box<dyn Write>> {
    Ok(match &req.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("out: cannot create {}", path.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Classify(p) => {
            let req = point_request(Mode::Classify, &p)?;
            let (rec, code) = commands::run_classify(&req)?;
            let mut out = output(&req)?;
            record::write_records(&mut out, std::slice::from_ref(&rec), req.format)?;
            out.flush()?;
            Ok(code)
        }
        Command::Sweep(p) => {
            let req = point_request(Mode::Sweep, &p)?;
            let records = commands::run_sweep(&req)?;
            let mut out = output(&req)?;
            record::write_records(&mut out, &records, req.format)?;
            out.flush()?;
            Ok(0)
        }
        Command::Smallamp(s) => {
            let o = Overrides {
                k_axis: s.k.clone(),
                alpha_axis: s.alpha.clone(),
                depth_axis: s.depth.clone(),
                ..overrides(&s.common)
            };
            let req = AnalysisRequest::resolve(Mode::SmallAmp, s.common.config.as_deref(), &o)?;
            let rep = commands::run_smallamp(&req)?;
            let mut out = output(&req)?;
            commands::write_smallamp(&mut out, &rep, req.format)?;
            out.flush()?;
            Ok(0)
        }
        Command::BlochCheck(p) => {
            let req = point_request(Mode::BlochCheck, &p)?;
            let rep = commands::run_bloch_check(&req)?;
            let mut out = output(&req)?;
            commands::write_bloch_check(&mut out, &rep, req.format)?;
            out.flush()?;
            Ok(if rep.pass { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Validate(c) => {
            let req = AnalysisRequest::resolve(Mode::Validate, c.config.as_deref(), &overrides(&c))?;
            let rep = commands::with_pool(req.jobs, validate::run_validate)?;
            for chk in &rep.checks {
                eprintln!(
                    "{} {:<58} residual {:.3e} (tolerance {:.0e}, {} point(s), {:.2} s)",
                    if chk.pass { "PASS" } else { "FAIL" },
                    chk.name,
                    chk.residual,
                    chk.tolerance,
                    chk.points,
                    chk.seconds
                );
            }
            let mut out = output(&req)?;
            validate::write_validation(&mut out, &rep, req.format)?;
            out.flush()?;
            Ok(if rep.pass { 0 } else { EXIT_CHECK_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
