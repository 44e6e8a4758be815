//! The `validate` command: oracle suites with per-check residuals.

use std::time::Instant;

use anyhow::Result;
use modwave_core::bloch::{assemble_bo, assemble_local, modulation_slopes};
use modwave_core::bo::{bo_conserved, bo_eval, bo_modulation_slopes, BoWaveParams};
use modwave_core::equations::{params_from_roots, EquationSpec, WaveParams};
use modwave_core::mi_index::{classify, ClassifyOptions};
use modwave_core::picard_fuchs::param_jacobian;
use modwave_core::sampling::{well_sample, Sample};
use modwave_core::smallamp::{delta_discriminant, delta_product_formula, whitham_k_star, DispersionSymbol, MatrixVariant};
use modwave_core::waves::{cnoidal_period, quadrature_tmph, WaveOptions, WaveProfile};
use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::commands::SLOPE_XI;
use crate::record::{conventions_fingerprint, fmt_f64, write_csv_table};
use crate::request::Format;

/// One oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Points compared.
    pub points: usize,
    /// Worst residual over the points.
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seconds: f64,
}

/// Output of `validate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    pub version: String,
    pub conventions: String,
}

/// Points of the additive-recurrence low-discrepancy sequence in `[0, 1)⁴`.
fn kronecker(i: usize) -> [f64; 4] {
    // Powers of the inverse of the unique positive root of x⁵ = x + 1.
    const G: f64 = 1.167_303_978_261_418_7;
    let mut out = [0.0; 4];
    for (d, o) in out.iter_mut().enumerate() {
        let alpha = G.powi(-(d as i32 + 1));
        *o = (0.5 + alpha * (i + 1) as f64).fract();
    }
    out
}

/// The first `n` well samples of `spec` along the sequence.
fn samples(spec: &EquationSpec, n: usize) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    let mut i = 0;
    while out.len() < n && i < 100 * n {
        let u = kronecker(i);
        if let Some(s) = well_sample(spec, u[0], u[1], u[2], u[3])? {
            out.push(s);
        }
        i += 1;
    }
    Ok(out)
}

fn check(name: &str, tolerance: f64, f: impl FnOnce() -> Result<(usize, f64)>) -> CheckResult {
    let start = Instant::now();
    let (points, residual) = f().unwrap_or((0, f64::INFINITY));
    CheckResult {
        name: name.into(),
        points,
        residual,
        tolerance,
        pass: residual <= tolerance,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Central differences with one Richardson step of quadrature `(T, M, P)`.
fn fd_jacobian(spec: &EquationSpec, s: &Sample, h: f64) -> Result<[[f64; 3]; 3]> {
    let opts = WaveOptions { branch: s.branch, tol_quad: 1e-14 };
    let eval = |col: usize, d: f64| -> Result<[f64; 3]> {
        let mut p = s.params;
        match col {
            0 => p.a += d,
            1 => p.e += d,
            _ => p.c += d,
        }
        let q = quadrature_tmph(spec, &p, &opts)?;
        Ok([q.t, q.m, q.p])
    };
    let mut jac = [[0.0; 3]; 3];
    for col in 0..3 {
        let diff = |step: f64| -> Result<[f64; 3]> {
            let (fp, fm) = (eval(col, step)?, eval(col, -step)?);
            Ok([0, 1, 2].map(|r| (fp[r] - fm[r]) / (2.0 * step)))
        };
        let (d1, d2) = (diff(h)?, diff(0.5 * h)?);
        for r in 0..3 {
            jac[r][col] = (4.0 * d2[r] - d1[r]) / 3.0;
        }
    }
    Ok(jac)
}

fn rel(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / floor.max(b.abs())
}

fn pf_vs_fd(spec: &EquationSpec, n: usize) -> Result<(usize, f64)> {
    let mut worst = 0.0f64;
    let list = samples(spec, n)?;
    for s in &list {
        let pf = param_jacobian(spec, &s.params, &WaveOptions { branch: s.branch, tol_quad: 1e-13 })?.jac;
        let fd = fd_jacobian(spec, s, 1e-3 * s.depth.min(1.0))?;
        for r in 0..3 {
            for c in 0..3 {
                // |d| ≤ max(1e−6·|fd|, 1e−9) is |d|/max(|fd|, 1e−3) ≤ 1e−6.
                worst = worst.max(rel(pf[r][c], fd[r][c], 1e-3));
            }
        }
    }
    Ok((list.len(), worst))
}

fn slope_gap(theory: &mut [Complex<f64>], bloch: &[Complex<f64>; 3]) -> f64 {
    theory.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    theory.iter().zip(bloch).map(|(t, b)| (t - b).norm()).fold(0.0, f64::max)
}

fn local_slopes(spec: &EquationSpec, params: WaveParams, branch: usize) -> Result<(usize, f64)> {
    let wo = WaveOptions { branch, ..WaveOptions::default() };
    let wave = WaveProfile::resolve(spec, &params, &wo)?;
    let bloch = modulation_slopes(|xi| assemble_local(&wave, xi, 64), &SLOPE_XI)?;
    let rep = classify(spec, &params, &ClassifyOptions { wave: wo, ..ClassifyOptions::default() })?;
    let mut theory: Vec<Complex<f64>> = rep.slopes.iter().map(|&z| z.into()).collect();
    Ok((1, slope_gap(&mut theory, &bloch)))
}

/// Runs every oracle suite.
pub fn run_validate() -> ValidationReport {
    let mut checks = vec![
        check("picard-fuchs vs finite differences (KdV)", 1e-6, || pf_vs_fd(&EquationSpec::kdv(), 10)),
        check("picard-fuchs vs finite differences (focusing mKdV)", 1e-6, || pf_vs_fd(&EquationSpec::mkdv(true), 10)),
        check("cnoidal period closed form vs quadrature", 1e-8, || {
            let spec = EquationSpec::LocalPolynomial { f: vec![0.0, 0.0, 0.5] };
            let mut worst = 0.0f64;
            for i in 0..10 {
                let u = kronecker(i);
                let g = -2.0 + 3.0 * u[0];
                let (b, a) = (g + 0.1 + 2.0 * u[1], g + 0.2 + 2.0 * u[1] + 2.0 * u[2]);
                let t = quadrature_tmph(&spec, &params_from_roots(a, b, g), &WaveOptions::default())?.t;
                worst = worst.max(rel(cnoidal_period(a, b, g)?, t, 0.0));
            }
            Ok((10, worst))
        }),
        check("Benjamin-Ono M, P closed forms vs quadrature", 1e-8, || {
            let mut worst = 0.0f64;
            for (a, k, c) in [(0.0, 1.0, -2.0), (-0.3, 0.5, -1.2), (0.2, 0.8, -2.5)] {
                let p = BoWaveParams { a, k, c };
                let cons = bo_conserved(&p)?;
                let n = 4096;
                let h = p.period() / n as f64;
                let (mut m, mut q) = (0.0, 0.0);
                for j in 0..n {
                    let u = bo_eval(&p, j as f64 * h)?;
                    m += u * h;
                    q += 0.5 * u * u * h;
                }
                worst = worst.max(rel(m, cons.m, 1.0)).max(rel(q, cons.p, 1.0));
            }
            Ok((3, worst))
        }),
        check("Bloch slopes vs theory (KdV cnoidal)", 1e-3, || {
            local_slopes(&EquationSpec::kdv(), WaveParams::new(0.3, 0.01, -1.2), 0)
        }),
        check("Bloch slopes vs theory (mKdV cnoidal)", 1e-3, || {
            local_slopes(&EquationSpec::mkdv(true), WaveParams::new(0.0, 0.5, -1.0), 0)
        }),
        check("Bloch slopes vs theory (mKdV dnoidal)", 1e-3, || {
            local_slopes(&EquationSpec::mkdv(true), WaveParams::new(0.0, -0.1, -1.0), 1)
        }),
        check("Bloch slopes vs averaged system (Benjamin-Ono)", 1e-3, || {
            let p = BoWaveParams { a: 0.0, k: 1.0, c: -2.0 };
            let bloch = modulation_slopes(|xi| assemble_bo(&p, xi, 64), &SLOPE_XI)?;
            let mut theory = bo_modulation_slopes(&p)?.to_vec();
            Ok((1, slope_gap(&mut theory, &bloch)))
        }),
        check("small-amplitude discriminant vs product formula (Whitham)", 1e-10, || {
            let w = DispersionSymbol::Whitham;
            let mut worst = 0.0f64;
            for k in [1.0, 2.0] {
                for xi in [1e-2, 1e-3] {
                    let d = delta_discriminant(k, 0.0, xi, &w, MatrixVariant::Exact)?.delta;
                    worst = worst.max(rel(d, delta_product_formula(k, xi, &w)?, 0.0));
                }
            }
            Ok((4, worst))
        }),
        check("Whitham cutoff k* distance from 1.146", 1e-3, || {
            let (k, _) = whitham_k_star()?;
            Ok((1, (k - 1.146).abs()))
        }),
    ];
    checks.iter_mut().for_each(|c| c.pass = c.pass && c.points > 0);
    let pass = checks.iter().all(|c| c.pass);
    ValidationReport { checks, pass, version: modwave_core::VERSION.into(), conventions: conventions_fingerprint() }
}

/// Writes a validation report.
pub fn write_validation<W: std::io::Write>(mut out: W, rep: &ValidationReport, format: Format) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rep)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = rep
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        c.points.to_string(),
                        fmt_f64(c.residual),
                        fmt_f64(c.tolerance),
                        c.pass.to_string(),
                        fmt_f64(c.seconds),
                    ]
                })
                .collect();
            let trailer = vec![format!("pass={} version={} conventions={}", rep.pass, rep.version, rep.conventions)];
            write_csv_table(out, "modwave.validate.v1", &["check", "points", "residual", "tolerance", "pass", "seconds"], &rows, &trailer)?;
        }
    }
    Ok(())
}
