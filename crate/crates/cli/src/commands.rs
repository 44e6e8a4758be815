//! The `classify`, `sweep`, `smallamp` and `bloch-check` commands.

use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use modwave_core::bloch::{assemble_bo, assemble_local, modulation_slopes, truncation_change, DEFAULT_XI};
use modwave_core::bo::{bo_conserved, bo_eval, bo_modulation_slopes, BoWaveParams};
use modwave_core::equations::{EquationSpec, WaveParams};
use modwave_core::mi_index::{classify, Classification, ComplexValue, Diagnostics, StabilityReport};
use modwave_core::smallamp::{delta_ilw, gamma_ilw, gamma_root, lambda_fkdv, lambda_index, DispersionSymbol};
use modwave_core::waves::{WaveOptions, WaveProfile};
use nalgebra::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::record::{conventions_fingerprint, fmt_f64, write_csv_table, InputEcho, ReportRecord};
use crate::request::{AnalysisRequest, Axis, Format};

/// Bloch frequencies used to extract modulation slopes. Branches with
/// slopes of order 30 still curve over the library default list, so a finer
/// one is used.
pub const SLOPE_XI: [f64; 3] = [2e-3, 1e-3, 5e-4];

/// Largest slope mismatch accepted by `bloch-check`.
pub const SLOPE_TOL: f64 = 1e-3;

/// Largest `N` vs `2N` eigenvalue change accepted by `bloch-check`.
pub const TRUNCATION_TOL: f64 = 1e-8;

fn sort_complex(v: &mut [Complex<f64>]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Stability report of a Benjamin–Ono wave from the averaged conservation laws.
fn bo_report(req: &AnalysisRequest, p: &BoWaveParams) -> modwave_core::Result<StabilityReport> {
    let slopes = bo_modulation_slopes(p)?;
    let cons = bo_conserved(p)?;
    let tol = req.options.tol;
    let scale = slopes.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let real = slopes.iter().all(|z| z.im.abs() <= tol.tol_im * scale);
    let distinct = slopes.windows(2).all(|w| (w[1] - w[0]).norm() > tol.tol_sep * scale);
    let classification = match (real, distinct) {
        (true, true) => Classification::Stable,
        (false, _) => Classification::Unstable,
        (true, false) => Classification::Degenerate,
    };
    Ok(StabilityReport {
        classification,
        delta_mi: None,
        mu_roots: Vec::new(),
        slopes: slopes.iter().map(|&z| z.into()).collect(),
        hypothesis: None,
        tmp: Some([p.period(), cons.m, cons.p]),
        u_minus: Some(bo_eval(p, 0.5 * p.period())?),
        u_plus: Some(bo_eval(p, 0.0)?),
        diagnostics: Diagnostics {
            tolerances: tol,
            tol_quad: req.options.wave.tol_quad,
            tol_deg: None,
            pf_cond: None,
            pf_rel_residual: None,
            message: Some("Benjamin-Ono verdict from the averaged conservation laws".into()),
        },
    })
}

/// Analyses one parameter point into a record; failures become `Error` records.
pub fn analyse_point(req: &AnalysisRequest, index: usize, params: WaveParams) -> ReportRecord {
    let start = Instant::now();
    let bo_k = if req.equation.is_benjamin_ono() { req.bo_k().ok() } else { None };
    let input = InputEcho {
        equation: req.equation.label.clone(),
        spec: req.equation.spec.clone(),
        params,
        branch: req.branch,
        k: bo_k,
    };
    let outcome = if req.equation.is_benjamin_ono() {
        match bo_k {
            Some(k) => bo_report(req, &BoWaveParams { a: params.a, k, c: params.c }).map_err(|e| e.to_string()),
            None => Err("k: Benjamin-Ono waves need a wave number".to_string()),
        }
    } else if matches!(req.equation.spec, EquationSpec::Nonlocal { .. }) {
        Err("classification of nonlocal waves other than Benjamin-Ono is not available; use smallamp".to_string())
    } else {
        classify(&req.equation.spec, &params, &req.options).map_err(|e| e.to_string())
    };
    ReportRecord::new(index, input, outcome, start.elapsed().as_secs_f64() * 1e3)
}

/// `classify`: one point, exit code from the verdict.
pub fn run_classify(req: &AnalysisRequest) -> Result<(ReportRecord, u8)> {
    let params = req.point()?;
    if req.equation.is_benjamin_ono() {
        req.bo_k()?;
    }
    let rec = analyse_point(req, 0, params);
    if let Some(e) = &rec.error {
        bail!("{e}");
    }
    let code = rec.status.exit_code();
    Ok((rec, code))
}

/// Runs `f` on a pool of `jobs` workers, or on rayon's default pool.
pub fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}

/// `sweep`: every grid point, in row-major order regardless of scheduling.
pub fn run_sweep(req: &AnalysisRequest) -> Result<Vec<ReportRecord>> {
    let points = req.sweep_points()?;
    if req.equation.is_benjamin_ono() {
        req.bo_k()?;
    }
    with_pool(req.jobs, || {
        points.par_iter().enumerate().map(|(i, &p)| analyse_point(req, i, p)).collect::<Vec<_>>()
    })
}

/// A refined sign change of a tabulated function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignChange {
    /// Root estimate.
    pub x: f64,
    /// Final bisection bracket.
    pub lo: f64,
    pub hi: f64,
    /// Grid cell containing the sign change.
    pub grid_lo: f64,
    pub grid_hi: f64,
}

/// Output of `smallamp`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallAmpReport {
    pub schema: String,
    pub equation: String,
    pub table: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub sign_changes: Vec<SignChange>,
    /// For sign tables: whether every tabulated value is positive.
    pub all_positive: bool,
    pub version: String,
    pub conventions: String,
}

fn symbol_of(req: &AnalysisRequest) -> Result<DispersionSymbol> {
    match &req.equation.spec {
        EquationSpec::Nonlocal { symbol } => Ok(symbol.clone()),
        _ => bail!("equation: smallamp needs a nonlocal dispersion symbol (whitham, fkdv:<alpha>, ilw:<depth>, ...)"),
    }
}

fn bisect(f: impl Fn(f64) -> modwave_core::Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64, f64)> {
    let mut flo = f(lo)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, mid, mid));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), lo, hi))
}

/// Sign changes of the column `col` against the abscissa column 0.
fn sign_changes(rows: &[Vec<Option<f64>>], col: usize, refine: impl Fn(f64, f64) -> Result<(f64, f64, f64)>) -> Result<Vec<SignChange>> {
    let mut out = Vec::new();
    for w in rows.windows(2) {
        let (Some(x0), Some(x1), Some(y0), Some(y1)) = (w[0][0], w[1][0], w[0][col], w[1][col]) else { continue };
        if y0 == 0.0 {
            out.push(SignChange { x: x0, lo: x0, hi: x0, grid_lo: x0, grid_hi: x0 });
        } else if y1 != 0.0 && y0.signum() != y1.signum() {
            let (x, lo, hi) = refine(x0, x1)?;
            out.push(SignChange { x, lo, hi, grid_lo: x0, grid_hi: x1 });
        }
    }
    if let Some(last) = rows.last() {
        if let (Some(x), Some(0.0)) = (last[0], last[col]) {
            out.push(SignChange { x, lo: x, hi: x, grid_lo: x, grid_hi: x });
        }
    }
    Ok(out)
}

/// `smallamp`: `Γ`/`Λ` table with refined roots, an fKdV `α` sign table, or an ILW grid.
pub fn run_smallamp(req: &AnalysisRequest) -> Result<SmallAmpReport> {
    let sym = symbol_of(req)?;
    let sa = &req.smallamp;
    let default_k = Axis::Range { start: 0.1, stop: 3.0, count: 291 };
    let (table, columns, rows, changes, all_positive);
    if let Some(alpha) = sa.alpha {
        let k = match sa.k {
            Some(axis) => match axis.values().as_slice() {
                [v] => *v,
                _ => bail!("smallamp.k: an alpha sweep needs a single wave number"),
            },
            None => 1.0,
        };
        table = "fkdv-alpha";
        columns = vec!["alpha", "lambda_fkdv"];
        rows = alpha
            .values()
            .into_iter()
            .map(|a| Ok(vec![Some(a), Some(lambda_fkdv(k, a).map_err(|e| anyhow!("smallamp.alpha: {e}"))?)]))
            .collect::<Result<Vec<_>>>()?;
        changes = sign_changes(&rows, 1, |lo, hi| bisect(|a| lambda_fkdv(k, a), lo, hi, 1e-12))?;
        all_positive = rows.iter().all(|r| r[1].is_some_and(|v| v > 0.0));
    } else if let Some(depth) = sa.depth {
        table = "ilw-grid";
        columns = vec!["k", "depth", "delta_ilw", "gamma_ilw"];
        let ks = sa.k.unwrap_or(default_k).values();
        let mut r = Vec::new();
        for &k in &ks {
            for h in depth.values() {
                let d = delta_ilw(k, h).map_err(|e| anyhow!("smallamp.depth: {e}"))?;
                r.push(vec![Some(k), Some(h), Some(d), Some(gamma_ilw(k * h))]);
            }
        }
        rows = r;
        changes = Vec::new();
        all_positive = rows.iter().all(|r| r[2].is_some_and(|v| v > 0.0) && r[3].is_some_and(|v| v > 0.0));
    } else {
        table = "gamma-lambda";
        columns = vec!["k", "gamma", "lambda"];
        rows = sa
            .k
            .unwrap_or(default_k)
            .values()
            .into_iter()
            .map(|k| match lambda_index(k, &sym) {
                Ok(l) => vec![Some(k), Some(l.gamma), Some(l.lambda)],
                Err(_) => vec![Some(k), None, None],
            })
            .collect();
        changes = sign_changes(&rows, 1, |lo, hi| {
            let (x, (a, b)) = gamma_root(&sym, lo, hi, 1e-12)?;
            Ok((x, a, b))
        })?;
        all_positive = rows.iter().all(|r| r[1].is_some_and(|v| v > 0.0));
    }
    Ok(SmallAmpReport {
        schema: "modwave.smallamp.v1".into(),
        equation: req.equation.label.clone(),
        table: table.into(),
        columns: columns.into_iter().map(String::from).collect(),
        rows,
        sign_changes: changes,
        all_positive,
        version: modwave_core::VERSION.into(),
        conventions: conventions_fingerprint(),
    })
}

/// Writes a small-amplitude report.
pub fn write_smallamp<W: std::io::Write>(mut out: W, rep: &SmallAmpReport, format: Format) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rep)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                rep.rows.iter().map(|r| r.iter().map(|v| v.map(fmt_f64).unwrap_or_default()).collect()).collect();
            let mut trailer: Vec<String> = rep
                .sign_changes
                .iter()
                .map(|s| format!("sign_change x={} bracket=[{},{}] grid=[{},{}]", fmt_f64(s.x), fmt_f64(s.lo), fmt_f64(s.hi), fmt_f64(s.grid_lo), fmt_f64(s.grid_hi)))
                .collect();
            trailer.push(format!("all_positive={}", rep.all_positive));
            trailer.push(format!("version={} conventions={}", rep.version, rep.conventions));
            let cols: Vec<&str> = rep.columns.iter().map(String::as_str).collect();
            write_csv_table(out, &format!("{}; table={}", rep.schema, rep.table), &cols, &rows, &trailer)?;
        }
    }
    Ok(())
}

/// Output of `bloch-check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochCheck {
    pub equation: String,
    pub params: WaveParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub modes: usize,
    pub xi: Vec<f64>,
    /// Slopes predicted by the modulation theory, sorted.
    pub theory: Vec<ComplexValue>,
    /// Slopes measured on the Bloch spectrum, sorted.
    pub bloch: Vec<ComplexValue>,
    pub max_slope_difference: f64,
    pub truncation_change: f64,
    pub pass: bool,
    pub version: String,
    pub conventions: String,
}

/// `bloch-check`: theory slopes against Floquet–Bloch slopes.
pub fn run_bloch_check(req: &AnalysisRequest) -> Result<BlochCheck> {
    let params = req.point()?;
    let modes = req.modes;
    let (mut theory, bloch, change, k): (Vec<Complex<f64>>, [Complex<f64>; 3], f64, Option<f64>) =
        if req.equation.is_benjamin_ono() {
            let k = req.bo_k()?;
            let p = BoWaveParams { a: params.a, k, c: params.c };
            let theory = bo_modulation_slopes(&p)?.to_vec();
            let bloch = modulation_slopes(|xi| assemble_bo(&p, xi, modes), &SLOPE_XI)?;
            let change = truncation_change(|xi, n| assemble_bo(&p, xi, n), DEFAULT_XI[0], modes, 3)?;
            (theory, bloch, change, Some(k))
        } else if matches!(req.equation.spec, EquationSpec::Nonlocal { .. }) {
            bail!("equation: bloch-check supports local equations and benjamin-ono");
        } else {
            let wo = WaveOptions { branch: req.branch, tol_quad: req.options.wave.tol_quad };
            let wave = WaveProfile::resolve(&req.equation.spec, &params, &wo)?;
            let rep = classify(&req.equation.spec, &params, &req.options)?;
            if rep.slopes.len() != 3 {
                bail!("classification gave no slopes: {:?}", rep.diagnostics.message);
            }
            let theory = rep.slopes.iter().map(|&z| z.into()).collect();
            let bloch = modulation_slopes(|xi| assemble_local(&wave, xi, modes), &SLOPE_XI)?;
            let change = truncation_change(|xi, n| assemble_local(&wave, xi, n), DEFAULT_XI[0], modes, 3)?;
            (theory, bloch, change, None)
        };
    sort_complex(&mut theory);
    let diff = theory.iter().zip(&bloch).map(|(t, b)| (t - b).norm()).fold(0.0, f64::max);
    Ok(BlochCheck {
        equation: req.equation.label.clone(),
        params,
        k,
        modes,
        xi: SLOPE_XI.to_vec(),
        theory: theory.into_iter().map(Into::into).collect(),
        bloch: bloch.iter().map(|&z| z.into()).collect(),
        max_slope_difference: diff,
        truncation_change: change,
        pass: diff <= SLOPE_TOL && change < TRUNCATION_TOL,
        version: modwave_core::VERSION.into(),
        conventions: conventions_fingerprint(),
    })
}

/// Writes a `bloch-check` result.
pub fn write_bloch_check<W: std::io::Write>(mut out: W, rep: &BlochCheck, format: Format) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rep)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = rep
                .theory
                .iter()
                .zip(&rep.bloch)
                .enumerate()
                .map(|(i, (t, b))| {
                    vec![i.to_string(), fmt_f64(t.re), fmt_f64(t.im), fmt_f64(b.re), fmt_f64(b.im)]
                })
                .collect();
            let trailer = vec![
                format!("max_slope_difference={}", fmt_f64(rep.max_slope_difference)),
                format!("truncation_change={}", fmt_f64(rep.truncation_change)),
                format!("pass={}", rep.pass),
                format!("version={} conventions={}", rep.version, rep.conventions),
            ];
            write_csv_table(
                out,
                "modwave.bloch-check.v1",
                &["branch", "theory_re", "theory_im", "bloch_re", "bloch_im"],
                &rows,
                &trailer,
            )?;
        }
    }
    Ok(())
}
