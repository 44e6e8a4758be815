//! Report records and their JSON and CSV encodings.

use std::io::Write;

use anyhow::Result;
use modwave_core::equations::{EquationSpec, WaveParams};
use modwave_core::mi_index::{Classification, StabilityReport};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Schema tag written on the first line of every CSV file.
pub const REPORT_SCHEMA: &str = "modwave.report.v1";

/// SHA-256 of the resolved convention table, as lowercase hex.
pub fn conventions_fingerprint() -> String {
    Sha256::digest(modwave_core::conventions::fingerprint_source().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Echo of the analysed input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub equation: String,
    pub spec: EquationSpec,
    pub params: WaveParams,
    pub branch: usize,
    /// Wave number, for Benjamin–Ono waves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

/// Outcome of one analysed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Stable,
    Unstable,
    Degenerate,
    HypothesisFailed,
    /// The point could not be analysed; see `error`.
    Error,
}

impl From<Classification> for Status {
    fn from(c: Classification) -> Self {
        match c {
            Classification::Stable => Status::Stable,
            Classification::Unstable => Status::Unstable,
            Classification::Degenerate => Status::Degenerate,
            Classification::HypothesisFailed => Status::HypothesisFailed,
        }
    }
}

impl Status {
    /// Process exit code of a single classification.
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Stable => 0,
            Status::Unstable => 10,
            Status::Degenerate => 20,
            Status::HypothesisFailed => 30,
            Status::Error => 1,
        }
    }
}

/// One line of output: input, verdict, flattened report and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    /// Row index in the request's grid order.
    pub index: usize,
    pub input: InputEcho,
    pub status: Status,
    #[serde(flatten)]
    pub report: Option<StabilityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall-clock time of the analysis in milliseconds.
    pub timing_ms: f64,
    pub version: String,
    pub conventions: String,
}

impl ReportRecord {
    /// Record with version and fingerprint filled in.
    pub fn new(index: usize, input: InputEcho, outcome: std::result::Result<StabilityReport, String>, timing_ms: f64) -> Self {
        let (status, report, error) = match outcome {
            Ok(r) => (r.classification.into(), Some(r), None),
            Err(e) => (Status::Error, None, Some(e)),
        };
        ReportRecord {
            index,
            input,
            status,
            report,
            error,
            timing_ms,
            version: modwave_core::VERSION.to_string(),
            conventions: conventions_fingerprint(),
        }
    }
}

/// Fixed CSV columns of a report row.
pub const CSV_COLUMNS: &[&str] = &[
    "index", "equation", "a", "E", "c", "k", "branch", "status", "delta_mi", "w1_re", "w1_im", "w2_re", "w2_im",
    "w3_re", "w3_im", "slope1_re", "slope1_im", "slope2_re", "slope2_im", "slope3_re", "slope3_im", "T", "M", "P",
    "u_minus", "u_plus", "T_E", "TM_aE", "TMP_aEc", "pf_cond", "message", "version", "conventions", "timing_ms",
];

/// Shortest round-trip decimal form of `x` (at most 17 significant digits),
/// switching to exponent notation outside `[1e−3, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !x.is_finite() || (1e-3..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn num(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn csv_row(r: &ReportRecord) -> Vec<String> {
    let rep = r.report.as_ref();
    let complex = |list: Option<&Vec<modwave_core::mi_index::ComplexValue>>, i: usize| {
        let z = list.and_then(|l| l.get(i));
        [num(z.map(|z| z.re)), num(z.map(|z| z.im))]
    };
    let mut row = vec![
        r.index.to_string(),
        r.input.equation.clone(),
        fmt_f64(r.input.params.a),
        fmt_f64(r.input.params.e),
        fmt_f64(r.input.params.c),
        num(r.input.k),
        r.input.branch.to_string(),
        format!("{:?}", r.status),
        num(rep.and_then(|x| x.delta_mi)),
    ];
    for i in 0..3 {
        row.extend(complex(rep.map(|x| &x.mu_roots), i));
    }
    for i in 0..3 {
        row.extend(complex(rep.map(|x| &x.slopes), i));
    }
    for i in 0..3 {
        row.push(num(rep.and_then(|x| x.tmp).map(|t| t[i])));
    }
    row.push(num(rep.and_then(|x| x.u_minus)));
    row.push(num(rep.and_then(|x| x.u_plus)));
    let hyp = rep.and_then(|x| x.hypothesis);
    row.push(num(hyp.map(|h| h.t_e)));
    row.push(num(hyp.map(|h| h.tm_ae)));
    row.push(num(hyp.map(|h| h.tmp_aec)));
    row.push(num(rep.and_then(|x| x.diagnostics.pf_cond)));
    row.push(r.error.clone().or_else(|| rep.and_then(|x| x.diagnostics.message.clone())).unwrap_or_default());
    row.push(r.version.clone());
    row.push(r.conventions.clone());
    row.push(fmt_f64(r.timing_ms));
    row
}

/// Writes rows as CSV with the `#schema=` comment line and a header.
pub fn write_csv_table<W: Write>(mut out: W, schema: &str, columns: &[&str], rows: &[Vec<String>], trailer: &[String]) -> Result<()> {
    writeln!(out, "#schema={schema}")?;
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
        w.write_record(columns)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    for line in trailer {
        writeln!(out, "#{line}")?;
    }
    Ok(())
}

/// Writes report records in the requested format.
pub fn write_records<W: Write>(mut out: W, records: &[ReportRecord], format: crate::request::Format) -> Result<()> {
    match format {
        crate::request::Format::Json => {
            if records.len() == 1 {
                serde_json::to_writer_pretty(&mut out, &records[0])?;
            } else {
                serde_json::to_writer_pretty(&mut out, records)?;
            }
            writeln!(out)?;
        }
        crate::request::Format::Csv => {
            let rows: Vec<Vec<String>> = records.iter().map(csv_row).collect();
            write_csv_table(out, REPORT_SCHEMA, CSV_COLUMNS, &rows, &[])?;
        }
    }
    Ok(())
}
