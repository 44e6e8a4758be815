//! Analysis requests: the JSON configuration document, command-line
//! overrides, and validation into a fully resolved [`AnalysisRequest`].

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use modwave_core::equations::{EquationSpec, WaveParams};
use modwave_core::mi_index::{ClassifyOptions, Tolerances};
use modwave_core::smallamp::DispersionSymbol;
use modwave_core::waves::WaveOptions;
use serde::{Deserialize, Serialize};

/// Environment variable that overrides `--jobs`.
pub const JOBS_ENV: &str = "MODWAVE_JOBS";

/// Default Fourier truncation of the Bloch checks.
pub const DEFAULT_MODES: usize = 64;

/// What the request asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Classify,
    Sweep,
    SmallAmp,
    BlochCheck,
    Validate,
}

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// An equation given either by name or as a full definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EquationDescriptor {
    Name(String),
    Spec(EquationSpec),
}

/// A resolved equation with the label used in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equation {
    pub label: String,
    pub spec: EquationSpec,
}

impl Equation {
    /// Resolves a named equation.
    ///
    /// Names: `kdv`, `mkdv-focusing`, `mkdv-defocusing`, `schamel`,
    /// `whitham`, `benjamin-ono` (or `bo`), `fkdv:<alpha>`, `ilw:<depth>`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        let parse_param = |rest: &str, what: &str| -> Result<f64> {
            rest.parse::<f64>().map_err(|_| anyhow!("equation `{name}`: cannot parse {what} `{rest}`"))
        };
        let spec = match name {
            "kdv" => EquationSpec::kdv(),
            "mkdv-focusing" => EquationSpec::mkdv(true),
            "mkdv-defocusing" => EquationSpec::mkdv(false),
            "schamel" => EquationSpec::schamel(),
            "whitham" => EquationSpec::whitham(),
            "benjamin-ono" | "bo" => EquationSpec::benjamin_ono(),
            _ => {
                if let Some(rest) = name.strip_prefix("fkdv:") {
                    EquationSpec::Nonlocal { symbol: DispersionSymbol::FractionalKdV { alpha: parse_param(rest, "alpha")? } }
                } else if let Some(rest) = name.strip_prefix("ilw:") {
                    EquationSpec::Nonlocal { symbol: DispersionSymbol::Ilw { depth: parse_param(rest, "depth")? } }
                } else {
                    bail!(
                        "unknown equation `{name}`; expected kdv, mkdv-focusing, mkdv-defocusing, schamel, \
                         whitham, benjamin-ono, fkdv:<alpha> or ilw:<depth>"
                    );
                }
            }
        };
        Ok(Equation { label: name.to_string(), spec })
    }

    fn from_descriptor(d: EquationDescriptor) -> Result<Self> {
        match d {
            EquationDescriptor::Name(n) => Self::from_name(&n),
            EquationDescriptor::Spec(spec) => Ok(Equation { label: "custom".into(), spec }),
        }
    }

    /// Whether this is the Benjamin–Ono equation.
    pub fn is_benjamin_ono(&self) -> bool {
        matches!(self.spec, EquationSpec::Nonlocal { symbol: DispersionSymbol::BenjaminOno })
    }
}

/// One grid axis: a single value or `count` equispaced values from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Value(f64),
    Range { start: f64, stop: f64, count: usize },
}

impl Axis {
    /// Parses `v` or `start:stop:count`.
    pub fn parse(field: &str, s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| anyhow!("{field}: cannot parse `{t}` as a number"));
        match parts.as_slice() {
            [v] => Ok(Axis::Value(num(v)?)),
            [a, b, n] => Ok(Axis::Range {
                start: num(a)?,
                stop: num(b)?,
                count: n.trim().parse().map_err(|_| anyhow!("{field}: cannot parse `{n}` as a point count"))?,
            }),
            _ => bail!("{field}: expected a value or start:stop:count, got `{s}`"),
        }
    }

    fn validate(&self, field: &str) -> Result<()> {
        match *self {
            Axis::Value(v) if !v.is_finite() => bail!("{field}: value must be finite"),
            Axis::Range { start, stop, .. } if !(start.is_finite() && stop.is_finite()) => {
                bail!("{field}: range bounds must be finite")
            }
            Axis::Range { count: 0, .. } => bail!("{field}: grid range must contain at least one point"),
            _ => Ok(()),
        }
    }

    /// Grid values in increasing index order.
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Axis::Value(v) => vec![v],
            Axis::Range { start, count: 1, .. } => vec![start],
            Axis::Range { start, stop, count } => {
                (0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect()
            }
        }
    }

    fn single(&self, field: &str) -> Result<f64> {
        match self.values().as_slice() {
            [v] => Ok(*v),
            _ => bail!("{field}: this command needs a single value, not a range"),
        }
    }
}

/// Optional tolerance overrides.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub tol_quad: Option<f64>,
    pub tol_deg_rel: Option<f64>,
    pub tol_im: Option<f64>,
    pub tol_sep: Option<f64>,
    pub tol_hyp: Option<f64>,
    pub cond_max: Option<f64>,
}

/// Grid of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub a: Option<Axis>,
    #[serde(rename = "E")]
    pub e: Option<Axis>,
    pub c: Option<Axis>,
    pub k: Option<Axis>,
}

/// Small-amplitude tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmallAmpConfig {
    /// Wave numbers of the `Γ`, `Λ` table.
    pub k: Option<Axis>,
    /// Exponents of a fractional KdV sweep of `Λ_fKdV(k, α)`.
    pub alpha: Option<Axis>,
    /// Depths of an ILW grid of `Δ_ILW(k, H)`.
    pub depth: Option<Axis>,
}

/// Output destination.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// The JSON configuration document.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub equation: Option<EquationDescriptor>,
    pub mode: Option<Mode>,
    pub params: Option<GridConfig>,
    pub branch: Option<usize>,
    pub tolerances: Option<ToleranceOverrides>,
    pub modes: Option<usize>,
    pub jobs: Option<usize>,
    pub smallamp: Option<SmallAmpConfig>,
    pub output: Option<OutputConfig>,
}

impl ConfigFile {
    /// Reads and parses a configuration file, reporting line, column and field on failure.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        // serde_json messages end with the line and column of the failure.
        serde_json::from_str(&text).map_err(|e| anyhow!("config {}: {e}", path.display()))
    }
}

/// Values given on the command line; they override the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub equation: Option<String>,
    pub a: Option<String>,
    pub e: Option<String>,
    pub c: Option<String>,
    pub k: Option<String>,
    pub branch: Option<usize>,
    pub tol_quad: Option<f64>,
    pub modes: Option<usize>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub k_axis: Option<String>,
    pub alpha_axis: Option<String>,
    pub depth_axis: Option<String>,
}

/// A validated request.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRequest {
    pub mode: Mode,
    pub equation: Equation,
    pub grid: GridConfig,
    pub branch: usize,
    pub options: ClassifyOptions,
    pub modes: usize,
    pub jobs: Option<usize>,
    pub smallamp: SmallAmpConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        bail!("{field}: tolerance must be positive and finite, got {v}")
    }
}

fn merge_axis(field: &str, flag: &Option<String>, file: Option<Axis>) -> Result<Option<Axis>> {
    let axis = match flag {
        Some(s) => Some(Axis::parse(field, s)?),
        None => file,
    };
    if let Some(a) = &axis {
        a.validate(field)?;
    }
    Ok(axis)
}

fn jobs_from_env() -> Result<Option<usize>> {
    match std::env::var(JOBS_ENV) {
        Ok(s) if !s.trim().is_empty() => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => bail!("{JOBS_ENV}: expected a positive integer, got `{s}`"),
        },
        _ => Ok(None),
    }
}

impl AnalysisRequest {
    /// Combines the configuration file (if any) with command-line overrides.
    pub fn resolve(mode: Mode, config: Option<&Path>, o: &Overrides) -> Result<Self> {
        let file = match config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        if let Some(m) = file.mode {
            if m != mode {
                bail!("mode: config asks for {m:?} but the command is {mode:?}");
            }
        }
        let equation = match (&o.equation, file.equation) {
            (Some(name), _) => Equation::from_name(name)?,
            (None, Some(d)) => Equation::from_descriptor(d).context("equation")?,
            (None, None) if mode == Mode::Validate => Equation::from_name("kdv")?,
            (None, None) => bail!("equation: missing; pass --equation or set \"equation\" in the config"),
        };
        equation.spec.validate().map_err(|e| anyhow!("equation: {e}"))?;
        if let EquationSpec::Nonlocal { symbol } = &equation.spec {
            symbol.validate().map_err(|e| anyhow!("equation: {e}"))?;
        }

        let params = file.params.unwrap_or(GridConfig { a: None, e: None, c: None, k: None });
        let grid = GridConfig {
            a: merge_axis("a", &o.a, params.a)?,
            e: merge_axis("E", &o.e, params.e)?,
            c: merge_axis("c", &o.c, params.c)?,
            k: merge_axis("k", &o.k, params.k)?,
        };

        let t = file.tolerances.unwrap_or_default();
        let defaults = Tolerances::default();
        let tol = Tolerances {
            tol_deg_rel: positive("tolerances.tol_deg_rel", t.tol_deg_rel.unwrap_or(defaults.tol_deg_rel))?,
            tol_im: positive("tolerances.tol_im", t.tol_im.unwrap_or(defaults.tol_im))?,
            tol_sep: positive("tolerances.tol_sep", t.tol_sep.unwrap_or(defaults.tol_sep))?,
            tol_hyp: positive("tolerances.tol_hyp", t.tol_hyp.unwrap_or(defaults.tol_hyp))?,
            cond_max: positive("tolerances.cond_max", t.cond_max.unwrap_or(defaults.cond_max))?,
        };
        let tol_quad = match o.tol_quad {
            Some(v) => positive("--tol-quad", v)?,
            None => positive("tolerances.tol_quad", t.tol_quad.unwrap_or(WaveOptions::default().tol_quad))?,
        };
        let branch = o.branch.or(file.branch).unwrap_or(0);
        let options = ClassifyOptions { wave: WaveOptions { branch, tol_quad }, tol };

        let modes = o.modes.or(file.modes).unwrap_or(DEFAULT_MODES);
        if modes == 0 {
            bail!("modes: truncation must be positive");
        }
        let jobs = match jobs_from_env()? {
            Some(n) => Some(n),
            None => o.jobs.or(file.jobs),
        };
        if jobs == Some(0) {
            bail!("jobs: worker count must be positive");
        }

        let sa = file.smallamp.unwrap_or(SmallAmpConfig { k: None, alpha: None, depth: None });
        let smallamp = SmallAmpConfig {
            k: merge_axis("smallamp.k", &o.k_axis, sa.k)?,
            alpha: merge_axis("smallamp.alpha", &o.alpha_axis, sa.alpha)?,
            depth: merge_axis("smallamp.depth", &o.depth_axis, sa.depth)?,
        };

        let output = file.output.unwrap_or_default();
        Ok(AnalysisRequest {
            mode,
            equation,
            grid,
            branch,
            options,
            modes,
            jobs,
            smallamp,
            out: o.out.clone().or(output.path),
            format: o.format.or(output.format).unwrap_or_default(),
        })
    }

    fn axis(&self, field: &str) -> Result<Axis> {
        let axis = match field {
            "a" => self.grid.a,
            "E" => self.grid.e,
            "c" => self.grid.c,
            _ => self.grid.k,
        };
        axis.ok_or_else(|| anyhow!("{field}: missing; pass --{field} or set params.{field} in the config"))
    }

    /// The single parameter point of a classify or bloch-check request.
    pub fn point(&self) -> Result<WaveParams> {
        let a = self.axis("a")?.single("a")?;
        let c = self.axis("c")?.single("c")?;
        let e = if self.equation.is_benjamin_ono() { 0.0 } else { self.axis("E")?.single("E")? };
        Ok(WaveParams::new(a, e, c))
    }

    /// Wave number of a Benjamin–Ono request.
    pub fn bo_k(&self) -> Result<f64> {
        self.axis("k")?.single("k")
    }

    /// Sweep points in row-major order (`a` slowest, then `E`, then `c`).
    pub fn sweep_points(&self) -> Result<Vec<WaveParams>> {
        let (a, e, c) = (self.axis("a")?.values(), self.axis("E")?.values(), self.axis("c")?.values());
        let mut out = Vec::with_capacity(a.len() * e.len() * c.len());
        for &av in &a {
            for &ev in &e {
                for &cv in &c {
                    out.push(WaveParams::new(av, ev, cv));
                }
            }
        }
        Ok(out)
    }
}
