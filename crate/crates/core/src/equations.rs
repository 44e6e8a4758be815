//! Equation definitions, the effective potential of the traveling-wave
//! ODE, and classification of the ODE parameters.
//!
//! Traveling waves `u(x − ct)` of `u_t + u_xxx + f(u)_x = 0` satisfy, after
//! two integrations,
//!
//! ```text
//! u_z²/2 = E − V(u; a, c),     V(u; a, c) = F(u) + (c/2) u² − a u,
//! ```
//!
//! with `F' = f` and `F(0) = 0`. Everything in this crate uses this
//! orientation of the speed `c`; formulas that are naturally stated for the
//! reversed speed `c̃ = −c` convert explicitly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{self, Poly};
use crate::smallamp::DispersionSymbol;

/// Broad family of an equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquationKind {
    /// `f` is a polynomial.
    LocalPolynomial,
    /// `f(u) = σ|u|^p` with `2(p + 1)` an integer.
    LocalPowerLaw,
    /// Nonlocal dispersion given by a Fourier symbol.
    Nonlocal,
}

/// A KdV-type equation `u_t + u_xxx + f(u)_x = 0` or its nonlocal analogue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EquationSpec {
    /// Polynomial nonlinearity, ascending coefficients of `f`.
    LocalPolynomial { f: Vec<f64> },
    /// Power-law nonlinearity `f(u) = σ|u|^p`; waves are restricted to `u > 0`.
    LocalPowerLaw { p: f64, sigma: f64 },
    /// Nonlocal dispersion with quadratic nonlinearity.
    Nonlocal { symbol: DispersionSymbol },
}

/// Independent variable in which the potential is polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileVariable {
    /// The potential is polynomial in `u` itself.
    U,
    /// The potential is polynomial in `v = √u` (power laws with half-integer exponents).
    SqrtU,
}

impl ProfileVariable {
    /// `u` as a function of the profile variable.
    pub fn u_of(self, x: f64) -> f64 {
        match self {
            ProfileVariable::U => x,
            ProfileVariable::SqrtU => x * x,
        }
    }

    /// Profile variable as a function of `u`.
    pub fn x_of(self, u: f64) -> f64 {
        match self {
            ProfileVariable::U => u,
            ProfileVariable::SqrtU => u.sqrt(),
        }
    }

    /// `du/dx`.
    pub fn du_dx(self, x: f64) -> f64 {
        match self {
            ProfileVariable::U => 1.0,
            ProfileVariable::SqrtU => 2.0 * x,
        }
    }

    /// Power of `u` carried by one power of the profile variable (1 or 2).
    pub fn stride(self) -> usize {
        match self {
            ProfileVariable::U => 1,
            ProfileVariable::SqrtU => 2,
        }
    }

    /// Index of the profile-variable loop moment that represents `∮ u^k du/√P`.
    pub fn moment_index(self, k: usize) -> usize {
        match self {
            ProfileVariable::U => k,
            ProfileVariable::SqrtU => 2 * k + 1,
        }
    }

    /// Factor converting that loop moment into the conserved quantity.
    ///
    /// With `ζ_k = 2∫ x^k/√P dx` this is `1/√2` in `u` and `2/√2 = √2` in `v`,
    /// the extra 2 coming from `du = 2v dv`.
    pub fn moment_scale(self) -> f64 {
        match self {
            ProfileVariable::U => std::f64::consts::FRAC_1_SQRT_2,
            ProfileVariable::SqrtU => std::f64::consts::SQRT_2,
        }
    }
}

/// Parameters `(a, E, c)` of the traveling-wave ODE and a translation offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub a: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub c: f64,
    #[serde(default)]
    pub z0: f64,
}

impl WaveParams {
    /// Parameters with zero translation offset.
    pub fn new(a: f64, e: f64, c: f64) -> Self {
        WaveParams { a, e, c, z0: 0.0 }
    }
}

/// `P = E − V` as a polynomial in the profile variable.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPolynomial {
    pub poly: Poly,
    pub variable: ProfileVariable,
}

impl PotentialPolynomial {
    /// Value of `E − V` at profile-variable value `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.poly.eval(x)
    }

    /// Degree in the profile variable.
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }
}

impl EquationSpec {
    /// KdV with `f(u) = u²`.
    pub fn kdv() -> Self {
        EquationSpec::LocalPolynomial { f: vec![0.0, 0.0, 1.0] }
    }

    /// Modified KdV with `f(u) = ±u³` (focusing for `+`).
    pub fn mkdv(focusing: bool) -> Self {
        let s = if focusing { 1.0 } else { -1.0 };
        EquationSpec::LocalPolynomial { f: vec![0.0, 0.0, 0.0, s] }
    }

    /// Schamel equation written in gKdV form: `f(u) = (5/2)|u|^{3/2}`, `F(u) = u^{5/2}`.
    pub fn schamel() -> Self {
        EquationSpec::LocalPowerLaw { p: 1.5, sigma: 2.5 }
    }

    /// Whitham equation with `m(k) = √(tanh k / k)`.
    pub fn whitham() -> Self {
        EquationSpec::Nonlocal { symbol: DispersionSymbol::Whitham }
    }

    /// Benjamin–Ono equation.
    pub fn benjamin_ono() -> Self {
        EquationSpec::Nonlocal { symbol: DispersionSymbol::BenjaminOno }
    }

    /// Family of the equation.
    pub fn kind(&self) -> EquationKind {
        match self {
            EquationSpec::LocalPolynomial { .. } => EquationKind::LocalPolynomial,
            EquationSpec::LocalPowerLaw { .. } => EquationKind::LocalPowerLaw,
            EquationSpec::Nonlocal { .. } => EquationKind::Nonlocal,
        }
    }

    /// Checks the structural invariants of the definition.
    pub fn validate(&self) -> Result<()> {
        match self {
            EquationSpec::LocalPolynomial { f } => {
                if f.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("non-finite coefficient in f".into()));
                }
                if Poly::new(f.clone()).degree() < 1 {
                    return Err(Error::InvalidInput("f must have degree at least 1".into()));
                }
                Ok(())
            }
            EquationSpec::LocalPowerLaw { p, sigma } => {
                let twice = 2.0 * (p + 1.0);
                if !(twice.is_finite() && (twice - twice.round()).abs() < 1e-12 && *p > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "power-law exponent p = {p} must be positive with 2(p+1) an integer"
                    )));
                }
                if !sigma.is_finite() || *sigma == 0.0 {
                    return Err(Error::InvalidInput("power-law coefficient must be nonzero".into()));
                }
                Ok(())
            }
            EquationSpec::Nonlocal { .. } => Ok(()),
        }
    }

    /// Variable in which the potential is polynomial.
    pub fn profile_variable(&self) -> Result<ProfileVariable> {
        match self {
            EquationSpec::LocalPolynomial { .. } => Ok(ProfileVariable::U),
            EquationSpec::LocalPowerLaw { p, .. } => {
                if (p - p.round()).abs() < 1e-12 {
                    Ok(ProfileVariable::U)
                } else {
                    Ok(ProfileVariable::SqrtU)
                }
            }
            EquationSpec::Nonlocal { .. } => Err(Error::NonlocalUnsupported),
        }
    }

    /// Nonlinearity `f(u)`.
    pub fn f(&self, u: f64) -> Result<f64> {
        match self {
            EquationSpec::LocalPolynomial { f } => Ok(Poly::new(f.clone()).eval(u)),
            EquationSpec::LocalPowerLaw { p, sigma } => Ok(sigma * u.abs().powf(*p)),
            EquationSpec::Nonlocal { .. } => Ok(u * u),
        }
    }

    /// Derivative `f'(u)`.
    pub fn f_prime(&self, u: f64) -> Result<f64> {
        match self {
            EquationSpec::LocalPolynomial { f } => Ok(Poly::new(f.clone()).derivative().eval(u)),
            EquationSpec::LocalPowerLaw { p, sigma } => {
                Ok(sigma * p * u.signum() * u.abs().powf(p - 1.0))
            }
            EquationSpec::Nonlocal { .. } => Ok(2.0 * u),
        }
    }

    /// Antiderivative `F(u)` with `F(0) = 0`.
    pub fn big_f(&self, u: f64) -> Result<f64> {
        match self {
            EquationSpec::LocalPolynomial { f } => Ok(antiderivative(f).eval(u)),
            EquationSpec::LocalPowerLaw { p, sigma } => {
                Ok(sigma * u.signum() * u.abs().powf(p + 1.0) / (p + 1.0))
            }
            EquationSpec::Nonlocal { .. } => Err(Error::NonlocalUnsupported),
        }
    }

    /// `E − V` as a polynomial in the profile variable.
    pub fn potential(&self, a: f64, e: f64, c: f64) -> Result<PotentialPolynomial> {
        self.validate()?;
        match self {
            EquationSpec::LocalPolynomial { f } => {
                let big_f = antiderivative(f);
                let n = big_f.degree().max(2);
                let mut co = vec![0.0; n + 1];
                co[0] += e;
                co[1] += a;
                co[2] -= 0.5 * c;
                for (j, &v) in big_f.coeffs().iter().enumerate() {
                    co[j] -= v;
                }
                Ok(PotentialPolynomial { poly: Poly::new(co), variable: ProfileVariable::U })
            }
            EquationSpec::LocalPowerLaw { p, sigma } => {
                let var = self.profile_variable()?;
                let s = var.stride();
                let top = ((p + 1.0) * s as f64).round() as usize;
                let n = top.max(2 * s);
                let mut co = vec![0.0; n + 1];
                co[0] += e;
                co[s] += a;
                co[2 * s] -= 0.5 * c;
                co[top] -= sigma / (p + 1.0);
                Ok(PotentialPolynomial { poly: Poly::new(co), variable: var })
            }
            EquationSpec::Nonlocal { .. } => Err(Error::NonlocalUnsupported),
        }
    }
}

/// Antiderivative with zero constant term of a polynomial given by ascending coefficients.
pub fn antiderivative(f: &[f64]) -> Poly {
    let mut co = vec![0.0; f.len() + 1];
    for (j, &v) in f.iter().enumerate() {
        co[j + 1] = v / (j as f64 + 1.0);
    }
    Poly::new(co)
}

/// Effective potential `V(u; a, c) = F(u) + (c/2)u² − a u`.
pub fn effective_potential(spec: &EquationSpec, a: f64, c: f64, u: f64) -> Result<f64> {
    Ok(spec.big_f(u)? + 0.5 * c * u * u - a * u)
}

/// Relative separation below which two roots are treated as one multiple root.
///
/// Rounding splits a double root by `O(√ε)`, so the multiplicity decision is
/// taken at this scale rather than at the realness tolerance.
pub const TOL_ROOT_SEPARATION: f64 = 1e-7;

/// Relative imaginary part below which a root is treated as real.
pub const TOL_ROOT_REAL: f64 = 1e-9;

/// A cluster of numerically coincident real roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// Real-root structure of a potential polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    /// Distinct real roots, ascending, with multiplicities.
    pub real: Vec<RealRoot>,
    /// Number of complex-conjugate pairs with nonzero imaginary part.
    pub complex_pairs: usize,
}

impl RootReport {
    /// True when some real root has multiplicity above one.
    pub fn has_multiple_root(&self) -> bool {
        self.real.iter().any(|r| r.multiplicity > 1)
    }

    /// Real root values, ascending.
    pub fn values(&self) -> Vec<f64> {
        self.real.iter().map(|r| r.value).collect()
    }
}

/// Clusters the roots of `poly` into real roots (with multiplicity) and complex pairs.
pub fn root_structure(poly: &Poly) -> RootReport {
    let roots = poly.roots();
    let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sep = TOL_ROOT_SEPARATION * scale;
    // A conjugate pair closer than the separation tolerance is a split double root.
    let mut reals: Vec<f64> = Vec::new();
    let mut nonreal = 0usize;
    for z in &roots {
        if z.im.abs() <= TOL_ROOT_REAL * scale || z.im.abs() <= 0.5 * sep {
            reals.push(z.re);
        } else {
            nonreal += 1;
        }
    }
    reals.sort_by(f64::total_cmp);
    let mut clusters: Vec<RealRoot> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    for r in reals {
        match clusters.last_mut() {
            Some(last) if (r - last.value).abs() <= sep => {
                let s = sums.last_mut().expect("cluster sums track clusters");
                *s += r;
                last.multiplicity += 1;
                last.value = *s / last.multiplicity as f64;
            }
            _ => {
                clusters.push(RealRoot { value: r, multiplicity: 1 });
                sums.push(r);
            }
        }
    }
    RootReport { real: clusters, complex_pairs: nonreal / 2 }
}

/// Real roots of `E − V` (ascending) and the number of complex-conjugate pairs.
///
/// Fails with `DegenerateRoots` when two roots coincide within tolerance,
/// which signals parameters on the discriminant variety.
pub fn potential_roots(poly: &PotentialPolynomial) -> Result<RootReport> {
    if poly.degree() < 2 {
        return Err(Error::InvalidInput("potential must have degree at least 2".into()));
    }
    let rep = root_structure(&poly.poly);
    if rep.has_multiple_root() {
        return Err(Error::DegenerateRoots(format!(
            "repeated real root near {:?}",
            rep.real.iter().filter(|r| r.multiplicity > 1).map(|r| r.value).collect::<Vec<_>>()
        )));
    }
    Ok(rep)
}

/// Polynomial discriminant of `E − V`, via the Sylvester resultant of `P` and `P'`.
pub fn discriminant(poly: &PotentialPolynomial) -> f64 {
    poly::discriminant(&poly.poly)
}

/// Closed-form discriminant of `E − V` for KdV with `f(u) = u²`.
///
/// Stated in the reversed-speed orientation `c̃ = −c`:
/// `(16a³ + 3a²c̃² − 36Eac̃ − 6Ec̃³ − 36E²)/12`.
pub fn kdv_discriminant_closed(a: f64, e: f64, c: f64) -> f64 {
    let ct = -c;
    (16.0 * a.powi(3) + 3.0 * a * a * ct * ct - 36.0 * e * a * ct - 6.0 * e * ct.powi(3)
        - 36.0 * e * e)
        / 12.0
}

/// Parameters of the KdV wave (with `f(u) = u²/2`) whose potential has roots `γ < β < α`.
///
/// `E − V = −(u − α)(u − β)(u − γ)/6`, giving `E = αβγ/6`,
/// `a = −(αβ + βγ + γα)/6` and `c = −(α + β + γ)/3`.
pub fn params_from_roots(alpha: f64, beta: f64, gamma: f64) -> WaveParams {
    WaveParams::new(
        -(alpha * beta + beta * gamma + gamma * alpha) / 6.0,
        alpha * beta * gamma / 6.0,
        -(alpha + beta + gamma) / 3.0,
    )
}

/// Result of classifying `(a, E, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ParamClass {
    /// A periodic orbit oscillating in `[u_minus, u_plus]`.
    Periodic { u_minus: f64, u_plus: f64 },
    /// The parameters lie on the discriminant variety.
    OnGamma,
    /// `E − V` has no positivity interval between simple real roots.
    NoBoundedOrbit,
}

/// An oscillation interval in the profile variable together with its endpoint multiplicities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationInterval {
    pub x_lo: f64,
    pub x_hi: f64,
    pub degenerate: bool,
}

/// All intervals between adjacent real roots on which `E − V > 0`, ordered by left endpoint.
///
/// For the `√u` variable only intervals in `v > 0` are returned.
pub fn oscillation_intervals(poly: &PotentialPolynomial) -> Vec<OscillationInterval> {
    let rep = root_structure(&poly.poly);
    let mut out = Vec::new();
    for w in rep.real.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if poly.variable == ProfileVariable::SqrtU && lo.value <= 0.0 {
            continue;
        }
        if poly.eval(0.5 * (lo.value + hi.value)) > 0.0 {
            out.push(OscillationInterval {
                x_lo: lo.value,
                x_hi: hi.value,
                degenerate: lo.multiplicity > 1 || hi.multiplicity > 1,
            });
        }
    }
    out
}

/// Classifies `(a, E, c)`; `branch` selects among several oscillation intervals (0 = leftmost).
pub fn classify_parameters(spec: &EquationSpec, params: &WaveParams, branch: usize) -> Result<ParamClass> {
    let poly = spec.potential(params.a, params.e, params.c)?;
    let ivs = oscillation_intervals(&poly);
    if ivs.is_empty() {
        let rep = root_structure(&poly.poly);
        return Ok(if rep.has_multiple_root() { ParamClass::OnGamma } else { ParamClass::NoBoundedOrbit });
    }
    let iv = ivs.get(branch).ok_or_else(|| {
        Error::InvalidInput(format!("branch {branch} requested but only {} interval(s) exist", ivs.len()))
    })?;
    if iv.degenerate {
        return Ok(ParamClass::OnGamma);
    }
    let var = poly.variable;
    Ok(ParamClass::Periodic { u_minus: var.u_of(iv.x_lo), u_plus: var.u_of(iv.x_hi) })
}
