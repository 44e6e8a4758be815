//! Modulational instability index, effective dispersion cubic, stability
//! classification and the closed forms for KdV and modified KdV.
//!
//! With `X = {T,P}_{E,c̃} + 2{M,P}_{a,E}` and `Y = {T,M,P}_{a,E,c̃}` (brackets
//! as reported by [`ParamJacobian`]), the effective dispersion relation is
//! the depressed cubic
//!
//! ```text
//! 𝒟(w) = −w³ + (X/2)·w − Y/2,
//! ```
//!
//! whose discriminant is `Δ_MI = ½X³ − (27/4)Y²`. Three distinct real roots
//! (`Δ_MI > 0`) mean modulational stability; a complex pair (`Δ_MI < 0`)
//! means instability. The slopes of the three spectral branches through the
//! origin, `λ_j(ξ) ≈ iμ_jξ`, are `μ_j = −T/w_j` in the frame of the profile ODE.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::equations::{kdv_discriminant_closed, root_structure, EquationSpec, WaveParams};
use crate::error::{Error, Result};
use crate::picard_fuchs::{wave_jacobian, ParamJacobian, COND_MAX};
use crate::poly::Poly;
use crate::waves::{WaveOptions, WaveProfile};

/// Stability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Stable,
    Unstable,
    Degenerate,
    HypothesisFailed,
}

/// Tolerances of the classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `|Δ_MI| ≤ tol_deg_rel·max(|X|³/2, 27Y²/4)` is reported as degenerate.
    pub tol_deg_rel: f64,
    /// Imaginary parts below this (relative to the root scale) count as real.
    pub tol_im: f64,
    /// Minimal relative separation of distinct roots.
    pub tol_sep: f64,
    /// Relative size below which a hypothesis determinant counts as zero.
    pub tol_hyp: f64,
    /// Condition-number ceiling of the Picard–Fuchs solve.
    pub cond_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tol_deg_rel: 1e-8, tol_im: 1e-8, tol_sep: 1e-8, tol_hyp: 1e-10, cond_max: COND_MAX }
    }
}

/// Serializable complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex<f64>> for ComplexValue {
    fn from(z: Complex<f64>) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for Complex<f64> {
    fn from(z: ComplexValue) -> Self {
        Complex::new(z.re, z.im)
    }
}

/// Values of the three determinants that must not vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    pub t_e: f64,
    pub tm_ae: f64,
    pub tmp_aec: f64,
}

/// Solver diagnostics attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub tolerances: Tolerances,
    pub tol_quad: f64,
    /// Absolute degeneracy threshold actually applied to `Δ_MI`.
    pub tol_deg: Option<f64>,
    pub pf_cond: Option<f64>,
    pub pf_rel_residual: Option<f64>,
    /// Reason for a degenerate or failed verdict.
    pub message: Option<String>,
}

/// Full outcome of [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub classification: Classification,
    pub delta_mi: Option<f64>,
    /// Roots `w_j` of the depressed cubic, sorted by real then imaginary part.
    pub mu_roots: Vec<ComplexValue>,
    /// Spectral slopes `μ_j = −T/w_j`, in the order of `mu_roots`.
    pub slopes: Vec<ComplexValue>,
    pub hypothesis: Option<HypothesisFlags>,
    /// `(T, M, P)` of the wave.
    pub tmp: Option<[f64; 3]>,
    pub u_minus: Option<f64>,
    pub u_plus: Option<f64>,
    pub diagnostics: Diagnostics,
}

fn check_hypotheses(j: &ParamJacobian, tol: &Tolerances) -> Result<()> {
    let scale = j.jac.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let checks = [("T_E", j.t_e, scale), ("{T,M}_{a,E}", j.tm_ae, scale * scale), ("{T,M,P}_{a,E,c}", j.tmp_aec, scale.powi(3))];
    for (name, v, s) in checks {
        if !(v.abs() > tol.tol_hyp * s) {
            return Err(Error::HypothesisFailed(format!("{name} = {v:.3e} is numerically zero (scale {s:.3e})")));
        }
    }
    Ok(())
}

/// The linear coefficient `X = {T,P}_{E,c̃} + 2{M,P}_{a,E}` of the cubic.
pub fn index_x(j: &ParamJacobian) -> f64 {
    j.tp_ec + 2.0 * j.mp_ae
}

/// `Δ_MI = ½X³ − (27/4)Y²`.
pub fn delta_mi(j: &ParamJacobian, tol: &Tolerances) -> Result<f64> {
    check_hypotheses(j, tol)?;
    let x = index_x(j);
    Ok(0.5 * x.powi(3) - 6.75 * j.tmp_aec * j.tmp_aec)
}

/// Roots of `−w³ + (X/2)w − Y/2` by the companion matrix, sorted by real then imaginary part.
pub fn effective_dispersion_roots(j: &ParamJacobian, tol: &Tolerances) -> Result<[Complex<f64>; 3]> {
    check_hypotheses(j, tol)?;
    let x = index_x(j);
    let cubic = Poly::new(vec![-0.5 * j.tmp_aec, 0.5 * x, 0.0, -1.0]);
    let r = cubic.roots();
    if r.len() != 3 {
        return Err(Error::HypothesisFailed("effective dispersion cubic degenerated".into()));
    }
    Ok([r[0], r[1], r[2]])
}

/// Modulation slopes `μ_j = −T/w_j` from the cubic roots.
pub fn slopes_from_roots(t: f64, roots: &[Complex<f64>]) -> Vec<Complex<f64>> {
    roots.iter().map(|w| -t / w).collect()
}

/// Options of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub wave: WaveOptions,
    pub tol: Tolerances,
}

fn empty_report(class: Classification, opts: &ClassifyOptions, message: String) -> StabilityReport {
    StabilityReport {
        classification: class,
        delta_mi: None,
        mu_roots: Vec::new(),
        slopes: Vec::new(),
        hypothesis: None,
        tmp: None,
        u_minus: None,
        u_plus: None,
        diagnostics: Diagnostics {
            tolerances: opts.tol,
            tol_quad: opts.wave.tol_quad,
            tol_deg: None,
            pf_cond: None,
            pf_rel_residual: None,
            message: Some(message),
        },
    }
}

/// Classifies a Jacobian that has already been computed.
pub fn classify_jacobian(j: &ParamJacobian, opts: &ClassifyOptions) -> StabilityReport {
    let tol = &opts.tol;
    let mut rep = empty_report(Classification::Stable, opts, String::new());
    rep.diagnostics.message = None;
    rep.hypothesis = Some(HypothesisFlags { t_e: j.t_e, tm_ae: j.tm_ae, tmp_aec: j.tmp_aec });
    rep.tmp = Some(j.tmp);
    rep.diagnostics.pf_cond = Some(j.cond);
    rep.diagnostics.pf_rel_residual = Some(j.rel_residual);
    let (delta, roots) = match delta_mi(j, tol).and_then(|d| Ok((d, effective_dispersion_roots(j, tol)?))) {
        Ok(v) => v,
        Err(e) => {
            rep.classification = Classification::HypothesisFailed;
            rep.diagnostics.message = Some(e.to_string());
            return rep;
        }
    };
    let x = index_x(j);
    let tol_deg = tol.tol_deg_rel * (0.5 * x.abs().powi(3)).max(6.75 * j.tmp_aec * j.tmp_aec);
    rep.delta_mi = Some(delta);
    rep.diagnostics.tol_deg = Some(tol_deg);
    rep.mu_roots = roots.iter().map(|&z| z.into()).collect();
    rep.slopes = slopes_from_roots(j.tmp[0], &roots).into_iter().map(Into::into).collect();
    rep.classification = if delta > tol_deg {
        Classification::Stable
    } else if delta < -tol_deg {
        Classification::Unstable
    } else {
        rep.diagnostics.message = Some(format!("|Δ_MI| = {:.3e} within degeneracy tolerance {tol_deg:.3e}", delta.abs()));
        Classification::Degenerate
    };
    rep
}

/// Full pipeline: wave resolution, Picard–Fuchs Jacobian, index and cubic roots.
///
/// Parameters on the discriminant variety and singular or ill-conditioned
/// Picard–Fuchs systems are reported as `Degenerate`; vanishing hypothesis
/// determinants as `HypothesisFailed`. Parameters without a bounded orbit,
/// invalid input and quadrature failures are returned as errors.
pub fn classify(spec: &EquationSpec, params: &WaveParams, opts: &ClassifyOptions) -> Result<StabilityReport> {
    let wave = match WaveProfile::resolve(spec, params, &opts.wave) {
        Ok(w) => w,
        Err(Error::OnGamma) => {
            return Ok(empty_report(Classification::Degenerate, opts, Error::OnGamma.to_string()))
        }
        Err(e) => return Err(e),
    };
    let j = match wave_jacobian(&wave) {
        Ok(j) => j,
        Err(e @ (Error::SingularSystem(_) | Error::IllConditioned { .. })) => {
            let mut rep = empty_report(Classification::Degenerate, opts, e.to_string());
            rep.u_minus = Some(wave.u_minus());
            rep.u_plus = Some(wave.u_plus());
            return Ok(rep);
        }
        Err(e) => return Err(e),
    };
    if j.cond > opts.tol.cond_max {
        let e = Error::IllConditioned { cond: j.cond, cond_max: opts.tol.cond_max };
        return Ok(empty_report(Classification::Degenerate, opts, e.to_string()));
    }
    let mut rep = classify_jacobian(&j, opts);
    rep.u_minus = Some(wave.u_minus());
    rep.u_plus = Some(wave.u_plus());
    Ok(rep)
}

/// Root-structure verdict for modified KdV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MkdvRootClass {
    Stable4RealRoots,
    Unstable2Real2Complex,
    Degenerate,
}

/// Classifies a modified KdV wave (`f = ±u³`) by the number of real roots of `E − V`.
pub fn mkdv_root_classifier(a: f64, e: f64, c: f64, focusing: bool) -> Result<MkdvRootClass> {
    let poly = EquationSpec::mkdv(focusing).potential(a, e, c)?;
    let rep = root_structure(&poly.poly);
    if rep.has_multiple_root() {
        return Ok(MkdvRootClass::Degenerate);
    }
    match rep.real.len() {
        4 => Ok(MkdvRootClass::Stable4RealRoots),
        2 => Ok(MkdvRootClass::Unstable2Real2Complex),
        n => Err(Error::NoBoundedOrbit(format!("E − V has {n} real roots"))),
    }
}

/// Rational closed forms of the KdV (`f = u²`) determinants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdvClosedForms {
    pub t_e: f64,
    pub tm_ae: f64,
    /// `{T, M, P}_{a,E,c̃}`.
    pub tmp_aec: f64,
    /// `2Δ_MI`.
    pub two_delta_mi: f64,
}

/// KdV determinants as rational functions of `(T, M, a, E, c)`.
///
/// With `c̃ = −c`, `Ṽ(u) = −au − (c̃/2)u² + u³/3` and `disc` the discriminant
/// of `E − V`:
///
/// ```text
/// T_E            = ((4a + c̃²)M + (6E + ac̃)T) / (12 disc)
/// {T,M}_{a,E}    = −T² Ṽ'(M/T) / (12 disc)
/// {T,M,P}_{a,E,c̃} = T³ (E − Ṽ(M/T)) / (4 disc)
/// 2Δ_MI          = (α₃₀T³ + α₂₁T²M + α₁₂TM² + α₀₃M³)² / (2⁹ disc³)
/// ```
///
/// with `α₃₀ = 36E² + 18aEc̃ − 8a³`, `α₂₁ = 18Ec̃² − 6a²c̃ + 36aE`,
/// `α₁₂ = −18c̃E + 24a² + 3ac̃²` and `α₀₃ = c̃³ + 6ac̃ + 12E`.
pub fn kdv_closed_forms(t: f64, m: f64, a: f64, e: f64, c: f64) -> Result<KdvClosedForms> {
    let disc = kdv_discriminant_closed(a, e, c);
    if !(disc > 0.0) {
        return Err(Error::DegenerateDiscriminant(format!("disc = {disc:.3e} ≤ 0")));
    }
    let ct = -c;
    let ub = m / t;
    let v = -a * ub - 0.5 * ct * ub * ub + ub.powi(3) / 3.0;
    let dv = -a - ct * ub + ub * ub;
    let a30 = 36.0 * e * e + 18.0 * a * e * ct - 8.0 * a.powi(3);
    let a21 = 18.0 * e * ct * ct - 6.0 * a * a * ct + 36.0 * a * e;
    let a12 = -18.0 * ct * e + 24.0 * a * a + 3.0 * a * ct * ct;
    let a03 = ct.powi(3) + 6.0 * a * ct + 12.0 * e;
    let num = a30 * t.powi(3) + a21 * t * t * m + a12 * t * m * m + a03 * m.powi(3);
    Ok(KdvClosedForms {
        t_e: ((4.0 * a + ct * ct) * m + (6.0 * e + a * ct) * t) / (12.0 * disc),
        tm_ae: -t * t * dv / (12.0 * disc),
        tmp_aec: t.powi(3) * (e - v) / (4.0 * disc),
        two_delta_mi: num * num / (512.0 * disc.powi(3)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard_fuchs::param_jacobian;

    #[test]
    fn kdv_point_is_stable_with_real_roots_summing_to_zero() {
        let rep = classify(&EquationSpec::kdv(), &WaveParams::new(0.3, 0.01, -1.2), &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.classification, Classification::Stable);
        assert!(rep.delta_mi.unwrap() > 0.0);
        let s: f64 = rep.mu_roots.iter().map(|z| z.re).sum();
        assert!(s.abs() < 1e-10);
        assert!(rep.mu_roots.iter().all(|z| z.im.abs() < 1e-8));
    }

    #[test]
    fn focusing_cnoidal_is_unstable() {
        let rep = classify(&EquationSpec::mkdv(true), &WaveParams::new(0.0, 0.5, -1.0), &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.classification, Classification::Unstable);
        assert!(rep.mu_roots.iter().any(|z| z.im.abs() > 1e-8));
        assert_eq!(mkdv_root_classifier(0.0, 0.5, -1.0, true).unwrap(), MkdvRootClass::Unstable2Real2Complex);
    }

    #[test]
    fn dnoidal_and_defocusing_are_stable() {
        let opts = ClassifyOptions::default();
        let rep = classify(&EquationSpec::mkdv(true), &WaveParams::new(0.0, -0.1, -1.0), &opts).unwrap();
        assert_eq!(rep.classification, Classification::Stable);
        let rep = classify(&EquationSpec::mkdv(false), &WaveParams::new(0.0, 0.1, 1.0), &opts).unwrap();
        assert_eq!(rep.classification, Classification::Stable);
        assert_eq!(mkdv_root_classifier(0.0, 0.1, 1.0, false).unwrap(), MkdvRootClass::Stable4RealRoots);
    }

    #[test]
    fn solitary_limit_is_degenerate() {
        let rep = classify(&EquationSpec::kdv(), &WaveParams::new(0.0, 0.0, -1.0), &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.classification, Classification::Degenerate);
        assert_eq!(mkdv_root_classifier(0.0, 0.0, -1.0, true).unwrap(), MkdvRootClass::Degenerate);
    }

    #[test]
    fn closed_forms_match_picard_fuchs() {
        let spec = EquationSpec::kdv();
        let (a, e, c) = (0.3, 0.01, -1.2);
        let j = param_jacobian(&spec, &WaveParams::new(a, e, c), &WaveOptions::default()).unwrap();
        let cf = kdv_closed_forms(j.tmp[0], j.tmp[1], a, e, c).unwrap();
        let d = delta_mi(&j, &Tolerances::default()).unwrap();
        assert!((cf.t_e - j.t_e).abs() < 1e-8 * j.t_e.abs());
        assert!((cf.tm_ae - j.tm_ae).abs() < 1e-8 * j.tm_ae.abs());
        assert!((cf.tmp_aec - j.tmp_aec).abs() < 1e-8 * j.tmp_aec.abs());
        assert!((cf.two_delta_mi - 2.0 * d).abs() < 1e-8 * d.abs());
        assert!(matches!(kdv_closed_forms(1.0, 1.0, 0.0, 0.0, -1.0), Err(Error::DegenerateDiscriminant(_))));
    }
}
