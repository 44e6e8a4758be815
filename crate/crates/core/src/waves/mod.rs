//! Periodic wave profiles of the local equations: loop-integral quadrature
//! for the period, mass, momentum and Hamiltonian, regular moments `ζ_k`, and
//! evaluation of the profile `u(z)`.
//!
//! Let `x` be the profile variable (`u` or `√u`) and `P(x) = E − V` the
//! potential polynomial, positive on the oscillation interval `(x₋, x₊)`.
//! Writing `P = −(x − x₋)(x − x₊)R(x)` with `R > 0` on `[x₋, x₊]` and
//! substituting `x = x₋ + (x₊ − x₋)·sin²θ` gives
//!
//! ```text
//! ∮ w(x) dx/√P := 2∫_{x₋}^{x₊} w(x) dx/√P = ∫_0^π 2w(x(θ))/√R(x(θ)) dθ.
//! ```
//!
//! The right-hand integrand is smooth and `π`-periodic, so the trapezoidal
//! rule converges geometrically. With `J = du/dx` the conserved quantities are
//! `T = ∮J/√2`, `M = ∮uJ/√2`, `P = ∮u²J/√2` and `H = ∮(u_z²/2 − F(u))J/√2`.

pub mod elliptic;

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::equations::{
    oscillation_intervals, root_structure, EquationSpec, PotentialPolynomial, ProfileVariable, WaveParams,
};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadrature::periodic_trapezoid_vec;

pub use elliptic::{
    cnoidal_eval, cnoidal_modulus, cnoidal_period, dnoidal_amplitudes, dnoidal_eval, dnoidal_period,
    elliptic_k, jacobi_cn, jacobi_dn, jacobi_sn, jacobi_sn_cn_dn,
};

/// Default absolute quadrature tolerance.
pub const DEFAULT_TOL_QUAD: f64 = 1e-11;

/// Upper bound on trapezoid nodes before quadrature is declared failed.
const MAX_NODES: usize = 1 << 21;

/// Upper bound on cosine modes used by the profile evaluator.
const MAX_PROFILE_MODES: usize = 1 << 14;

/// Options shared by all wave computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveOptions {
    /// Oscillation interval index, ordered by left endpoint.
    pub branch: usize,
    /// Absolute quadrature tolerance; the relative tolerance is the same number.
    pub tol_quad: f64,
}

impl Default for WaveOptions {
    fn default() -> Self {
        WaveOptions { branch: 0, tol_quad: DEFAULT_TOL_QUAD }
    }
}

/// Period, mass, momentum and Hamiltonian of a periodic wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantities {
    pub t: f64,
    pub m: f64,
    pub p: f64,
    pub h: f64,
}

/// Regular moments `ζ_k`, singular moments `I_k`, and the factors relating
/// them to `(T, M, P)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    /// `ζ_k = ∮ x^k dx/√P` for `k = 0..=K`.
    pub zeta: Vec<f64>,
    /// `I_k = ∮ x^k dx/P^{3/2}` (finite part), filled by the Picard–Fuchs solve.
    pub i_moments: Vec<f64>,
    /// Variable the moments are taken in.
    pub variable: ProfileVariable,
    /// Factor `s` with `(T, M, P) = s·(ζ_{e₀}, ζ_{e₁}, ζ_{e₂})`.
    pub scale: f64,
}

impl MomentTable {
    /// `(T, M, P)` read off the regular moments.
    pub fn tmp(&self) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (q, o) in out.iter_mut().enumerate() {
            let idx = self.variable.moment_index(q);
            *o = self.scale
                * *self.zeta.get(idx).ok_or_else(|| {
                    Error::InvalidInput(format!("moment table lacks ζ_{idx}"))
                })?;
        }
        Ok(out)
    }
}

/// A resolved periodic traveling wave of a local equation.
///
/// The profile is even about `z = −z0`, `T`-periodic, and attains its
/// minimum `u₋` at `z = −z0` and its maximum `u₊` at `z = −z0 + T/2`.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    spec: EquationSpec,
    params: WaveParams,
    branch: usize,
    tol_quad: f64,
    poly: PotentialPolynomial,
    x_lo: f64,
    x_hi: f64,
    reduced: Poly,
    period: f64,
    z_modes: OnceLock<Result<Vec<f64>>>,
}

impl WaveProfile {
    /// Resolves the oscillation interval and the period of the wave.
    ///
    /// Fails with `OnGamma` on the discriminant variety and with
    /// `NoBoundedOrbit` when no positivity interval exists.
    pub fn resolve(spec: &EquationSpec, params: &WaveParams, opts: &WaveOptions) -> Result<Self> {
        if !(opts.tol_quad > 0.0) {
            return Err(Error::InvalidInput("tol_quad must be positive".into()));
        }
        let poly = spec.potential(params.a, params.e, params.c)?;
        let ivs = oscillation_intervals(&poly);
        if ivs.is_empty() {
            return Err(if root_structure(&poly.poly).has_multiple_root() {
                Error::OnGamma
            } else {
                Error::NoBoundedOrbit(format!("E − V has no positivity interval for {params:?}"))
            });
        }
        let iv = ivs.get(opts.branch).ok_or_else(|| {
            Error::InvalidInput(format!("branch {} requested but only {} interval(s) exist", opts.branch, ivs.len()))
        })?;
        if iv.degenerate {
            return Err(Error::OnGamma);
        }
        let q = poly.poly.deflate(iv.x_lo).deflate(iv.x_hi);
        let reduced = Poly::new(q.coeffs().iter().map(|v| -v).collect());
        let mut wave = WaveProfile {
            spec: spec.clone(),
            params: *params,
            branch: opts.branch,
            tol_quad: opts.tol_quad,
            poly,
            x_lo: iv.x_lo,
            x_hi: iv.x_hi,
            reduced,
            period: 0.0,
            z_modes: OnceLock::new(),
        };
        let var = wave.poly.variable;
        wave.period = wave.loop_integrals(1, |x, out| out[0] = var.du_dx(x))?[0] * FRAC_1_SQRT_2;
        Ok(wave)
    }

    /// Equation of the wave.
    pub fn spec(&self) -> &EquationSpec {
        &self.spec
    }

    /// ODE parameters of the wave.
    pub fn params(&self) -> &WaveParams {
        &self.params
    }

    /// Oscillation branch index.
    pub fn branch(&self) -> usize {
        self.branch
    }

    /// Potential polynomial `E − V` in the profile variable.
    pub fn potential(&self) -> &PotentialPolynomial {
        &self.poly
    }

    /// Minimum of the profile.
    pub fn u_minus(&self) -> f64 {
        self.poly.variable.u_of(self.x_lo)
    }

    /// Maximum of the profile.
    pub fn u_plus(&self) -> f64 {
        self.poly.variable.u_of(self.x_hi)
    }

    /// Oscillation interval in the profile variable.
    pub fn x_interval(&self) -> (f64, f64) {
        (self.x_lo, self.x_hi)
    }

    /// Spatial period.
    pub fn period(&self) -> f64 {
        self.period
    }

    fn x_of_theta(&self, theta: f64) -> f64 {
        let s = theta.sin();
        self.x_lo + (self.x_hi - self.x_lo) * s * s
    }

    /// Loop integrals `∮ w_j(x) dx/√P` of `dim` weights evaluated together.
    pub fn loop_integrals<W: Fn(f64, &mut [f64])>(&self, dim: usize, weights: W) -> Result<Vec<f64>> {
        let mut wbuf = vec![0.0; dim];
        let res = periodic_trapezoid_vec(
            |theta, out: &mut [f64]| {
                let x = self.x_of_theta(theta);
                let r = self.reduced.eval(x);
                weights(x, &mut wbuf);
                let g = 2.0 / r.sqrt();
                for (o, w) in out.iter_mut().zip(wbuf.iter()) {
                    *o = g * w;
                }
            },
            dim,
            0.0,
            PI,
            self.tol_quad,
            self.tol_quad,
            MAX_NODES,
        );
        res.map_err(|e| match e {
            Error::QuadratureFailure(msg) => {
                Error::QuadratureFailure(format!("{msg} for {:?} on branch {}", self.params, self.branch))
            }
            other => other,
        })
    }

    /// Regular moments `ζ_0..=ζ_{k_max}` in the profile variable.
    pub fn zeta(&self, k_max: usize) -> Result<Vec<f64>> {
        self.loop_integrals(k_max + 1, |x, out| {
            let mut p = 1.0;
            for o in out.iter_mut() {
                *o = p;
                p *= x;
            }
        })
    }

    /// Moment table with `ζ_0..=ζ_{k_max}`; `k_max` is raised so that `(T, M, P)` are available.
    pub fn moment_table(&self, k_max: usize) -> Result<MomentTable> {
        let var = self.poly.variable;
        let k = k_max.max(var.moment_index(2));
        Ok(MomentTable { zeta: self.zeta(k)?, i_moments: Vec::new(), variable: var, scale: var.moment_scale() })
    }

    /// Period, mass, momentum and Hamiltonian by loop quadrature.
    pub fn conserved(&self) -> Result<ConservedQuantities> {
        let var = self.poly.variable;
        // Evaluate F once per node; for local specs it cannot fail.
        let spec = &self.spec;
        let poly = &self.poly;
        let v = self.loop_integrals(4, |x, out| {
            let u = var.u_of(x);
            let j = var.du_dx(x);
            let big_f = spec.big_f(u).unwrap_or(f64::NAN);
            out[0] = j;
            out[1] = u * j;
            out[2] = u * u * j;
            out[3] = (poly.eval(x) - big_f) * j;
        })?;
        Ok(ConservedQuantities {
            t: v[0] * FRAC_1_SQRT_2,
            m: v[1] * FRAC_1_SQRT_2,
            p: v[2] * FRAC_1_SQRT_2,
            h: v[3] * FRAC_1_SQRT_2,
        })
    }

    /// `dz/dθ = √2·J/√R`, even and `π`-periodic in `θ`.
    fn dz_dtheta(&self, theta: f64) -> f64 {
        let x = self.x_of_theta(theta);
        SQRT_2 * self.poly.variable.du_dx(x) / self.reduced.eval(x).sqrt()
    }

    /// Cosine coefficients `h_n` of `dz/dθ = Σ h_n cos(2nθ)`.
    fn modes(&self) -> Result<&[f64]> {
        let res = self.z_modes.get_or_init(|| {
            let mut n = 64usize;
            while n <= MAX_PROFILE_MODES {
                let vals: Vec<f64> = (0..n).map(|j| self.dz_dtheta(PI * j as f64 / n as f64)).collect();
                let half = n / 2;
                let mut coef = vec![0.0; half];
                for (k, ck) in coef.iter_mut().enumerate() {
                    let s: f64 = vals
                        .iter()
                        .enumerate()
                        .map(|(j, v)| v * (2.0 * PI * (k * j) as f64 / n as f64).cos())
                        .sum();
                    *ck = if k == 0 { s / n as f64 } else { 2.0 * s / n as f64 };
                }
                let tail = coef[half / 2..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if tail <= 1e-13 * coef[0].abs() {
                    let keep = coef.iter().rposition(|v| v.abs() > 1e-17 * coef[0].abs()).unwrap_or(0) + 1;
                    coef.truncate(keep);
                    return Ok(coef);
                }
                n *= 2;
            }
            Err(Error::Resolution(format!(
                "profile expansion needs more than {MAX_PROFILE_MODES} modes for {:?}",
                self.params
            )))
        });
        res.as_ref().map(|v| v.as_slice()).map_err(|e| e.clone())
    }

    /// Inverts `z(θ)` on `[0, π/2]` for `s ∈ [0, T/2]`.
    fn theta_of(&self, s: f64) -> Result<f64> {
        let h = self.modes()?;
        let z = |t: f64| -> (f64, f64) {
            let mut val = h[0] * t;
            let mut der = h[0];
            for (n, hn) in h.iter().enumerate().skip(1) {
                let w = 2.0 * n as f64;
                val += hn * (w * t).sin() / w;
                der += hn * (w * t).cos();
            }
            (val, der)
        };
        let (mut lo, mut hi) = (0.0, 0.5 * PI);
        let mut t = (s / h[0]).clamp(lo, hi);
        let tol = 1e-15 * self.period.max(1.0);
        for _ in 0..100 {
            let (val, der) = z(t);
            let f = val - s;
            if f.abs() <= tol {
                return Ok(t);
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let newton = t - f / der;
            t = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-16 {
                return Ok(t);
            }
        }
        Ok(t)
    }

    /// Profile value `u(z)`, using the translation offset `z0` of the parameters.
    pub fn eval(&self, z: f64) -> Result<f64> {
        let t = self.period;
        let mut s = (z + self.params.z0).rem_euclid(t);
        if s > 0.5 * t {
            s = t - s;
        }
        let theta = self.theta_of(s)?;
        Ok(self.poly.variable.u_of(self.x_of_theta(theta)))
    }

    /// `n` equispaced samples `u(jT/n)`, `j = 0..n`.
    pub fn samples(&self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|j| self.eval(self.period * j as f64 / n as f64)).collect()
    }
}

/// Period, mass, momentum and Hamiltonian of the wave with parameters `params`.
pub fn quadrature_tmph(spec: &EquationSpec, params: &WaveParams, opts: &WaveOptions) -> Result<ConservedQuantities> {
    WaveProfile::resolve(spec, params, opts)?.conserved()
}

/// Regular moments `ζ_0..=ζ_{k_max}` of the wave with parameters `params`.
pub fn zeta_moments(spec: &EquationSpec, params: &WaveParams, k_max: usize, opts: &WaveOptions) -> Result<MomentTable> {
    WaveProfile::resolve(spec, params, opts)?.moment_table(k_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::params_from_roots;

    fn half_kdv() -> EquationSpec {
        EquationSpec::LocalPolynomial { f: vec![0.0, 0.0, 0.5] }
    }

    #[test]
    fn period_matches_cnoidal_closed_form() {
        let spec = half_kdv();
        let prm = params_from_roots(3.0, 1.0, 0.0);
        let w = WaveProfile::resolve(&spec, &prm, &WaveOptions::default()).unwrap();
        let t = cnoidal_period(3.0, 1.0, 0.0).unwrap();
        assert!((w.period() - t).abs() < 1e-9, "{} vs {t}", w.period());
        assert!((w.u_minus() - 1.0).abs() < 1e-12 && (w.u_plus() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn profile_matches_cnoidal_wave() {
        let spec = half_kdv();
        let prm = params_from_roots(3.0, 1.0, 0.0);
        let w = WaveProfile::resolve(&spec, &prm, &WaveOptions::default()).unwrap();
        let t = w.period();
        for j in 0..50 {
            let z = -0.3 * t + 1.7 * t * j as f64 / 50.0;
            // Crest of the closed form sits at z = −z0; ours sits at T/2.
            let closed = cnoidal_eval(3.0, 1.0, 0.0, -0.5 * t, z).unwrap();
            assert!((w.eval(z).unwrap() - closed).abs() < 1e-10);
        }
    }

    #[test]
    fn moments_are_consistent_with_conserved_quantities() {
        let spec = EquationSpec::kdv();
        let w = WaveProfile::resolve(&spec, &WaveParams::new(0.3, 0.01, -1.2), &WaveOptions::default()).unwrap();
        let q = w.conserved().unwrap();
        let tab = w.moment_table(2).unwrap();
        let [t, m, p] = tab.tmp().unwrap();
        assert!((t - q.t).abs() < 1e-10 && (m - q.m).abs() < 1e-10 && (p - q.p).abs() < 1e-10);
        assert!((t - w.period()).abs() < 1e-12);
        let mean = tab.zeta[1] / tab.zeta[0];
        assert!(w.u_minus() < mean && mean < w.u_plus());
    }

    #[test]
    fn schamel_moments_match_direct_u_quadrature() {
        use crate::quadrature::gauss_kronrod;
        let spec = EquationSpec::schamel();
        let prm = WaveParams::new(0.3, -0.02, -1.0);
        let w = WaveProfile::resolve(&spec, &prm, &WaveOptions::default()).unwrap();
        let [t, m, _] = w.moment_table(5).unwrap().tmp().unwrap();
        // Direct u-side loop integrals with u = u₋ + (u₊ − u₋) sin²θ. Writing
        // P = (u − u₋)(u₊ − u)R(u), the integrand becomes 2u^k/√(2R(u)).
        let (um, up) = (w.u_minus(), w.u_plus());
        let pval = |u: f64| prm.e + prm.a * u - 0.5 * prm.c * u * u - u.powf(2.5);
        let dp = |u: f64| prm.a - prm.c * u - 2.5 * u.powf(1.5);
        let integrand = |th: f64, pow: i32| {
            let u = um + (up - um) * th.sin().powi(2);
            let r = if th < 1e-3 {
                dp(um) / (up - um)
            } else if th > PI / 2.0 - 1e-3 {
                -dp(up) / (up - um)
            } else {
                pval(u) / ((u - um) * (up - u))
            };
            2.0 * u.powi(pow) / (2.0 * r).sqrt()
        };
        let t_direct = 2.0 * gauss_kronrod(|th| integrand(th, 0), 0.0, PI / 2.0, 1e-13, 1e-13, 4000).unwrap();
        let m_direct = 2.0 * gauss_kronrod(|th| integrand(th, 1), 0.0, PI / 2.0, 1e-13, 1e-13, 4000).unwrap();
        assert!((t - t_direct).abs() < 1e-7 * t, "{t} vs {t_direct}");
        assert!((m - m_direct).abs() < 1e-7 * m.abs(), "{m} vs {m_direct}");
    }

    #[test]
    fn profile_is_even_and_periodic() {
        let spec = EquationSpec::mkdv(true);
        let w = WaveProfile::resolve(&spec, &WaveParams::new(0.0, 0.5, -1.0), &WaveOptions::default()).unwrap();
        let t = w.period();
        assert!((w.eval(0.0).unwrap() - w.u_minus()).abs() < 1e-12);
        assert!((w.eval(0.5 * t).unwrap() - w.u_plus()).abs() < 1e-12);
        for &z in &[0.1, 0.77, 2.3, 5.9] {
            let u = w.eval(z).unwrap();
            assert!((u - w.eval(-z).unwrap()).abs() < 1e-10);
            assert!((u - w.eval(z + t).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn on_gamma_and_unbounded_are_reported() {
        let spec = EquationSpec::kdv();
        assert_eq!(
            WaveProfile::resolve(&spec, &WaveParams::new(0.0, 0.0, -1.0), &WaveOptions::default()).err(),
            Some(Error::OnGamma)
        );
        assert!(matches!(
            WaveProfile::resolve(&spec, &WaveParams::new(-1.0, 0.0, 0.0), &WaveOptions::default()),
            Err(Error::NoBoundedOrbit(_))
        ));
    }
}
