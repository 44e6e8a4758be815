//! Explicit periodic waves of the Benjamin–Ono equation
//! `u_t − (Λu)_x + (u²)_x = 0`, where `Λ` has symbol `|ξ|`.
//!
//! Traveling waves `u(x − ct)` satisfy `Λu − cu − u² = a` and form the
//! explicit family
//!
//! ```text
//! u(z) = (k²/√(s − k²)) / (√(s/(s − k²)) − cos kz) − ½(√s + c),   s = c² − 4a,
//! ```
//!
//! which exists for `c < 0` and `k² < s`. Mass and momentum over one period
//! `T = 2π/k` are `M = ∫u` and `P = ½∫u²`.

use std::f64::consts::PI;

use nalgebra::{Complex, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::real_eigenvalues;

/// Parameters `(a, k, c)` of a Benjamin–Ono wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoWaveParams {
    pub a: f64,
    pub k: f64,
    pub c: f64,
}

impl BoWaveParams {
    /// Checks `c < 0`, `k > 0` and `k² < c² − 4a`.
    pub fn validate(&self) -> Result<()> {
        let s = self.c * self.c - 4.0 * self.a;
        if !(self.c < 0.0 && self.k > 0.0 && self.k * self.k < s) {
            return Err(Error::ConstraintViolation(format!(
                "need c < 0 and 0 < k² < c² − 4a, got a = {}, k = {}, c = {}",
                self.a, self.k, self.c
            )));
        }
        Ok(())
    }

    /// `s = c² − 4a`.
    pub fn s(&self) -> f64 {
        self.c * self.c - 4.0 * self.a
    }

    /// Period `2π/k`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.k
    }
}

/// Profile value at `z`.
pub fn bo_eval(p: &BoWaveParams, z: f64) -> Result<f64> {
    p.validate()?;
    let s = p.s();
    let k2 = p.k * p.k;
    let d = (s - k2).sqrt();
    Ok((k2 / d) / ((s / (s - k2)).sqrt() - (p.k * z).cos()) - 0.5 * (s.sqrt() + p.c))
}

/// `M`, `P` and `{M, P}_{a,c}` in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoConserved {
    pub m: f64,
    pub p: f64,
    pub mp_ac: f64,
}

/// `M = 2π − (π/k)(√s + c)`, `P = −cπ + (π/4k)(√s + c)²`, `{M,P}_{a,c} = 2π²/(k√s)`.
pub fn bo_conserved(p: &BoWaveParams) -> Result<BoConserved> {
    p.validate()?;
    let r = p.s().sqrt();
    Ok(BoConserved {
        m: 2.0 * PI - PI / p.k * (r + p.c),
        p: -p.c * PI + PI / (4.0 * p.k) * (r + p.c).powi(2),
        mp_ac: 2.0 * PI * PI / (p.k * r),
    })
}

/// Explicit matrix `D(0, k, c)` and its eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoDispersionMatrix {
    pub matrix: Matrix3<f64>,
    pub eigenvalues: [Complex<f64>; 3],
}

/// `D(0,k,c) = [[−πT, (πT)² − (π/c)², 0], [1, πT, 0], [2π², 0, πT]]`, `T = 2π/k`.
pub fn bo_dispersion_matrix(k: f64, c: f64) -> Result<BoDispersionMatrix> {
    BoWaveParams { a: 0.0, k, c }.validate()?;
    let pt = PI * 2.0 * PI / k;
    let m = Matrix3::new(-pt, pt * pt - (PI / c).powi(2), 0.0, 1.0, pt, 0.0, 2.0 * PI * PI, 0.0, pt);
    let dm = nalgebra::DMatrix::from_fn(3, 3, |r, c| m[(r, c)]);
    let mut ev = real_eigenvalues(&dm);
    ev.sort_by(|x, y| x.re.total_cmp(&y.re));
    Ok(BoDispersionMatrix { matrix: m, eigenvalues: [ev[0], ev[1], ev[2]] })
}

/// Closed-form eigenvalues `{−πT√(2 − (cT)⁻²), πT, πT√(2 − (cT)⁻²)}`, ascending.
pub fn bo_dispersion_eigenvalues_closed(k: f64, c: f64) -> Result<[f64; 3]> {
    BoWaveParams { a: 0.0, k, c }.validate()?;
    let t = 2.0 * PI / k;
    let pt = PI * t;
    let r = pt * (2.0 - 1.0 / (c * t).powi(2)).sqrt();
    let mut v = [-r, pt, r];
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Max-norm residual of `u(z; a − cλ + λ², k, c − 2λ) − u(z; a, k, c) − λ` on a grid.
pub fn bo_galilean_check(p: &BoWaveParams, lambda: f64) -> Result<f64> {
    let q = BoWaveParams { a: p.a - p.c * lambda + lambda * lambda, k: p.k, c: p.c - 2.0 * lambda };
    q.validate()?;
    let t = p.period();
    let mut worst = 0.0f64;
    for j in 0..256 {
        let z = t * j as f64 / 256.0;
        worst = worst.max((bo_eval(&q, z)? - bo_eval(p, z)? - lambda).abs());
    }
    Ok(worst)
}

/// Period averages `(⟨u⟩, ⟨u²⟩, ⟨u³⟩)` in closed form, for complex arguments.
///
/// With `r = √s` and `C = (r + c)/2`: `⟨u⟩ = k − C`,
/// `⟨u²⟩ = kr − 2Ck + C²` and `⟨u³⟩ = k(3s − k²)/2 − 3Ckr + 3C²k − C³`.
pub fn bo_averages(a: Complex<f64>, k: Complex<f64>, c: Complex<f64>) -> [Complex<f64>; 3] {
    let s = c * c - a * 4.0;
    let r = s.sqrt();
    let cc = (r + c) * 0.5;
    [
        k - cc,
        k * r - cc * k * 2.0 + cc * cc,
        k * (s * 3.0 - k * k) * 0.5 - cc * k * r * 3.0 + cc * cc * k * 3.0 - cc * cc * cc,
    ]
}

/// Densities `(k, ⟨u⟩, ⟨u²⟩/2)` and fluxes of the averaged conservation laws.
fn densities_and_fluxes(x: [Complex<f64>; 3]) -> ([Complex<f64>; 3], [Complex<f64>; 3]) {
    let [a, k, c] = x;
    let [u1, u2, u3] = bo_averages(a, k, c);
    let rho = [k, u1, u2 * 0.5];
    let flux = [-c * k, -a - c * u1, -a * u1 - c * u2 - u3 / 3.0];
    (rho, flux)
}

/// Characteristic speeds of the averaged Benjamin–Ono conservation laws.
///
/// The averaged system `∂_t ρ + ∂_x F = 0` for the densities
/// `(k, ⟨u⟩, ⟨u²⟩/2)` is linearized in `(a, k, c)` by complex-step
/// differentiation; the returned slopes `−c − eig(∂ρ⁻¹ ∂F)` are the
/// predicted values of `λ/(iξ)` for the three Bloch branches through the
/// origin, ascending.
pub fn bo_modulation_slopes(p: &BoWaveParams) -> Result<[Complex<f64>; 3]> {
    p.validate()?;
    let h = 1e-30;
    let x0 = [Complex::new(p.a, 0.0), Complex::new(p.k, 0.0), Complex::new(p.c, 0.0)];
    let mut jr = nalgebra::DMatrix::<f64>::zeros(3, 3);
    let mut jf = nalgebra::DMatrix::<f64>::zeros(3, 3);
    for col in 0..3 {
        let mut x = x0;
        x[col] += Complex::new(0.0, h);
        let (rho, flux) = densities_and_fluxes(x);
        for row in 0..3 {
            jr[(row, col)] = rho[row].im / h;
            jf[(row, col)] = flux[row].im / h;
        }
    }
    let inv = jr
        .try_inverse()
        .ok_or_else(|| Error::SingularSystem("density Jacobian of the averaged system is singular".into()))?;
    let mut ev: Vec<Complex<f64>> = real_eigenvalues(&(inv * jf)).into_iter().map(|e| -p.c - e).collect();
    ev.sort_by(|x, y| x.re.total_cmp(&y.re));
    Ok([ev[0], ev[1], ev[2]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crest_value_and_periodicity() {
        let p = BoWaveParams { a: 0.0, k: 1.0, c: -2.0 };
        assert!((bo_eval(&p, 0.0).unwrap() - 1.0 / (2.0 - 3f64.sqrt())).abs() < 1e-12);
        for &z in &[0.3, 1.1, 4.0] {
            assert!((bo_eval(&p, z + p.period()).unwrap() - bo_eval(&p, z).unwrap()).abs() < 1e-12);
        }
        let bad = BoWaveParams { a: 0.0, k: 2.0, c: -2.0 };
        assert!(matches!(bo_eval(&bad, 0.0), Err(Error::ConstraintViolation(_))));
    }

    #[test]
    fn averages_reproduce_conserved_quantities() {
        let p = BoWaveParams { a: 0.3, k: 0.7, c: -1.5 };
        let n = 512;
        let t = p.period();
        let u: Vec<f64> = (0..n).map(|j| bo_eval(&p, t * j as f64 / n as f64).unwrap()).collect();
        let m1 = u.iter().sum::<f64>() / n as f64;
        let m2 = u.iter().map(|v| v * v).sum::<f64>() / n as f64;
        let m3 = u.iter().map(|v| v * v * v).sum::<f64>() / n as f64;
        let av = bo_averages(Complex::new(p.a, 0.0), Complex::new(p.k, 0.0), Complex::new(p.c, 0.0));
        assert!((av[0].re - m1).abs() < 1e-12 && (av[1].re - m2).abs() < 1e-12 && (av[2].re - m3).abs() < 1e-11);
        let cq = bo_conserved(&p).unwrap();
        assert!((cq.m - t * m1).abs() < 1e-10 && (cq.p - 0.5 * t * m2).abs() < 1e-10);
    }

    #[test]
    fn dispersion_matrix_eigenvalues_match_closed_form() {
        let d = bo_dispersion_matrix(1.0, -2.0).unwrap();
        let closed = bo_dispersion_eigenvalues_closed(1.0, -2.0).unwrap();
        for (e, c) in d.eigenvalues.iter().zip(closed) {
            assert!(e.im.abs() < 1e-10 && (e.re - c).abs() < 1e-10 * c.abs());
        }
        assert!((d.matrix.trace() - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn galilean_shift_is_exact() {
        let p = BoWaveParams { a: 0.0, k: 1.0, c: -2.0 };
        assert_eq!(bo_galilean_check(&p, 0.0).unwrap(), 0.0);
        assert!(bo_galilean_check(&p, 0.1).unwrap() < 1e-10);
    }

    #[test]
    fn modulation_slopes_are_wave_number_and_long_wave_speed() {
        let p = BoWaveParams { a: 0.3, k: 0.7, c: -1.5 };
        let s = bo_modulation_slopes(&p).unwrap();
        let expect = [-0.7, 0.7, p.s().sqrt()];
        for (x, y) in s.iter().zip(expect) {
            assert!((x.re - y).abs() < 1e-10 && x.im.abs() < 1e-10);
        }
    }
}
