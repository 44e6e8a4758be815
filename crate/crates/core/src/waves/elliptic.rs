//! Complete elliptic integral of the first kind, Jacobi elliptic functions,
//! and the explicit cnoidal and dnoidal wave families built from them.
//!
//! All functions use the parameter convention `m = k²`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

fn check_parameter(m: f64) -> Result<()> {
    if (0.0..1.0).contains(&m) {
        Ok(())
    } else {
        Err(Error::Domain(format!("elliptic parameter m = {m} must lie in [0, 1)")))
    }
}

/// Complete elliptic integral `K(m) = π / (2·AGM(1, √(1 − m)))`.
pub fn elliptic_k(m: f64) -> Result<f64> {
    check_parameter(m)?;
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(PI / (2.0 * a))
}

/// Jacobi elliptic functions `(sn, cn, dn)` of argument `z` and parameter `m`,
/// by the descending Landen (AGM) transformation.
pub fn jacobi_sn_cn_dn(z: f64, m: f64) -> Result<(f64, f64, f64)> {
    check_parameter(m)?;
    if !z.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if m == 0.0 {
        return Ok((z.sin(), z.cos(), 1.0));
    }
    let mut a = vec![1.0f64];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    while c.last().is_some_and(|&cn| cn.abs() > 1e-16) && a.len() < 64 {
        let (an, bn) = (*a.last().expect("non-empty"), b);
        a.push(0.5 * (an + bn));
        c.push(0.5 * (an - bn));
        b = (an * bn).sqrt();
    }
    let n = a.len() - 1;
    let mut phi = vec![0.0; n + 1];
    phi[n] = 2f64.powi(n as i32) * a[n] * z;
    for j in (1..=n).rev() {
        let s = (c[j] / a[j] * phi[j].sin()).clamp(-1.0, 1.0);
        phi[j - 1] = 0.5 * (phi[j] + s.asin());
    }
    let sn = phi[0].sin();
    let cn = phi[0].cos();
    // dn is positive for real arguments and m < 1.
    let dn = (1.0 - m * sn * sn).sqrt();
    Ok((sn, cn, dn))
}

/// Jacobi `sn(z | m)`.
pub fn jacobi_sn(z: f64, m: f64) -> Result<f64> {
    Ok(jacobi_sn_cn_dn(z, m)?.0)
}

/// Jacobi `cn(z | m)`.
pub fn jacobi_cn(z: f64, m: f64) -> Result<f64> {
    Ok(jacobi_sn_cn_dn(z, m)?.1)
}

/// Jacobi `dn(z | m)`.
pub fn jacobi_dn(z: f64, m: f64) -> Result<f64> {
    Ok(jacobi_sn_cn_dn(z, m)?.2)
}

fn check_ordered(alpha: f64, beta: f64, gamma: f64) -> Result<()> {
    if gamma < beta && beta < alpha {
        Ok(())
    } else {
        Err(Error::Domain(format!("roots must satisfy γ < β < α, got ({alpha}, {beta}, {gamma})")))
    }
}

/// Elliptic parameter `m = (α − β)/(α − γ)` of the cnoidal wave.
pub fn cnoidal_modulus(alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    check_ordered(alpha, beta, gamma)?;
    Ok((alpha - beta) / (alpha - gamma))
}

/// Cnoidal KdV wave `u = β + (α − β)·cn²(√((α − γ)/12)·(z + z0) | m)`.
///
/// Solves `u_z² = (α − u)(u − β)(u − γ)/3`, the profile equation of
/// `u_t + u_xxx + (u²/2)_x = 0`.
pub fn cnoidal_eval(alpha: f64, beta: f64, gamma: f64, z0: f64, z: f64) -> Result<f64> {
    let m = cnoidal_modulus(alpha, beta, gamma)?;
    let cn = jacobi_cn(((alpha - gamma) / 12.0).sqrt() * (z + z0), m)?;
    Ok(beta + (alpha - beta) * cn * cn)
}

/// Period `4√3·K(m)/√(α − γ)` of the cnoidal wave.
pub fn cnoidal_period(alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    let m = cnoidal_modulus(alpha, beta, gamma)?;
    Ok(4.0 * 3f64.sqrt() * elliptic_k(m)? / (alpha - gamma).sqrt())
}

/// Squared amplitudes `(k₁², k₂²)`, `k₁ < k₂`, of the dnoidal wave with energy `E` and speed `c`.
pub fn dnoidal_amplitudes(e: f64, c: f64) -> Result<(f64, f64)> {
    let disc = c * c + 4.0 * e / 3.0;
    if !(c < 0.0 && e <= 0.0 && disc >= 0.0) {
        return Err(Error::Domain(format!(
            "dnoidal waves need c < 0, E ≤ 0 and c² + 4E/3 ≥ 0, got E = {e}, c = {c}"
        )));
    }
    let r = disc.sqrt();
    Ok((-3.0 * (c + r), -3.0 * (c - r)))
}

/// Dnoidal wave `u = k₂·dn(k₂ z/√6 | 1 − k₁²/k₂²)` of the focusing modified KdV
/// equation with `f(u) = u³/3`; solves `u_z² = 2E − c u² − u⁴/6`.
pub fn dnoidal_eval(e: f64, c: f64, z: f64) -> Result<f64> {
    let (k1s, k2s) = dnoidal_amplitudes(e, c)?;
    let k2 = k2s.sqrt();
    let m = 1.0 - k1s / k2s;
    Ok(k2 * jacobi_dn(k2 * z / 6f64.sqrt(), m)?)
}

/// Period `2√6·K(m)/k₂` of the dnoidal wave.
pub fn dnoidal_period(e: f64, c: f64) -> Result<f64> {
    let (k1s, k2s) = dnoidal_amplitudes(e, c)?;
    let m = 1.0 - k1s / k2s;
    Ok(2.0 * 6f64.sqrt() * elliptic_k(m)? / k2s.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_at_zero_is_half_pi() {
        assert!((elliptic_k(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        // K(1/2) = Γ(1/4)²/(4√π)
        let g14 = 3.625_609_908_221_908_f64;
        assert!((elliptic_k(0.5).unwrap() - g14 * g14 / (4.0 * PI.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn modulus_zero_reduces_to_circular_functions() {
        for &z in &[0.0, 1.0, PI / 2.0] {
            assert!((jacobi_cn(z, 0.0).unwrap() - z.cos()).abs() < 1e-15);
            assert!((jacobi_sn(z, 0.0).unwrap() - z.sin()).abs() < 1e-15);
            assert_eq!(jacobi_dn(z, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn cn_approaches_sech_near_unit_modulus() {
        for &z in &[0.0, 0.5, 1.0, 2.0] {
            let cn = jacobi_cn(z, 1.0 - 1e-8).unwrap();
            assert!((cn - 1.0 / z.cosh()).abs() < 1e-3);
        }
    }

    #[test]
    fn pythagorean_identities_hold() {
        for &m in &[0.1, 0.5, 0.9, 0.999] {
            for &z in &[-2.3, 0.4, 1.7, 5.0] {
                let (sn, cn, dn) = jacobi_sn_cn_dn(z, m).unwrap();
                assert!((sn * sn + cn * cn - 1.0).abs() < 1e-14);
                assert!((dn * dn + m * sn * sn - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn quarter_period_zero_of_cn() {
        for &m in &[0.2, 0.7, 0.95] {
            let k = elliptic_k(m).unwrap();
            assert!(jacobi_cn(k, m).unwrap().abs() < 1e-14);
            let dn = jacobi_dn(k, m).unwrap();
            assert!((dn - (1.0 - m).sqrt()).abs() < 1e-14, "m = {m}: dn(K) = {dn}");
        }
    }

    #[test]
    fn parameter_outside_unit_interval_is_rejected() {
        assert!(matches!(elliptic_k(1.0), Err(Error::Domain(_))));
        assert!(matches!(jacobi_cn(0.3, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn cnoidal_crest_and_trough() {
        let (a, b, g, z0) = (3.0, 1.0, 0.0, 0.4);
        assert!((cnoidal_eval(a, b, g, z0, -z0).unwrap() - a).abs() < 1e-15);
        let t = cnoidal_period(a, b, g).unwrap();
        assert!((cnoidal_eval(a, b, g, z0, -z0 + t / 2.0).unwrap() - b).abs() < 1e-13);
        assert!(matches!(cnoidal_eval(1.0, 3.0, 0.0, 0.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn cnoidal_profile_solves_its_ode() {
        let (a, b, g) = (3.0, 1.0, 0.0);
        let h = 1e-5;
        for j in 0..40 {
            let z = 0.17 * j as f64;
            let u = cnoidal_eval(a, b, g, 0.0, z).unwrap();
            let du = (cnoidal_eval(a, b, g, 0.0, z + h).unwrap() - cnoidal_eval(a, b, g, 0.0, z - h).unwrap())
                / (2.0 * h);
            let rhs = (a - u) * (u - b) * (u - g) / 3.0;
            assert!((du * du - rhs).abs() < 1e-8, "z = {z}: {} vs {rhs}", du * du);
        }
    }

    #[test]
    fn dnoidal_profile_solves_its_ode() {
        let (e, c) = (-0.1, -1.0);
        let h = 1e-5;
        for j in 0..40 {
            let z = 0.23 * j as f64;
            let u = dnoidal_eval(e, c, z).unwrap();
            let du = (dnoidal_eval(e, c, z + h).unwrap() - dnoidal_eval(e, c, z - h).unwrap()) / (2.0 * h);
            let rhs = 2.0 * e - c * u * u - u.powi(4) / 6.0;
            assert!((du * du - rhs).abs() < 1e-8);
        }
        let t = dnoidal_period(e, c).unwrap();
        assert!((dnoidal_eval(e, c, 0.3 + t).unwrap() - dnoidal_eval(e, c, 0.3).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn dnoidal_degenerates_to_constant() {
        // k₁ = k₂ when c² + 4E/3 = 0.
        let c: f64 = -1.0;
        let e = -0.75 * c * c;
        let u0 = dnoidal_eval(e, c, 0.0).unwrap();
        for &z in &[0.5, 1.5, 3.0] {
            assert!((dnoidal_eval(e, c, z).unwrap() - u0).abs() < 1e-12);
        }
    }
}
