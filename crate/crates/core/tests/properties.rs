//! Property-based checks of the module invariants.
//!
//! Samples are drawn through the deterministic maps in
//! `modwave_core::sampling`, fed with proptest-generated uniforms, so every
//! failing case shrinks to a reproducible parameter point.

mod common;

use std::f64::consts::PI;

use modwave_core::bloch::{assemble_bo, assemble_local};
use modwave_core::bo::{bo_conserved, bo_dispersion_matrix, bo_eval, BoWaveParams};
use modwave_core::equations::{
    classify_parameters, discriminant, kdv_discriminant_closed, oscillation_intervals, params_from_roots,
    potential_roots, EquationSpec, ParamClass, WaveParams,
};
use modwave_core::mi_index::{classify, ClassifyOptions};
use modwave_core::picard_fuchs::param_jacobian;
use modwave_core::sampling::{well_sample, Sample};
use modwave_core::smallamp::{
    characteristic_coefficients, delta_discriminant, gamma, identity_proj, mxi_matrix, whitham_k_star,
    DispersionSymbol, MatrixVariant,
};
use modwave_core::waves::{cnoidal_eval, cnoidal_period, dnoidal_eval, dnoidal_period, quadrature_tmph, WaveOptions, WaveProfile};
use nalgebra::Complex;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn unit4() -> impl Strategy<Value = [f64; 4]> {
    [0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64]
}

/// A well sample of `spec`, or `None` when the draw is rejected.
fn well(spec: &EquationSpec, u: [f64; 4]) -> Option<Sample> {
    well_sample(spec, u[0], u[1], u[2], u[3]).unwrap()
}

fn local_specs() -> Vec<EquationSpec> {
    vec![EquationSpec::kdv(), EquationSpec::mkdv(true), EquationSpec::mkdv(false), EquationSpec::schamel()]
}

fn wave_opts(s: &Sample) -> WaveOptions {
    WaveOptions { branch: s.branch, ..WaveOptions::default() }
}

/// Ordered roots `γ < β < α` with gaps in `[0.1, 2.1)`.
fn ordered_roots() -> impl Strategy<Value = (f64, f64, f64)> {
    (-2.0..1.0f64, 0.1..2.1f64, 0.1..2.1f64).prop_map(|(g, d1, d2)| (g + d1 + d2, g + d1, g))
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn potential_is_positive_inside_and_vanishes_at_turning_points(which in 0usize..4, u in unit4()) {
        let spec = &local_specs()[which];
        let Some(s) = well(spec, u) else { return Ok(()) };
        let cls = classify_parameters(spec, &s.params, s.branch).unwrap();
        prop_assert!(matches!(cls, ParamClass::Periodic { .. }), "not periodic: {:?}", cls);
        let p = spec.potential(s.params.a, s.params.e, s.params.c).unwrap();
        let iv = oscillation_intervals(&p)[s.branch];
        let scale = 1.0 + p.poly.coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max);
        prop_assert!(p.eval(iv.x_lo).abs() < 1e-9 * scale && p.eval(iv.x_hi).abs() < 1e-9 * scale);
        for j in 1..1000 {
            let x = iv.x_lo + (iv.x_hi - iv.x_lo) * j as f64 / 1000.0;
            prop_assert!(p.eval(x) > 0.0, "P({x}) = {} on ({}, {})", p.eval(x), iv.x_lo, iv.x_hi);
        }
    }

    #[test]
    fn resultant_discriminant_matches_kdv_closed_form(u in unit4()) {
        let spec = EquationSpec::kdv();
        let Some(s) = well(&spec, u) else { return Ok(()) };
        let WaveParams { a, e, c, .. } = s.params;
        let closed = kdv_discriminant_closed(a, e, c);
        let res = discriminant(&spec.potential(a, e, c).unwrap());
        prop_assert!((res - closed).abs() <= 1e-10 * closed.abs(), "resultant {res} vs closed {closed}");
    }

    #[test]
    fn potential_roots_satisfy_the_polynomial(which in 0usize..4, u in unit4()) {
        let spec = &local_specs()[which];
        let Some(s) = well(spec, u) else { return Ok(()) };
        let p = spec.potential(s.params.a, s.params.e, s.params.c).unwrap();
        let norm: f64 = p.poly.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt();
        for r in potential_roots(&p).unwrap().values() {
            prop_assert!(p.eval(r).abs() < 1e-9 * (1.0 + norm), "P({r}) = {}", p.eval(r));
        }
    }

    #[test]
    fn roots_to_parameters_round_trip((alpha, beta, gamma) in ordered_roots()) {
        let spec = EquationSpec::LocalPolynomial { f: vec![0.0, 0.0, 0.5] };
        let p = params_from_roots(alpha, beta, gamma);
        let roots = potential_roots(&spec.potential(p.a, p.e, p.c).unwrap()).unwrap().values();
        prop_assert_eq!(roots.len(), 3);
        for (got, want) in roots.iter().zip([gamma, beta, alpha]) {
            prop_assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()), "{roots:?} vs ({gamma}, {beta}, {alpha})");
        }
    }

    #[test]
    fn halving_the_quadrature_tolerance_is_self_consistent(which in 0usize..4, u in unit4()) {
        let spec = &local_specs()[which];
        let Some(s) = well(spec, u) else { return Ok(()) };
        let tol = 1e-10;
        let q1 = quadrature_tmph(spec, &s.params, &WaveOptions { branch: s.branch, tol_quad: tol }).unwrap();
        let q2 = quadrature_tmph(spec, &s.params, &WaveOptions { branch: s.branch, tol_quad: 0.5 * tol }).unwrap();
        for (x, y) in [(q1.t, q2.t), (q1.m, q2.m), (q1.p, q2.p)] {
            prop_assert!((x - y).abs() < 10.0 * tol * (1.0 + y.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn cnoidal_period_matches_quadrature((alpha, beta, gamma) in ordered_roots()) {
        let spec = EquationSpec::LocalPolynomial { f: vec![0.0, 0.0, 0.5] };
        let p = params_from_roots(alpha, beta, gamma);
        let closed = cnoidal_period(alpha, beta, gamma).unwrap();
        let quad = quadrature_tmph(&spec, &p, &WaveOptions::default()).unwrap().t;
        prop_assert!((closed - quad).abs() < 1e-8 * quad, "closed {closed} vs quadrature {quad}");
    }

    #[test]
    fn explicit_families_are_even((alpha, beta, gamma) in ordered_roots(), e in -0.2..-0.01f64, c in -2.0..-0.5f64, t in 0.0..1.0f64) {
        let tc = cnoidal_period(alpha, beta, gamma).unwrap();
        let z = tc * (t - 0.5);
        let (l, r) = (cnoidal_eval(alpha, beta, gamma, 0.0, z).unwrap(), cnoidal_eval(alpha, beta, gamma, 0.0, -z).unwrap());
        prop_assert!((l - r).abs() < 1e-10 * (1.0 + l.abs()));
        if c * c + 4.0 * e / 3.0 > 0.0 {
            let z = dnoidal_period(e, c).unwrap() * (t - 0.5);
            let (l, r) = (dnoidal_eval(e, c, z).unwrap(), dnoidal_eval(e, c, -z).unwrap());
            prop_assert!((l - r).abs() < 1e-10 * (1.0 + l.abs()));
        }
        let bo = BoWaveParams { a: e, k: 0.5, c };
        if bo.validate().is_ok() {
            let z = bo.period() * (t - 0.5);
            let (l, r) = (bo_eval(&bo, z).unwrap(), bo_eval(&bo, -z).unwrap());
            prop_assert!((l - r).abs() < 1e-10 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn kdv_period_mass_bracket_is_positive(u in unit4()) {
        let spec = EquationSpec::kdv();
        let Some(s) = well(&spec, u) else { return Ok(()) };
        let j = param_jacobian(&spec, &s.params, &wave_opts(&s)).unwrap();
        prop_assert!(j.tm_ae > 0.0, "{{T,M}}_{{a,E}} = {}", j.tm_ae);
    }

    #[test]
    fn classification_is_invariant_under_nonlinearity_scaling(which in 0usize..3, sigma in 0.3..3.0f64, u in unit4()) {
        // f = σu^{p+1} and f = 2σu^{p+1} are related by u ↦ λu with λ = 2^{−1/p},
        // which maps (a, E, c) to (λa, λ²E, c).
        let (p, sign) = [(1, 1.0), (2, 1.0), (2, -1.0)][which];
        let coeffs = |s: f64| {
            let mut f = vec![0.0; p + 2];
            f[p + 1] = sign * s;
            EquationSpec::LocalPolynomial { f }
        };
        let (one, two) = (coeffs(sigma), coeffs(2.0 * sigma));
        let Some(s) = well(&one, u) else { return Ok(()) };
        let lambda = 2f64.powf(-1.0 / p as f64);
        let scaled = WaveParams::new(lambda * s.params.a, lambda * lambda * s.params.e, s.params.c);
        let opts = ClassifyOptions { wave: wave_opts(&s), ..ClassifyOptions::default() };
        let r1 = classify(&one, &s.params, &opts).unwrap();
        let r2 = classify(&two, &scaled, &opts).unwrap();
        prop_assert_eq!(r1.classification, r2.classification);
        let (d1, d2) = (r1.delta_mi.unwrap(), r2.delta_mi.unwrap());
        prop_assert_eq!(d1.signum(), d2.signum());
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn bo_dispersion_eigenvalues_are_real_distinct_and_centered(k in 0.1..3.0f64, extra in 0.05..3.0f64) {
        let c = -(k + extra);
        let d = bo_dispersion_matrix(k, c).unwrap();
        let ev = d.eigenvalues;
        let scale = ev.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for z in ev {
            prop_assert!(z.im.abs() < 1e-10 * scale);
        }
        prop_assert!(ev[1].re - ev[0].re > 1e-8 * scale && ev[2].re - ev[1].re > 1e-8 * scale);
        // The μ² coefficient of the characteristic polynomial is −trace D = −πT.
        let pt = PI * 2.0 * PI / k;
        prop_assert!((d.matrix.trace() - pt).abs() < 1e-12 * pt);
        let sum: f64 = ev.iter().map(|z| z.re).sum();
        prop_assert!((sum - pt).abs() < 1e-9 * scale);
    }

    #[test]
    fn bo_conserved_quantities_match_quadrature(k in 0.2..2.0f64, c in -3.0..-0.5f64, frac in -0.5..0.8f64) {
        // a = −frac·c²/4 keeps s = c²(1 + frac) ≥ c²/2; k² is capped at 0.8 s.
        let a = -frac * c * c / 4.0;
        let p = BoWaveParams { a, k, c };
        prop_assume!(k * k < 0.8 * p.s());
        let closed = bo_conserved(&p).unwrap();
        let n = 4096;
        let h = p.period() / n as f64;
        let (mut m, mut q) = (0.0, 0.0);
        for j in 0..n {
            let u = bo_eval(&p, j as f64 * h).unwrap();
            m += u * h;
            q += 0.5 * u * u * h;
        }
        prop_assert!((m - closed.m).abs() < 1e-8 * (1.0 + closed.m.abs()), "M {m} vs {}", closed.m);
        prop_assert!((q - closed.p).abs() < 1e-8 * (1.0 + closed.p.abs()), "P {q} vs {}", closed.p);
    }

    #[test]
    fn small_amplitude_coefficients_have_xi_parity(which in 0usize..3, k in 0.3..2.5f64, amp in -0.05..0.05f64, xi in 1e-4..1e-1f64) {
        let sym = [DispersionSymbol::Whitham, DispersionSymbol::FractionalKdV { alpha: 1.5 }, DispersionSymbol::Ilw { depth: 1.0 }][which].clone();
        let b = identity_proj(k, amp, &sym).unwrap();
        let coeffs = |x: f64| characteristic_coefficients(&mxi_matrix(k, amp, x, &sym, MatrixVariant::Exact).unwrap(), &b);
        let (plus, minus) = (coeffs(xi), coeffs(-xi));
        // det(M − λB) = c₃λ³ + i c₂λ² + c₁λ + i c₀ with real c_j.
        let c = |v: &[Complex<f64>; 4]| [v[0].im, v[1].re, v[2].im, v[3].re];
        let (cp, cm) = (c(&plus), c(&minus));
        let scale = plus.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = 1e-12 * scale;
        prop_assert!((cp[3] - cm[3]).abs() <= tol && (cp[1] - cm[1]).abs() <= tol, "even part {cp:?} vs {cm:?}");
        prop_assert!((cp[2] + cm[2]).abs() <= tol && (cp[0] + cm[0]).abs() <= tol, "odd part {cp:?} vs {cm:?}");
    }

    #[test]
    fn depressed_form_roots_solve_the_characteristic_polynomial(which in 0usize..3, k in 0.3..2.5f64, amp in 0.0..0.05f64, xi in 1e-3..1e-1f64) {
        let sym = [DispersionSymbol::Whitham, DispersionSymbol::FractionalKdV { alpha: 1.5 }, DispersionSymbol::Ilw { depth: 1.0 }][which].clone();
        let rep = delta_discriminant(k, amp, xi, &sym, MatrixVariant::Exact).unwrap();
        // After λ = −iξX the characteristic polynomial is ξ³·(d₃X³ − d₂X² − d₁X + d₀).
        let cubic = modwave_core::poly::Poly::new(vec![rep.d[0], -rep.d[1], -rep.d[2], rep.d[3]]);
        let b = identity_proj(k, amp, &sym).unwrap();
        let det = characteristic_coefficients(&mxi_matrix(k, amp, xi, &sym, MatrixVariant::Exact).unwrap(), &b);
        // Backward error of λ = −iξX as a root of det(M − λB).
        for x in cubic.roots() {
            let lambda = Complex::new(0.0, -xi) * x;
            let value = det.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * lambda + c);
            let weight: f64 = det.iter().enumerate().map(|(j, c)| c.norm() * lambda.norm().powi(j as i32)).sum();
            prop_assert!(value.norm() <= 1e-10 * weight, "backward error {} at X = {x}", value.norm() / weight);
        }
    }
}

#[test]
fn whitham_gamma_changes_sign_once_on_zero_to_ten() {
    let sym = DispersionSymbol::Whitham;
    let (k_star, _) = whitham_k_star().unwrap();
    let mut changes = 0;
    let mut prev = gamma(1e-3, &sym).unwrap();
    assert!(prev > 0.0);
    for i in 1..=5000 {
        let k = 1e-3 + (10.0 - 1e-3) * i as f64 / 5000.0;
        let g = gamma(k, &sym).unwrap();
        assert_eq!(g > 0.0, k < k_star, "Γ({k}) = {g} with k* = {k_star}");
        if g.signum() != prev.signum() {
            changes += 1;
        }
        prev = g;
    }
    assert_eq!(changes, 1);
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn bloch_operator_has_triple_zero_at_the_origin(which in 0usize..3, u in unit4()) {
        let spec = &local_specs()[which];
        let Some(s) = well(spec, u) else { return Ok(()) };
        // Deep samples keep the profile well resolved at moderate truncation.
        prop_assume!(s.depth > 0.02);
        let wave = WaveProfile::resolve(spec, &s.params, &wave_opts(&s)).unwrap();
        let Ok(mat) = assemble_local(&wave, 0.0, 64) else { return Ok(()) };
        let cluster = mat.zero_cluster(3).unwrap();
        prop_assert!(cluster.iter().all(|z| z.norm() < 1e-6), "cluster {cluster:?}");
        // The rest of the spectrum is well separated, where the dense solve is accurate.
        let next = mat.nearest_zero(4)[3];
        prop_assert!(next.norm() > 1e-6, "fourth eigenvalue {next}");
    }

    #[test]
    fn bloch_spectra_are_reflection_symmetric(which in 0usize..3, u in unit4(), xi in 0.01..0.5f64) {
        let spec = &local_specs()[which];
        let Some(s) = well(spec, u) else { return Ok(()) };
        prop_assume!(s.depth > 0.02);
        let wave = WaveProfile::resolve(spec, &s.params, &wave_opts(&s)).unwrap();
        let (Ok(plus), Ok(minus)) = (assemble_local(&wave, xi, 32), assemble_local(&wave, -xi, 32)) else { return Ok(()) };
        check_reflection(&plus.eigenvalues(), &minus.eigenvalues())?;
        let bo = BoWaveParams { a: 0.0, k: 1.0, c: -2.0 - u[0] };
        check_reflection(&assemble_bo(&bo, xi, 64).unwrap().eigenvalues(), &assemble_bo(&bo, -xi, 64).unwrap().eigenvalues())?;
    }
}

fn sorted(mut v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// Spectrum at `−ξ` is the conjugate of the spectrum at `ξ`, and each is invariant under `λ ↦ −λ̄`.
fn check_reflection(plus: &[Complex<f64>], minus: &[Complex<f64>]) -> Result<(), TestCaseError> {
    let scale = plus.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let a = sorted(plus.to_vec());
    let b = sorted(minus.iter().map(|z| z.conj()).collect());
    let c = sorted(plus.iter().map(|z| -z.conj()).collect());
    let d1 = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let d2 = a.iter().zip(&c).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    prop_assert!(d1 <= 1e-8 * scale && d2 <= 1e-8 * scale, "defects {d1:.3e}, {d2:.3e} at scale {scale:.3e}");
    Ok(())
}
