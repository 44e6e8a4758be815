//! Shared oracles and samplers for the integration tests.
//!
//! Everything here is deliberately independent of the code paths under test:
//! finite-difference Jacobians use only the quadrature route, and the
//! Benjamin–Ono bracket oracle differentiates period averages by complex step.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use modwave_core::bo::{bo_averages, BoWaveParams};
use modwave_core::equations::{discriminant, oscillation_intervals, EquationSpec, WaveParams};
use modwave_core::sampling::{above_barrier_sample, well_sample, Sample};
use modwave_core::waves::{quadrature_tmph, WaveOptions};
use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for a named test.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Family of wave samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Trapped in one potential well.
    Well,
    /// Focusing modified KdV orbits of two-well potentials below the barrier (four real roots).
    Dnoidal,
    /// Orbits above every barrier (two real roots).
    AboveBarrier,
}

/// Draws `n` admissible samples of a family; KdV-type draws also require `disc > min_disc`.
pub fn draw(spec: &EquationSpec, family: Family, n: usize, seed: u64, min_disc: f64) -> Vec<Sample> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n {
        attempts += 1;
        assert!(attempts < 200 * n, "sampler for {spec:?} {family:?} is starving");
        let u: [f64; 4] = [r.random(), r.random(), r.random(), r.random()];
        let s = match family {
            Family::Well | Family::Dnoidal => well_sample(spec, u[0], u[1], u[2], u[3]).unwrap(),
            Family::AboveBarrier => above_barrier_sample(spec, u[0], u[1], u[2]).unwrap(),
        };
        let Some(s) = s else { continue };
        let p = spec.potential(s.params.a, s.params.e, s.params.c).unwrap();
        if family == Family::Dnoidal && oscillation_intervals(&p).len() != 2 {
            continue;
        }
        if discriminant(&p).abs() <= min_disc {
            continue;
        }
        out.push(s);
    }
    out
}

/// Central-difference Jacobian of quadrature `(T, M, P)` in `(a, E, c)`, one Richardson step.
pub fn fd_jacobian(spec: &EquationSpec, s: &Sample, h: f64) -> [[f64; 3]; 3] {
    let opts = WaveOptions { branch: s.branch, tol_quad: 1e-14 };
    let eval = |p: WaveParams| {
        let q = quadrature_tmph(spec, &p, &opts).unwrap();
        [q.t, q.m, q.p]
    };
    let shifted = |col: usize, d: f64| {
        let mut p = s.params;
        match col {
            0 => p.a += d,
            1 => p.e += d,
            _ => p.c += d,
        }
        p
    };
    let mut jac = [[0.0; 3]; 3];
    for col in 0..3 {
        let diff = |step: f64| {
            let (fp, fm) = (eval(shifted(col, step)), eval(shifted(col, -step)));
            [0, 1, 2].map(|r| (fp[r] - fm[r]) / (2.0 * step))
        };
        let (d1, d2) = (diff(h), diff(0.5 * h));
        for r in 0..3 {
            jac[r][col] = (4.0 * d2[r] - d1[r]) / 3.0;
        }
    }
    jac
}

/// `{M, P}_{a,c̃}` of a Benjamin–Ono wave, `c̃ = −c`, by complex-step
/// differentiation of `M = T⟨u⟩` and `P = T⟨u²⟩/2`.
pub fn bo_mp_bracket(p: &BoWaveParams) -> f64 {
    let h = 1e-30;
    let mp = |a: Complex<f64>, c: Complex<f64>| {
        let k = Complex::new(p.k, 0.0);
        let av = bo_averages(a, k, c);
        let t = 2.0 * PI / p.k;
        (av[0] * t, av[1] * (0.5 * t))
    };
    let (ma, pa) = mp(Complex::new(p.a, h), Complex::new(p.c, 0.0));
    let (mc, pc) = mp(Complex::new(p.a, 0.0), Complex::new(p.c, h));
    let (m_a, p_a, m_c, p_c) = (ma.im / h, pa.im / h, mc.im / h, pc.im / h);
    // Derivatives in c̃ = −c flip the sign of the c-column.
    -(m_a * p_c - m_c * p_a)
}

/// Outcome of one acceptance criterion.
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub budget: Duration,
    start: Instant,
}

impl Criterion {
    pub fn start(id: u32, name: &'static str, budget_secs: u64) -> Self {
        Criterion { id, name, budget: Duration::from_secs(budget_secs), start: Instant::now() }
    }

    /// Prints the verdict line and fails the test on any failure or budget overrun.
    pub fn finish(self, failures: Vec<String>) {
        let elapsed = self.start.elapsed();
        let over = elapsed > self.budget;
        let ok = failures.is_empty() && !over;
        let line = format!(
            "[acceptance] criterion {:>2} {:<44} {} ({:.2} s, budget {} s){}\n",
            self.id,
            self.name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            self.budget.as_secs(),
            if failures.is_empty() { String::new() } else { format!(": {} failure(s), first: {}", failures.len(), failures[0]) },
        );
        // Written to the raw handle so the line shows up even when output is captured.
        let _ = std::io::stderr().write_all(line.as_bytes());
        assert!(failures.is_empty(), "criterion {} failed: {:#?}", self.id, failures);
        assert!(!over, "criterion {} exceeded its budget: {:.2} s", self.id, elapsed.as_secs_f64());
    }
}

/// Relative difference with an absolute floor.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= abs.max(rel * b.abs())
}
