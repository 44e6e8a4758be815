//! Numerical quadrature.
//!
//! Two integrators are provided:
//!
//! * [`gauss_kronrod`], a globally adaptive 7/15-point Gauss–Kronrod rule
//!   for smooth integrands on a finite interval;
//! * [`periodic_trapezoid`], the trapezoidal rule with successive doubling,
//!   which converges geometrically for smooth periodic integrands. After the
//!   `sin²` substitution used by the wave module every loop integral is of
//!   this type.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod panel: returns (Kronrod estimate, |Kronrod − Gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    (resk * half, ((resk - resg) * half).abs())
}

#[derive(PartialEq)]
struct Panel {
    err: f64,
    a: f64,
    b: f64,
    val: f64,
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// Subdivides the panel with the largest error estimate until the summed
/// estimate drops below `max(tol_abs, tol_rel·|I|)` or `max_panels` is reached.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { err: e, a, b, val: v });
    let mut total = v;
    let mut total_err = e;
    while total_err > tol_abs.max(tol_rel * total.abs()) {
        if heap.len() >= max_panels {
            return Err(Error::QuadratureFailure(format!(
                "Gauss-Kronrod did not converge on [{a}, {b}] (error estimate {total_err:.3e})"
            )));
        }
        let p = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&f, p.a, mid);
        let (v2, e2) = gk15(&f, mid, p.b);
        total += v1 + v2 - p.val;
        total_err += e1 + e2 - p.err;
        heap.push(Panel { err: e1, a: p.a, b: mid, val: v1 });
        heap.push(Panel { err: e2, a: mid, b: p.b, val: v2 });
        if !total.is_finite() {
            return Err(Error::QuadratureFailure("non-finite integrand".into()));
        }
    }
    if !total.is_finite() {
        return Err(Error::QuadratureFailure("non-finite integrand".into()));
    }
    Ok(total)
}

/// Integral of a smooth `period`-periodic function over one period by the
/// trapezoidal rule, doubling the number of nodes until two successive
/// estimates differ by less than `max(tol_abs, tol_rel·|I|)`.
///
/// Node values are reused between levels, so the total cost is that of the
/// finest level. Fails if `max_nodes` is exceeded.
pub fn periodic_trapezoid<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    period: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_nodes: usize,
) -> Result<f64> {
    let mut n = 16usize;
    let mut sum: f64 = (0..n).map(|j| f(start + period * j as f64 / n as f64)).sum();
    if !sum.is_finite() {
        return Err(Error::QuadratureFailure("non-finite periodic integrand".into()));
    }
    let mut prev = sum * period / n as f64;
    loop {
        let h = period / n as f64;
        let mids: f64 = (0..n).map(|j| f(start + h * (j as f64 + 0.5))).sum();
        if !mids.is_finite() {
            return Err(Error::QuadratureFailure("non-finite periodic integrand".into()));
        }
        sum += mids;
        n *= 2;
        let cur = sum * period / n as f64;
        if (cur - prev).abs() <= tol_abs.max(tol_rel * cur.abs()) && n >= 64 {
            return Ok(cur);
        }
        if n >= max_nodes {
            return Err(Error::QuadratureFailure(format!(
                "periodic trapezoid did not converge with {n} nodes (last change {:.3e})",
                (cur - prev).abs()
            )));
        }
        prev = cur;
    }
}

/// Vector-valued variant of [`periodic_trapezoid`].
///
/// `f` writes `dim` components for one node into its output slice. All
/// components share the nodes; convergence is declared when every component
/// changes by less than `max(tol_abs, tol_rel·max_j |I_j|)`.
pub fn periodic_trapezoid_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    dim: usize,
    start: f64,
    period: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_nodes: usize,
) -> Result<Vec<f64>> {
    let mut buf = vec![0.0; dim];
    let mut sum = vec![0.0; dim];
    let mut accumulate = |nodes: &mut dyn Iterator<Item = f64>, acc: &mut Vec<f64>| -> Result<()> {
        for t in nodes {
            f(t, &mut buf);
            for (s, v) in acc.iter_mut().zip(buf.iter()) {
                *s += v;
            }
        }
        if acc.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::QuadratureFailure("non-finite periodic integrand".into()))
        }
    };
    let mut n = 16usize;
    accumulate(&mut (0..n).map(|j| start + period * j as f64 / n as f64), &mut sum)?;
    let mut prev: Vec<f64> = sum.iter().map(|s| s * period / n as f64).collect();
    loop {
        let h = period / n as f64;
        accumulate(&mut (0..n).map(|j| start + h * (j as f64 + 0.5)), &mut sum)?;
        n *= 2;
        let cur: Vec<f64> = sum.iter().map(|s| s * period / n as f64).collect();
        let scale = cur.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let change = cur.iter().zip(&prev).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if change <= tol_abs.max(tol_rel * scale) && n >= 64 {
            return Ok(cur);
        }
        if n >= max_nodes {
            return Err(Error::QuadratureFailure(format!(
                "periodic trapezoid did not converge with {n} nodes (last change {change:.3e})"
            )));
        }
        prev = cur;
    }
}
