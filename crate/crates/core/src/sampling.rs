//! Deterministic maps from uniform variates to admissible wave parameters.
//!
//! The functions here contain no random number generator: callers supply
//! numbers in `[0, 1)` and receive either an admissible parameter point or
//! `None` when the draw should be rejected. This keeps the library free of
//! RNG state while letting test suites and the CLI use any seeded source.
//!
//! All samplers work on `V` written in the profile variable `x`, so the same
//! code handles `u` and `√u` profiles.

use serde::{Deserialize, Serialize};

use crate::equations::{oscillation_intervals, EquationSpec, ProfileVariable, WaveParams};
use crate::error::Result;
use crate::poly::Poly;

/// Box of `(a, c)` values explored by the samplers.
pub const PARAM_RANGE: (f64, f64) = (-1.5, 1.5);

/// Fraction of a potential well kept away from both its bottom and its rim.
pub const LEVEL_MARGIN: f64 = 0.05;

/// Wells shallower than this are rejected; they sit next to the cusp where a
/// minimum and a maximum of `V` merge, and every Jacobian entry blows up there.
pub const MIN_WELL_DEPTH: f64 = 1e-3;

/// An admissible parameter point together with the oscillation branch it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub params: WaveParams,
    pub branch: usize,
    /// Energy distance from the nearest critical level of `V`.
    pub depth: f64,
}

fn lerp(range: (f64, f64), t: f64) -> f64 {
    range.0 + (range.1 - range.0) * t
}

/// Critical points of `V` in the profile variable, split into minima and maxima.
struct Landscape {
    v: Poly,
    minima: Vec<f64>,
    maxima: Vec<f64>,
    variable: ProfileVariable,
}

fn landscape(spec: &EquationSpec, a: f64, c: f64) -> Result<Landscape> {
    let p = spec.potential(a, 0.0, c)?;
    let v = Poly::new(p.poly.coeffs().iter().map(|x| -x).collect());
    let dv = v.derivative();
    let d2v = dv.derivative();
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    for r in dv.roots() {
        if r.im.abs() > 1e-9 {
            continue;
        }
        let x = r.re;
        if p.variable == ProfileVariable::SqrtU && x < 0.0 {
            continue;
        }
        let curv = d2v.eval(x);
        if curv > 1e-6 {
            minima.push(x);
        } else if curv < -1e-6 {
            maxima.push(x);
        }
    }
    minima.sort_by(f64::total_cmp);
    maxima.sort_by(f64::total_cmp);
    Ok(Landscape { v, minima, maxima, variable: p.variable })
}

/// Branch index of the oscillation interval containing `x`.
fn branch_containing(spec: &EquationSpec, params: &WaveParams, x: f64) -> Result<Option<usize>> {
    let p = spec.potential(params.a, params.e, params.c)?;
    Ok(oscillation_intervals(&p)
        .iter()
        .position(|iv| !iv.degenerate && iv.x_lo < x && x < iv.x_hi))
}

/// A periodic wave trapped in a single well of `V`.
///
/// `a` and `c` come from `ua`, `uc`; `upick` chooses one of the local minima
/// and `ulevel` places `E` between the well bottom and the lower of its two
/// rims. Returns `None` if the draw has no usable well.
pub fn well_sample(spec: &EquationSpec, ua: f64, uc: f64, upick: f64, ulevel: f64) -> Result<Option<Sample>> {
    let a = lerp(PARAM_RANGE, ua);
    let c = lerp(PARAM_RANGE, uc);
    let land = landscape(spec, a, c)?;
    if land.minima.is_empty() {
        return Ok(None);
    }
    let idx = ((upick * land.minima.len() as f64) as usize).min(land.minima.len() - 1);
    let x0 = land.minima[idx];
    if land.variable == ProfileVariable::SqrtU && x0 <= 1e-6 {
        return Ok(None);
    }
    let left = land.maxima.iter().rev().find(|&&m| m < x0).map(|&m| land.v.eval(m));
    let right = land.maxima.iter().find(|&&m| m > x0).map(|&m| land.v.eval(m));
    let rim_lead = if land.v.leading() > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
    let odd = land.v.degree() % 2 == 1;
    let left = left.unwrap_or(if land.variable == ProfileVariable::SqrtU {
        land.v.eval(0.0)
    } else if odd {
        -rim_lead
    } else {
        rim_lead
    });
    let right = right.unwrap_or(rim_lead);
    let bottom = land.v.eval(x0);
    let rim = left.min(right);
    let span = if rim.is_finite() { rim - bottom } else { 2.0 };
    if !(span > MIN_WELL_DEPTH) {
        return Ok(None);
    }
    let level = LEVEL_MARGIN + (1.0 - 2.0 * LEVEL_MARGIN) * ulevel;
    let params = WaveParams::new(a, bottom + span * level, c);
    let depth = span * level.min(1.0 - level);
    Ok(branch_containing(spec, &params, x0)?.map(|branch| Sample { params, branch, depth }))
}

/// A periodic wave whose energy lies above every interior barrier of `V`.
///
/// Intended for potentials that tend to `+∞` in both directions (focusing
/// modified KdV), where such orbits encircle all wells and `E − V` keeps
/// only two real roots. `E` exceeds the highest local maximum (or the lowest
/// minimum when there is none) by an amount in `[0.05, 2.05)`.
pub fn above_barrier_sample(spec: &EquationSpec, ua: f64, uc: f64, ulevel: f64) -> Result<Option<Sample>> {
    let a = lerp(PARAM_RANGE, ua);
    let c = lerp(PARAM_RANGE, uc);
    let land = landscape(spec, a, c)?;
    if land.v.leading() <= 0.0 || land.v.degree() % 2 == 1 || land.minima.is_empty() {
        return Ok(None);
    }
    let base = if land.maxima.is_empty() {
        land.minima.iter().map(|&m| land.v.eval(m)).fold(f64::INFINITY, f64::min)
    } else {
        land.maxima.iter().map(|&m| land.v.eval(m)).fold(f64::NEG_INFINITY, f64::max)
    };
    let excess = 0.05 + 2.0 * ulevel;
    let params = WaveParams::new(a, base + excess, c);
    let p = spec.potential(a, params.e, c)?;
    let ivs = oscillation_intervals(&p);
    Ok((ivs.len() == 1 && !ivs[0].degenerate).then_some(Sample { params, branch: 0, depth: excess }))
}
