//! Floquet–Bloch spectral verifier.
//!
//! Every linearized operator handled here has the form `L = ∂_z H` with `H`
//! a self-adjoint operator built from a Fourier multiplier and multiplication
//! by an even function. On Bloch modes `e^{iqz}`, `q = q_n(ξ)`, truncated to
//! `|n| ≤ N`, this becomes `L_ξ = i·diag(q)·H_ξ` with `H_ξ` real symmetric
//! (diagonal multiplier plus a Toeplitz block of real cosine coefficients).
//! The eigenvalues of `L_ξ` are `i` times those of the real matrix
//! `diag(q)·H_ξ`, which are computed from its real Schur form.
//!
//! Bloch frequencies are physical: for a `T`-periodic wave `q_n = 2πn/T + ξ`,
//! so `λ_j(ξ) ≈ iμ_jξ` measures the slopes `μ_j` of the three branches
//! through the origin directly.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::bo::{bo_eval, BoWaveParams};
use crate::error::{Error, Result};
use crate::linalg::real_eigenvalues;
use crate::smallamp::DispersionSymbol;
use crate::waves::WaveProfile;

/// Relative Fourier tail energy above which a sampled coefficient is under-resolved.
pub const TOL_TAIL: f64 = 1e-12;

/// Minimal truncation for the local assembler.
pub const MIN_MODES: usize = 32;

/// Truncated Bloch operator `L_ξ = i·diag(q)·H`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochMatrix {
    /// Truncation `N`: modes `−N..=N`.
    pub modes: usize,
    /// Bloch frequency.
    pub xi: f64,
    /// Mode frequencies `q_n`, `n = −N..=N`.
    pub freqs: Vec<f64>,
    /// Real symmetric factor `H`.
    pub h: DMatrix<f64>,
}

impl BlochMatrix {
    /// Builds `H = diag(diag) + scale·Toeplitz(coef)`, with `coef[j]` the cosine coefficient of index `j`.
    fn from_parts(modes: usize, xi: f64, freqs: Vec<f64>, diag: &[f64], coef: &[f64], scale: f64) -> Self {
        let dim = 2 * modes + 1;
        let h = DMatrix::from_fn(dim, dim, |r, c| {
            let t = scale * coef[r.abs_diff(c)];
            if r == c {
                t + diag[r]
            } else {
                t
            }
        });
        BlochMatrix { modes, xi, freqs, h }
    }

    /// Dense complex matrix of `L_ξ`.
    pub fn entries(&self) -> DMatrix<Complex<f64>> {
        DMatrix::from_fn(self.h.nrows(), self.h.ncols(), |r, c| Complex::new(0.0, self.freqs[r] * self.h[(r, c)]))
    }

    /// Eigenvalues of `L_ξ`.
    pub fn eigenvalues(&self) -> Vec<Complex<f64>> {
        let a = DMatrix::from_fn(self.h.nrows(), self.h.ncols(), |r, c| self.freqs[r] * self.h[(r, c)]);
        real_eigenvalues(&a).into_iter().map(|z| Complex::new(-z.im, z.re)).collect()
    }

    /// The `count` eigenvalues of smallest modulus, ordered by modulus.
    pub fn nearest_zero(&self, count: usize) -> Vec<Complex<f64>> {
        let mut ev = self.eigenvalues();
        ev.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        ev.truncate(count);
        ev
    }

    /// The `count` eigenvalues nearest zero, refined on their invariant subspace.
    ///
    /// A dense eigensolver perturbs the matrix by about `ε‖L‖`, and a
    /// defective eigenvalue (the zero of `L_0`, with a Jordan block) splits by
    /// the square root of that. Here the invariant subspace of the cluster is
    /// found by shifted subspace iteration and the eigenvalues are read from
    /// the `count × count` projection. Residuals `L·V` only see the rapidly
    /// decaying Fourier content of the cluster, so the splitting drops to the
    /// square root of a much smaller number. Ordered by modulus.
    pub fn zero_cluster(&self, count: usize) -> Result<Vec<Complex<f64>>> {
        let dim = self.h.nrows();
        if count == 0 || count >= dim {
            return Err(Error::InvalidInput(format!("cluster size {count} must lie in 1..{dim}")));
        }
        let d = DMatrix::from_fn(dim, dim, |r, c| self.freqs[r] * self.h[(r, c)]);
        let mut moduli: Vec<f64> = real_eigenvalues(&d).iter().map(|z| z.norm()).collect();
        moduli.sort_by(f64::total_cmp);
        let gap = moduli[count];
        if !(gap > 0.0) {
            return Err(Error::SingularSystem("more than the requested eigenvalues sit at zero".into()));
        }
        let shift = 1e-3 * gap;
        let lu = (&d - DMatrix::<f64>::identity(dim, dim) * shift).lu();
        let mut v = DMatrix::from_fn(dim, count, |r, c| (((r * 7 + c * 13) % 11) as f64 - 5.0) / 5.0);
        for _ in 0..CLUSTER_ITERATIONS {
            v = lu
                .solve(&v)
                .ok_or_else(|| Error::SingularSystem("shifted Bloch matrix is singular".into()))?
                .qr()
                .q();
        }
        let projected = v.transpose() * &d * &v;
        let mut ev: Vec<Complex<f64>> =
            real_eigenvalues(&projected).into_iter().map(|z| Complex::new(-z.im, z.re)).collect();
        ev.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        Ok(ev)
    }
}

/// Subspace iterations of [`BlochMatrix::zero_cluster`]; each gains about three digits.
const CLUSTER_ITERATIONS: usize = 8;

/// Cosine coefficients `ĝ_0..ĝ_{count−1}` of equispaced samples of an even periodic function.
///
/// Fails with `Resolution` if the energy above mode `resolved` exceeds
/// [`TOL_TAIL`] of the total.
pub fn cosine_coefficients(samples: &[f64], count: usize, resolved: usize) -> Result<Vec<f64>> {
    let ns = samples.len();
    let half = ns / 2;
    let all: Vec<f64> = (0..=half)
        .map(|j| {
            samples
                .iter()
                .enumerate()
                .map(|(i, v)| v * (2.0 * PI * ((i * j) % ns) as f64 / ns as f64).cos())
                .sum::<f64>()
                / ns as f64
        })
        .collect();
    let energy = |range: std::ops::Range<usize>| -> f64 {
        range.map(|j| if j == 0 { all[0] * all[0] } else { 2.0 * all[j] * all[j] }).sum()
    };
    let total = energy(0..all.len());
    let tail = energy(resolved.min(all.len())..all.len());
    if total > 0.0 && tail > TOL_TAIL * total {
        return Err(Error::Resolution(format!(
            "Fourier tail energy {:.3e} of total above mode {resolved} exceeds {TOL_TAIL:.0e}",
            tail / total
        )));
    }
    Ok((0..count).map(|j| all.get(j).copied().unwrap_or(0.0)).collect())
}

/// Bloch matrix of `L = ∂_z(∂_z² + c + f'(u))` about a wave of a local equation.
///
/// `f'(u)` is sampled at `4(2N + 1)` points and enters as a Toeplitz block.
pub fn assemble_local(profile: &WaveProfile, xi: f64, modes: usize) -> Result<BlochMatrix> {
    if modes < MIN_MODES {
        return Err(Error::InvalidInput(format!("truncation N = {modes} is below {MIN_MODES}")));
    }
    let t = profile.period();
    let spec = profile.spec();
    let ns = 4 * (2 * modes + 1);
    let g: Vec<f64> = profile.samples(ns)?.into_iter().map(|u| spec.f_prime(u)).collect::<Result<_>>()?;
    let coef = cosine_coefficients(&g, 2 * modes + 1, modes)?;
    let c = profile.params().c;
    let freqs: Vec<f64> = (-(modes as i64)..=modes as i64).map(|n| 2.0 * PI * n as f64 / t + xi).collect();
    let diag: Vec<f64> = freqs.iter().map(|q| c - q * q).collect();
    Ok(BlochMatrix::from_parts(modes, xi, freqs, &diag, &coef, 1.0))
}

/// Bloch matrix of `L = ∂_z(−𝓜_k + c − 2w)` about a `2π`-periodic wave `w` of a nonlocal equation.
///
/// `samples` are equispaced values of `w` on `[0, 2π)`; the symbol acts as
/// `m(k(n + ξ))`, so `ξ` is normalized to the `2π` frame here.
pub fn assemble_nonlocal(sym: &DispersionSymbol, samples: &[f64], k: f64, c: f64, xi: f64, modes: usize) -> Result<BlochMatrix> {
    let coef = cosine_coefficients(samples, 2 * modes + 1, modes)?;
    let freqs: Vec<f64> = (-(modes as i64)..=modes as i64).map(|n| n as f64 + xi).collect();
    let diag: Vec<f64> = freqs.iter().map(|&q| Ok(c - sym.m(k * q)?)).collect::<Result<_>>()?;
    Ok(BlochMatrix::from_parts(modes, xi, freqs, &diag, &coef, -2.0))
}

/// Bloch matrix of `L = ∂_z(Λ − c − 2u)` about an explicit Benjamin–Ono wave.
pub fn assemble_bo(params: &BoWaveParams, xi: f64, modes: usize) -> Result<BlochMatrix> {
    let ns = 4 * (2 * modes + 1);
    let t = params.period();
    let u: Vec<f64> = (0..ns).map(|j| bo_eval(params, t * j as f64 / ns as f64)).collect::<Result<_>>()?;
    let coef = cosine_coefficients(&u, 2 * modes + 1, modes)?;
    let freqs: Vec<f64> = (-(modes as i64)..=modes as i64).map(|n| n as f64 * params.k + xi).collect();
    let diag: Vec<f64> = freqs.iter().map(|q| q.abs() - params.c).collect();
    Ok(BlochMatrix::from_parts(modes, xi, freqs, &diag, &coef, -2.0))
}

/// Default Bloch frequencies for slope extraction.
pub const DEFAULT_XI: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Polynomial extrapolation of `(x_i, y_i)` to `x = 0` (Neville).
fn extrapolate_to_zero(xs: &[f64], ys: &[Complex<f64>]) -> Complex<f64> {
    let mut p: Vec<Complex<f64>> = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xa, xb) = (xs[i], xs[i + level]);
            p[i] = (p[i + 1] * xa - p[i] * xb) / (xa - xb);
        }
    }
    p[0]
}

/// Slopes `μ_j = lim λ_j(ξ)/(iξ)` of the three spectral branches through the origin.
///
/// At each `ξ` the three eigenvalues nearest zero are taken and divided by
/// `iξ`; branches are continued across the list by nearest neighbours and
/// extrapolated to `ξ = 0`. Output is sorted by real, then imaginary part.
pub fn modulation_slopes<F>(assembler: F, xi_list: &[f64]) -> Result<[Complex<f64>; 3]>
where
    F: Fn(f64) -> Result<BlochMatrix>,
{
    if xi_list.len() < 2 || xi_list.contains(&0.0) {
        return Err(Error::InvalidInput("need at least two nonzero Bloch frequencies".into()));
    }
    let ratios: Vec<Vec<Complex<f64>>> = xi_list
        .iter()
        .map(|&xi| {
            let ev = assembler(xi)?.nearest_zero(3);
            if ev.len() < 3 {
                return Err(Error::InvalidInput("truncation has fewer than three modes".into()));
            }
            Ok(ev.into_iter().map(|l| l / Complex::new(0.0, xi)).collect())
        })
        .collect::<Result<_>>()?;
    let mut branches: Vec<Vec<Complex<f64>>> = ratios[0].iter().map(|&z| vec![z]).collect();
    for level in ratios.iter().skip(1) {
        let mut used = [false; 3];
        for br in branches.iter_mut() {
            let last = *br.last().expect("branches start non-empty");
            let mut d: Vec<(f64, usize)> = (0..3).filter(|&j| !used[j]).map(|j| ((level[j] - last).norm(), j)).collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0));
            if d.len() > 1 && (d[1].0 - d[0].0).abs() < 1e-10 {
                return Err(Error::BranchMixing(format!("ambiguous continuation near {last}")));
            }
            used[d[0].1] = true;
            br.push(level[d[0].1]);
        }
    }
    let mut out: Vec<Complex<f64>> = branches.iter().map(|b| extrapolate_to_zero(xi_list, b)).collect();
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok([out[0], out[1], out[2]])
}

/// Largest real part found over a grid of Bloch frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleScan {
    pub max_re: f64,
    pub xi_at: f64,
}

/// Maximum real part of the truncated spectrum over `xi_grid`.
pub fn instability_bubble_scan<F>(assembler: F, xi_grid: &[f64]) -> Result<BubbleScan>
where
    F: Fn(f64) -> Result<BlochMatrix>,
{
    let mut best = BubbleScan { max_re: f64::NEG_INFINITY, xi_at: f64::NAN };
    for &xi in xi_grid {
        let m = assembler(xi)?.eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        if m > best.max_re {
            best = BubbleScan { max_re: m, xi_at: xi };
        }
    }
    Ok(best)
}

/// Largest deviation between the `count` eigenvalues nearest zero at truncations `N` and `2N`.
pub fn truncation_change<F>(assembler: F, xi: f64, modes: usize, count: usize) -> Result<f64>
where
    F: Fn(f64, usize) -> Result<BlochMatrix>,
{
    let sort = |mut v: Vec<Complex<f64>>| {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    };
    let a = sort(assembler(xi, modes)?.nearest_zero(count));
    let b = sort(assembler(xi, 2 * modes)?.nearest_zero(count));
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{EquationSpec, WaveParams};
    use crate::smallamp::omega;
    use crate::waves::WaveOptions;

    #[test]
    fn constant_state_spectrum_is_linear_dispersion() {
        let sym = DispersionSymbol::Whitham;
        let k = 1.3;
        let c = sym.m(k).unwrap();
        let m = assemble_nonlocal(&sym, &[0.0; 64], k, c, 0.2, 10).unwrap();
        let mut ev: Vec<f64> = m.eigenvalues().iter().map(|z| z.im).collect();
        let mut expect: Vec<f64> = (-10..=10).map(|n| omega(n, 0.2, k, &sym).unwrap()).collect();
        ev.sort_by(f64::total_cmp);
        expect.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn kdv_slopes_match_theory() {
        use crate::mi_index::{classify, ClassifyOptions};
        let spec = EquationSpec::kdv();
        let prm = WaveParams::new(0.3, 0.01, -1.2);
        let wave = WaveProfile::resolve(&spec, &prm, &WaveOptions::default()).unwrap();
        let s = modulation_slopes(|xi| assemble_local(&wave, xi, 48), &DEFAULT_XI).unwrap();
        let rep = classify(&spec, &prm, &ClassifyOptions::default()).unwrap();
        let mut th: Vec<Complex<f64>> = rep.slopes.iter().map(|&z| z.into()).collect();
        th.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (a, b) in s.iter().zip(&th) {
            assert!((a - b).norm() < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn bo_slopes_match_averaged_system() {
        let p = BoWaveParams { a: 0.0, k: 1.0, c: -2.0 };
        let s = modulation_slopes(|xi| assemble_bo(&p, xi, 48), &[1e-3, 5e-4, 2.5e-4]).unwrap();
        let th = crate::bo::bo_modulation_slopes(&p).unwrap();
        for (a, b) in s.iter().zip(&th) {
            assert!((a - b).norm() < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn under_resolved_profile_is_reported() {
        let samples: Vec<f64> = (0..64).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect();
        assert!(matches!(cosine_coefficients(&samples, 5, 4), Err(Error::Resolution(_))));
    }
}
