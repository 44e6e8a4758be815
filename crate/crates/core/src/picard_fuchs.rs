//! Picard–Fuchs system and the parameter Jacobian of `(T, M, P)`.
//!
//! For `P(x) = Σ_{j≤n} a_j x^j` the singular moments
//! `I_k = ∮ x^k dx/P^{3/2}` (finite part) are linked to the regular moments
//! `ζ_k = ∮ x^k dx/√P` by two families of identities:
//!
//! ```text
//! Σ_j a_j I_{j+m}         = ζ_m,          m = 0..n−2   (multiply by P)
//! Σ_j j a_j I_{j+k−1}     = 2k ζ_{k−1},   k = 0..n−1   (loop integral of d(x^k/√P))
//! ```
//!
//! These `2n − 1` equations for `I_0..I_{2n−2}` form a square system whose
//! matrix is the Sylvester matrix of `P` and `P'`, nonsingular exactly when
//! `P` has simple roots. Since `∂ζ_k/∂a_j = −½ I_{k+j}`, the solution yields
//! every partial derivative of `(T, M, P)` with respect to `(a, E, c)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::equations::{EquationSpec, PotentialPolynomial, WaveParams};
use crate::error::{Error, Result};
use crate::linalg::solve_checked;
use crate::waves::{MomentTable, WaveOptions, WaveProfile};

/// Condition-number ceiling for the Picard–Fuchs solve.
pub const COND_MAX: f64 = 1e12;

/// Assembled Picard–Fuchs linear system.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardFuchsSystem {
    /// `(2n − 1) × (2n − 1)` band matrix.
    pub matrix: DMatrix<f64>,
    /// Right-hand side `(ζ_0, …, ζ_{n−2}, 0, 2ζ_0, …, 2(n−1)ζ_{n−2})`.
    pub rhs: DVector<f64>,
    /// Degree `n` of the potential polynomial.
    pub degree: usize,
}

/// Solution of the Picard–Fuchs system with solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSolution {
    /// `I_0..=I_{2n−2}`.
    pub i_moments: Vec<f64>,
    /// 1-norm condition estimate of the matrix.
    pub cond: f64,
    /// Relative residual of the LU solve.
    pub rel_residual: f64,
}

/// Assembles the Picard–Fuchs system from the potential and `ζ_0..ζ_{n−2}`.
pub fn build_system(poly: &PotentialPolynomial, zeta: &[f64]) -> Result<PicardFuchsSystem> {
    let a = poly.poly.coeffs();
    let n = poly.degree();
    if n < 3 {
        return Err(Error::InvalidInput(format!("Picard–Fuchs needs degree ≥ 3, got {n}")));
    }
    if zeta.len() < n - 1 {
        return Err(Error::InvalidInput(format!("need ζ_0..ζ_{}, got {} moments", n - 2, zeta.len())));
    }
    let size = 2 * n - 1;
    let mut mat = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    for m in 0..n - 1 {
        for (j, &aj) in a.iter().enumerate() {
            mat[(m, j + m)] = aj;
        }
        rhs[m] = zeta[m];
    }
    for k in 0..n {
        let row = n - 1 + k;
        for (j, &aj) in a.iter().enumerate().skip(1) {
            mat[(row, j + k - 1)] = j as f64 * aj;
        }
        rhs[row] = if k == 0 { 0.0 } else { 2.0 * k as f64 * zeta[k - 1] };
    }
    Ok(PicardFuchsSystem { matrix: mat, rhs, degree: n })
}

/// Solves the system by LU with partial pivoting.
///
/// Fails with `SingularSystem` when `P` has a repeated root and with
/// `IllConditioned` when the condition estimate exceeds `cond_max`.
pub fn solve_moments(sys: &PicardFuchsSystem, cond_max: f64) -> Result<MomentSolution> {
    let sol = solve_checked(&sys.matrix, &sys.rhs, cond_max)?;
    Ok(MomentSolution { i_moments: sol.x.iter().copied().collect(), cond: sol.cond, rel_residual: sol.rel_residual })
}

/// Extends `I_0..` up to `I_{up_to}` with the derivative-row recurrence
/// `I_{n+k−1} = (2kζ_{k−1} − Σ_{j<n} j a_j I_{j+k−1})/(n a_n)`, `k ≥ n`.
pub fn extend_moments(poly: &PotentialPolynomial, zeta: &[f64], i_moments: &mut Vec<f64>, up_to: usize) -> Result<()> {
    let a = poly.poly.coeffs();
    let n = poly.degree();
    while i_moments.len() <= up_to {
        let idx = i_moments.len();
        if idx < n {
            return Err(Error::InvalidInput("extension needs the Picard–Fuchs solution first".into()));
        }
        let k = idx + 1 - n;
        let z = *zeta
            .get(k - 1)
            .ok_or_else(|| Error::InvalidInput(format!("extension to I_{idx} needs ζ_{}", k - 1)))?;
        let mut s = 2.0 * k as f64 * z;
        for (j, &aj) in a.iter().enumerate().take(n).skip(1) {
            s -= j as f64 * aj * i_moments[j + k - 1];
        }
        i_moments.push(s / (n as f64 * a[n]));
    }
    Ok(())
}

/// Jacobian of `(T, M, P)` with respect to `(a, E, c)` and its named determinants.
///
/// `jac` is taken with respect to the profile-ODE speed `c`. The brackets
/// that involve the speed (`tmp_aec` and `tp_ec`) are reported with respect
/// to the reversed speed `c̃ = −c`, the orientation in which the instability
/// index and the effective dispersion cubic take their standard form; each of
/// them is therefore the negative of the corresponding determinant of `jac`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamJacobian {
    /// Rows `(T, M, P)`, columns `(a, E, c)`.
    pub jac: [[f64; 3]; 3],
    /// `(T, M, P)` of the wave.
    pub tmp: [f64; 3],
    /// `T_E`.
    pub t_e: f64,
    /// `{T, M}_{a,E}`.
    pub tm_ae: f64,
    /// `{T, M, P}_{a,E,c̃} = −det(jac)`.
    pub tmp_aec: f64,
    /// `{T, P}_{E,c̃}`.
    pub tp_ec: f64,
    /// `{M, P}_{a,E}`.
    pub mp_ae: f64,
    /// Condition estimate of the Picard–Fuchs solve.
    pub cond: f64,
    /// Relative residual of the Picard–Fuchs solve.
    pub rel_residual: f64,
}

impl ParamJacobian {
    /// Builds the determinants from a Jacobian in `(a, E, c)` orientation.
    pub fn from_matrix(jac: [[f64; 3]; 3], tmp: [f64; 3], cond: f64, rel_residual: f64) -> Self {
        let m = nalgebra::Matrix3::from_fn(|r, c| jac[r][c]);
        ParamJacobian {
            jac,
            tmp,
            t_e: jac[0][1],
            tm_ae: jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0],
            tmp_aec: -m.determinant(),
            tp_ec: -(jac[0][1] * jac[2][2] - jac[0][2] * jac[2][1]),
            mp_ae: jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0],
            cond,
            rel_residual,
        }
    }
}

/// Coefficient index and derivative factor of each parameter `(a, E, c)` in the potential polynomial.
fn parameter_slots(stride: usize) -> [(usize, f64); 3] {
    [(stride, 1.0), (0, 1.0), (2 * stride, -0.5)]
}

/// Assembles the Jacobian from a solved moment table.
///
/// `table.zeta` must reach the indices needed by the extension recurrence.
pub fn jacobian_from_moments(poly: &PotentialPolynomial, table: &mut MomentTable) -> Result<ParamJacobian> {
    let var = poly.variable;
    let s = var.stride();
    let n = poly.degree();
    let sys = build_system(poly, &table.zeta)?;
    let sol = solve_moments(&sys, COND_MAX)?;
    let mut i = sol.i_moments;
    let top = var.moment_index(2) + 2 * s;
    extend_moments(poly, &table.zeta, &mut i, top.max(2 * n - 2))?;
    table.i_moments = i;
    let slots = parameter_slots(s);
    let mut jac = [[0.0; 3]; 3];
    for (q, row) in jac.iter_mut().enumerate() {
        let e = var.moment_index(q);
        for (col, &(j, factor)) in slots.iter().enumerate() {
            row[col] = table.scale * factor * (-0.5) * table.i_moments[e + j];
        }
    }
    Ok(ParamJacobian::from_matrix(jac, table.tmp()?, sol.cond, sol.rel_residual))
}

/// Number of regular moments needed for the full Jacobian of a wave.
pub fn zeta_count_needed(poly: &PotentialPolynomial) -> usize {
    let var = poly.variable;
    let n = poly.degree();
    let top = var.moment_index(2) + 2 * var.stride();
    // I_{idx} with idx > 2n − 2 needs ζ_{idx−n}.
    let ext = if top > 2 * n - 2 { top - n } else { 0 };
    ext.max(n - 2).max(var.moment_index(2))
}

/// Parameter Jacobian of `(T, M, P)` for a resolved wave.
pub fn wave_jacobian(wave: &WaveProfile) -> Result<ParamJacobian> {
    let poly = wave.potential();
    let mut table = wave.moment_table(zeta_count_needed(poly))?;
    jacobian_from_moments(poly, &mut table)
}

/// Parameter Jacobian of `(T, M, P)` with respect to `(a, E, c)`.
pub fn param_jacobian(spec: &EquationSpec, params: &WaveParams, opts: &WaveOptions) -> Result<ParamJacobian> {
    wave_jacobian(&WaveProfile::resolve(spec, params, opts)?)
}
