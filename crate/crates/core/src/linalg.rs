//! Small dense linear-algebra helpers built on `nalgebra`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Solution of a checked linear solve together with its diagnostics.
#[derive(Debug, Clone)]
pub struct CheckedSolve {
    /// Solution vector.
    pub x: DVector<f64>,
    /// 1-norm condition estimate `‖A‖₁‖A⁻¹‖₁`.
    pub cond: f64,
    /// Relative residual `‖Ax − b‖ / ‖b‖`.
    pub rel_residual: f64,
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `A x = b` by LU with partial pivoting.
///
/// Reports `SingularSystem` when the factorization has a zero pivot and
/// `IllConditioned` when the 1-norm condition estimate exceeds `cond_max`.
pub fn solve_checked(a: &DMatrix<f64>, b: &DVector<f64>, cond_max: f64) -> Result<CheckedSolve> {
    let lu = a.clone().lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::SingularSystem("zero pivot in LU factorization".into()))?;
    let cond = one_norm(a) * one_norm(&inv);
    if !cond.is_finite() {
        return Err(Error::SingularSystem("infinite condition estimate".into()));
    }
    if cond > cond_max {
        return Err(Error::IllConditioned { cond, cond_max });
    }
    let x = a
        .clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::SingularSystem("LU solve failed".into()))?;
    let bnorm = b.norm();
    let rel_residual = if bnorm > 0.0 {
        (a * &x - b).norm() / bnorm
    } else {
        (a * &x - b).norm()
    };
    Ok(CheckedSolve {
        x,
        cond,
        rel_residual,
    })
}

/// Iteration budget per matrix dimension for the Schur decomposition.
const SCHUR_ITERS_PER_DIM: usize = 200;

/// Fixed orthogonal matrix `I − 2vvᵀ/|v|²` used to perturb the Hessenberg
/// structure when the unshifted Schur iteration stagnates.
fn reflector(n: usize) -> DMatrix<f64> {
    let v: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * i as f64 + 0.011 * (i * i) as f64).collect();
    let nv: f64 = v.iter().map(|x| x * x).sum();
    DMatrix::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 } - 2.0 * v[r] * v[c] / nv)
}

/// Eigenvalues of a real square matrix (real Schur form), in no particular order.
///
/// If the iteration does not converge within its budget, the matrix is
/// replaced by an orthogonally similar one and the decomposition retried.
pub fn real_eigenvalues(a: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let n = a.nrows();
    let budget = SCHUR_ITERS_PER_DIM * n.max(1);
    if let Some(s) = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, budget) {
        return s.complex_eigenvalues().iter().copied().collect();
    }
    let q = reflector(n);
    let b = &q * a * &q;
    match nalgebra::linalg::Schur::try_new(b, f64::EPSILON, 4 * budget) {
        Some(s) => s.complex_eigenvalues().iter().copied().collect(),
        None => a.complex_eigenvalues().iter().copied().collect(),
    }
}
