//! Dense real polynomials: evaluation, deflation, companion-matrix roots,
//! Sylvester resultants and discriminants.

use nalgebra::{Complex, DMatrix};

/// Real polynomial stored by ascending powers, `c[0] + c[1] x + ... + c[n] x^n`.
///
/// Trailing exact zeros are trimmed on construction so that `degree()` is
/// the true degree. The zero polynomial is represented by an empty vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    c: Vec<f64>,
}

impl Poly {
    /// Builds a polynomial from ascending coefficients.
    pub fn new(mut c: Vec<f64>) -> Self {
        while matches!(c.last(), Some(&v) if v == 0.0) {
            c.pop();
        }
        Poly { c }
    }

    /// Ascending coefficients.
    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// Coefficient of `x^j` (zero beyond the degree).
    pub fn coeff(&self, j: usize) -> f64 {
        self.c.get(j).copied().unwrap_or(0.0)
    }

    /// Degree; the zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn leading(&self) -> f64 {
        self.c.last().copied().unwrap_or(0.0)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    /// Horner evaluation at a complex point.
    pub fn eval_complex(&self, z: Complex<f64>) -> Complex<f64> {
        self.c
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &a)| j as f64 * a)
                .collect(),
        )
    }

    /// Quotient of synthetic division by `(x - r)`; the remainder is discarded.
    pub fn deflate(&self, r: f64) -> Poly {
        let n = self.degree();
        if n == 0 {
            return Poly::new(vec![]);
        }
        let mut q = vec![0.0; n];
        let mut carry = 0.0;
        for j in (1..=n).rev() {
            carry = carry * r + self.c[j];
            q[j - 1] = carry;
        }
        Poly::new(q)
    }

    /// All complex roots, computed as companion-matrix eigenvalues and
    /// polished by a few Newton steps. Sorted by real part, then imaginary part.
    pub fn roots(&self) -> Vec<Complex<f64>> {
        let n = self.degree();
        if n == 0 {
            return vec![];
        }
        let lead = self.leading();
        let mut comp = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            comp[(i, n - 1)] = -self.c[i] / lead;
        }
        let eig = crate::linalg::real_eigenvalues(&comp);
        let dp = self.derivative();
        let mut roots: Vec<Complex<f64>> = eig
            .iter()
            .map(|&z0| {
                let mut z = z0;
                let mut fz = self.eval_complex(z).norm();
                for _ in 0..8 {
                    let d = dp.eval_complex(z);
                    if d.norm() == 0.0 {
                        break;
                    }
                    let cand = z - self.eval_complex(z) / d;
                    let fc = self.eval_complex(cand).norm();
                    if fc < fz {
                        z = cand;
                        fz = fc;
                    } else {
                        break;
                    }
                }
                z
            })
            .collect();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        roots
    }
}

/// Standard Sylvester matrix of `p` (degree n) and `q` (degree m), with
/// coefficients in descending order: m rows of `p` followed by n rows of `q`.
pub fn sylvester(p: &Poly, q: &Poly) -> DMatrix<f64> {
    let n = p.degree();
    let m = q.degree();
    let size = n + m;
    let mut s = DMatrix::<f64>::zeros(size, size);
    for i in 0..m {
        for j in 0..=n {
            s[(i, i + j)] = p.coeff(n - j);
        }
    }
    for i in 0..n {
        for j in 0..=m {
            s[(m + i, i + j)] = q.coeff(m - j);
        }
    }
    s
}

/// Resultant of two polynomials as the determinant of their Sylvester matrix.
pub fn resultant(p: &Poly, q: &Poly) -> f64 {
    sylvester(p, q).determinant()
}

/// Discriminant `(-1)^{n(n-1)/2} Res(p, p') / a_n`.
pub fn discriminant(p: &Poly) -> f64 {
    let n = p.degree();
    if n < 1 {
        return 0.0;
    }
    if n == 1 {
        return 1.0;
    }
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * resultant(p, &p.derivative()) / p.leading()
}
