//! Small-amplitude modulational stability for nonlocal equations
//! `u_t + (𝓜u)_x + (u²)_x = 0`, where `𝓜` has the even Fourier symbol `m`.
//!
//! In the co-moving `2π`-periodic frame `z = k(x − ct)` a wave `w` solves
//! `𝓜_k w − c w + w² = (1 − c)² b`, where `𝓜_k` has symbol `m(k·n)`.
//! Near the origin the Bloch operators, projected on the three-dimensional
//! generalized kernel, are represented by a `3 × 3` matrix `M_ξ(k, A)`. Its
//! characteristic polynomial has real coefficients after the substitution
//! `λ = −iξX`, and the discriminant of that cubic in `X` decides stability.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Resonance tolerance for the denominators `m(k) − m(2k)` and `m(k) − 1`.
pub const TOL_RES: f64 = 1e-8;

/// Below this argument the removable singularities use power series.
const SERIES_CUTOFF: f64 = 0.02;

/// Fourier symbol of the dispersive operator, normalized so that `m(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum DispersionSymbol {
    /// `m(k) = √(tanh k / k)`.
    Whitham,
    /// `m(k) = 1 − |k|^α`.
    FractionalKdV { alpha: f64 },
    /// `m(k) = 1 + 1/H − k·coth(kH)`.
    Ilw { depth: f64 },
    /// `m(k) = 1 − |k|`.
    BenjaminOno,
    /// Even polynomial `m(k) = Σ_j c_j k^{2j}`.
    Custom { even_coeffs: Vec<f64> },
}

/// `tanh(k)/k` and its first two derivatives.
fn tanh_ratio(k: f64) -> (f64, f64, f64) {
    if k.abs() < SERIES_CUTOFF {
        // Taylor coefficients of tanh(k)/k in powers of k².
        const C: [f64; 6] = [1.0, -1.0 / 3.0, 2.0 / 15.0, -17.0 / 315.0, 62.0 / 2835.0, -1382.0 / 155_925.0];
        let k2 = k * k;
        let (mut g, mut g1, mut g2) = (0.0, 0.0, 0.0);
        for c in C.iter().rev() {
            g = g * k2 + c;
        }
        for (j, c) in C.iter().enumerate().skip(1).rev() {
            let e = 2 * j;
            g1 += c * e as f64 * k.powi(e as i32 - 1);
            g2 += c * (e * (e - 1)) as f64 * k.powi(e as i32 - 2);
        }
        (g, g1, g2)
    } else {
        let t = k.tanh();
        let s = 1.0 - t * t;
        let g = t / k;
        let g1 = s / k - t / (k * k);
        let g2 = -2.0 * t * s / k - 2.0 * s / (k * k) + 2.0 * t / k.powi(3);
        (g, g1, g2)
    }
}

/// `z·coth(z)` and its first two derivatives in `z`.
fn zcoth(z: f64) -> (f64, f64, f64) {
    if z.abs() < SERIES_CUTOFF {
        const C: [f64; 5] = [1.0, 1.0 / 3.0, -1.0 / 45.0, 2.0 / 945.0, -1.0 / 4725.0];
        let z2 = z * z;
        let mut g = 0.0;
        for c in C.iter().rev() {
            g = g * z2 + c;
        }
        let (mut g1, mut g2) = (0.0, 0.0);
        for (j, c) in C.iter().enumerate().skip(1) {
            let e = 2 * j;
            g1 += c * e as f64 * z.powi(e as i32 - 1);
            g2 += c * (e * (e - 1)) as f64 * z.powi(e as i32 - 2);
        }
        (g, g1, g2)
    } else {
        let ct = 1.0 / z.tanh();
        let cs2 = ct * ct - 1.0;
        (z * ct, ct - z * cs2, 2.0 * cs2 * (z * ct - 1.0))
    }
}

impl DispersionSymbol {
    /// Checks the symbol's own parameters.
    pub fn validate(&self) -> Result<()> {
        match self {
            DispersionSymbol::FractionalKdV { alpha } if !(*alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::SymbolDomain(format!("fractional order α = {alpha} must be positive")))
            }
            DispersionSymbol::Ilw { depth } if !(*depth > 0.0 && depth.is_finite()) => {
                Err(Error::SymbolDomain(format!("depth H = {depth} must be positive")))
            }
            DispersionSymbol::Custom { even_coeffs } if even_coeffs.first() != Some(&1.0) => {
                Err(Error::SymbolDomain("custom symbol must satisfy m(0) = 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// `(m(k), m'(k), m''(k))`.
    pub fn eval_with_derivatives(&self, k: f64) -> Result<(f64, f64, f64)> {
        self.validate()?;
        if !k.is_finite() {
            return Err(Error::SymbolDomain(format!("non-finite wave number {k}")));
        }
        let sgn = if k < 0.0 { -1.0 } else { 1.0 };
        let ka = k.abs();
        let (m, m1, m2) = match self {
            DispersionSymbol::Whitham => {
                let (g, g1, g2) = tanh_ratio(ka);
                let m = g.sqrt();
                (m, g1 / (2.0 * m), g2 / (2.0 * m) - g1 * g1 / (4.0 * m * m * m))
            }
            DispersionSymbol::FractionalKdV { alpha } => {
                let a = *alpha;
                if ka == 0.0 && a < 2.0 {
                    if a <= 1.0 {
                        return Err(Error::SymbolDomain(format!("|k|^{a} is not differentiable at k = 0")));
                    }
                    return Err(Error::SymbolDomain(format!("|k|^{a} has no second derivative at k = 0")));
                }
                (1.0 - ka.powf(a), -a * ka.powf(a - 1.0), -a * (a - 1.0) * ka.powf(a - 2.0))
            }
            DispersionSymbol::Ilw { depth } => {
                let h = *depth;
                let (g, g1, g2) = zcoth(ka * h);
                (1.0 + (1.0 - g) / h, -g1, -h * g2)
            }
            DispersionSymbol::BenjaminOno => {
                if ka == 0.0 {
                    return Err(Error::SymbolDomain("|k| is not differentiable at k = 0".into()));
                }
                (1.0 - ka, -1.0, 0.0)
            }
            DispersionSymbol::Custom { even_coeffs } => {
                let (mut m, mut m1, mut m2) = (0.0, 0.0, 0.0);
                for (j, c) in even_coeffs.iter().enumerate() {
                    let e = 2 * j as i32;
                    m += c * ka.powi(e);
                    if e >= 1 {
                        m1 += c * e as f64 * ka.powi(e - 1);
                    }
                    if e >= 2 {
                        m2 += c * (e * (e - 1)) as f64 * ka.powi(e - 2);
                    }
                }
                (m, m1, m2)
            }
        };
        Ok((m, sgn * m1, m2))
    }

    /// `m(k)`, defined for every real `k` and even.
    pub fn m(&self, k: f64) -> Result<f64> {
        self.validate()?;
        if !k.is_finite() {
            return Err(Error::SymbolDomain(format!("non-finite wave number {k}")));
        }
        let ka = k.abs();
        Ok(match self {
            DispersionSymbol::FractionalKdV { alpha } => 1.0 - ka.powf(*alpha),
            DispersionSymbol::BenjaminOno => 1.0 - ka,
            _ => self.eval_with_derivatives(ka)?.0,
        })
    }

    /// `m'(k)`.
    pub fn m_prime(&self, k: f64) -> Result<f64> {
        Ok(self.eval_with_derivatives(k)?.1)
    }

    /// `m''(k)`.
    pub fn m_second(&self, k: f64) -> Result<f64> {
        Ok(self.eval_with_derivatives(k)?.2)
    }
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::SymbolDomain(format!("wave number k = {k} must be positive")))
    }
}

/// `ω_{n,ξ}(k) = (n + ξ)(m(k) − m(k(n + ξ)))`.
pub fn omega(n: i64, xi: f64, k: f64, sym: &DispersionSymbol) -> Result<f64> {
    check_k(k)?;
    let q = n as f64 + xi;
    Ok(q * (sym.m(k)? - sym.m(k * q)?))
}

/// Symbol values at `k` and `2k` with the resonance checks.
fn nonresonant(k: f64, sym: &DispersionSymbol) -> Result<(f64, f64)> {
    check_k(k)?;
    let m1 = sym.m(k)?;
    let m2 = sym.m(2.0 * k)?;
    if (m1 - m2).abs() < TOL_RES {
        return Err(Error::Resonance(format!("m(k) − m(2k) = {:.3e} at k = {k}", m1 - m2)));
    }
    if (m1 - 1.0).abs() < TOL_RES {
        return Err(Error::Resonance(format!("m(k) − 1 = {:.3e} at k = {k}", m1 - 1.0)));
    }
    Ok((m1, m2))
}

/// Truncated Stokes expansion of a small-amplitude wave.
///
/// `w(z) = w₀ + A cos z + A²(h₀ + h₂ cos 2z)` and `c = c₀ + c₂A²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesWave {
    pub k: f64,
    pub amplitude: f64,
    pub b: f64,
    pub w0: f64,
    pub c0: f64,
    /// Mean correction `½/(m(k) − 1)`.
    pub h0: f64,
    /// Second-harmonic coefficient `½/(m(k) − m(2k))`.
    pub h2: f64,
    /// Speed correction `1/(m(k) − 1) + 1/(2(m(k) − m(2k)))`.
    pub c2: f64,
}

impl StokesWave {
    /// Wave speed.
    pub fn speed(&self) -> f64 {
        self.c0 + self.c2 * self.amplitude * self.amplitude
    }

    /// Profile value at `z`.
    pub fn eval(&self, z: f64) -> f64 {
        let a = self.amplitude;
        self.w0 + a * z.cos() + a * a * (self.h0 + self.h2 * (2.0 * z).cos())
    }
}

/// Stokes expansion through `A²` and `b²`.
///
/// The constant state is `w₀ = b(1 − m) − 3b²(1 − m)`, the unique expansion
/// compatible with `c₀ = m + 2b(1 − m) − 6b²(1 − m)` and the bifurcation
/// condition `c₀ = m(k) + 2w₀`.
pub fn stokes_expand(k: f64, amplitude: f64, b: f64, sym: &DispersionSymbol) -> Result<StokesWave> {
    let (m1, m2) = nonresonant(k, sym)?;
    let mb = 1.0 - m1;
    Ok(StokesWave {
        k,
        amplitude,
        b,
        w0: b * mb - 3.0 * b * b * mb,
        c0: m1 + 2.0 * b * mb - 6.0 * b * b * mb,
        h0: 0.5 / (m1 - 1.0),
        h2: 0.5 / (m1 - m2),
        c2: 1.0 / (m1 - 1.0) + 0.5 / (m1 - m2),
    })
}

/// Which `ξ`-dependence to use in the projected Bloch matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MatrixVariant {
    /// Exact `ω_{n,ξ}` in the `A`-independent block.
    #[default]
    Exact,
    /// `A`-independent block expanded through `ξ²`.
    Truncated,
}

/// Complex `3 × 3` matrix stored by rows.
pub type Mat3c = [[Complex<f64>; 3]; 3];

/// Projected Bloch matrix `M_ξ(k, A)` through `O(ξ², ξA)` in the `A`-dependent part.
///
/// The basis is `(cos z, sin z, 1)` corrected to the wave. The
/// `A`-dependent part couples the constant mode to the first harmonic: the
/// entry `2A` at row 2, column 3, and the block
/// `−iξA·s·[[0,0,2],[0,0,0],[1,0,0]]` with `s = 1 + (m − 1)/(2(m − m(2k)))`.
pub fn mxi_matrix(k: f64, amplitude: f64, xi: f64, sym: &DispersionSymbol, variant: MatrixVariant) -> Result<Mat3c> {
    let (m1, m2) = nonresonant(k, sym)?;
    let z = Complex::new(0.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    let mut out = [[z; 3]; 3];
    match variant {
        MatrixVariant::Exact => {
            let w1 = omega(1, xi, k, sym)?;
            let wm = omega(-1, xi, k, sym)?;
            let w0 = omega(0, xi, k, sym)?;
            let sum = 0.5 * (w1 + wm);
            let dif = 0.5 * (w1 - wm);
            out[0][0] = i * sum;
            out[1][1] = i * sum;
            out[0][1] = Complex::new(dif, 0.0);
            out[1][0] = Complex::new(-dif, 0.0);
            out[2][2] = i * w0;
        }
        MatrixVariant::Truncated => {
            let (_, mp, mpp) = sym.eval_with_derivatives(k)?;
            let q = k * mp + 0.5 * k * k * mpp;
            out[0][0] = i * xi * (-k * mp);
            out[1][1] = i * xi * (-k * mp);
            out[2][2] = i * xi * (m1 - 1.0);
            out[0][1] = Complex::new(-xi * xi * q, 0.0);
            out[1][0] = Complex::new(xi * xi * q, 0.0);
        }
    }
    out[1][2] += Complex::new(2.0 * amplitude, 0.0);
    let s = 1.0 + (m1 - 1.0) / (2.0 * (m1 - m2));
    let coupling = -i * xi * amplitude * s;
    out[0][2] += coupling * 2.0;
    out[2][0] += coupling;
    Ok(out)
}

/// Gram matrix of the corrected basis: `I − (A/(m − m(2k)))·[[0,0,1],[0,0,0],[½,0,0]]`.
pub fn identity_proj(k: f64, amplitude: f64, sym: &DispersionSymbol) -> Result<[[f64; 3]; 3]> {
    let (m1, m2) = nonresonant(k, sym)?;
    let g = amplitude / (m1 - m2);
    Ok([[1.0, 0.0, -g], [0.0, 1.0, 0.0], [-0.5 * g, 0.0, 1.0]])
}

type CPoly = Vec<Complex<f64>>;

fn cpoly_mul(a: &CPoly, b: &CPoly) -> CPoly {
    let mut out = vec![Complex::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn cpoly_add(a: &mut CPoly, b: &CPoly, sign: f64) {
    if a.len() < b.len() {
        a.resize(b.len(), Complex::new(0.0, 0.0));
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y * sign;
    }
}

/// Ascending coefficients of `det(M − λB)`.
pub fn characteristic_coefficients(m: &Mat3c, b: &[[f64; 3]; 3]) -> [Complex<f64>; 4] {
    let entry = |r: usize, c: usize| -> CPoly { vec![m[r][c], Complex::new(-b[r][c], 0.0)] };
    let perms: [([usize; 3], f64); 6] = [
        ([0, 1, 2], 1.0),
        ([0, 2, 1], -1.0),
        ([1, 0, 2], -1.0),
        ([1, 2, 0], 1.0),
        ([2, 0, 1], 1.0),
        ([2, 1, 0], -1.0),
    ];
    let mut det: CPoly = vec![Complex::new(0.0, 0.0); 4];
    for (p, s) in perms {
        let term = cpoly_mul(&cpoly_mul(&entry(0, p[0]), &entry(1, p[1])), &entry(2, p[2]));
        cpoly_add(&mut det, &term, s);
    }
    [det[0], det[1], det[2], det[3]]
}

/// Real coefficients `d_j` of the cubic in `X` after `λ = −iξX`, with `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    /// `d_0..d_3`, where `det(M − λB) = c₃λ³ + ic₂λ² + c₁λ + ic₀` and `d_j = c_j/ξ^{3−j}`.
    /// At `λ = −iξX` the determinant is `iξ³(d₀ − d₁X − d₂X² + d₃X³)`.
    pub d: [f64; 4],
    /// `18d₃d₂d₁d₀ + d₂²d₁² + 4d₂³d₀ + 4d₃d₁³ − 27d₃²d₀²`.
    pub delta: f64,
}

/// Double-double number `hi + lo` with `|lo| ≤ ulp(hi)/2`.
///
/// Near `ξ = 0` two roots of the projected cubic approach each other like
/// `ξ²`, so its discriminant is a small difference of `O(1)` terms. Forming
/// the coefficients and the discriminant in double-double arithmetic keeps
/// the relative error near `ε/ξ` instead of `ε/ξ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn renorm(s: f64, e: f64) -> Dd {
        let hi = s + e;
        Dd { hi, lo: e - (hi - s) }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (o.hi - bb);
        Dd::renorm(s, err + self.lo + o.lo)
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        Dd::renorm(p, e)
    }

    fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let r = self.sub(Dd::from(q1).mul(Dd::from(b)));
        Dd::renorm(q1, r.value() / b)
    }

    fn scale(self, k: f64) -> Dd {
        self.mul(Dd::from(k))
    }
}

/// Complex double-double.
#[derive(Debug, Clone, Copy)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    const ZERO: Cdd = Cdd { re: Dd::ZERO, im: Dd::ZERO };

    fn new(re: f64, im: f64) -> Cdd {
        Cdd { re: Dd::from(re), im: Dd::from(im) }
    }

    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn scale(self, k: f64) -> Cdd {
        Cdd { re: self.re.scale(k), im: self.im.scale(k) }
    }
}

fn cdd_poly_mul(a: &[Cdd], b: &[Cdd]) -> Vec<Cdd> {
    let mut out = vec![Cdd::ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(x.mul(*y));
        }
    }
    out
}

/// Ascending coefficients of `det(M − iμB)` in double-double arithmetic.
fn characteristic_in_mu(m: &Mat3c, b: &[[f64; 3]; 3]) -> [Cdd; 4] {
    let entry = |r: usize, c: usize| -> [Cdd; 2] { [Cdd::new(m[r][c].re, m[r][c].im), Cdd::new(0.0, -b[r][c])] };
    let perms: [([usize; 3], f64); 6] = [
        ([0, 1, 2], 1.0),
        ([0, 2, 1], -1.0),
        ([1, 0, 2], -1.0),
        ([1, 2, 0], 1.0),
        ([2, 0, 1], 1.0),
        ([2, 1, 0], -1.0),
    ];
    let mut det = [Cdd::ZERO; 4];
    for (p, s) in perms {
        let term = cdd_poly_mul(&cdd_poly_mul(&entry(0, p[0]), &entry(1, p[1])), &entry(2, p[2]));
        for (d, t) in det.iter_mut().zip(term) {
            *d = d.add(t.scale(s));
        }
    }
    det
}

/// Discriminant `Δ_{ξ,k,A}` of the projected characteristic polynomial.
///
/// Fails with `ParityViolation` if the coefficients miss their real/imaginary
/// structure by more than `1e−10` relative.
pub fn delta_discriminant(k: f64, amplitude: f64, xi: f64, sym: &DispersionSymbol, variant: MatrixVariant) -> Result<DeltaReport> {
    if xi == 0.0 || !xi.is_finite() {
        return Err(Error::InvalidInput("ξ must be a nonzero finite Bloch frequency".into()));
    }
    let m = mxi_matrix(k, amplitude, xi, sym, variant)?;
    let b = identity_proj(k, amplitude, sym)?;
    // With λ = iμ, det(M − λB) = c₃λ³ + ic₂λ² + c₁λ + ic₀ = i(c₀ + c₁μ − c₂μ² − c₃μ³).
    let p = characteristic_in_mu(&m, &b);
    let scale = p.iter().map(|z| z.re.value().hypot(z.im.value())).fold(0.0, f64::max);
    if let Some(v) = p.iter().map(|z| z.re.value()).find(|v| v.abs() > 1e-10 * scale) {
        return Err(Error::ParityViolation(format!("coefficient part {v:.3e} should vanish (scale {scale:.3e})")));
    }
    let c = [p[0].im, p[1].im, p[2].im.neg(), p[3].im.neg()];
    let d = [c[0].div_f64(xi).div_f64(xi).div_f64(xi), c[1].div_f64(xi).div_f64(xi), c[2].div_f64(xi), c[3]];
    let [d0, d1, d2, d3] = d;
    let delta = d3
        .mul(d2)
        .mul(d1)
        .mul(d0)
        .scale(18.0)
        .add(d2.mul(d2).mul(d1).mul(d1))
        .add(d2.mul(d2).mul(d2).mul(d0).scale(4.0))
        .add(d3.mul(d1).mul(d1).mul(d1).scale(4.0))
        .sub(d3.mul(d3).mul(d0).mul(d0).scale(27.0));
    Ok(DeltaReport { d: d.map(Dd::value), delta: delta.value() })
}

/// The closed product `[(ω₀ − ω₁)(ω₀ − ω₋₁)(ω₁ − ω₋₁)]²/ξ⁶` for `A = 0`.
pub fn delta_product_formula(k: f64, xi: f64, sym: &DispersionSymbol) -> Result<f64> {
    let w1 = omega(1, xi, k, sym)?;
    let wm = omega(-1, xi, k, sym)?;
    let w0 = omega(0, xi, k, sym)?;
    Ok(((w0 - w1) * (w0 - wm) * (w1 - wm)).powi(2) / xi.powi(6))
}

/// Small-amplitude index `Λ(k)` and its sign-determining factor `Γ(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaIndex {
    pub lambda: f64,
    pub gamma: f64,
}

/// `Λ(k) = 2k·G₁³·G₂·Γ(k)/(m(k) − m(2k))` with `Γ(k) = 2(m(k) − m(2k)) + G₁`,
/// where `G₁ = (k(m − 1))'` and `G₂ = (k(m − 1))''`.
///
/// `Λ` is the coefficient of `A²` in `Δ_{ξ,k,A}` as `ξ → 0`; positive means
/// stable small-amplitude waves.
pub fn lambda_index(k: f64, sym: &DispersionSymbol) -> Result<LambdaIndex> {
    let (m1, m2) = nonresonant(k, sym)?;
    let (_, mp, mpp) = sym.eval_with_derivatives(k)?;
    let g1 = m1 - 1.0 + k * mp;
    let g2 = 2.0 * mp + k * mpp;
    let gamma = 2.0 * (m1 - m2) + g1;
    Ok(LambdaIndex { lambda: 2.0 * k * g1.powi(3) * g2 * gamma / (m1 - m2), gamma })
}

/// `Γ(k)` alone.
pub fn gamma(k: f64, sym: &DispersionSymbol) -> Result<f64> {
    Ok(lambda_index(k, sym)?.gamma)
}

/// Root of `Γ` in `[lo, hi]` by bisection, with the final bracket.
pub fn gamma_root(sym: &DispersionSymbol, lo: f64, hi: f64, tol: f64) -> Result<(f64, (f64, f64))> {
    let (mut a, mut b) = (lo, hi);
    let (mut ga, gb) = (gamma(a, sym)?, gamma(b, sym)?);
    if ga.signum() == gb.signum() {
        return Err(Error::InvalidInput(format!("Γ does not change sign on [{lo}, {hi}]")));
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let gm = gamma(mid, sym)?;
        if gm == 0.0 {
            return Ok((mid, (mid, mid)));
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Ok((0.5 * (a + b), (a, b)))
}

/// Critical wave number `k*` of the Whitham equation, the unique root of `Γ` in `[0.5, 3]`.
pub fn whitham_k_star() -> Result<(f64, (f64, f64))> {
    gamma_root(&DispersionSymbol::Whitham, 0.5, 3.0, 1e-12)
}

/// `Λ_fKdV(k; α) = 2k^{4α}·α(1 + α)⁴(2^{α+1} − 3 − α)/(2^α − 1)`.
pub fn lambda_fkdv(k: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.5) {
        return Err(Error::Domain(format!("α = {alpha} must exceed 1/2")));
    }
    check_k(k)?;
    Ok(2.0 * k.powf(4.0 * alpha) * alpha * (1.0 + alpha).powi(4) * (2f64.powf(alpha + 1.0) - 3.0 - alpha)
        / (2f64.powf(alpha) - 1.0))
}

/// `Γ_ILW(z) = 1 − 2z² − cosh 2z + 2z sinh 2z`.
///
/// Evaluated from its series `Σ_{j≥2} (2j − 1)(2z)^{2j}/(2j)!` for `z < 1`,
/// which avoids cancellation near zero.
pub fn gamma_ilw(z: f64) -> f64 {
    if z.abs() < 1.0 {
        let w2 = 4.0 * z * z;
        let mut term = 0.5 * w2; // w^{2j}/(2j)! at j = 1
        let mut sum = 0.0;
        for j in 2..40 {
            let jj = j as f64;
            term *= w2 / ((2.0 * jj - 1.0) * 2.0 * jj);
            sum += (2.0 * jj - 1.0) * term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum
    } else {
        1.0 - 2.0 * z * z - (2.0 * z).cosh() + 2.0 * z * (2.0 * z).sinh()
    }
}

/// `Δ_ILW(k, H) = [(4z² − 1)cosh z + cosh 3z − 8z sinh z]²/(32H⁴ sinh¹² z)·Γ_ILW(z)`, `z = kH`.
pub fn delta_ilw(k: f64, depth: f64) -> Result<f64> {
    check_k(k)?;
    if !(depth > 0.0) {
        return Err(Error::SymbolDomain(format!("depth H = {depth} must be positive")));
    }
    let z = k * depth;
    let s6 = z.sinh().powi(6);
    let num = ((4.0 * z * z - 1.0) * z.cosh() + (3.0 * z).cosh() - 8.0 * z * z.sinh()) / s6;
    Ok(num * num / (32.0 * depth.powi(4)) * gamma_ilw(z))
}

/// `m` evaluated on the Fourier modes `q = k(n + ξ)` of a truncation, for Bloch assembly.
pub fn symbol_on_modes(sym: &DispersionSymbol, k: f64, xi: f64, modes: usize) -> Result<Vec<f64>> {
    let n = modes as i64;
    (-n..=n).map(|j| sym.m(k * (j as f64 + xi))).collect()
}
