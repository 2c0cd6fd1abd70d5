//! Polynomial and truncated-Laurent algebra.
//!
//! A moment sequence `f_0, f_1, ...` stands for the series `Σ f_l ζ^{-l-1}`.
//! Multiplying it by a polynomial `p` splits into a polynomial part
//! ([`polynomial_part`]) and a Laurent tail whose leading coefficients are
//! returned by [`laurent_product_head`].

mod multi;

pub use multi::{poly_det, GaussPoly, HomogPoly, MonoPoly};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::harmonics::HarmonicsError;

/// Coefficients below this fraction of the largest one are treated as zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("insufficient moments: need {needed}, have {got}")]
    InsufficientMoments { needed: usize, got: usize },
    #[error("eigenvalue iteration did not converge")]
    Nonconvergence,
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("polynomial has non-real coefficients")]
    ComplexCoefficients,
    #[error("point has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("term (t = {t}, k = {k}) does not have degree {degree}")]
    NotHomogeneous { degree: usize, t: usize, k: usize },
    #[error("singular linear system")]
    Singular,
    #[error(transparent)]
    Harmonics(#[from] HarmonicsError),
}

/// Dense univariate polynomial with complex coefficients; `coeffs[j]` is the
/// coefficient of ζ^j. Trailing coefficients are always trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Complex64>,
}

impl UniPoly {
    /// Builds a polynomial, trimming coefficients below
    /// `ZERO_THRESHOLD · max|c|`.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let biggest = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        Self::with_reference(coeffs, biggest)
    }

    /// Builds a polynomial, treating coefficients below
    /// `ZERO_THRESHOLD · reference` as zero.
    pub fn with_reference(mut coeffs: Vec<Complex64>, reference: f64) -> Self {
        let cut = ZERO_THRESHOLD * reference;
        while coeffs.last().is_some_and(|c| c.norm() <= cut) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|c| Complex64::new(*c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.eval(Complex64::new(x, 0.0)).re
    }

    pub fn derivative(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().enumerate().skip(1).map(|(j, c)| c * j as f64).collect(),
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    /// Euclidean division; returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly), PolyError> {
        let Some(dd) = divisor.degree() else {
            return Err(PolyError::ZeroPolynomial);
        };
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((UniPoly::zero(), self.clone()));
        }
        let mut quot = vec![Complex64::new(0.0, 0.0); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let q = rem[i + dd] / lead;
            quot[i] = q;
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= q * c;
            }
        }
        rem.truncate(dd);
        Ok((UniPoly { coeffs: quot }, UniPoly { coeffs: rem }))
    }

    /// Real parts of the coefficients, provided every imaginary part is
    /// negligible.
    pub fn real_coeffs(&self) -> Result<Vec<f64>, PolyError> {
        let biggest = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if self.coeffs.iter().any(|c| c.im.abs() > ZERO_THRESHOLD * biggest) {
            return Err(PolyError::ComplexCoefficients);
        }
        Ok(self.coeffs.iter().map(|c| c.re).collect())
    }
}

/// Real moment sequence `f_0, ..., f_L` with its cached magnitude scale.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeq {
    values: Vec<f64>,
    scale: f64,
}

impl MomentSeq {
    pub fn new(values: Vec<f64>) -> Self {
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        MomentSeq { values, scale }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest absolute moment.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub(crate) fn require(&self, needed: usize) -> Result<(), PolyError> {
        if self.values.len() < needed {
            Err(PolyError::InsufficientMoments { needed, got: self.values.len() })
        } else {
            Ok(())
        }
    }

    /// `n × n` Hankel matrix `(f_{i+j})`.
    pub fn hankel_matrix(&self, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| self.values[i + j])
    }
}

/// Coefficients of ζ^{-1}, ..., ζ^{-count} in `p(ζ) · Σ f_l ζ^{-l-1}`.
pub fn laurent_product_head(p: &UniPoly, f: &MomentSeq, count: usize) -> Result<Vec<Complex64>, PolyError> {
    let deg = p.degree().unwrap_or(0);
    f.require(deg + count)?;
    let fv = f.values();
    Ok((0..count)
        .map(|i| p.coeffs().iter().enumerate().map(|(j, c)| c * fv[i + j]).sum())
        .collect())
}

/// Polynomial part of `p(ζ) · Σ f_l ζ^{-l-1}`; its degree is below `deg p`.
pub fn polynomial_part(p: &UniPoly, f: &MomentSeq) -> Result<UniPoly, PolyError> {
    let Some(n) = p.degree() else {
        return Ok(UniPoly::zero());
    };
    f.require(n)?;
    let fv = f.values();
    let coeffs: Vec<Complex64> = (0..n)
        .map(|k| (0..n - k).map(|l| p.coeff(k + 1 + l) * fv[l]).sum())
        .collect();
    // Zero-threshold relative to the natural size of the products.
    let reference = p.coeffs().iter().fold(0.0f64, |m, c| m.max(c.norm())) * f.scale();
    Ok(UniPoly::with_reference(coeffs, reference))
}

/// Hankel determinant `H_n = det(f_{i+j})_{i,j<n}` by LU with partial
/// pivoting; `H_0 = 1`.
pub fn hankel_det(f: &MomentSeq, n: usize) -> Result<f64, PolyError> {
    if n == 0 {
        return Ok(1.0);
    }
    f.require(2 * n - 1)?;
    Ok(f.hankel_matrix(n).lu().determinant())
}

/// Determinant by cofactor expansion along the first row. Exponential cost;
/// kept as an independent reference for the LU route.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    match n {
        0 => 1.0,
        1 => m[0][0],
        _ => (0..n)
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect())
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * cofactor_det(&minor)
            })
            .sum(),
    }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>, PolyError> {
    let rhs = DVector::from_column_slice(b);
    a.lu().solve(&rhs).map(|x| x.iter().copied().collect()).ok_or(PolyError::Singular)
}

/// Real roots of a real polynomial inside an open interval, with the complex
/// roots found in the disc of radius `hi` reported separately.
#[derive(Debug, Clone, PartialEq)]
pub struct RootReport {
    pub roots: Vec<f64>,
    pub complex_in_disc: Vec<Complex64>,
}

/// Diagonal similarity balancing (Parlett–Reinsch, radix 2).
fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let g = r / radix;
            while cc < g {
                f *= radix;
                cc *= radix * radix;
            }
            let g = r * radix;
            while cc > g {
                f /= radix;
                cc /= radix * radix;
            }
            if (c * f + r / f) < 0.95 * s && f != 1.0 {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Real roots of `p` in the open interval `(lo, hi)`, ascending.
///
/// Eigenvalues of the balanced companion matrix, imaginary parts below
/// tolerance flattened to zero, then one Newton step on each real root.
pub fn real_roots(p: &UniPoly, interval: (f64, f64)) -> Result<RootReport, PolyError> {
    let coeffs = p.real_coeffs()?;
    let Some(n) = p.degree() else {
        return Err(PolyError::ZeroPolynomial);
    };
    let (lo, hi) = interval;
    let mut candidates: Vec<Complex64> = Vec::new();
    if n == 1 {
        candidates.push(Complex64::new(-coeffs[0] / coeffs[1], 0.0));
    } else if n > 1 {
        let lead = coeffs[n];
        let mut comp = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            comp[(0, j)] = -coeffs[n - 1 - j] / lead;
        }
        for i in 1..n {
            comp[(i, i - 1)] = 1.0;
        }
        balance(&mut comp);
        let schur = nalgebra::linalg::Schur::try_new(comp, f64::EPSILON, 10_000).ok_or(PolyError::Nonconvergence)?;
        candidates.extend(schur.complex_eigenvalues().iter().copied());
    }
    let deriv = p.derivative();
    let mut roots = Vec::new();
    let mut complex_in_disc = Vec::new();
    for z in candidates {
        if z.im.abs() <= 1e-10 * z.norm().max(1.0) {
            let mut x = z.re;
            let (fx, dfx) = (p.eval_real(x), deriv.eval_real(x));
            if dfx != 0.0 {
                let polished = x - fx / dfx;
                if p.eval_real(polished).abs() <= fx.abs() {
                    x = polished;
                }
            }
            if x > lo && x < hi {
                roots.push(x);
            }
        } else if z.norm() < hi.abs().max(lo.abs()) {
            complex_in_disc.push(z);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("roots are finite"));
    Ok(RootReport { roots, complex_in_disc })
}
