//! Direction-parametrized Padé pairs, their polynomial lifts and the
//! per-direction Gauss rules.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::markov::{lift_mono, CoefficientTable, DirectionalMoments, MarkovError, MAX_SYMBOLIC_ORDER};
use crate::polyalg::{
    hankel_det, laurent_product_head, lu_solve, poly_det, polynomial_part, real_roots, GaussPoly, MomentSeq, MonoPoly,
    PolyError, UniPoly,
};

/// `n` is normal when `|H_n| > NORMALITY_TOL · scale^n`.
pub const NORMALITY_TOL: f64 = 1e-10;

/// `P̃_n` counts as the zero polynomial when every coefficient is below
/// `DEGENERATE_TOL · scale^n`.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PadeError {
    #[error("degenerate Padé pair of order {n} at θ = {theta:?}: the denominator vanishes identically")]
    Degenerate { n: usize, theta: Vec<f64> },
    #[error("order {n} is not normal at θ = {theta:?} (H_n = {hankel:e})")]
    NotNormal { n: usize, theta: Vec<f64>, hankel: f64 },
    #[error("found {found} simple real roots in (-R, R) at θ = {theta:?}, expected {expected}")]
    RootDefect { theta: Vec<f64>, found: usize, expected: usize },
    #[error("no contour radius found within 2^64 R")]
    NoContourRadius,
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadeMethod {
    Determinant,
    LinearSolve,
}

/// An n-th Padé pair at a fixed direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PadePair {
    pub n: usize,
    pub theta: Vec<f64>,
    /// Denominator, monic when normal.
    pub p: UniPoly,
    /// Polynomial part of `p · Σ f_l ζ^{-l-1}`.
    pub q: UniPoly,
    /// Determinant-normalized denominator `P̃_n` (leading coefficient `H_n`).
    pub p_raw: UniPoly,
    /// Polynomial part belonging to `p_raw`.
    pub q_raw: UniPoly,
    pub hankel: f64,
    pub scale: f64,
    pub normal: bool,
    /// Coefficients of `ζ^{-1}, ..., ζ^{-n}` in `p · Σ f_l ζ^{-l-1} - q`.
    pub remainder_head: Vec<Complex64>,
    pub method: PadeMethod,
}

impl PadePair {
    /// `q(ζ) / p(ζ)`.
    pub fn approximant(&self, zeta: Complex64) -> Complex64 {
        self.q.eval(zeta) / self.p.eval(zeta)
    }
}

/// Coefficients `p_j = (-1)^{n+j} det(f_{i+c})_{i<n, c≠j}` of `P̃_n`.
fn determinant_coefficients(f: &[f64], n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let cols: Vec<usize> = (0..=n).filter(|c| *c != j).collect();
            let minor = DMatrix::from_fn(n, n, |i, c| f[i + cols[c]]);
            let sign = if (n + j) % 2 == 0 { 1.0 } else { -1.0 };
            sign * minor.lu().determinant()
        })
        .collect()
}

fn real_poly(c: &[f64]) -> Vec<Complex64> {
    c.iter().map(|v| Complex64::new(*v, 0.0)).collect()
}

/// Builds the n-th Padé pair of a directional moment sequence.
pub fn pade_pair(dm: &DirectionalMoments, n: usize, method: PadeMethod) -> Result<PadePair, PadeError> {
    if n == 0 {
        return Err(PadeError::ZeroOrder);
    }
    let f = &dm.values;
    if f.len() < 2 * n {
        return Err(PolyError::InsufficientMoments { needed: 2 * n, got: f.len() }.into());
    }
    let scale = f.scale();
    let scale_n = scale.powi(n as i32);
    let hankel = hankel_det(f, n)?;
    let normal = scale > 0.0 && hankel.abs() > NORMALITY_TOL * scale_n;
    let fv = f.values();
    let (p, p_raw) = match method {
        PadeMethod::Determinant => {
            let coeffs = determinant_coefficients(fv, n);
            let biggest = coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if biggest <= DEGENERATE_TOL * scale_n {
                return Err(PadeError::Degenerate { n, theta: dm.theta.clone() });
            }
            let raw = UniPoly::new(real_poly(&coeffs));
            let p = if normal { UniPoly::new(real_poly(&coeffs.iter().map(|c| c / coeffs[n]).collect::<Vec<_>>())) } else { raw.clone() };
            (p, raw)
        }
        PadeMethod::LinearSolve => {
            if !normal {
                return Err(PadeError::NotNormal { n, theta: dm.theta.clone(), hankel });
            }
            let a = f.hankel_matrix(n);
            let rhs: Vec<f64> = (0..n).map(|i| -fv[i + n]).collect();
            let mut c = lu_solve(a, &rhs)?;
            c.push(1.0);
            let p = UniPoly::new(real_poly(&c));
            let raw = UniPoly::new(real_poly(&c.iter().map(|v| v * hankel).collect::<Vec<_>>()));
            (p, raw)
        }
    };
    let q = polynomial_part(&p, f)?;
    let q_raw = polynomial_part(&p_raw, f)?;
    let remainder_head = laurent_product_head(&p, f, n)?;
    Ok(PadePair { n, theta: dm.theta.clone(), p, q, p_raw, q_raw, hankel, scale, normal, remainder_head, method })
}

/// One-dimensional Gauss rule at a direction.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule1D {
    pub theta: Vec<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Set when some weight is not positive.
    pub negative_weight: bool,
}

/// Gauss rule from the zeros of the Padé denominator and the residues of
/// `q/p` there.
pub fn gauss_rule(dm: &DirectionalMoments, n: usize, radius: f64) -> Result<GaussRule1D, PadeError> {
    let pair = pade_pair(dm, n, PadeMethod::LinearSolve)?;
    gauss_rule_from_pair(&pair, radius)
}

pub fn gauss_rule_from_pair(pair: &PadePair, radius: f64) -> Result<GaussRule1D, PadeError> {
    let n = pair.n;
    if !pair.normal {
        return Err(PadeError::NotNormal { n, theta: pair.theta.clone(), hankel: pair.hankel });
    }
    let report = real_roots(&pair.p, (-radius, radius))?;
    let nodes = report.roots;
    let deriv = pair.p.derivative();
    let simple = nodes.windows(2).all(|w| w[1] > w[0]) && nodes.iter().all(|x| deriv.eval_real(*x) != 0.0);
    if nodes.len() != n || !simple {
        return Err(PadeError::RootDefect { theta: pair.theta.clone(), found: nodes.len(), expected: n });
    }
    let weights: Vec<f64> = nodes.iter().map(|x| pair.q.eval_real(*x) / deriv.eval_real(*x)).collect();
    let negative_weight = weights.iter().any(|w| *w <= 0.0);
    Ok(GaussRule1D { theta: pair.theta.clone(), nodes, weights, negative_weight })
}

/// Smallest `R·2^j`, `j ≥ 1`, with `|p_n| R_1^n > Σ_{j<n} |p_j| R_1^j` for
/// every pair.
pub fn choose_r1(pairs: &[PadePair], radius: f64) -> Result<f64, PadeError> {
    for pair in pairs {
        if !pair.normal {
            return Err(PadeError::NotNormal { n: pair.n, theta: pair.theta.clone(), hankel: pair.hankel });
        }
    }
    let mut r1 = radius;
    for _ in 0..64 {
        r1 *= 2.0;
        let ok = pairs.iter().all(|pair| {
            let c = pair.p.coeffs();
            let n = c.len() - 1;
            let lower: f64 = c[..n].iter().enumerate().map(|(j, v)| v.norm() * r1.powi(j as i32)).sum();
            c[n].norm() * r1.powi(n as i32) - lower > 0.0
        });
        if ok {
            return Ok(r1);
        }
    }
    Err(PadeError::NoContourRadius)
}

fn guard(n: usize) -> Result<(), PadeError> {
    if n > MAX_SYMBOLIC_ORDER {
        return Err(MarkovError::ExpansionOverflow { n, max: MAX_SYMBOLIC_ORDER }.into());
    }
    if n == 0 {
        return Err(PadeError::ZeroOrder);
    }
    Ok(())
}

/// Lifted coefficient polynomials `R_j(x) = (-1)^{n+j} det(F_{i+c})_{c≠j}`,
/// homogeneous of degree `n² - j` with `R_j(ζθ) = ζ^{n²-j} p_j(θ)`.
fn lifted_coefficients(table: &CoefficientTable, n: usize) -> Result<(Vec<MonoPoly>, Vec<MonoPoly>), PadeError> {
    let lifts = (0..=2 * n - 1).map(|l| lift_mono(table, l)).collect::<Result<Vec<_>, _>>()?;
    let d = table.d();
    let rs = (0..=n)
        .map(|j| {
            let cols: Vec<usize> = (0..=n).filter(|c| *c != j).collect();
            let m: Vec<Vec<MonoPoly>> = (0..n).map(|i| cols.iter().map(|c| lifts[i + c].clone()).collect()).collect();
            let det = poly_det(&m, d);
            if (n + j) % 2 == 0 {
                det
            } else {
                -&det
            }
        })
        .collect();
    Ok((rs, lifts))
}

/// `A_n` with `A_n(ζθ) = ζ^{n²} P̃_n(ζ, θ)`, of degree `≤ n² + n`, in the
/// `(t, k, m)` basis.
pub fn lift_a(table: &CoefficientTable, n: usize) -> Result<GaussPoly, PadeError> {
    Ok(lift_a_mono(table, n)?.to_gauss())
}

/// `A_n` in the monomial basis.
pub fn lift_a_mono(table: &CoefficientTable, n: usize) -> Result<MonoPoly, PadeError> {
    guard(n)?;
    let (rs, _) = lifted_coefficients(table, n)?;
    let r2 = MonoPoly::radius_squared(table.d());
    let mut out = MonoPoly::zero(table.d());
    for (j, r) in rs.iter().enumerate() {
        out = &out + &(r * &r2.pow(j as u32));
    }
    Ok(out)
}

/// `B_n` with `B_n(ζθ) = ζ^{n²-1} Q̃_n(ζ, θ)`, of degree `≤ n² + n - 2`.
pub fn lift_b(table: &CoefficientTable, n: usize) -> Result<GaussPoly, PadeError> {
    guard(n)?;
    let (rs, lifts) = lifted_coefficients(table, n)?;
    let r2 = MonoPoly::radius_squared(table.d());
    let mut out = MonoPoly::zero(table.d());
    for k in 0..n {
        let rk = r2.pow(k as u32);
        for l in 0..n - k {
            out = &out + &(&(&rk * &lifts[l]) * &rs[k + 1 + l]);
        }
    }
    Ok(out.to_gauss())
}

/// Moment sequence of a discrete measure on the line: `f_l = Σ w x^l`.
pub fn atomic_moments(atoms: &[(f64, f64)], count: usize) -> MomentSeq {
    MomentSeq::new((0..count).map(|l| atoms.iter().map(|(x, w)| w * x.powi(l as i32)).sum()).collect())
}
