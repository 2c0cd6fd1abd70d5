//! Polynomials on ℝ^d in two bases: plain monomials, and the Gauss
//! decomposition basis `|x|^{2t} Y_{k,m}(x)`.
//!
//! Products are formed in the monomial basis; [`MonoPoly::to_gauss`] projects
//! each homogeneous component onto spherical harmonics with a sphere rule of
//! sufficient degree, which is exact up to rounding.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::PolyError;
use crate::harmonics::{self, check_dim, check_unit, dimension, eval_all, norm};

/// Sparse polynomial in `d` real variables, keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MonoPoly {
    d: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl MonoPoly {
    pub fn zero(d: usize) -> Self {
        MonoPoly { d, terms: BTreeMap::new() }
    }

    pub fn constant(d: usize, c: f64) -> Self {
        Self::monomial(d, &vec![0; d], c)
    }

    pub fn monomial(d: usize, exps: &[u32], c: f64) -> Self {
        let mut p = Self::zero(d);
        p.add_term(exps, c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(d: usize, i: usize) -> Self {
        let mut e = vec![0; d];
        e[i] = 1;
        Self::monomial(d, &e, 1.0)
    }

    /// `|x|^2 = x_1^2 + ... + x_d^2`.
    pub fn radius_squared(d: usize) -> Self {
        let mut p = Self::zero(d);
        for i in 0..d {
            let mut e = vec![0; d];
            e[i] = 2;
            p.add_term(&e, 1.0);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, f64)>>(d: usize, terms: I) -> Self {
        let mut p = Self::zero(d);
        for (e, c) in terms {
            p.add_term(&e, c);
        }
        p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn add_term(&mut self, exps: &[u32], c: f64) {
        assert_eq!(exps.len(), self.d, "exponent vector length must equal the dimension");
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(exps.to_vec()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(exps);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &f64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| e.iter().sum::<u32>() as usize).max()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_terms(self.d, self.terms.iter().map(|(e, c)| (e.clone(), c * s)))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(self.d, 1.0);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn homogeneous_component(&self, degree: usize) -> Self {
        Self::from_terms(
            self.d,
            self.terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() as usize == degree)
                .map(|(e, c)| (e.clone(), *c)),
        )
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.d);
        for (e, c) in &self.terms {
            for i in 0..self.d {
                if e[i] >= 2 {
                    let mut f = e.clone();
                    f[i] -= 2;
                    out.add_term(&f, c * (e[i] * (e[i] - 1)) as f64);
                }
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(p, v)| v.powi(*p as i32)).product::<f64>())
            .sum()
    }

    pub fn eval_complex(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(z).map(|(p, v)| v.powu(*p)).product::<Complex64>() * *c
            })
            .sum()
    }

    /// Coefficients of `ζ ↦ u(ζθ)`, index j = coefficient of ζ^j.
    pub fn ray_coefficients(&self, theta: &[f64]) -> Vec<f64> {
        let deg = self.degree().unwrap_or(0);
        let mut out = vec![0.0; deg + 1];
        for (e, c) in &self.terms {
            let j = e.iter().sum::<u32>() as usize;
            out[j] += c * e.iter().zip(theta).map(|(p, v)| v.powi(*p as i32)).product::<f64>();
        }
        out
    }

    /// `u(ζθ)` for complex ζ.
    pub fn eval_ray(&self, zeta: Complex64, theta: &[f64]) -> Complex64 {
        self.ray_coefficients(theta)
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * zeta + c)
    }

    /// Gauss decomposition: expand in the basis `|x|^{2t} Y_{k,m}(x)`.
    pub fn to_gauss(&self) -> GaussPoly {
        let mut out = GaussPoly::zero(self.d);
        let Some(deg) = self.degree() else {
            return out;
        };
        for degree in 0..=deg {
            let comp = self.homogeneous_component(degree);
            if comp.is_zero() {
                continue;
            }
            let rule = harmonics::sphere_rule(self.d, 2 * degree).expect("dimension checked at construction");
            let idx = harmonics::indices(self.d, degree);
            let mut acc = vec![0.0; idx.len()];
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let v = w * comp.eval(x);
                let ys: Vec<f64> = eval_all(self.d, degree, x).into_iter().flatten().collect();
                for (a, y) in acc.iter_mut().zip(&ys) {
                    *a += v * y;
                }
            }
            let biggest = acc.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for ((k, m), c) in idx.into_iter().zip(acc) {
                if (degree - k) % 2 != 0 || c.abs() <= 1e-14 * biggest {
                    continue;
                }
                out.terms.insert(((degree - k) / 2, k, m), c);
            }
        }
        out
    }
}

impl Add for &MonoPoly {
    type Output = MonoPoly;
    fn add(self, rhs: &MonoPoly) -> MonoPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e, *c);
        }
        out
    }
}

impl Sub for &MonoPoly {
    type Output = MonoPoly;
    fn sub(self, rhs: &MonoPoly) -> MonoPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e, -c);
        }
        out
    }
}

impl Neg for &MonoPoly {
    type Output = MonoPoly;
    fn neg(self) -> MonoPoly {
        self.scaled(-1.0)
    }
}

impl Mul for &MonoPoly {
    type Output = MonoPoly;
    fn mul(self, rhs: &MonoPoly) -> MonoPoly {
        let mut acc: HashMap<Vec<u32>, f64> = HashMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        MonoPoly::from_terms(self.d, acc)
    }
}

/// Determinant of a square matrix of polynomials by Laplace expansion along
/// the first row, memoized over the remaining column sets.
pub fn poly_det(matrix: &[Vec<MonoPoly>], d: usize) -> MonoPoly {
    let n = matrix.len();
    if n == 0 {
        return MonoPoly::constant(d, 1.0);
    }
    let mut memo: HashMap<u64, MonoPoly> = HashMap::new();
    det_rec(matrix, 0, (1u64 << n) - 1, d, &mut memo)
}

fn det_rec(
    m: &[Vec<MonoPoly>],
    row: usize,
    cols: u64,
    d: usize,
    memo: &mut HashMap<u64, MonoPoly>,
) -> MonoPoly {
    if row == m.len() {
        return MonoPoly::constant(d, 1.0);
    }
    if let Some(v) = memo.get(&cols) {
        return v.clone();
    }
    let mut out = MonoPoly::zero(d);
    let mut sign = 1.0;
    for c in 0..m.len() {
        if cols & (1 << c) == 0 {
            continue;
        }
        if !m[row][c].is_zero() {
            let minor = det_rec(m, row + 1, cols & !(1 << c), d, memo);
            let term = &m[row][c] * &minor;
            out = if sign > 0.0 { &out + &term } else { &out - &term };
        }
        sign = -sign;
    }
    memo.insert(cols, out.clone());
    out
}

/// `|x|^{2t} Y_{k,m}(x)` evaluated at a real point.
fn basis_value(ys: &[Vec<f64>], r: f64, t: usize, k: usize, m: usize) -> f64 {
    if r == 0.0 {
        return if t == 0 && k == 0 { ys[0][0] } else { 0.0 };
    }
    r.powi((2 * t + k) as i32) * ys[k][m - 1]
}

fn eval_terms<'a, I>(d: usize, terms: I, kmax: usize, x: &[f64]) -> f64
where
    I: Iterator<Item = (&'a (usize, usize, usize), &'a f64)>,
{
    let r = norm(x);
    let dir: Vec<f64> = if r > 0.0 {
        x.iter().map(|v| v / r).collect()
    } else {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        e
    };
    let ys = eval_all(d, kmax, &dir);
    terms.map(|(&(t, k, m), c)| c * basis_value(&ys, r, t, k, m)).sum()
}

fn eval_terms_scaled<'a, I>(d: usize, terms: I, kmax: usize, zeta: Complex64, theta: &[f64]) -> Complex64
where
    I: Iterator<Item = (&'a (usize, usize, usize), &'a f64)>,
{
    let ys = eval_all(d, kmax, theta);
    terms
        .map(|(&(t, k, m), c)| zeta.powu((2 * t + k) as u32) * (c * ys[k][m - 1]))
        .sum()
}

fn check_key(d: usize, k: usize, m: usize) -> Result<(), PolyError> {
    check_dim(d)?;
    if m == 0 || m > dimension(d, k) {
        return Err(harmonics::HarmonicsError::Index { d, k, m }.into());
    }
    Ok(())
}

fn check_point(d: usize, x: &[f64]) -> Result<(), PolyError> {
    if x.len() != d {
        return Err(PolyError::DimensionMismatch { expected: d, got: x.len() });
    }
    Ok(())
}

/// Polynomial in the Gauss decomposition basis: `Σ c_{t,k,m} |x|^{2t} Y_{k,m}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussPoly {
    d: usize,
    terms: BTreeMap<(usize, usize, usize), f64>,
}

impl GaussPoly {
    pub fn zero(d: usize) -> Self {
        GaussPoly { d, terms: BTreeMap::new() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn insert(&mut self, t: usize, k: usize, m: usize, c: f64) -> Result<(), PolyError> {
        check_key(self.d, k, m)?;
        if c != 0.0 {
            *self.terms.entry((t, k, m)).or_insert(0.0) += c;
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize, usize), &f64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, t: usize, k: usize, m: usize) -> f64 {
        self.terms.get(&(t, k, m)).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| *c == 0.0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|(t, k, _)| 2 * t + k).max()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        GaussPoly { d: self.d, terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect() }
    }

    fn kmax(&self) -> usize {
        self.terms.keys().map(|(_, k, _)| *k).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, PolyError> {
        check_point(self.d, x)?;
        Ok(eval_terms(self.d, self.terms.iter(), self.kmax(), x))
    }

    /// `u(ζθ)` for complex ζ and unit θ.
    pub fn eval_scaled(&self, zeta: Complex64, theta: &[f64]) -> Result<Complex64, PolyError> {
        check_unit(self.d, theta)?;
        Ok(eval_terms_scaled(self.d, self.terms.iter(), self.kmax(), zeta, theta))
    }

    pub fn homogeneous_component(&self, degree: usize) -> HomogPoly {
        HomogPoly {
            d: self.d,
            degree,
            terms: self
                .terms
                .iter()
                .filter(|((t, k, _), _)| 2 * t + k == degree)
                .map(|(k, c)| (*k, *c))
                .collect(),
        }
    }

    pub fn to_mono(&self) -> MonoPoly {
        let r2 = MonoPoly::radius_squared(self.d);
        let mut out = MonoPoly::zero(self.d);
        for (&(t, k, m), c) in &self.terms {
            let y = harmonics::harmonic_polynomial(self.d, k, m).expect("keys validated on insert");
            let term = (&r2.pow(t as u32) * &y).scaled(*c);
            out = &out + &term;
        }
        out
    }
}

/// Homogeneous polynomial of fixed degree in the Gauss decomposition basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogPoly {
    d: usize,
    degree: usize,
    terms: BTreeMap<(usize, usize, usize), f64>,
}

impl HomogPoly {
    pub fn zero(d: usize, degree: usize) -> Self {
        HomogPoly { d, degree, terms: BTreeMap::new() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn insert(&mut self, t: usize, k: usize, m: usize, c: f64) -> Result<(), PolyError> {
        check_key(self.d, k, m)?;
        if 2 * t + k != self.degree {
            return Err(PolyError::NotHomogeneous { degree: self.degree, t, k });
        }
        if c != 0.0 {
            *self.terms.entry((t, k, m)).or_insert(0.0) += c;
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize, usize), &f64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| *c == 0.0)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, PolyError> {
        check_point(self.d, x)?;
        Ok(eval_terms(self.d, self.terms.iter(), self.degree, x))
    }

    /// `ζ^{degree} · F(θ)`, the value of `F` at `ζθ`.
    pub fn eval_scaled(&self, zeta: Complex64, theta: &[f64]) -> Result<Complex64, PolyError> {
        check_unit(self.d, theta)?;
        let on_sphere: f64 = eval_terms(self.d, self.terms.iter(), self.degree, theta);
        Ok(zeta.powu(self.degree as u32) * on_sphere)
    }

    pub fn to_gauss(&self) -> GaussPoly {
        GaussPoly { d: self.d, terms: self.terms.clone() }
    }

    pub fn to_mono(&self) -> MonoPoly {
        self.to_gauss().to_mono()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_squared_in_gauss_basis() {
        for d in [2, 3] {
            let g = MonoPoly::radius_squared(d).to_gauss();
            let w = harmonics::surface_area(d).sqrt();
            assert_eq!(g.terms().count(), 1);
            assert!((g.coefficient(1, 0, 1) - w).abs() < 1e-13);
            let h = g.homogeneous_component(2);
            let v = h.eval(&[3.0, 4.0, 0.0][..d]).unwrap();
            assert!((v - 25.0).abs() < 1e-12);
        }
    }

    #[test]
    fn homogeneity_of_linear_term() {
        let mut h = HomogPoly::zero(2, 1);
        h.insert(0, 1, 1, 1.0).unwrap();
        let th = [0.6, 0.8];
        let a = h.eval(&[1.2, 1.6]).unwrap();
        let b = h.eval(&th).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-14);
        assert!(matches!(h.insert(1, 1, 1, 1.0), Err(PolyError::NotHomogeneous { .. })));
        assert!(matches!(h.eval(&[1.0, 2.0, 3.0]), Err(PolyError::DimensionMismatch { .. })));
    }

    #[test]
    fn mono_gauss_round_trip() {
        for d in [2, 3] {
            let mut p = MonoPoly::zero(d);
            let mut e = vec![0u32; d];
            e[0] = 3;
            p.add_term(&e, 1.5);
            e[0] = 1;
            e[1] = 2;
            p.add_term(&e, -0.7);
            p.add_term(&vec![0; d], 0.25);
            let back = p.to_gauss().to_mono();
            let diff = &back - &p;
            assert!(diff.max_abs_coefficient() < 1e-12, "{diff:?}");
        }
    }

    #[test]
    fn poly_det_matches_scalar_det() {
        let x = MonoPoly::var(2, 0);
        let one = MonoPoly::constant(2, 1.0);
        let m = vec![vec![x.clone(), one.clone()], vec![one.clone(), x.clone()]];
        let det = poly_det(&m, 2);
        let expect = &(&x * &x) - &one;
        assert!((&det - &expect).is_zero());
    }
}
