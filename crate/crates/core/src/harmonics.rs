//! Real orthonormal spherical harmonics on S^1 and S^2, Legendre polynomials
//! of dimension d, and product quadrature rules on the sphere.
//!
//! Index conventions: `k` is the harmonic degree and `m` runs over
//! `1..=dimension(d, k)`.
//!
//! - d = 2, θ = (cos ϑ, sin ϑ): `Y_0 = 1/√(2π)`, `Y_{k,1} = cos(kϑ)/√π`,
//!   `Y_{k,2} = sin(kϑ)/√π`.
//! - d = 3, polar axis along the third coordinate: `m = 1` is the zonal
//!   harmonic, `m = 2j` carries `cos(jφ)` and `m = 2j + 1` carries `sin(jφ)`.
//!
//! The basis is orthonormal for the unnormalized surface measure, so the
//! addition theorem reads `Σ_m Y_{k,m}(ξ) Y_{k,m}(θ) = a_k/ω_d · P_k(⟨ξ, θ⟩)`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::polyalg::MonoPoly;
use crate::quadrature::gauss_legendre;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarmonicsError {
    #[error("unsupported dimension {0} (only d = 2 and d = 3)")]
    Dimension(usize),
    #[error("invalid harmonic index (k = {k}, m = {m}) for d = {d}")]
    Index { d: usize, k: usize, m: usize },
    #[error("expected a point of dimension {expected}, got {got}")]
    PointDimension { expected: usize, got: usize },
    #[error("direction is not a unit vector (|θ| = {0})")]
    NotUnit(f64),
}

pub(crate) const UNIT_TOL: f64 = 1e-9;

pub(crate) fn check_dim(d: usize) -> Result<(), HarmonicsError> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(HarmonicsError::Dimension(d))
    }
}

pub(crate) fn check_unit(d: usize, theta: &[f64]) -> Result<(), HarmonicsError> {
    check_dim(d)?;
    if theta.len() != d {
        return Err(HarmonicsError::PointDimension { expected: d, got: theta.len() });
    }
    let norm = norm(theta);
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(HarmonicsError::NotUnit(norm));
    }
    Ok(())
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Dimension `a_k` of the space of degree-k spherical harmonics.
pub fn dimension(d: usize, k: usize) -> usize {
    match (d, k) {
        (2, 0) => 1,
        (2, _) => 2,
        _ => 2 * k + 1,
    }
}

/// Surface area `ω_d` of S^{d-1}.
pub fn surface_area(d: usize) -> f64 {
    if d == 2 {
        2.0 * PI
    } else {
        4.0 * PI
    }
}

/// All valid `(k, m)` pairs with `k ≤ kmax`, ordered by `k` then `m`.
pub fn indices(d: usize, kmax: usize) -> Vec<(usize, usize)> {
    (0..=kmax)
        .flat_map(|k| (1..=dimension(d, k)).map(move |m| (k, m)))
        .collect()
}

/// Value of `Y_{k,m}` at the unit vector `theta`.
pub fn eval_y(d: usize, k: usize, m: usize, theta: &[f64]) -> Result<f64, HarmonicsError> {
    check_unit(d, theta)?;
    if m == 0 || m > dimension(d, k) {
        return Err(HarmonicsError::Index { d, k, m });
    }
    Ok(eval_all(d, k, theta)[k][m - 1])
}

/// Values of every `Y_{k,m}` with `k ≤ kmax` at `theta`, indexed `[k][m - 1]`.
///
/// `theta` is assumed to be a unit vector of length `d`.
pub fn eval_all(d: usize, kmax: usize, theta: &[f64]) -> Vec<Vec<f64>> {
    if d == 2 {
        let phi = theta[1].atan2(theta[0]);
        (0..=kmax)
            .map(|k| {
                if k == 0 {
                    vec![1.0 / (2.0 * PI).sqrt()]
                } else {
                    let kf = k as f64;
                    let s = 1.0 / PI.sqrt();
                    vec![s * (kf * phi).cos(), s * (kf * phi).sin()]
                }
            })
            .collect()
    } else {
        eval_all_3d(kmax, theta)
    }
}

fn eval_all_3d(kmax: usize, theta: &[f64]) -> Vec<Vec<f64>> {
    let t = theta[2].clamp(-1.0, 1.0);
    let s = (theta[0] * theta[0] + theta[1] * theta[1]).sqrt();
    let phi = theta[1].atan2(theta[0]);
    let mut out: Vec<Vec<f64>> = (0..=kmax).map(|k| vec![0.0; 2 * k + 1]).collect();
    // P_j^j = (2j-1)!! s^j, then upward recurrence in the degree.
    let mut pjj = 1.0;
    for j in 0..=kmax {
        if j > 0 {
            pjj *= (2 * j - 1) as f64 * s;
        }
        let mut prev = 0.0;
        let mut cur = pjj;
        for k in j..=kmax {
            if k > j {
                let next = if k == j + 1 {
                    (2 * j + 1) as f64 * t * cur
                } else {
                    ((2 * k - 1) as f64 * t * cur - (k + j - 1) as f64 * prev) / (k - j) as f64
                };
                prev = cur;
                cur = next;
            }
            let norm = normalization_3d(k, j);
            if j == 0 {
                out[k][0] = norm * cur;
            } else {
                let jf = j as f64;
                out[k][2 * j - 1] = norm * cur * (jf * phi).cos();
                out[k][2 * j] = norm * cur * (jf * phi).sin();
            }
        }
    }
    out
}

fn normalization_3d(k: usize, j: usize) -> f64 {
    // (k - j)! / (k + j)!
    let mut ratio = 1.0;
    for i in (k - j + 1)..=(k + j) {
        ratio /= i as f64;
    }
    let base = ((2 * k + 1) as f64 / (4.0 * PI) * ratio).sqrt();
    if j == 0 {
        base
    } else {
        base * 2f64.sqrt()
    }
}

/// Legendre polynomial of degree `k` and dimension `d`, normalized by `P_k(1) = 1`.
///
/// d = 2 gives the Chebyshev polynomial `cos(k arccos t)`, d = 3 the classical
/// Legendre polynomial.
pub fn legendre(d: usize, k: usize, t: f64) -> f64 {
    let mut p0 = 1.0;
    let mut p1 = t;
    if k == 0 {
        return 1.0;
    }
    for j in 2..=k {
        let jf = j as f64;
        let p2 = if d == 2 {
            2.0 * t * p1 - p0
        } else {
            ((2.0 * jf - 1.0) * t * p1 - (jf - 1.0) * p0) / jf
        };
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Positive-weight quadrature on S^{d-1} integrating every polynomial of
/// degree ≤ `exact_degree` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub d: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }
}

/// Sphere rule exact for polynomial integrands of degree ≤ `degree`.
///
/// d = 2 uses `2·degree + 2` equally spaced angles starting at ϑ = 0. d = 3
/// uses Gauss–Legendre nodes in the polar cosine times equally spaced
/// azimuths.
pub fn sphere_rule(d: usize, degree: usize) -> Result<SphereRule, HarmonicsError> {
    check_dim(d)?;
    if d == 2 {
        let count = (2 * degree + 2).max(2);
        let w = 2.0 * PI / count as f64;
        let nodes = (0..count)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        return Ok(SphereRule { d, nodes, weights: vec![w; count], exact_degree: degree });
    }
    let polar = degree / 2 + 1;
    let azimuth = degree + 1;
    let (ts, ws) = gauss_legendre(polar);
    let mut nodes = Vec::with_capacity(polar * azimuth);
    let mut weights = Vec::with_capacity(polar * azimuth);
    for (t, wt) in ts.iter().zip(&ws) {
        let s = (1.0 - t * t).max(0.0).sqrt();
        for a in 0..azimuth {
            let phi = 2.0 * PI * a as f64 / azimuth as f64;
            nodes.push(vec![s * phi.cos(), s * phi.sin(), *t]);
            weights.push(wt * 2.0 * PI / azimuth as f64);
        }
    }
    Ok(SphereRule { d, nodes, weights, exact_degree: degree })
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// Real and imaginary parts of `(x_0 + i x_1)^j` as polynomials in `d` variables.
fn complex_power_parts(d: usize, j: usize) -> (MonoPoly, MonoPoly) {
    let mut re = MonoPoly::zero(d);
    let mut im = MonoPoly::zero(d);
    for q in 0..=j {
        let mut exps = vec![0u32; d];
        exps[0] = (j - q) as u32;
        exps[1] = q as u32;
        let c = binomial(j, q);
        match q % 4 {
            0 => re.add_term(&exps, c),
            1 => im.add_term(&exps, c),
            2 => re.add_term(&exps, -c),
            _ => im.add_term(&exps, -c),
        }
    }
    (re, im)
}

/// `Y_{k,m}` as a homogeneous harmonic polynomial of degree `k` in monomials.
pub fn harmonic_polynomial(d: usize, k: usize, m: usize) -> Result<MonoPoly, HarmonicsError> {
    check_dim(d)?;
    if m == 0 || m > dimension(d, k) {
        return Err(HarmonicsError::Index { d, k, m });
    }
    if d == 2 {
        if k == 0 {
            return Ok(MonoPoly::constant(d, 1.0 / (2.0 * PI).sqrt()));
        }
        let (re, im) = complex_power_parts(d, k);
        let part = if m == 1 { re } else { im };
        return Ok(part.scaled(1.0 / PI.sqrt()));
    }
    let j = m / 2;
    // j-th derivative of the classical Legendre polynomial, as coefficients of t^p.
    let mut coeffs = vec![0.0; k + 1];
    for i in 0..=k / 2 {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[k - 2 * i] = sign * binomial(k, i) * binomial(2 * k - 2 * i, k) / 2f64.powi(k as i32);
    }
    for _ in 0..j {
        coeffs = (1..coeffs.len()).map(|p| coeffs[p] * p as f64).collect();
    }
    let r2 = MonoPoly::radius_squared(d);
    let mut zonal = MonoPoly::zero(d);
    for (p, c) in coeffs.iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        // t^p with t = z/r becomes z^p r^{k-j-p}; k - j - p is even here.
        let mut exps = vec![0u32; d];
        exps[2] = p as u32;
        let mut term = MonoPoly::monomial(d, &exps, *c);
        term = &term * &r2.pow(((k - j - p) / 2) as u32);
        zonal = &zonal + &term;
    }
    let (re, im) = complex_power_parts(d, j);
    let angular = if j == 0 {
        MonoPoly::constant(d, 1.0)
    } else if m % 2 == 0 {
        re
    } else {
        im
    };
    Ok((&zonal * &angular).scaled(normalization_3d(k, j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_unit(d: usize, rng: &mut impl Rng) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = norm(&v);
            if n > 0.1 && n < 1.0 {
                return v.iter().map(|x| x / n).collect();
            }
        }
    }

    #[test]
    fn closed_form_values() {
        let e1 = [1.0, 0.0];
        assert!((eval_y(2, 0, 1, &e1).unwrap() - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((eval_y(2, 1, 1, &e1).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-15);
        let north = [0.0, 0.0, 1.0];
        assert!((eval_y(3, 1, 1, &north).unwrap() - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        assert!(eval_y(3, 1, 2, &north).unwrap().abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(eval_y(2, 1, 3, &[1.0, 0.0]), Err(HarmonicsError::Index { .. })));
        assert!(matches!(eval_y(2, 0, 1, &[2.0, 0.0]), Err(HarmonicsError::NotUnit(_))));
        assert!(matches!(eval_y(4, 0, 1, &[1.0, 0.0, 0.0, 0.0]), Err(HarmonicsError::Dimension(4))));
        assert!(matches!(sphere_rule(5, 2), Err(HarmonicsError::Dimension(5))));
    }

    #[test]
    fn legendre_values() {
        for d in [2, 3] {
            assert_eq!(legendre(d, 0, 0.3), 1.0);
            for k in 0..8 {
                assert!((legendre(d, k, 1.0) - 1.0).abs() < 1e-14);
            }
        }
        assert!((legendre(3, 2, 0.0) + 0.5).abs() < 1e-15);
        assert!((legendre(2, 5, 0.4) - (5.0 * 0.4f64.acos()).cos()).abs() < 1e-14);
    }

    #[test]
    fn sphere_rule_small_cases() {
        let r = sphere_rule(2, 0).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r.weights[0] - PI).abs() < 1e-15);
        let r = sphere_rule(2, 5).unwrap();
        let v = r.integrate(|x| {
            let a = x[1].atan2(x[0]);
            (3.0 * a).cos() * (2.0 * a).sin()
        });
        assert!(v.abs() < 1e-14);
        let r = sphere_rule(3, 4).unwrap();
        for m in 1..=5 {
            let v = r.integrate(|x| eval_y(3, 2, m, x).unwrap().powi(2));
            assert!((v - 1.0).abs() < 1e-12);
        }
        for d in [2, 3] {
            let r = sphere_rule(d, 7).unwrap();
            assert!((r.weights.iter().sum::<f64>() - surface_area(d)).abs() < 1e-12);
            assert!(r.weights.iter().all(|w| *w > 0.0));
        }
    }

    #[test]
    fn orthonormality_up_to_degree_eight() {
        for d in [2, 3] {
            let rule = sphere_rule(d, 17).unwrap();
            let idx = indices(d, 8);
            let vals: Vec<Vec<f64>> = rule
                .nodes
                .iter()
                .map(|x| eval_all(d, 8, x).into_iter().flatten().collect())
                .collect();
            for a in 0..idx.len() {
                for b in 0..idx.len() {
                    let g: f64 = vals.iter().zip(&rule.weights).map(|(v, w)| w * v[a] * v[b]).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((g - expect).abs() < 1e-12, "d={d} {:?} {:?} {g}", idx[a], idx[b]);
                }
            }
        }
    }

    #[test]
    fn addition_theorem_with_orthonormal_constant() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for d in [2, 3] {
            for _ in 0..20 {
                let xi = random_unit(d, &mut rng);
                let th = random_unit(d, &mut rng);
                let a = eval_all(d, 6, &xi);
                let b = eval_all(d, 6, &th);
                let dot: f64 = xi.iter().zip(&th).map(|(p, q)| p * q).sum();
                for k in 0..=6 {
                    let lhs: f64 = a[k].iter().zip(&b[k]).map(|(p, q)| p * q).sum();
                    let rhs = dimension(d, k) as f64 / surface_area(d) * legendre(d, k, dot);
                    assert!((lhs - rhs).abs() < 1e-10, "d={d} k={k}");
                }
            }
        }
    }

    #[test]
    fn harmonic_polynomials_match_sphere_values_and_are_harmonic() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for d in [2, 3] {
            for (k, m) in indices(d, 7) {
                let p = harmonic_polynomial(d, k, m).unwrap();
                assert_eq!(p.degree(), Some(k).filter(|_| true));
                let th = random_unit(d, &mut rng);
                let rho = 1.7;
                let x: Vec<f64> = th.iter().map(|v| v * rho).collect();
                let expect = rho.powi(k as i32) * eval_y(d, k, m, &th).unwrap();
                assert!((p.eval(&x) - expect).abs() < 1e-11 * expect.abs().max(1.0), "d={d} k={k} m={m}");
                assert!(p.laplacian().max_abs_coefficient() < 1e-10, "d={d} k={k} m={m}");
            }
        }
    }
}
