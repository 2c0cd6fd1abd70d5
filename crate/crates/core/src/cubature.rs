//! The cubature functional `T_n(u) = Σ_j w_j Σ_k α_k(θ_j) u(x_k(θ_j) θ_j)`.
//!
//! For every node `θ_j` of a sphere rule the directional moment sequence
//! yields a Gauss rule with nodes `x_k(θ_j) ∈ (-R, R)`; the cubature points
//! `x_k(θ_j) θ_j` lie on the node curves of the Padé denominators. The point
//! set is itself the discrete realization of `T_n`; no representing measure
//! is constructed.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::harmonics::{self, indices, SphereRule};
use crate::markov::{self, fmt_num, CoefficientTable, DirectionalMoments, MarkovError};
use crate::measures::{Measure, MeasureError};
use crate::pade::{gauss_rule_from_pair, lift_a_mono, pade_pair, GaussRule1D, PadeError, PadeMethod, PadePair};
use crate::polyalg::{GaussPoly, MonoPoly, PolyError, UniPoly};

#[derive(Debug, Error)]
pub enum CubatureError {
    #[error("measure is not Hankel-positive: H_{n} / scale^{n} = {ratio:e} at θ = {theta:?}")]
    NotHankelPositive { n: usize, theta: Vec<f64>, ratio: f64 },
    #[error("Gauss rule of order {n} failed at {} directions, first θ = {:?}: {}", thetas.len(), thetas[0], reasons[0])]
    DegenerateDirections { n: usize, thetas: Vec<Vec<f64>>, reasons: Vec<String> },
    #[error("{given} contour points given, at least {needed} needed")]
    ContourPoints { given: usize, needed: usize },
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Pade(#[from] PadeError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Sphere degree that integrates the `u_l f_l` products of `T_n` exactly.
pub fn default_sphere_degree(n: usize) -> usize {
    2 * (2 * n - 1) + 1
}

/// Sphere nodes with per-direction Gauss rules.
#[derive(Debug, Clone)]
pub struct CubatureRule {
    pub n: usize,
    pub d: usize,
    pub radius: f64,
    pub sphere: SphereRule,
    pub directions: Vec<DirectionalMoments>,
    pub pairs: Vec<PadePair>,
    pub rules: Vec<GaussRule1D>,
    /// Largest `|f_l(θ_j)|`, `l ≤ 2n - 1`, over the sphere nodes.
    pub scale: f64,
    pub provenance: String,
}

/// A cubature point `x_k(θ_j) θ_j` with combined weight `w_j α_k(θ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubaturePoint {
    pub x: Vec<f64>,
    pub weight: f64,
}

impl CubatureRule {
    pub fn points(&self) -> Vec<CubaturePoint> {
        let mut out = Vec::with_capacity(self.sphere.len() * self.n);
        for ((theta, w), rule) in self.sphere.nodes.iter().zip(&self.sphere.weights).zip(&self.rules) {
            for (x, a) in rule.nodes.iter().zip(&rule.weights) {
                out.push(CubaturePoint { x: theta.iter().map(|t| t * x).collect(), weight: w * a });
            }
        }
        out
    }

    /// `T_n` applied to an arbitrary function by point evaluation.
    pub fn apply_fn<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.points().iter().map(|p| p.weight * f(&p.x)).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let points: Vec<_> = self.points().iter().map(|p| json!({ "x": p.x, "weight": p.weight })).collect();
        json!({
            "n": self.n,
            "d": self.d,
            "R": self.radius,
            "sphere_degree": self.sphere.exact_degree,
            "provenance": self.provenance,
            "points": points,
            "note": "point set on the node curves realizing T_n; no representing measure is constructed",
        })
    }

    /// Rows `x_1, ..., x_d, weight`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), MarkovError> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (1..=self.d).map(|i| format!("x{i}")).collect();
        header.push("weight".into());
        out.write_record(&header)?;
        for p in self.points() {
            let mut row: Vec<String> = p.x.iter().map(|v| fmt_num(*v)).collect();
            row.push(fmt_num(p.weight));
            out.write_record(&row)?;
        }
        out.flush().map_err(|e| MarkovError::Csv(e.to_string()))?;
        Ok(())
    }
}

/// Builds the order-n cubature rule on `sphere_rule(d, sphere_degree)`.
///
/// With `require_positive` the Hankel determinants up to order n must be
/// positive on the sphere grid; otherwise directions where no Gauss rule
/// exists are collected into a [`CubatureError::DegenerateDirections`].
pub fn build_cubature(
    table: &CoefficientTable,
    n: usize,
    sphere_degree: Option<usize>,
    require_positive: bool,
) -> Result<CubatureRule, CubatureError> {
    if n == 0 {
        return Err(CubatureError::ZeroOrder);
    }
    table.require(2 * n - 1)?;
    let degree = sphere_degree.unwrap_or_else(|| default_sphere_degree(n));
    if require_positive {
        let report = markov::hankel_positivity_report(table, n, degree)?;
        if let Some((k, theta)) = report.witness {
            let ratio = report.orders[k - 1].min_ratio;
            return Err(CubatureError::NotHankelPositive { n: k, theta, ratio });
        }
    }
    let sphere = harmonics::sphere_rule(table.d(), degree).map_err(MarkovError::from)?;
    let radius = table.radius();
    let built: Vec<Result<(DirectionalMoments, PadePair, GaussRule1D), (Vec<f64>, String)>> = sphere
        .nodes
        .par_iter()
        .map(|theta| {
            let fail = |e: String| (theta.clone(), e);
            let dm = table.directional_prefix(theta, 2 * n).map_err(|e| fail(e.to_string()))?;
            let pair = pade_pair(&dm, n, PadeMethod::LinearSolve).map_err(|e| fail(e.to_string()))?;
            let rule = gauss_rule_from_pair(&pair, radius).map_err(|e| fail(e.to_string()))?;
            Ok((dm, pair, rule))
        })
        .collect();
    if built.iter().any(|b| b.is_err()) {
        let (thetas, reasons) = built.into_iter().filter_map(|b| b.err()).unzip();
        return Err(CubatureError::DegenerateDirections { n, thetas, reasons });
    }
    let mut directions = Vec::new();
    let mut pairs = Vec::new();
    let mut rules = Vec::new();
    for (dm, pair, rule) in built.into_iter().flatten() {
        directions.push(dm);
        pairs.push(pair);
        rules.push(rule);
    }
    let scale = directions.iter().map(|d| d.values.scale()).fold(0.0, f64::max);
    let provenance = match table.provenance() {
        markov::Provenance::Measure(s) => format!("measure:{s}"),
        markov::Provenance::RawStream(s) => format!("stream:{s}"),
    };
    Ok(CubatureRule { n, d: table.d(), radius, sphere, directions, pairs, rules, scale, provenance })
}

/// `T_n(u)` by point evaluation.
pub fn apply(rule: &CubatureRule, u: &MonoPoly) -> f64 {
    rule.apply_fn(|x| u.eval(x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourResult {
    pub value: f64,
    /// Smallest `|p(ζ)|` seen on the contour, relative to `R_1^n`.
    pub min_abs_p: f64,
    pub pole_warning: bool,
}

/// `T_n(u)` as `Σ_j w_j (1/2πi) ∮_{|ζ|=R_1} u(ζθ_j) q(ζ)/p(ζ) dζ` with the
/// trapezoidal rule on `points` equispaced contour nodes.
pub fn apply_via_contour(
    rule: &CubatureRule,
    u: &MonoPoly,
    r1: f64,
    points: usize,
) -> Result<ContourResult, CubatureError> {
    let deg = u.degree().unwrap_or(0);
    let needed = 2 * (deg + rule.n) + 16;
    if points < needed {
        return Err(CubatureError::ContourPoints { given: points, needed });
    }
    let zetas: Vec<Complex64> = (0..points)
        .map(|k| Complex64::from_polar(r1, 2.0 * std::f64::consts::PI * k as f64 / points as f64))
        .collect();
    let mut total = 0.0;
    let mut min_abs_p = f64::INFINITY;
    let norm = r1.powi(rule.n as i32);
    for ((theta, w), pair) in rule.sphere.nodes.iter().zip(&rule.sphere.weights).zip(&rule.pairs) {
        let ray = UniPoly::from_real(&u.ray_coefficients(theta));
        let mut acc = Complex64::new(0.0, 0.0);
        for z in &zetas {
            let pz = pair.p.eval(*z);
            min_abs_p = min_abs_p.min(pz.norm() / norm);
            acc += ray.eval(*z) * pair.q.eval(*z) / pz * z;
        }
        total += w * acc.re / points as f64;
    }
    Ok(ContourResult { value: total, min_abs_p, pole_warning: min_abs_p < 1e-6 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactnessRow {
    pub t: usize,
    pub k: usize,
    pub m: usize,
    pub degree: usize,
    pub cubature: f64,
    pub exact: f64,
    pub rel_error: f64,
    /// Whether the degree lies within the exactness guarantee `≤ 2n - 1`.
    pub guaranteed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactnessReport {
    pub n: usize,
    pub rows: Vec<ExactnessRow>,
    /// Largest relative error over the guaranteed rows.
    pub max_rel_error: f64,
}

/// Compares `T_n` with exact integration over every basis polynomial
/// `|x|^{2t} Y_{k,m}` of degree `≤ 2n - 1`, plus the degree-2n elements as
/// unguaranteed rows.
///
/// Relative errors use `max(|exact|, |μ|(ℝ^d) R^{2t+k} √(a_k/ω_d))` as the
/// denominator, a bound for the integral of the basis element.
pub fn exactness_report(rule: &CubatureRule, mu: &Measure) -> Result<ExactnessReport, CubatureError> {
    let n = rule.n;
    let d = rule.d;
    let omega = harmonics::surface_area(d);
    let tv = mu.total_variation();
    let mut rows = Vec::new();
    for (k, m) in indices(d, 2 * n) {
        for t in 0..=(2 * n - k) / 2 {
            let degree = 2 * t + k;
            let mut g = GaussPoly::zero(d);
            g.insert(t, k, m, 1.0)?;
            let u = g.to_mono();
            let cubature = apply(rule, &u);
            let exact = mu.integrate_poly(&u)?;
            let bound = tv * mu.radius().powi(degree as i32) * (harmonics::dimension(d, k) as f64 / omega).sqrt();
            let denom = exact.abs().max(bound);
            let rel_error = if denom > 0.0 { (cubature - exact).abs() / denom } else { (cubature - exact).abs() };
            rows.push(ExactnessRow { t, k, m, degree, cubature, exact, rel_error, guaranteed: degree < 2 * n });
        }
    }
    rows.sort_by_key(|r| (r.degree, r.k, r.m));
    let max_rel_error = rows.iter().filter(|r| r.guaranteed).map(|r| r.rel_error).fold(0.0, f64::max);
    Ok(ExactnessReport { n, rows, max_rel_error })
}

/// Random real polynomial of the given degree with coefficients in [-1, 1].
pub fn random_polynomial<R: Rng>(rng: &mut R, d: usize, degree: usize) -> MonoPoly {
    let mut p = MonoPoly::zero(d);
    for e in exponents(d, degree) {
        p.add_term(&e, rng.gen_range(-1.0..=1.0));
    }
    p
}

/// All exponent vectors of total degree `≤ degree`.
fn exponents(d: usize, degree: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                let used: u32 = e.iter().sum();
                (0..=degree as u32 - used).map(move |v| {
                    let mut f = e.clone();
                    f.push(v);
                    f
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquareViolation {
    pub trial: usize,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmudgenCheck {
    /// Largest `|T_n(±Â_n p²)| / (scale ‖p‖²)` over the trials, with `Â_n`
    /// the lift scaled to unit maximal coefficient.
    pub max_normalized: f64,
    pub tolerance: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityCheck {
    pub trials: usize,
    pub violations: Vec<SquareViolation>,
    /// Smallest `T_n(p²) / (‖p‖² scale)`.
    pub min_normalized: f64,
    /// Largest disagreement between `T_n(p²)` and `Σ_j w_j Σ e_a e_b f_{a+b}(θ_j)`,
    /// relative to `max(|T_n(p²)|, ‖p‖² scale)`.
    pub identity_max_error: f64,
    pub identity_failures: usize,
    pub schmudgen: Option<SchmudgenCheck>,
}

impl PositivityCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
            && self.identity_failures == 0
            && self.schmudgen.as_ref().is_none_or(|s| s.failures == 0)
    }
}

/// Evaluates `T_n(p²)` for `trials` seeded random polynomials of degree
/// `≤ 2n + 2`, cross-checks the remainder-expansion identity and, for
/// `n ≤ 3`, the vanishing of `T_n(±Â_n p²)`.
pub fn positivity_check(
    rule: &CubatureRule,
    table: &CoefficientTable,
    trials: usize,
    seed: u64,
) -> Result<PositivityCheck, CubatureError> {
    let n = rule.n;
    let d = rule.d;
    let scale = rule.scale;
    let mut rng = StdRng::seed_from_u64(seed);
    let a_hat = if n <= 3 {
        let a = lift_a_mono(table, n)?;
        let c = a.max_abs_coefficient();
        Some(if c > 0.0 { a.scaled(1.0 / c) } else { a })
    } else {
        None
    };
    let points = rule.points();
    let mut violations = Vec::new();
    let mut min_normalized = f64::INFINITY;
    let mut identity_max_error = 0.0f64;
    let mut identity_failures = 0;
    let mut schmudgen_max = 0.0f64;
    let mut schmudgen_failures = 0;
    let schmudgen_tol = 1e-8;
    for trial in 0..trials {
        let degree = rng.gen_range(0..=2 * n + 2);
        let p = random_polynomial(&mut rng, d, degree);
        let norm2 = p.coefficient_norm().powi(2);
        let reference = norm2 * scale;
        let value: f64 = points.iter().map(|pt| pt.weight * p.eval(&pt.x).powi(2)).sum();
        let threshold = -1e-10 * reference;
        if value < threshold {
            violations.push(SquareViolation { trial, value, threshold });
        }
        if reference > 0.0 {
            min_normalized = min_normalized.min(value / reference);
        }
        let mut identity = 0.0;
        for ((theta, w), (pair, dm)) in
            rule.sphere.nodes.iter().zip(&rule.sphere.weights).zip(rule.pairs.iter().zip(&rule.directions))
        {
            let ray = UniPoly::from_real(&p.ray_coefficients(theta));
            let (_, e) = ray.div_rem(&pair.p)?;
            let e = e.real_coeffs()?;
            let f = dm.values.values();
            let mut b = 0.0;
            for (i, ei) in e.iter().enumerate() {
                for (j, ej) in e.iter().enumerate() {
                    b += ei * ej * f[i + j];
                }
            }
            identity += w * b;
        }
        let err = (identity - value).abs() / value.abs().max(reference).max(f64::MIN_POSITIVE);
        identity_max_error = identity_max_error.max(err);
        if err > 1e-8 {
            identity_failures += 1;
        }
        if let Some(a) = &a_hat {
            for sign in [1.0, -1.0] {
                let v: f64 = points.iter().map(|pt| pt.weight * sign * a.eval(&pt.x) * p.eval(&pt.x).powi(2)).sum();
                let normalized = if reference > 0.0 { v.abs() / reference } else { v.abs() };
                schmudgen_max = schmudgen_max.max(normalized);
                if normalized > schmudgen_tol {
                    schmudgen_failures += 1;
                }
            }
        }
    }
    let schmudgen = a_hat.map(|_| SchmudgenCheck { max_normalized: schmudgen_max, tolerance: schmudgen_tol, failures: schmudgen_failures });
    Ok(PositivityCheck { trials, violations, min_normalized, identity_max_error, identity_failures, schmudgen })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::coefficient_table;
    use crate::measures::{MeasureKind, RadialFunction, RadialMeasure};

    fn polar() -> Measure {
        Measure::new(
            2,
            1.0,
            MeasureKind::PolarDensity {
                w0: RadialFunction::lebesgue(0.0, 1.0),
                w1: RadialFunction::lebesgue(0.0, 1.0).with_scale(0.5),
                assert_hankel_positive: true,
            },
        )
        .unwrap()
    }

    #[test]
    fn exponent_enumeration() {
        assert_eq!(exponents(2, 2).len(), 6);
        assert_eq!(exponents(3, 2).len(), 10);
    }

    #[test]
    fn rotation_invariant_rules_coincide() {
        let mu = Measure::new(2, 1.0, MeasureKind::RadialProduct { radial: RadialMeasure::Atoms(vec![(0.3, 1.0), (0.8, 0.5)]) })
            .unwrap();
        let table = coefficient_table(&mu, 8).unwrap();
        let rule = build_cubature(&table, 2, None, true).unwrap();
        for r in &rule.rules {
            for (a, b) in r.nodes.iter().zip(&rule.rules[0].nodes) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let mass = apply(&rule, &MonoPoly::constant(2, 1.0));
        let exact = mu.integrate_poly(&MonoPoly::constant(2, 1.0)).unwrap();
        assert!((mass - exact).abs() < 1e-12 * exact);
        let r1 = crate::pade::choose_r1(&rule.pairs, 1.0).unwrap();
        let c = apply_via_contour(&rule, &MonoPoly::constant(2, 1.0), r1, 64).unwrap();
        assert!((c.value - mass).abs() < 1e-10 * mass);
    }

    #[test]
    fn polar_order_three() {
        let mu = polar();
        let table = coefficient_table(&mu, 6).unwrap();
        let rule = build_cubature(&table, 3, None, true).unwrap();
        assert!(rule.rules.iter().all(|r| r.nodes.len() == 3 && !r.negative_weight));
        assert!(rule.points().iter().all(|p| crate::harmonics::norm(&p.x) < 1.0));
        let report = exactness_report(&rule, &mu).unwrap();
        assert_eq!(report.rows.iter().filter(|r| r.guaranteed).count(), 21);
        assert!(report.max_rel_error < 1e-8, "{}", report.max_rel_error);
        let check = positivity_check(&rule, &table, 20, 7).unwrap();
        assert!(check.passed(), "{check:?}");
    }

    #[test]
    fn line_measure_has_degenerate_directions() {
        let mu = Measure::new(2, 1.0, MeasureKind::RadialTimesDirac { radial: RadialMeasure::Density(RadialFunction::lebesgue(0.0, 1.0)) })
            .unwrap();
        let table = coefficient_table(&mu, 6).unwrap();
        assert!(matches!(build_cubature(&table, 2, None, true), Err(CubatureError::NotHankelPositive { .. })));
        match build_cubature(&table, 2, None, false) {
            Err(CubatureError::DegenerateDirections { thetas, .. }) => {
                assert!(thetas.iter().any(|t| (t[0] - 1.0).abs() < 1e-12));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_measure_contour_is_zero() {
        let rule = CubatureRule {
            n: 1,
            d: 2,
            radius: 1.0,
            sphere: crate::harmonics::sphere_rule(2, 3).unwrap(),
            directions: Vec::new(),
            pairs: (0..8)
                .map(|_| PadePair {
                    n: 1,
                    theta: vec![1.0, 0.0],
                    p: UniPoly::from_real(&[0.0, 1.0]),
                    q: UniPoly::zero(),
                    p_raw: UniPoly::from_real(&[0.0, 1.0]),
                    q_raw: UniPoly::zero(),
                    hankel: 0.0,
                    scale: 0.0,
                    normal: true,
                    remainder_head: Vec::new(),
                    method: PadeMethod::LinearSolve,
                })
                .collect(),
            rules: Vec::new(),
            scale: 0.0,
            provenance: "zero".into(),
        };
        let u = MonoPoly::from_terms(2, vec![(vec![2, 1], 1.0)]);
        let c = apply_via_contour(&rule, &u, 2.0, 40).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(apply_via_contour(&rule, &u, 2.0, 10).is_err());
    }
}
