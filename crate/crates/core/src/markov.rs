//! The multivariate Markov transform `μ̂(ζ, θ) = Σ f_l(θ) ζ^{-l-1}`.
//!
//! [`coefficient_table`] assembles the coefficient functions
//! `f_l = Σ_t Σ_m c_{t,l-2t,m} Y_{l-2t,m}` from distributed moments. Series,
//! kernel and real-transform evaluation share the normalization
//! `μ̂(ζ, θ) = (1/ω_d) ∫ ζ^{d-1} / r(ζθ - x)^d dμ(x)`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::harmonics::{self, check_unit, dimension, eval_all, norm, HarmonicsError, SphereRule};
use crate::measures::{Measure, MeasureError, MeasureKind};
use crate::polyalg::{hankel_det, poly_det, HomogPoly, MomentSeq, MonoPoly, PolyError};

/// Largest order for which Hankel determinants are expanded symbolically.
pub const MAX_SYMBOLIC_ORDER: usize = 5;

/// Default tolerance for `H_m ≡ 0` relative to `scale^m`.
pub const DEFAULT_KRONECKER_TOL: f64 = 1e-8;

/// Hankel determinants count as positive above this multiple of `scale^n`.
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum MarkovError {
    #[error("series diverges: |ζ| = {zeta_abs} must exceed R = {radius}")]
    Divergence { zeta_abs: f64, radius: f64 },
    #[error("point {abs} lies inside the support radius {radius}")]
    Domain { abs: f64, radius: f64 },
    #[error("coefficient table holds f_0..f_{have}, order needs f_{needed}")]
    InsufficientTable { needed: usize, have: usize },
    #[error("symbolic expansion of order {n} exceeds the cap {max}")]
    ExpansionOverflow { n: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("CSV error: {0}")]
    Csv(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Harmonics(#[from] HarmonicsError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl From<csv::Error> for MarkovError {
    fn from(e: csv::Error) -> Self {
        MarkovError::Csv(e.to_string())
    }
}

/// A function on the sphere as coefficients against `Y_{k,m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicExpansion {
    d: usize,
    coeffs: BTreeMap<(usize, usize), f64>,
}

impl HarmonicExpansion {
    pub fn new(d: usize) -> Self {
        HarmonicExpansion { d, coeffs: BTreeMap::new() }
    }

    pub fn insert(&mut self, k: usize, m: usize, c: f64) -> Result<(), HarmonicsError> {
        harmonics::check_dim(self.d)?;
        if m == 0 || m > dimension(self.d, k) {
            return Err(HarmonicsError::Index { d: self.d, k, m });
        }
        self.coeffs.insert((k, m), c);
        Ok(())
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&(usize, usize), &f64)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, k: usize, m: usize) -> f64 {
        self.coeffs.get(&(k, m)).copied().unwrap_or(0.0)
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.keys().map(|(k, _)| *k).max().unwrap_or(0)
    }

    pub fn eval(&self, theta: &[f64]) -> Result<f64, HarmonicsError> {
        check_unit(self.d, theta)?;
        Ok(self.eval_with(&eval_all(self.d, self.max_degree(), theta)))
    }

    fn eval_with(&self, ys: &[Vec<f64>]) -> f64 {
        self.coeffs.iter().map(|((k, m), c)| c * ys[*k][m - 1]).sum()
    }
}

/// Where a table's coefficients came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Measure(String),
    RawStream(String),
}

/// Truncated asymptotic expansion `f_0, ..., f_L` of the Markov transform.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    d: usize,
    radius: f64,
    entries: Vec<HarmonicExpansion>,
    provenance: Provenance,
    total_variation: Option<f64>,
}

/// Moment sequence `f_l(θ)` at a fixed direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalMoments {
    pub theta: Vec<f64>,
    pub values: MomentSeq,
}

impl DirectionalMoments {
    pub fn new(theta: Vec<f64>, values: Vec<f64>) -> Self {
        DirectionalMoments { theta, values: MomentSeq::new(values) }
    }

    /// Writes `l,value` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), MarkovError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["l", "value"])?;
        for (l, v) in self.values.values().iter().enumerate() {
            out.write_record([l.to_string(), fmt_num(*v)])?;
        }
        out.flush().map_err(|e| MarkovError::Csv(e.to_string()))?;
        Ok(())
    }

    /// Reads `l,value` rows; `l` must run `0, 1, 2, ...` without gaps.
    pub fn read_csv<R: Read>(r: R, theta: Vec<f64>) -> Result<Self, MarkovError> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut values = Vec::new();
        for (i, row) in rdr.deserialize::<(usize, f64)>().enumerate() {
            let (l, v) = row?;
            if l != i {
                return Err(MarkovError::Csv(format!("row {i} has l = {l}, expected {i}")));
            }
            values.push(v);
        }
        Ok(DirectionalMoments::new(theta, values))
    }
}

/// Scientific notation with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

impl CoefficientTable {
    /// Builds a table from `(l, k, m, coefficient)` rows of an external
    /// moment stream. Missing rows are zero.
    pub fn from_rows(
        d: usize,
        radius: f64,
        rows: &[(usize, usize, usize, f64)],
        label: impl Into<String>,
    ) -> Result<Self, MarkovError> {
        harmonics::check_dim(d)?;
        let lmax = rows.iter().map(|r| r.0).max().unwrap_or(0);
        let mut entries = vec![HarmonicExpansion::new(d); lmax + 1];
        for &(l, k, m, c) in rows {
            if k > l || (l - k) % 2 != 0 {
                return Err(MarkovError::Csv(format!("row (l = {l}, k = {k}) violates k <= l, k = l mod 2")));
            }
            entries[l].insert(k, m, c)?;
        }
        Ok(CoefficientTable {
            d,
            radius,
            entries,
            provenance: Provenance::RawStream(label.into()),
            total_variation: None,
        })
    }

    /// Attaches a total-variation bound, enabling tail bounds for raw streams.
    pub fn with_total_variation(mut self, tv: f64) -> Self {
        self.total_variation = Some(tv);
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Highest available index `L`.
    pub fn lmax(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entry(&self, l: usize) -> &HarmonicExpansion {
        &self.entries[l]
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn total_variation(&self) -> Option<f64> {
        self.total_variation
    }

    pub(crate) fn require(&self, needed: usize) -> Result<(), MarkovError> {
        if needed > self.lmax() {
            Err(MarkovError::InsufficientTable { needed, have: self.lmax() })
        } else {
            Ok(())
        }
    }

    /// `f_l(θ)` for `l ≤ count - 1`.
    pub fn directional_prefix(&self, theta: &[f64], count: usize) -> Result<DirectionalMoments, MarkovError> {
        check_unit(self.d, theta)?;
        if count > 0 {
            self.require(count - 1)?;
        }
        let ys = eval_all(self.d, count.saturating_sub(1), theta);
        let values = self.entries[..count].iter().map(|e| e.eval_with(&ys)).collect();
        Ok(DirectionalMoments::new(theta.to_vec(), values))
    }

    /// `f_0(θ), ..., f_L(θ)`.
    pub fn directional(&self, theta: &[f64]) -> Result<DirectionalMoments, MarkovError> {
        self.directional_prefix(theta, self.entries.len())
    }

    /// `(l, k, m, coefficient)` rows, every structurally allowed key included.
    pub fn rows(&self) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for (l, e) in self.entries.iter().enumerate() {
            for k in (l % 2..=l).step_by(2) {
                for m in 1..=dimension(self.d, k) {
                    out.push((l, k, m, e.coefficient(k, m)));
                }
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), MarkovError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["l", "k", "m", "coefficient"])?;
        for (l, k, m, c) in self.rows() {
            out.write_record([l.to_string(), k.to_string(), m.to_string(), fmt_num(c)])?;
        }
        out.flush().map_err(|e| MarkovError::Csv(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, d: usize, radius: f64, label: impl Into<String>) -> Result<Self, MarkovError> {
        let mut rdr = csv::Reader::from_reader(r);
        let rows = rdr
            .deserialize::<(usize, usize, usize, f64)>()
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(d, radius, &rows, label)
    }

    /// Largest `|f_l(θ)|` over the rule nodes and `l ≤ lmax`.
    pub fn scale_on(&self, rule: &SphereRule, lmax: usize) -> Result<f64, MarkovError> {
        let mut scale = 0.0f64;
        for th in &rule.nodes {
            let dm = self.directional_prefix(th, lmax + 1)?;
            scale = scale.max(dm.values.scale());
        }
        Ok(scale)
    }
}

/// Coefficient table `f_0, ..., f_L` of a measure.
pub fn coefficient_table(mu: &Measure, lmax: usize) -> Result<CoefficientTable, MarkovError> {
    let d = mu.d();
    let moments = mu.distributed_moments(lmax)?;
    let mut entries = vec![HarmonicExpansion::new(d); lmax + 1];
    for (&(t, k, m), c) in &moments {
        entries[2 * t + k].insert(k, m, *c)?;
    }
    Ok(CoefficientTable {
        d,
        radius: mu.radius(),
        entries,
        provenance: Provenance::Measure(mu.label().to_string()),
        total_variation: Some(mu.total_variation()),
    })
}

/// The homogeneous polynomial `F_l` with `F_l(ρθ) = ρ^l f_l(θ)`.
pub fn homog_lift(table: &CoefficientTable, l: usize) -> Result<HomogPoly, MarkovError> {
    table.require(l)?;
    let mut h = HomogPoly::zero(table.d, l);
    for (&(k, m), c) in table.entries[l].coefficients() {
        h.insert((l - k) / 2, k, m, *c)?;
    }
    Ok(h)
}

/// `F_l` in the monomial basis.
pub fn lift_mono(table: &CoefficientTable, l: usize) -> Result<MonoPoly, MarkovError> {
    Ok(homog_lift(table, l)?.to_mono())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |b, i| b * (n - i) as f64 / (i + 1) as f64)
}

/// Bound on `|Σ_{l > L} f_l(θ) ζ^{-l-1}|` from `|f_l| ≤ TV/ω_d · C(l+d-1, d-1) R^l`.
pub fn tail_bound(table: &CoefficientTable, zeta_abs: f64, lmax: usize) -> f64 {
    let Some(tv) = table.total_variation else {
        return f64::INFINITY;
    };
    if tv == 0.0 {
        return 0.0;
    }
    let (d, r) = (table.d, table.radius);
    if zeta_abs <= r {
        return f64::INFINITY;
    }
    let q = r / zeta_abs;
    let term = |l: usize| binomial(l + d - 1, d - 1) * q.powi(l as i32) / zeta_abs;
    let mut sum = 0.0;
    let mut l = lmax + 1;
    loop {
        let t = term(l);
        let ratio = term(l + 1) / t;
        sum += t;
        // Successive ratios decrease towards q < 1, so a geometric tail closes the sum.
        if ratio < 1.0 && t * ratio / (1.0 - ratio) <= 1e-17 * sum {
            sum += t * ratio / (1.0 - ratio);
            break;
        }
        if !t.is_finite() || l > lmax + 100_000 {
            return f64::INFINITY;
        }
        l += 1;
    }
    tv / harmonics::surface_area(d) * sum
}

/// Truncated series `Σ_{l ≤ L} f_l(θ) ζ^{-l-1}` with its tail bound.
pub fn eval_series(
    table: &CoefficientTable,
    zeta: Complex64,
    theta: &[f64],
    lmax: usize,
) -> Result<(Complex64, f64), MarkovError> {
    if zeta.norm() <= table.radius {
        return Err(MarkovError::Divergence { zeta_abs: zeta.norm(), radius: table.radius });
    }
    let dm = table.directional_prefix(theta, lmax + 1)?;
    let inv = 1.0 / zeta;
    let mut power = inv;
    let mut sum = Complex64::new(0.0, 0.0);
    for f in dm.values.values() {
        sum += power * f;
        power *= inv;
    }
    Ok((sum, tail_bound(table, zeta.norm(), lmax)))
}

/// `(1/ω_d) ζ^{d-1} / r(ζθ - x)^d` for one point `x`.
fn kernel(d: usize, zeta: Complex64, theta: &[f64], x: &[f64]) -> Complex64 {
    let proj: f64 = theta.iter().zip(x).map(|(a, b)| a * b).sum();
    let perp = (norm(x).powi(2) - proj * proj).max(0.0).sqrt();
    let a = Complex64::new(proj, perp);
    let u = Complex64::new(1.0, 0.0) - a / zeta;
    let v = Complex64::new(1.0, 0.0) - a.conj() / zeta;
    let g = u * v;
    let gd = if d == 2 { g } else { g * u.sqrt() * v.sqrt() };
    1.0 / (harmonics::surface_area(d) * zeta * gd)
}

/// Markov transform by direct integration of the kernel.
pub fn eval_kernel(mu: &Measure, zeta: Complex64, theta: &[f64]) -> Result<Complex64, MarkovError> {
    check_unit(mu.d(), theta)?;
    let limit = match mu.kind() {
        MeasureKind::Discrete { atoms } => atoms.iter().map(|(x, _)| norm(x)).fold(0.0, f64::max),
        _ => mu.radius(),
    };
    if zeta.norm() <= limit {
        return Err(MarkovError::Domain { abs: zeta.norm(), radius: limit });
    }
    let d = mu.d();
    if let MeasureKind::Discrete { atoms } = mu.kind() {
        return Ok(atoms.iter().map(|(x, w)| kernel(d, zeta, theta, x) * w).sum());
    }
    let re = mu.integrate_fn(|x| kernel(d, zeta, theta, x).re)?;
    let im = mu.integrate_fn(|x| kernel(d, zeta, theta, x).im)?;
    Ok(Complex64::new(re, im))
}

/// Real transform `(1/ω_d) ∫ |y|^d / |y - x|^d dμ(x)`.
pub fn eval_real(mu: &Measure, y: &[f64]) -> Result<f64, MarkovError> {
    if y.len() != mu.d() {
        return Err(MarkovError::Dimension { expected: mu.d(), got: y.len() });
    }
    let ny = norm(y);
    if ny <= mu.radius() {
        return Err(MarkovError::Domain { abs: ny, radius: mu.radius() });
    }
    let d = mu.d() as i32;
    let f = |x: &[f64]| {
        let dist: f64 = y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        (ny / dist).powi(d)
    };
    Ok(mu.integrate_fn(f)? / harmonics::surface_area(mu.d()))
}

/// `H_n(μ, θ)`.
pub fn hankel(table: &CoefficientTable, theta: &[f64], n: usize) -> Result<f64, MarkovError> {
    if n == 0 {
        return Ok(1.0);
    }
    let dm = table.directional_prefix(theta, 2 * n - 1)?;
    Ok(hankel_det(&dm.values, n)?)
}

/// `H̃_n` with `H̃_n(ζθ) = ζ^{n(n-1)} H_n(μ, θ)`, expanded in the
/// `|x|^{2t} Y_{k,m}` basis.
pub fn hankel_poly(table: &CoefficientTable, n: usize) -> Result<HomogPoly, MarkovError> {
    if n > MAX_SYMBOLIC_ORDER {
        return Err(MarkovError::ExpansionOverflow { n, max: MAX_SYMBOLIC_ORDER });
    }
    let deg = n * n.saturating_sub(1);
    if n == 0 {
        return Ok(MonoPoly::constant(table.d, 1.0).to_gauss().homogeneous_component(0));
    }
    table.require(2 * n - 2)?;
    let lifts = (0..=2 * n - 2).map(|l| lift_mono(table, l)).collect::<Result<Vec<_>, _>>()?;
    let matrix: Vec<Vec<MonoPoly>> = (0..n).map(|i| (0..n).map(|j| lifts[i + j].clone()).collect()).collect();
    Ok(poly_det(&matrix, table.d).to_gauss().homogeneous_component(deg))
}

/// Smallest normalized Hankel determinant found for one order.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderMinimum {
    pub n: usize,
    /// `min_θ H_n(μ, θ) / scale^n`.
    pub min_ratio: f64,
    pub min_value: f64,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub scale: f64,
    pub tolerance: f64,
    pub orders: Vec<OrderMinimum>,
    pub positive: bool,
    /// First order and direction where positivity fails.
    pub witness: Option<(usize, Vec<f64>)>,
}

/// Samples `H_n(μ, θ)` for `n ≤ max_order` on a sphere rule and decides
/// whether every value exceeds `POSITIVITY_TOL · scale^n`.
pub fn hankel_positivity_report(
    table: &CoefficientTable,
    max_order: usize,
    sphere_degree: usize,
) -> Result<PositivityReport, MarkovError> {
    table.require(2 * max_order.max(1) - 2)?;
    let rule = harmonics::sphere_rule(table.d, sphere_degree)?;
    let count = 2 * max_order.max(1) - 1;
    let scale = table.scale_on(&rule, count - 1)?;
    let per_dir: Vec<Vec<f64>> = rule
        .nodes
        .par_iter()
        .map(|th| {
            let dm = table.directional_prefix(th, count)?;
            (1..=max_order).map(|n| Ok(hankel_det(&dm.values, n)?)).collect::<Result<Vec<f64>, MarkovError>>()
        })
        .collect::<Result<_, _>>()?;
    let mut orders = Vec::new();
    let mut witness = None;
    for n in 1..=max_order {
        let denom = scale.powi(n as i32);
        let (j, value) = per_dir
            .iter()
            .enumerate()
            .map(|(j, h)| (j, h[n - 1]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("sphere rules are nonempty");
        let ratio = if denom > 0.0 { value / denom } else { 0.0 };
        if witness.is_none() && !(ratio > POSITIVITY_TOL) {
            witness = Some((n, rule.nodes[j].clone()));
        }
        orders.push(OrderMinimum { n, min_ratio: ratio, min_value: value, theta: rule.nodes[j].clone() });
    }
    Ok(PositivityReport { scale, tolerance: POSITIVITY_TOL, orders, positive: witness.is_none(), witness })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerReport {
    pub rational: bool,
    pub detected_degree: Option<usize>,
    pub n_max: usize,
    pub tol: f64,
    pub scale: f64,
    pub directions: Vec<Vec<f64>>,
    /// `residuals[j][m - 1] = |H_m(μ, θ_j)| / scale^m` (raw `|H_m|` when the scale is 0).
    pub residuals: Vec<Vec<f64>>,
    /// `max_j residuals[j][m - 1]`.
    pub max_residual: Vec<f64>,
}

/// Numerical Kronecker test: the smallest `n ≤ n_max` with
/// `max_θ |H_m(μ, θ)| ≤ tol · scale^m` for every `n ≤ m ≤ n_max`.
pub fn kronecker_test(table: &CoefficientTable, n_max: usize, tol: f64) -> Result<KroneckerReport, MarkovError> {
    let n_max = n_max.max(1);
    table.require(2 * n_max - 2)?;
    let rule = harmonics::sphere_rule(table.d, 2 * n_max)?;
    let count = 2 * n_max - 1;
    let scale = table.scale_on(&rule, count - 1)?;
    let residuals: Vec<Vec<f64>> = rule
        .nodes
        .par_iter()
        .map(|th| {
            let dm = table.directional_prefix(th, count)?;
            (1..=n_max)
                .map(|m| {
                    let h = hankel_det(&dm.values, m)?.abs();
                    Ok(if scale > 0.0 { h / scale.powi(m as i32) } else { h })
                })
                .collect::<Result<Vec<f64>, MarkovError>>()
        })
        .collect::<Result<_, _>>()?;
    let max_residual: Vec<f64> =
        (0..n_max).map(|i| residuals.iter().map(|r| r[i]).fold(0.0, f64::max)).collect();
    let below: Vec<bool> = max_residual.iter().map(|r| *r <= tol).collect();
    let mut first = None;
    for n in (1..=n_max).rev() {
        if below[n - 1] {
            first = Some(n);
        } else {
            break;
        }
    }
    Ok(KroneckerReport {
        rational: first.is_some(),
        detected_degree: first.map(|n| n - 1),
        n_max,
        tol,
        scale,
        directions: rule.nodes,
        residuals,
        max_residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlaneViolation {
    pub zeta: Complex64,
    pub theta: Vec<f64>,
    pub imag: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlaneReport {
    pub samples: usize,
    pub violations: Vec<HalfPlaneViolation>,
}

impl HalfPlaneReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `Im μ̂(ζ, θ) ≤ tail bound` at sample points with `Im ζ > 0`,
/// `|ζ| > R`.
pub fn upper_halfplane_sign_check(
    table: &CoefficientTable,
    samples: &[(Complex64, Vec<f64>)],
) -> Result<HalfPlaneReport, MarkovError> {
    let lmax = table.lmax();
    let mut violations = Vec::new();
    for (zeta, theta) in samples {
        let (value, bound) = eval_series(table, *zeta, theta, lmax)?;
        if value.im > bound {
            violations.push(HalfPlaneViolation { zeta: *zeta, theta: theta.clone(), imag: value.im, bound });
        }
    }
    Ok(HalfPlaneReport { samples: samples.len(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{RadialFunction, RadialMeasure};
    use std::f64::consts::PI;

    fn line(d: usize) -> Measure {
        Measure::new(d, 1.0, MeasureKind::RadialTimesDirac { radial: RadialMeasure::Density(RadialFunction::lebesgue(0.0, 1.0)) })
            .unwrap()
    }

    #[test]
    fn line_measure_closed_form() {
        let table = coefficient_table(&line(2), 8).unwrap();
        for l in 0..=8 {
            for t in [0.3f64, 1.1, 2.5] {
                let f = table.entry(l).eval(&[t.cos(), t.sin()]).unwrap();
                let expect = ((l + 1) as f64 * t).sin() / t.sin() / ((l + 1) as f64 * 2.0 * PI);
                assert!((f - expect).abs() <= 1e-12 * expect.abs().max(1e-3), "l={l} t={t}");
            }
        }
    }

    #[test]
    fn parity_structure() {
        let mu = Measure::discrete(3, 1.0, vec![(vec![0.3, -0.2, 0.5], 1.0), (vec![0.0, 0.1, -0.4], 2.0)]).unwrap();
        let table = coefficient_table(&mu, 7).unwrap();
        for l in 0..=7 {
            for (&(k, _), _) in table.entry(l).coefficients() {
                assert!(k <= l && (l - k) % 2 == 0);
            }
        }
    }

    #[test]
    fn origin_atom_and_zero_measure() {
        let mu = Measure::discrete(2, 1.0, vec![(vec![0.0, 0.0], 1.0)]).unwrap();
        let z = Complex64::new(1.5, 0.7);
        let v = eval_kernel(&mu, z, &[1.0, 0.0]).unwrap();
        assert!((v - 1.0 / (2.0 * PI * z)).norm() < 1e-15);
        assert!((eval_real(&mu, &[2.0, 1.0]).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let zero = Measure::zero(3, 1.0).unwrap();
        let table = coefficient_table(&zero, 5).unwrap();
        let (v, b) = eval_series(&table, z * 2.0, &[0.0, 0.0, 1.0], 5).unwrap();
        assert_eq!((v, b), (Complex64::new(0.0, 0.0), 0.0));
        assert_eq!(eval_real(&zero, &[2.0, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn d2_real_kernel() {
        let x = [0.3, -0.4];
        let mu = Measure::discrete(2, 1.0, vec![(x.to_vec(), 2.0)]).unwrap();
        let th = [0.6, 0.8];
        let rho = 1.7;
        let v = eval_kernel(&mu, Complex64::new(rho, 0.0), &th).unwrap();
        let ip = th[0] * x[0] + th[1] * x[1];
        let expect = 2.0 * rho / (rho * rho - 2.0 * rho * ip + 0.25) / (2.0 * PI);
        assert!((v.re - expect).abs() < 1e-14 && v.im.abs() < 1e-15);
    }

    #[test]
    fn divergence_and_domain_errors() {
        let mu = line(2);
        let table = coefficient_table(&mu, 4).unwrap();
        assert!(matches!(eval_series(&table, Complex64::new(0.5, 0.0), &[1.0, 0.0], 4), Err(MarkovError::Divergence { .. })));
        assert!(matches!(eval_real(&mu, &[0.5, 0.0]), Err(MarkovError::Domain { .. })));
        assert!(matches!(hankel(&table, &[1.0, 0.0], 4), Err(MarkovError::InsufficientTable { .. })));
    }

    #[test]
    fn kernel_for_continuous_measures_matches_series() {
        for d in [2, 3] {
            let mu = line(d);
            let table = coefficient_table(&mu, 60).unwrap();
            let theta = if d == 2 { vec![0.6, 0.8] } else { vec![0.0, 0.6, 0.8] };
            let z = Complex64::new(2.5, 1.5);
            let k = eval_kernel(&mu, z, &theta).unwrap();
            let (s, b) = eval_series(&table, z, &theta, 60).unwrap();
            assert!((k - s).norm() <= b + 1e-12, "d={d}: {k} {s} {b}");
        }
    }

    #[test]
    fn hankel_poly_homogeneity() {
        let mu = Measure::discrete(2, 1.0, vec![(vec![0.5, 0.1], 1.0), (vec![-0.2, 0.6], 0.7), (vec![0.1, -0.8], 0.4)]).unwrap();
        let table = coefficient_table(&mu, 6).unwrap();
        let th = [0.28, 0.96];
        for n in 1..=3 {
            let h = hankel(&table, &th, n).unwrap();
            let poly = hankel_poly(&table, n).unwrap();
            let at2 = poly.eval(&[2.0 * th[0], 2.0 * th[1]]).unwrap();
            let expect = 2f64.powi((n * (n - 1)) as i32) * h;
            assert!((at2 - expect).abs() <= 1e-10 * expect.abs().max(1e-12), "n={n} {at2} {expect}");
        }
        assert!(matches!(hankel_poly(&table, 6), Err(MarkovError::ExpansionOverflow { .. })));
    }

    #[test]
    fn degenerate_direction_of_line_measure() {
        let table = coefficient_table(&line(2), 6).unwrap();
        let e1 = [1.0, 0.0];
        let dm = table.directional(&e1).unwrap();
        for v in dm.values.values() {
            assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-14);
        }
        assert!(hankel(&table, &e1, 2).unwrap().abs() < 1e-15);
        let report = hankel_positivity_report(&table, 3, 8).unwrap();
        assert!(!report.positive);
    }

    #[test]
    fn zero_measure_reports() {
        let table = coefficient_table(&Measure::zero(2, 1.0).unwrap(), 10).unwrap();
        let k = kronecker_test(&table, 4, DEFAULT_KRONECKER_TOL).unwrap();
        assert!(k.rational);
        assert_eq!(k.detected_degree, Some(0));
        let p = hankel_positivity_report(&table, 3, 6).unwrap();
        assert!(!p.positive);
        assert_eq!(p.witness.as_ref().map(|w| w.0), Some(1));
        let hp = upper_halfplane_sign_check(&table, &[(Complex64::new(0.0, 2.0), vec![1.0, 0.0])]).unwrap();
        assert!(hp.passed());
    }

    #[test]
    fn csv_round_trips() {
        let mu = Measure::discrete(2, 1.0, vec![(vec![0.5, 0.1], 1.0 / 3.0)]).unwrap();
        let table = coefficient_table(&mu, 5).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let back = CoefficientTable::read_csv(&buf[..], 2, 1.0, "csv").unwrap();
        assert_eq!(back.rows(), table.rows());
        let dm = table.directional(&[0.6, 0.8]).unwrap();
        let mut buf = Vec::new();
        dm.write_csv(&mut buf).unwrap();
        let back = DirectionalMoments::read_csv(&buf[..], dm.theta.clone()).unwrap();
        assert_eq!(back, dm);
    }
}
