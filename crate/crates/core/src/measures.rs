//! Measure models with support in a ball, distributed moments, exact
//! polynomial integration and the JSON description format.
//!
//! # JSON schema
//!
//! Every document carries `d` (2 or 3), `R` (support radius) and a `variant`
//! tag, plus the variant payload:
//!
//! - `discrete`: `atoms: [[[x_1, ..., x_d], weight], ...]`
//! - `radial_product`: `radial: <radial>`, the measure `σ ⊗ dθ`
//! - `radial_times_dirac`: `radial: <radial>`, σ placed on the positive first
//!   coordinate axis
//! - `polar_density` (d = 2 only): `w0: <function>`, `w1: <function>`,
//!   optional `assert_hankel_positive: bool`; the measure
//!   `(w0(r) + w1(r) cos ϑ) r dr dϑ`
//!
//! A `<radial>` is either `{"atoms": [[r, weight], ...]}` or a `<function>`.
//! A `<function>` is `{"density": D, "interval": [a, b], "scale": s}` where
//! `D` is `"lebesgue"`, `{"power": p}` (r^p, p ≥ 0) or
//! `{"table": [[r, value], ...]}` (linear interpolation, zero outside the
//! knots); `scale` defaults to 1.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::harmonics::{self, check_dim, dimension, eval_all, norm, HarmonicsError};
use crate::polyalg::MonoPoly;
use crate::quadrature::adaptive_integrate;

/// Relative tolerance of every density integral.
pub const QUADRATURE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("quadrature did not converge while integrating {0}")]
    Quadrature(String),
    #[error("Hankel-positivity hypothesis |w1| <= w0 fails at r = {r} (w0 = {w0}, w1 = {w1})")]
    HankelHypothesis { r: f64, w0: f64, w1: f64 },
    #[error("polynomial has dimension {got}, measure has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Harmonics(#[from] HarmonicsError),
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> MeasureError {
    MeasureError::Schema { path: path.into(), message: message.into() }
}

/// Named radial weight functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    Lebesgue,
    Power(f64),
    Table(Vec<(f64, f64)>),
}

/// `r ↦ scale · density(r)` on `interval`, zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialFunction {
    pub density: Density,
    pub interval: (f64, f64),
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

impl RadialFunction {
    pub fn lebesgue(a: f64, b: f64) -> Self {
        RadialFunction { density: Density::Lebesgue, interval: (a, b), scale: 1.0 }
    }

    pub fn power(p: f64, a: f64, b: f64) -> Self {
        RadialFunction { density: Density::Power(p), interval: (a, b), scale: 1.0 }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn value(&self, r: f64) -> f64 {
        let (a, b) = self.interval;
        if r < a || r > b {
            return 0.0;
        }
        self.scale
            * match &self.density {
                Density::Lebesgue => 1.0,
                Density::Power(p) => r.powf(*p),
                Density::Table(knots) => interpolate(knots, r),
            }
    }

    /// Integration breakpoints: the interval ends and interior table knots.
    fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = self.interval;
        let mut pts = vec![a];
        if let Density::Table(knots) = &self.density {
            pts.extend(knots.iter().map(|k| k.0).filter(|r| *r > a && *r < b));
        }
        pts.push(b);
        pts
    }

    /// `∫ r^j · value(r) dr`.
    pub fn moment(&self, j: usize) -> Result<f64, MeasureError> {
        let (a, b) = self.interval;
        let e = j as f64 + 1.0;
        match &self.density {
            Density::Lebesgue => Ok(self.scale * (b.powf(e) - a.powf(e)) / e),
            Density::Power(p) => Ok(self.scale * (b.powf(e + p) - a.powf(e + p)) / (e + p)),
            Density::Table(_) => self.integrate(|r| r.powi(j as i32)),
        }
    }

    /// `∫ g(r) · value(r) dr` over the interval, split at table knots.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64, MeasureError> {
        let pts = self.breakpoints();
        let mut total = 0.0;
        for w in pts.windows(2) {
            total += adaptive_integrate(|r| g(r) * self.value(r), w[0], w[1], QUADRATURE_TOL)
                .ok_or_else(|| MeasureError::Quadrature(format!("radial density on [{}, {}]", w[0], w[1])))?;
        }
        Ok(total)
    }

    /// Upper bound for `∫ |value(r)| dr`, exact unless a table changes sign
    /// inside a segment.
    pub fn abs_mass(&self) -> f64 {
        let (a, b) = self.interval;
        let raw = match &self.density {
            Density::Lebesgue => b - a,
            Density::Power(p) => (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0),
            Density::Table(_) => {
                let pts = self.breakpoints();
                pts.windows(2)
                    .map(|w| {
                        let (l, r) = (self.value(w[0]) / self.scale, self.value(w[1]) / self.scale);
                        0.5 * (w[1] - w[0]) * (l.abs() + r.abs())
                    })
                    .sum()
            }
        };
        self.scale.abs() * raw
    }

    fn validate(&self, path: &str, radius: f64) -> Result<(), MeasureError> {
        let (a, b) = self.interval;
        if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b && b <= radius) {
            return Err(schema(format!("{path}.interval"), format!("need 0 <= a < b <= R = {radius}, got [{a}, {b}]")));
        }
        if !self.scale.is_finite() {
            return Err(schema(format!("{path}.scale"), "scale must be finite"));
        }
        match &self.density {
            Density::Lebesgue => {}
            Density::Power(p) => {
                if !(p.is_finite() && *p >= 0.0) {
                    return Err(schema(format!("{path}.density.power"), format!("exponent must be >= 0, got {p}")));
                }
            }
            Density::Table(knots) => {
                if knots.len() < 2 {
                    return Err(schema(format!("{path}.density.table"), "a table needs at least two knots"));
                }
                for (i, (r, v)) in knots.iter().enumerate() {
                    if !(r.is_finite() && v.is_finite()) {
                        return Err(schema(format!("{path}.density.table[{i}]"), "knot entries must be finite"));
                    }
                    if i > 0 && knots[i - 1].0 >= *r {
                        return Err(schema(format!("{path}.density.table[{i}]"), "knots must be strictly increasing"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn interpolate(knots: &[(f64, f64)], r: f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if r < first.0 || r > last.0 {
        return 0.0;
    }
    let i = knots.partition_point(|k| k.0 <= r).clamp(1, knots.len() - 1);
    let (r0, v0) = knots[i - 1];
    let (r1, v1) = knots[i];
    v0 + (v1 - v0) * (r - r0) / (r1 - r0)
}

/// A measure on `[0, R]`: finitely many atoms or a weight function.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialMeasure {
    Atoms(Vec<(f64, f64)>),
    Density(RadialFunction),
}

impl RadialMeasure {
    /// `∫ r^j dσ(r)`.
    pub fn moment(&self, j: usize) -> Result<f64, MeasureError> {
        match self {
            RadialMeasure::Atoms(atoms) => Ok(atoms.iter().map(|(r, w)| w * r.powi(j as i32)).sum()),
            RadialMeasure::Density(f) => f.moment(j),
        }
    }

    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64, MeasureError> {
        match self {
            RadialMeasure::Atoms(atoms) => Ok(atoms.iter().map(|(r, w)| w * g(*r)).sum()),
            RadialMeasure::Density(f) => f.integrate(g),
        }
    }

    /// Total variation `∫ |dσ|` (an upper bound for sign-changing tables).
    pub fn abs_mass(&self) -> f64 {
        match self {
            RadialMeasure::Atoms(atoms) => atoms.iter().map(|(_, w)| w.abs()).sum(),
            RadialMeasure::Density(f) => f.abs_mass(),
        }
    }

    fn validate(&self, path: &str, radius: f64) -> Result<(), MeasureError> {
        match self {
            RadialMeasure::Atoms(atoms) => {
                for (i, (r, w)) in atoms.iter().enumerate() {
                    if !(r.is_finite() && w.is_finite() && *r >= 0.0 && *r <= radius) {
                        return Err(schema(
                            format!("{path}.atoms[{i}]"),
                            format!("need finite weight and 0 <= r <= R = {radius}, got ({r}, {w})"),
                        ));
                    }
                }
                Ok(())
            }
            RadialMeasure::Density(f) => f.validate(path, radius),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadialDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    atoms: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density: Option<Density>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interval: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
}

impl RadialDoc {
    fn into_measure(self, path: &str) -> Result<RadialMeasure, MeasureError> {
        match (self.atoms, self.density, self.interval) {
            (Some(atoms), None, None) if self.scale.is_none() => Ok(RadialMeasure::Atoms(atoms)),
            (None, Some(density), Some(interval)) => Ok(RadialMeasure::Density(RadialFunction {
                density,
                interval,
                scale: self.scale.unwrap_or(1.0),
            })),
            (None, Some(_), None) => Err(schema(format!("{path}.interval"), "missing field `interval`")),
            _ => Err(schema(path, "expected either `atoms` or `density` with `interval`")),
        }
    }

    fn from_measure(m: &RadialMeasure) -> Self {
        match m {
            RadialMeasure::Atoms(atoms) => {
                RadialDoc { atoms: Some(atoms.clone()), density: None, interval: None, scale: None }
            }
            RadialMeasure::Density(f) => RadialDoc {
                atoms: None,
                density: Some(f.density.clone()),
                interval: Some(f.interval),
                scale: (f.scale != 1.0).then_some(f.scale),
            },
        }
    }
}

/// Variant payload of a [`Measure`].
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    /// Point masses `Σ w_i δ_{x_i}`.
    Discrete { atoms: Vec<(Vec<f64>, f64)> },
    /// `σ ⊗ dθ`: `∫ u dμ = ∫∫ u(rθ) dσ(r) dθ`.
    RadialProduct { radial: RadialMeasure },
    /// σ on the positive first coordinate axis: `∫ u dμ = ∫ u(r e_1) dσ(r)`.
    RadialTimesDirac { radial: RadialMeasure },
    /// `(w0(r) + w1(r) cos ϑ) r dr dϑ` in the plane.
    PolarDensity { w0: RadialFunction, w1: RadialFunction, assert_hankel_positive: bool },
}

/// A finite signed measure on ℝ^d supported in the closed ball of radius `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    d: usize,
    radius: f64,
    kind: MeasureKind,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscreteDoc {
    variant: String,
    d: usize,
    #[serde(rename = "R")]
    radius: f64,
    atoms: Vec<(Vec<f64>, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadialKindDoc {
    variant: String,
    d: usize,
    #[serde(rename = "R")]
    radius: f64,
    radial: RadialDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolarDoc {
    variant: String,
    d: usize,
    #[serde(rename = "R")]
    radius: f64,
    w0: RadialFunction,
    w1: RadialFunction,
    #[serde(default)]
    assert_hankel_positive: bool,
}

fn from_value<T: serde::de::DeserializeOwned>(value: Value) -> Result<T, MeasureError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })
}

const VARIANTS: [&str; 4] = ["discrete", "radial_product", "radial_times_dirac", "polar_density"];

/// Parses a measure document, reporting schema violations with their field
/// path.
pub fn parse_measure(text: &str) -> Result<Measure, MeasureError> {
    let value: Value = serde_json::from_str(text).map_err(|e| schema(".", e.to_string()))?;
    let Some(obj) = value.as_object() else {
        return Err(schema(".", "expected a JSON object"));
    };
    let tag = match obj.get("variant") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(schema("variant", "expected a string")),
        None => return Err(schema("variant", "missing field `variant`")),
    };
    match tag.as_str() {
        "discrete" => {
            let doc: DiscreteDoc = from_value(value)?;
            Measure::new(doc.d, doc.radius, MeasureKind::Discrete { atoms: doc.atoms })
        }
        "radial_product" | "radial_times_dirac" => {
            let doc: RadialKindDoc = from_value(value)?;
            let radial = doc.radial.into_measure("radial")?;
            let kind = if tag == "radial_product" {
                MeasureKind::RadialProduct { radial }
            } else {
                MeasureKind::RadialTimesDirac { radial }
            };
            Measure::new(doc.d, doc.radius, kind)
        }
        "polar_density" => {
            let doc: PolarDoc = from_value(value)?;
            Measure::new(
                doc.d,
                doc.radius,
                MeasureKind::PolarDensity { w0: doc.w0, w1: doc.w1, assert_hankel_positive: doc.assert_hankel_positive },
            )
        }
        other => Err(schema("variant", format!("unknown variant `{other}`, expected one of {}", VARIANTS.join(", ")))),
    }
}

/// Serializes a measure in the schema accepted by [`parse_measure`].
pub fn emit_measure(m: &Measure) -> String {
    let value = match &m.kind {
        MeasureKind::Discrete { atoms } => serde_json::to_value(DiscreteDoc {
            variant: "discrete".into(),
            d: m.d,
            radius: m.radius,
            atoms: atoms.clone(),
        }),
        MeasureKind::RadialProduct { radial } | MeasureKind::RadialTimesDirac { radial } => {
            let variant = if matches!(m.kind, MeasureKind::RadialProduct { .. }) {
                "radial_product"
            } else {
                "radial_times_dirac"
            };
            serde_json::to_value(RadialKindDoc {
                variant: variant.into(),
                d: m.d,
                radius: m.radius,
                radial: RadialDoc::from_measure(radial),
            })
        }
        MeasureKind::PolarDensity { w0, w1, assert_hankel_positive } => serde_json::to_value(PolarDoc {
            variant: "polar_density".into(),
            d: m.d,
            radius: m.radius,
            w0: w0.clone(),
            w1: w1.clone(),
            assert_hankel_positive: *assert_hankel_positive,
        }),
    };
    serde_json::to_string_pretty(&value.expect("measure documents serialize")).expect("values serialize")
}

/// `∫_{S^{d-1}} θ^α dθ` in closed form.
pub fn sphere_monomial_integral(exps: &[u32]) -> f64 {
    if exps.iter().any(|e| e % 2 == 1) {
        return 0.0;
    }
    let num: f64 = exps.iter().map(|e| half_gamma(e + 1)).product();
    let total: u32 = exps.iter().sum::<u32>() + exps.len() as u32;
    2.0 * num / half_gamma(total)
}

/// `Γ(n/2)` for a positive integer `n`.
fn half_gamma(n: u32) -> f64 {
    let mut x = n as f64 / 2.0;
    let mut acc = 1.0;
    while x > 1.0 {
        x -= 1.0;
        acc *= x;
    }
    if (x - 0.5).abs() < 1e-12 {
        acc * PI.sqrt()
    } else {
        acc
    }
}

impl Measure {
    /// Validates and builds a measure.
    pub fn new(d: usize, radius: f64, kind: MeasureKind) -> Result<Self, MeasureError> {
        check_dim(d).map_err(|e| schema("d", e.to_string()))?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(schema("R", format!("radius must be positive and finite, got {radius}")));
        }
        match &kind {
            MeasureKind::Discrete { atoms } => {
                for (i, (x, w)) in atoms.iter().enumerate() {
                    if x.len() != d {
                        return Err(schema(format!("atoms[{i}]"), format!("point has {} coordinates, expected {d}", x.len())));
                    }
                    if !(w.is_finite() && x.iter().all(|v| v.is_finite())) {
                        return Err(schema(format!("atoms[{i}]"), "entries must be finite"));
                    }
                    let r = norm(x);
                    if r > radius * (1.0 + 1e-12) {
                        return Err(schema(format!("atoms[{i}]"), format!("|x| = {r} exceeds R = {radius}")));
                    }
                }
            }
            MeasureKind::RadialProduct { radial } | MeasureKind::RadialTimesDirac { radial } => {
                radial.validate("radial", radius)?;
            }
            MeasureKind::PolarDensity { w0, w1, assert_hankel_positive } => {
                if d != 2 {
                    return Err(schema("d", "polar_density requires d = 2"));
                }
                w0.validate("w0", radius)?;
                w1.validate("w1", radius)?;
                if *assert_hankel_positive {
                    for i in 0..=400 {
                        let r = radius * i as f64 / 400.0;
                        let (a, b) = (w0.value(r), w1.value(r));
                        if b.abs() > a + 1e-14 * a.abs().max(1.0) {
                            return Err(MeasureError::HankelHypothesis { r, w0: a, w1: b });
                        }
                    }
                }
            }
        }
        Ok(Measure { d, radius, kind })
    }

    /// The zero measure (no atoms).
    pub fn zero(d: usize, radius: f64) -> Result<Self, MeasureError> {
        Self::new(d, radius, MeasureKind::Discrete { atoms: Vec::new() })
    }

    pub fn discrete(d: usize, radius: f64, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self, MeasureError> {
        Self::new(d, radius, MeasureKind::Discrete { atoms })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// Short description used as provenance.
    pub fn label(&self) -> &'static str {
        match self.kind {
            MeasureKind::Discrete { .. } => "discrete",
            MeasureKind::RadialProduct { .. } => "radial_product",
            MeasureKind::RadialTimesDirac { .. } => "radial_times_dirac",
            MeasureKind::PolarDensity { .. } => "polar_density",
        }
    }

    pub fn is_hankel_positive_asserted(&self) -> bool {
        matches!(self.kind, MeasureKind::PolarDensity { assert_hankel_positive: true, .. })
    }

    /// Total variation `|μ|(ℝ^d)` or an upper bound for it.
    pub fn total_variation(&self) -> f64 {
        match &self.kind {
            MeasureKind::Discrete { atoms } => atoms.iter().map(|(_, w)| w.abs()).sum(),
            MeasureKind::RadialProduct { radial } => harmonics::surface_area(self.d) * radial.abs_mass(),
            MeasureKind::RadialTimesDirac { radial } => radial.abs_mass(),
            MeasureKind::PolarDensity { w0, w1, .. } => {
                // ∫ |w| r dr, bounded by r ≤ b for tables.
                let bound = |f: &RadialFunction| match f.density {
                    Density::Table(_) => f.abs_mass() * f.interval.1,
                    _ => f.moment(1).map(f64::abs).unwrap_or(f64::INFINITY),
                };
                2.0 * PI * (bound(w0) + bound(w1))
            }
        }
    }

    /// Distributed moment `c_{s,k,m} = ∫ |x|^{2s} Y_{k,m}(x) dμ`.
    pub fn distributed_moment(&self, s: usize, k: usize, m: usize) -> Result<f64, MeasureError> {
        if m == 0 || m > dimension(self.d, k) {
            return Err(HarmonicsError::Index { d: self.d, k, m }.into());
        }
        let all = self.distributed_moments(2 * s + k)?;
        Ok(all.get(&(s, k, m)).copied().unwrap_or(0.0))
    }

    /// Every `c_{t,k,m}` with `2t + k ≤ lmax`. Entries that vanish by
    /// structure are stored as exact zeros.
    pub fn distributed_moments(&self, lmax: usize) -> Result<BTreeMap<(usize, usize, usize), f64>, MeasureError> {
        let d = self.d;
        let mut out = BTreeMap::new();
        let keys = || {
            harmonics::indices(d, lmax)
                .into_iter()
                .flat_map(move |(k, m)| (0..=(lmax - k) / 2).map(move |t| (t, k, m)))
        };
        match &self.kind {
            MeasureKind::Discrete { atoms } => {
                for key in keys() {
                    out.insert(key, 0.0);
                }
                for (x, w) in atoms {
                    let r = norm(x);
                    if r == 0.0 {
                        let y0 = 1.0 / harmonics::surface_area(d).sqrt();
                        *out.get_mut(&(0, 0, 1)).expect("key present") += w * y0;
                        continue;
                    }
                    let dir: Vec<f64> = x.iter().map(|v| v / r).collect();
                    let ys = eval_all(d, lmax, &dir);
                    for ((t, k, m), c) in out.iter_mut() {
                        *c += w * r.powi((2 * t + k) as i32) * ys[*k][m - 1];
                    }
                }
            }
            MeasureKind::RadialProduct { radial } => {
                let root = harmonics::surface_area(d).sqrt();
                for key in keys() {
                    let (t, k, _) = key;
                    let v = if k == 0 { root * radial.moment(2 * t)? } else { 0.0 };
                    out.insert(key, v);
                }
            }
            MeasureKind::RadialTimesDirac { radial } => {
                let mut e1 = vec![0.0; d];
                e1[0] = 1.0;
                let ys = eval_all(d, lmax, &e1);
                let moments = (0..=lmax).map(|j| radial.moment(j)).collect::<Result<Vec<_>, _>>()?;
                for key in keys() {
                    let (t, k, m) = key;
                    out.insert(key, moments[2 * t + k] * ys[k][m - 1]);
                }
            }
            MeasureKind::PolarDensity { w0, w1, .. } => {
                for key in keys() {
                    let v = match key {
                        (t, 0, 1) => (2.0 * PI).sqrt() * w0.moment(2 * t + 1)?,
                        (t, 1, 1) => PI.sqrt() * w1.moment(2 * t + 2)?,
                        _ => 0.0,
                    };
                    out.insert(key, v);
                }
            }
        }
        Ok(out)
    }

    /// Exact `∫ u dμ` for a polynomial `u`, monomial by monomial.
    pub fn integrate_poly(&self, u: &MonoPoly) -> Result<f64, MeasureError> {
        if u.d() != self.d {
            return Err(MeasureError::DimensionMismatch { expected: self.d, got: u.d() });
        }
        match &self.kind {
            MeasureKind::Discrete { atoms } => Ok(atoms.iter().map(|(x, w)| w * u.eval(x)).sum()),
            MeasureKind::RadialProduct { radial } => {
                let mut total = 0.0;
                for (e, c) in u.terms() {
                    let s = sphere_monomial_integral(e);
                    if s != 0.0 {
                        total += c * s * radial.moment(e.iter().sum::<u32>() as usize)?;
                    }
                }
                Ok(total)
            }
            MeasureKind::RadialTimesDirac { radial } => {
                let mut total = 0.0;
                for (e, c) in u.terms() {
                    if e[1..].iter().all(|v| *v == 0) {
                        total += c * radial.moment(e[0] as usize)?;
                    }
                }
                Ok(total)
            }
            MeasureKind::PolarDensity { w0, w1, .. } => {
                let mut total = 0.0;
                for (e, c) in u.terms() {
                    let deg = e.iter().sum::<u32>() as usize;
                    let s0 = sphere_monomial_integral(e);
                    let s1 = sphere_monomial_integral(&[e[0] + 1, e[1]]);
                    if s0 != 0.0 {
                        total += c * s0 * w0.moment(deg + 1)?;
                    }
                    if s1 != 0.0 {
                        total += c * s1 * w1.moment(deg + 1)?;
                    }
                }
                Ok(total)
            }
        }
    }

    /// `∫ f dμ` for a smooth function `f`, by adaptive quadrature in the
    /// radius and doubling equispaced or product rules in the angle.
    pub fn integrate_fn<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<f64, MeasureError> {
        let d = self.d;
        let failed = Cell::new(false);
        let angular = |g: &dyn Fn(&[f64]) -> f64| -> f64 {
            match sphere_average(d, g) {
                Some(v) => v,
                None => {
                    failed.set(true);
                    0.0
                }
            }
        };
        let value = match &self.kind {
            MeasureKind::Discrete { atoms } => atoms.iter().map(|(x, w)| w * f(x)).sum(),
            MeasureKind::RadialTimesDirac { radial } => radial.integrate(|r| {
                let mut x = vec![0.0; d];
                x[0] = r;
                f(&x)
            })?,
            MeasureKind::RadialProduct { radial } => radial.integrate(|r| {
                angular(&|th: &[f64]| {
                    let x: Vec<f64> = th.iter().map(|v| v * r).collect();
                    f(&x)
                })
            })?,
            MeasureKind::PolarDensity { w0, w1, .. } => {
                let mut pts = w0.breakpoints();
                pts.extend(w1.breakpoints());
                pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
                pts.dedup();
                let mut total = 0.0;
                for w in pts.windows(2) {
                    total += adaptive_integrate(
                        |r| {
                            let (a, b) = (w0.value(r), w1.value(r));
                            r * angular(&|th: &[f64]| f(&[r * th[0], r * th[1]]) * (a + b * th[0]))
                        },
                        w[0],
                        w[1],
                        QUADRATURE_TOL,
                    )
                    .ok_or_else(|| MeasureError::Quadrature("polar density".into()))?;
                }
                total
            }
        };
        if failed.get() {
            return Err(MeasureError::Quadrature("angular integral".into()));
        }
        Ok(value)
    }
}

/// `∫_{S^{d-1}} g dθ` with rules of doubling degree until two successive
/// values agree to [`QUADRATURE_TOL`].
fn sphere_average(d: usize, g: &dyn Fn(&[f64]) -> f64) -> Option<f64> {
    let run = |degree: usize| -> (f64, f64) {
        let rule = harmonics::sphere_rule(d, degree).expect("dimension validated");
        let mut sum = 0.0;
        let mut abs = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let v = w * g(x);
            sum += v;
            abs += v.abs();
        }
        (sum, abs)
    };
    let (mut prev, _) = run(8);
    let mut degree = 16;
    while degree <= 1024 {
        let (cur, abs) = run(degree);
        if (cur - prev).abs() <= QUADRATURE_TOL * abs || abs == 0.0 {
            return Some(cur);
        }
        prev = cur;
        degree *= 2;
    }
    None
}
