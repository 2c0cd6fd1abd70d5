//! Built-in example measures.
//!
//! | name | measure |
//! |------|---------|
//! | `ex0` | `σ ⊗ dθ` in the plane, `σ(dr) = r dr` on [0, 1]: Lebesgue measure of the unit disk, `f_{2l} = 1/(2l+2)` |
//! | `prop6-lebesgue` | Lebesgue measure on the segment `[0, e_1]`, `f_l(e^{it}) = sin((l+1)t) / (2π (l+1) sin t)` |
//! | `ex1-degenerate` | the same segment measure; at `θ = e_1` every `f_l` equals `1/(2π)` and `H_2 = 0` |
//! | `polar-positive` | `(1 + ½ cos ϑ) r dr dϑ` on the unit disk, Hankel-positive since `|w1| ≤ w0` |
//! | `rotation-invariant` | `σ ⊗ dθ` with σ atoms at radii 0.3, 0.8, 1.1 (weights 4, 2, 1), R = 1.2 |

use thiserror::Error;

use crate::measures::{Measure, MeasureKind, RadialFunction, RadialMeasure};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown example `{0}`; available: {names}", names = NAMES.join(", "))]
    Unknown(String),
}

pub const NAMES: [&str; 5] = ["ex0", "prop6-lebesgue", "ex1-degenerate", "polar-positive", "rotation-invariant"];

/// Direction at which the segment measure degenerates.
pub const DEGENERATE_DIRECTION: [f64; 2] = [1.0, 0.0];

/// Radii and weights of the rotation-invariant example.
pub const ROTATION_RADII: [(f64, f64); 3] = [(0.3, 4.0), (0.8, 2.0), (1.1, 1.0)];

/// Rotation-invariant plane measure with atomic radial part.
pub fn rotation_invariant(radii: &[(f64, f64)], radius: f64) -> Measure {
    Measure::new(2, radius, MeasureKind::RadialProduct { radial: RadialMeasure::Atoms(radii.to_vec()) })
        .expect("radii lie inside the radius")
}

/// Lebesgue measure on the segment from the origin to `e_1` in ℝ^d.
pub fn segment(d: usize) -> Measure {
    Measure::new(d, 1.0, MeasureKind::RadialTimesDirac { radial: RadialMeasure::Density(RadialFunction::lebesgue(0.0, 1.0)) })
        .expect("valid segment measure")
}

/// `(w0 + w1 cos ϑ) r dr dϑ` with constant `w0`, `w1` on [0, 1].
pub fn polar(w0: f64, w1: f64) -> Measure {
    Measure::new(
        2,
        1.0,
        MeasureKind::PolarDensity {
            w0: RadialFunction::lebesgue(0.0, 1.0).with_scale(w0),
            w1: RadialFunction::lebesgue(0.0, 1.0).with_scale(w1),
            assert_hankel_positive: w1.abs() <= w0,
        },
    )
    .expect("valid polar density")
}

pub fn example(name: &str) -> Result<Measure, CatalogError> {
    match name {
        "ex0" => Ok(Measure::new(
            2,
            1.0,
            MeasureKind::RadialProduct { radial: RadialMeasure::Density(RadialFunction::power(1.0, 0.0, 1.0)) },
        )
        .expect("valid disk measure")),
        "prop6-lebesgue" | "ex1-degenerate" => Ok(segment(2)),
        "polar-positive" => Ok(polar(1.0, 0.5)),
        "rotation-invariant" => Ok(rotation_invariant(&ROTATION_RADII, 1.2)),
        other => Err(CatalogError::Unknown(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_examples_build() {
        for name in NAMES {
            assert!(example(name).is_ok());
        }
        assert!(matches!(example("nope"), Err(CatalogError::Unknown(_))));
    }
}
