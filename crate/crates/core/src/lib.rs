//! Padé approximation of the multivariate Markov transform.
//!
//! For a signed measure `μ` on ℝ^d (d = 2 or 3) supported in a ball of radius
//! `R`, the Markov transform `μ̂(ζ, θ)` has, for each direction `θ` on the unit
//! sphere, an expansion `Σ f_l(θ) ζ^{-l-1}` at infinity. This crate computes the
//! coefficient functions `f_l` from distributed moments, runs classical
//! univariate Padé approximation direction by direction, lifts the resulting
//! objects to polynomials on ℝ^d, tests rationality through Hankel
//! determinants, and assembles the Gauss-type cubature functional `T_n` for
//! Hankel-positive measures.
//!
//! Module map:
//!
//! - [`polyalg`]: univariate and truncated-Laurent algebra, Hankel
//!   determinants, real root extraction, multivariate polynomials in the
//!   monomial and `|x|^{2t} Y_{k,m}` bases.
//! - [`harmonics`]: real orthonormal spherical harmonics, Legendre polynomials
//!   of dimension d, sphere quadrature.
//! - [`measures`]: measure models, distributed moments, exact polynomial
//!   integration, JSON schema.
//! - [`markov`]: coefficient tables, series and kernel evaluation, Hankel
//!   positivity and the Kronecker rationality test.
//! - [`pade`]: direction-parametrized Padé pairs, the polynomial lifts
//!   `A_n`/`B_n`, per-direction Gauss rules.
//! - [`cubature`]: the functional `T_n` with exactness and positivity checks.
//! - [`catalog`]: the built-in example measures.
//!
//! All coefficient functions use the normalization `f_l = Σ c_{t,k,m} Y_{k,m}`
//! with `Y_{k,m}` orthonormal for the unnormalized surface measure. Under this
//! convention the transform is `(1/ω_d) ∫ ζ^{d-1} / r(ζθ - x)^d dμ(x)` and
//! `T_n(u) = ∫_{S^{d-1}} Σ_k α_k(θ) u(x_k(θ) θ) dθ`.

pub mod catalog;
pub mod cubature;
pub mod harmonics;
pub mod markov;
pub mod measures;
pub mod pade;
pub mod polyalg;
mod quadrature;

pub use num_complex::Complex64;

use thiserror::Error;

/// Crate-level error wrapping each module's failure modes.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] polyalg::PolyError),
    #[error(transparent)]
    Harmonics(#[from] harmonics::HarmonicsError),
    #[error(transparent)]
    Measure(#[from] measures::MeasureError),
    #[error(transparent)]
    Markov(#[from] markov::MarkovError),
    #[error(transparent)]
    Pade(#[from] pade::PadeError),
    #[error(transparent)]
    Cubature(#[from] cubature::CubatureError),
    #[error(transparent)]
    Catalog(#[from] catalog::CatalogError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
