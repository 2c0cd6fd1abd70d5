//! Canned experiments for the built-in examples.

use std::f64::consts::PI;

use markov_pade::catalog::{self, DEGENERATE_DIRECTION, ROTATION_RADII};
use markov_pade::cubature::{build_cubature, exactness_report, positivity_check};
use markov_pade::markov::{
    coefficient_table, eval_series, hankel, hankel_positivity_report, kronecker_test, DEFAULT_KRONECKER_TOL,
};
use markov_pade::pade::{pade_pair, PadeError, PadeMethod};
use markov_pade::Complex64;
use serde_json::json;

use crate::{usage, verification, Format, Outcome, RunConfig};

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn unit(t: f64) -> [f64; 2] {
    [t.cos(), t.sin()]
}

pub fn run(name: &str, c: &RunConfig) -> Outcome<()> {
    let checks = match name {
        "ex0" => ex0(c)?,
        "prop6-lebesgue" => prop6(c)?,
        "ex1-degenerate" => ex1(c)?,
        "polar-positive" => polar(c)?,
        "rotation-invariant" => rotation(c)?,
        other => return Err(usage(catalog::CatalogError::Unknown(other.to_string()))),
    };
    let text = match c.format {
        Format::Json => {
            let v = json!({
                "example": name,
                "checks": checks.iter().map(|k| json!({ "check": k.name, "passed": k.passed, "detail": k.detail })).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n"
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["check", "passed", "detail"]).map_err(usage)?;
            for k in &checks {
                w.write_record([k.name, if k.passed { "true" } else { "false" }, &k.detail]).map_err(usage)?;
            }
            String::from_utf8(w.into_inner().map_err(usage)?).map_err(usage)?
        }
    };
    c.emit(&text)?;
    let failed: Vec<_> = checks.iter().filter(|k| !k.passed).map(|k| k.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(verification(format!("{name}: {}", failed.join(", "))))
    }
}

fn ex0(c: &RunConfig) -> Outcome<Vec<Check>> {
    let mu = catalog::example("ex0").map_err(usage)?;
    let lmax = c.lmax.unwrap_or(40);
    let table = coefficient_table(&mu, lmax).map_err(verification)?;
    let odd_zero = (1..=lmax).step_by(2).all(|l| table.entry(l).coefficients().all(|(_, v)| *v == 0.0));
    let mut even_err = 0.0f64;
    for j in 0..24 {
        let dm = table.directional(&unit(2.0 * PI * j as f64 / 24.0 + 0.1)).map_err(verification)?;
        for l in (0..=lmax).step_by(2) {
            even_err = even_err.max((dm.values.values()[l] - 1.0 / (l as f64 + 2.0)).abs());
        }
    }
    // σ̂(ζ) = ∫_0^1 ζ r / (ζ² - r²) dr = -(ζ/2) log(1 - ζ^{-2}).
    let mut series_err = 0.0f64;
    let mut within = true;
    for (i, zeta) in [Complex64::new(2.0, 0.0), Complex64::new(1.5, 1.2), Complex64::new(-0.3, 2.4), Complex64::new(-3.0, -0.5)]
        .into_iter()
        .enumerate()
    {
        let theta = unit(0.7 * i as f64);
        let exact = -zeta / 2.0 * (Complex64::new(1.0, 0.0) - 1.0 / (zeta * zeta)).ln();
        let (value, tail) = eval_series(&table, zeta, &theta, lmax).map_err(verification)?;
        let err = (value - exact).norm();
        series_err = series_err.max(err);
        within &= err <= tail + 1e-10;
    }
    Ok(vec![
        check("odd coefficients vanish", odd_zero, format!("l <= {lmax}")),
        check("f_2l = 1/(2l+2) at every direction", even_err <= 1e-12, format!("max error {even_err:e}")),
        check("series matches closed-form transform", within, format!("max error {series_err:e}")),
    ])
}

fn prop6(c: &RunConfig) -> Outcome<Vec<Check>> {
    let mu = catalog::example("prop6-lebesgue").map_err(usage)?;
    let lmax = c.lmax.unwrap_or(8);
    let table = coefficient_table(&mu, lmax).map_err(verification)?;
    let mut worst = 0.0f64;
    for j in 0..20 {
        let t = 0.05 + j as f64 * 0.31;
        let dm = table.directional(&unit(t)).map_err(verification)?;
        for (l, v) in dm.values.values().iter().enumerate() {
            let k = (l + 1) as f64;
            let exact = (k * t).sin() / (2.0 * PI * k * t.sin());
            worst = worst.max((v - exact).abs() / exact.abs().max(1e-300));
        }
    }
    Ok(vec![check("f_l(e^{it}) = sin((l+1)t) / (2π (l+1) sin t)", worst <= 1e-10, format!("max relative error {worst:e}"))])
}

fn ex1(c: &RunConfig) -> Outcome<Vec<Check>> {
    let mu = catalog::example("ex1-degenerate").map_err(usage)?;
    let table = coefficient_table(&mu, c.lmax.unwrap_or(6)).map_err(verification)?;
    let e1 = DEGENERATE_DIRECTION;
    let dm = table.directional(&e1).map_err(verification)?;
    let constant = 1.0 / (2.0 * PI);
    let spread = dm.values.values().iter().map(|v| (v - constant).abs()).fold(0.0, f64::max);
    let h2 = hankel(&table, &e1, 2).map_err(verification)?;
    let degenerate = matches!(pade_pair(&dm, 2, PadeMethod::Determinant), Err(PadeError::Degenerate { .. }));
    Ok(vec![
        check("f_l(e_1) is constant", spread <= 1e-14, format!("max deviation from 1/(2π) {spread:e}")),
        check("H_2(e_1) = 0", h2.abs() <= 1e-12, format!("H_2 = {h2:e}")),
        check("order-2 Padé pair is degenerate", degenerate, String::new()),
    ])
}

fn polar(c: &RunConfig) -> Outcome<Vec<Check>> {
    let mu = catalog::example("polar-positive").map_err(usage)?;
    let n = c.order(3)?;
    let kron_max = 6;
    let table = coefficient_table(&mu, c.table_length(n)?.max(2 * kron_max)).map_err(verification)?;
    let positivity = hankel_positivity_report(&table, n, 2 * n + 1).map_err(verification)?;
    let rule = build_cubature(&table, n, c.sphere_degree, true).map_err(verification)?;
    let exact = exactness_report(&rule, &mu).map_err(verification)?;
    let squares = positivity_check(&rule, &table, 100, c.seed).map_err(verification)?;
    let kron = kronecker_test(&table, kron_max, c.tolerance(DEFAULT_KRONECKER_TOL)?).map_err(verification)?;
    Ok(vec![
        check("Hankel-positive", positivity.positive, format!("min ratios {:?}", positivity.orders.iter().map(|o| o.min_ratio).collect::<Vec<_>>())),
        check("cubature exact to degree 2n-1", exact.max_rel_error <= 1e-8, format!("n = {n}, max relative error {:e}", exact.max_rel_error)),
        check("T_n positive on squares", squares.passed(), format!("min normalized {:e}, seed {}", squares.min_normalized, c.seed)),
        check("not rational", !kron.rational, format!("max residuals {:?}", kron.max_residual)),
    ])
}

fn rotation(c: &RunConfig) -> Outcome<Vec<Check>> {
    let mu = catalog::example("rotation-invariant").map_err(usage)?;
    let k = ROTATION_RADII.len();
    let n_max = 2 * k + 2;
    let table = coefficient_table(&mu, 2 * n_max).map_err(verification)?;
    let kron = kronecker_test(&table, n_max, c.tolerance(DEFAULT_KRONECKER_TOL)?).map_err(verification)?;
    let n = c.order(3)?;
    let rule = build_cubature(&table, n, c.sphere_degree, true).map_err(verification)?;
    let spread = rule
        .rules
        .iter()
        .flat_map(|r| r.nodes.iter().zip(&rule.rules[0].nodes).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    Ok(vec![
        check("rational of degree 2k", kron.rational && kron.detected_degree == Some(2 * k), format!("detected {:?}, k = {k}", kron.detected_degree)),
        check("Gauss nodes independent of θ", spread <= 1e-10, format!("max spread {spread:e}")),
    ])
}
