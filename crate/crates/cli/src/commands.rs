use markov_pade::cubature::{self, build_cubature, exactness_report, positivity_check, CubatureError};
use markov_pade::harmonics::sphere_rule;
use markov_pade::markov::{self, fmt_num, hankel_positivity_report, kronecker_test, DEFAULT_KRONECKER_TOL};
use markov_pade::pade::{pade_pair, PadeMethod, PadePair};
use markov_pade::polyalg::UniPoly;
use serde_json::{json, Value};

use crate::{usage, verification, Format, Outcome, RunConfig, Source};

/// Exactness threshold of the cubature command.
const EXACTNESS_TOL: f64 = 1e-8;

/// Number of random squares tested by the cubature command.
const POSITIVITY_TRIALS: usize = 100;

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(usage)?;
    for r in rows {
        w.write_record(r).map_err(usage)?;
    }
    let bytes = w.into_inner().map_err(usage)?;
    String::from_utf8(bytes).map_err(usage)
}

fn theta_header(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("theta{i}")).collect()
}

fn nums(v: &[f64]) -> Vec<String> {
    v.iter().map(|x| fmt_num(*x)).collect()
}

fn source_label(source: &Source) -> String {
    match source {
        Source::Measure(_, s) => format!("measure:{s}"),
        Source::Stream(t) => match t.provenance() {
            markov::Provenance::Measure(s) | markov::Provenance::RawStream(s) => format!("stream:{s}"),
        },
    }
}

pub fn moments(c: &RunConfig) -> Outcome<()> {
    // The order only constrains L when it is given.
    let lmax = match c.n {
        Some(_) => c.table_length(c.order(2)?)?,
        None => c.lmax.unwrap_or(4),
    };
    let source = c.source()?;
    let table = c.table(&source, lmax)?;
    let rows: Vec<_> = table.rows().into_iter().filter(|r| r.0 <= lmax).collect();
    let text = match c.format {
        Format::Csv => csv_text(
            &["l", "k", "m", "coefficient"].map(String::from),
            &rows.iter().map(|(l, k, m, v)| vec![l.to_string(), k.to_string(), m.to_string(), fmt_num(*v)]).collect::<Vec<_>>(),
        )?,
        Format::Json => pretty(&json!({
            "d": table.d(),
            "R": table.radius(),
            "L": lmax,
            "source": source_label(&source),
            "rows": rows.iter().map(|(l, k, m, v)| json!({ "l": l, "k": k, "m": m, "coefficient": v })).collect::<Vec<_>>(),
        })),
    };
    c.emit(&text)
}

pub fn hankel(c: &RunConfig) -> Outcome<()> {
    let n = c.order(3)?;
    let lmax = c.table_length(n)?;
    let degree = c.sphere_degree.unwrap_or_else(|| cubature::default_sphere_degree(n));
    let source = c.source()?;
    let table = c.table(&source, lmax)?;
    let report = hankel_positivity_report(&table, n, degree).map_err(verification)?;
    let rule = sphere_rule(table.d(), degree).map_err(usage)?;
    let mut values = Vec::with_capacity(rule.len());
    for theta in &rule.nodes {
        let hs = (1..=n).map(|m| markov::hankel(&table, theta, m)).collect::<Result<Vec<_>, _>>().map_err(verification)?;
        values.push((theta.clone(), hs));
    }
    let text = match c.format {
        Format::Csv => {
            let mut header = theta_header(table.d());
            header.extend(["n", "hankel", "ratio"].map(String::from));
            let mut rows = Vec::new();
            for (theta, hs) in &values {
                for (i, h) in hs.iter().enumerate() {
                    let denom = report.scale.powi(i as i32 + 1);
                    let ratio = if denom > 0.0 { h / denom } else { 0.0 };
                    let mut row = nums(theta);
                    row.extend([(i + 1).to_string(), fmt_num(*h), fmt_num(ratio)]);
                    rows.push(row);
                }
            }
            csv_text(&header, &rows)?
        }
        Format::Json => pretty(&json!({
            "source": source_label(&source),
            "n": n,
            "sphere_degree": degree,
            "positive": report.positive,
            "scale": report.scale,
            "tolerance": report.tolerance,
            "orders": report.orders.iter().map(|o| json!({
                "n": o.n, "min_ratio": o.min_ratio, "min_value": o.min_value, "theta": o.theta,
            })).collect::<Vec<_>>(),
            "witness": report.witness.as_ref().map(|(k, t)| json!({ "n": k, "theta": t })),
            "values": values.iter().map(|(t, h)| json!({ "theta": t, "hankel": h })).collect::<Vec<_>>(),
        })),
    };
    if c.format == Format::Csv {
        eprintln!("Hankel-positive up to order {n}: {}", report.positive);
    }
    c.emit(&text)
}

fn padded(p: &UniPoly, len: usize) -> Vec<f64> {
    (0..len).map(|j| p.coeff(j).re).collect()
}

fn max_head(pair: &PadePair) -> f64 {
    pair.remainder_head.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn pade(c: &RunConfig) -> Outcome<()> {
    let n = c.order(2)?;
    let lmax = c.table_length(n)?;
    let degree = c.sphere_degree.unwrap_or_else(|| cubature::default_sphere_degree(n));
    let source = c.source()?;
    let table = c.table(&source, lmax)?;
    let rule = sphere_rule(table.d(), degree).map_err(usage)?;
    let mut entries = Vec::new();
    for theta in &rule.nodes {
        let dm = table.directional_prefix(theta, 2 * n).map_err(verification)?;
        entries.push((theta.clone(), pade_pair(&dm, n, PadeMethod::Determinant)));
    }
    let text = match c.format {
        Format::Csv => {
            let mut header = theta_header(table.d());
            header.extend(["hankel", "normal", "degenerate"].map(String::from));
            header.extend((0..=n).map(|j| format!("p{j}")));
            header.extend((0..n).map(|j| format!("q{j}")));
            header.push("max_remainder_head".into());
            let mut rows = Vec::new();
            for (theta, pair) in &entries {
                let mut row = nums(theta);
                match pair {
                    Ok(p) => {
                        row.extend([fmt_num(p.hankel), p.normal.to_string(), "false".into()]);
                        row.extend(nums(&padded(&p.p_raw, n + 1)));
                        row.extend(nums(&padded(&p.q_raw, n)));
                        row.push(fmt_num(max_head(p)));
                    }
                    Err(_) => {
                        let h = markov::hankel(&table, theta, n).map_err(verification)?;
                        row.extend([fmt_num(h), "false".into(), "true".into()]);
                        row.extend(std::iter::repeat_n(String::new(), 2 * n + 2));
                    }
                }
                rows.push(row);
            }
            csv_text(&header, &rows)?
        }
        Format::Json => {
            let items: Vec<Value> = entries
                .iter()
                .map(|(theta, pair)| match pair {
                    Ok(p) => json!({
                        "theta": theta,
                        "hankel": p.hankel,
                        "normal": p.normal,
                        "p": padded(&p.p_raw, n + 1),
                        "q": padded(&p.q_raw, n),
                        "monic_p": p.normal.then(|| padded(&p.p, n + 1)),
                        "remainder_head": p.remainder_head.iter().map(|v| v.re).collect::<Vec<_>>(),
                        "max_remainder_head": max_head(p),
                    }),
                    Err(e) => json!({ "theta": theta, "error": e.to_string() }),
                })
                .collect();
            pretty(&json!({ "source": source_label(&source), "n": n, "sphere_degree": degree, "directions": items }))
        }
    };
    c.emit(&text)
}

pub fn rationality(c: &RunConfig) -> Outcome<()> {
    let n = c.order(6)?;
    let lmax = c.table_length(n)?;
    let tol = c.tolerance(DEFAULT_KRONECKER_TOL)?;
    let source = c.source()?;
    let table = c.table(&source, lmax)?;
    let report = kronecker_test(&table, n, tol).map_err(verification)?;
    let text = match c.format {
        Format::Csv => csv_text(
            &["m", "max_residual", "below_tol"].map(String::from),
            &report
                .max_residual
                .iter()
                .enumerate()
                .map(|(i, r)| vec![(i + 1).to_string(), fmt_num(*r), (*r <= tol).to_string()])
                .collect::<Vec<_>>(),
        )?,
        Format::Json => pretty(&json!({
            "source": source_label(&source),
            "rational": report.rational,
            "detected_degree": report.detected_degree,
            "n_max": report.n_max,
            "tol": report.tol,
            "scale": report.scale,
            "directions": report.directions.len(),
            "max_residual": report.max_residual,
        })),
    };
    if c.format == Format::Csv {
        eprintln!("rational: {}, detected degree: {:?}", report.rational, report.detected_degree);
    }
    c.emit(&text)
}

pub fn cubature(c: &RunConfig) -> Outcome<()> {
    let n = c.order(2)?;
    let lmax = c.table_length(n)?;
    let source = c.source()?;
    let table = c.table(&source, lmax)?;
    let rule = match build_cubature(&table, n, c.sphere_degree, true) {
        Ok(r) => r,
        Err(e @ (CubatureError::Markov(_) | CubatureError::ZeroOrder)) => return Err(usage(e)),
        Err(e) => return Err(verification(e)),
    };
    let exactness = match &source {
        Source::Measure(mu, _) => Some(exactness_report(&rule, mu).map_err(verification)?),
        Source::Stream(_) => None,
    };
    let positivity = positivity_check(&rule, &table, POSITIVITY_TRIALS, c.seed).map_err(verification)?;
    let text = match c.format {
        Format::Csv => {
            let mut buf = Vec::new();
            rule.write_csv(&mut buf).map_err(usage)?;
            String::from_utf8(buf).map_err(usage)?
        }
        Format::Json => pretty(&json!({
            "rule": rule.to_json(),
            "exactness": exactness.as_ref().map(|r| json!({
                "max_rel_error": r.max_rel_error,
                "tolerance": EXACTNESS_TOL,
                "rows": r.rows.iter().map(|row| json!({
                    "t": row.t, "k": row.k, "m": row.m, "degree": row.degree,
                    "cubature": row.cubature, "exact": row.exact,
                    "rel_error": row.rel_error, "guaranteed": row.guaranteed,
                })).collect::<Vec<_>>(),
            })),
            "positivity": {
                "seed": c.seed,
                "trials": positivity.trials,
                "violations": positivity.violations.len(),
                "min_normalized": positivity.min_normalized,
                "identity_max_error": positivity.identity_max_error,
                "identity_failures": positivity.identity_failures,
                "schmudgen": positivity.schmudgen.as_ref().map(|s| json!({
                    "max_normalized": s.max_normalized, "tolerance": s.tolerance, "failures": s.failures,
                })),
                "passed": positivity.passed(),
            },
        })),
    };
    c.emit(&text)?;
    if let Some(r) = &exactness {
        if r.max_rel_error > EXACTNESS_TOL {
            return Err(verification(format!("exactness error {:e} exceeds {EXACTNESS_TOL:e}", r.max_rel_error)));
        }
    }
    if !positivity.passed() {
        return Err(verification("positivity check failed"));
    }
    Ok(())
}
