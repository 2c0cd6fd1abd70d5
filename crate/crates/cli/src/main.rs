//! `mpade`: command-line driver for the Markov transform toolkit.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or schema error.

mod commands;
mod reproduce;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use markov_pade::catalog;
use markov_pade::markov::{coefficient_table, CoefficientTable};
use markov_pade::measures::{parse_measure, Measure};

#[derive(Parser, Debug)]
#[command(name = "mpade", version, about = "Padé approximation and cubature for the multivariate Markov transform")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficient table rows `l,k,m,coefficient` up to `--L`.
    Moments(RunConfig),
    /// Hankel determinants on a sphere grid and the positivity verdict.
    Hankel(RunConfig),
    /// Padé pairs of order `--n` at every grid direction.
    Pade(RunConfig),
    /// Kronecker rationality verdict up to order `--n`.
    Rationality(RunConfig),
    /// Cubature rule with exactness and positivity reports.
    Cubature(RunConfig),
    /// Runs the canned experiment for a built-in example.
    Reproduce {
        /// One of the built-in example names.
        name: String,
        #[command(flatten)]
        config: RunConfig,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Measure document (JSON) or coefficient rows (CSV, needs `--dim` and `--radius`).
    #[arg(long, conflicts_with = "example")]
    pub input: Option<PathBuf>,
    /// Built-in example measure.
    #[arg(long)]
    pub example: Option<String>,
    /// Padé / cubature order.
    #[arg(long)]
    pub n: Option<usize>,
    /// Highest coefficient index; defaults to `2n`.
    #[arg(long = "L")]
    pub lmax: Option<usize>,
    /// Exactness degree of the sphere grid.
    #[arg(long)]
    pub sphere_degree: Option<usize>,
    /// Tolerance of the Kronecker test, relative to `scale^m`.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed of randomized checks.
    #[arg(long, default_value_t = 20240601)]
    pub seed: u64,
    /// Dimension of a CSV coefficient stream.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Support radius of a CSV coefficient stream.
    #[arg(long)]
    pub radius: Option<f64>,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Verification(_) => 1,
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;

pub fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn verification(e: impl std::fmt::Display) -> Failure {
    Failure::Verification(e.to_string())
}

/// Where the coefficient functions come from.
pub enum Source {
    Measure(Measure, String),
    Stream(CoefficientTable),
}

impl RunConfig {
    pub fn order(&self, default: usize) -> Outcome<usize> {
        let n = self.n.unwrap_or(default);
        if n == 0 {
            return Err(usage("--n must be at least 1"));
        }
        Ok(n)
    }

    pub fn table_length(&self, n: usize) -> Outcome<usize> {
        let l = self.lmax.unwrap_or(2 * n);
        if l < 2 * n {
            return Err(usage(format!("--L = {l} must be at least 2n = {}", 2 * n)));
        }
        Ok(l)
    }

    pub fn tolerance(&self, default: f64) -> Outcome<f64> {
        let tol = self.tol.unwrap_or(default);
        if tol.is_nan() || tol <= 0.0 || tol.is_infinite() {
            return Err(usage("--tol must be positive"));
        }
        Ok(tol)
    }

    pub fn source(&self) -> Outcome<Source> {
        match (&self.input, &self.example) {
            (Some(path), None) => {
                let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
                if is_csv {
                    let (Some(d), Some(r)) = (self.dim, self.radius) else {
                        return Err(usage("CSV coefficient input needs --dim and --radius"));
                    };
                    let label = path.display().to_string();
                    let table = CoefficientTable::read_csv(text.as_bytes(), d, r, label).map_err(usage)?;
                    Ok(Source::Stream(table))
                } else {
                    let mu = parse_measure(&text).map_err(usage)?;
                    Ok(Source::Measure(mu, path.display().to_string()))
                }
            }
            (None, Some(name)) => Ok(Source::Measure(catalog::example(name).map_err(usage)?, name.clone())),
            _ => Err(usage("exactly one of --input or --example is required")),
        }
    }

    /// Builds or validates the coefficient table `f_0, ..., f_L`.
    pub fn table(&self, source: &Source, lmax: usize) -> Outcome<CoefficientTable> {
        match source {
            Source::Measure(mu, _) => coefficient_table(mu, lmax).map_err(verification),
            Source::Stream(t) => {
                if t.lmax() < lmax {
                    return Err(usage(format!("coefficient stream ends at l = {}, need l = {lmax}", t.lmax())));
                }
                Ok(t.clone())
            }
        }
    }

    pub fn emit(&self, text: &str) -> Outcome<()> {
        match &self.out {
            Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(usage)
            }
        }
    }
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Moments(c) => commands::moments(&c),
        Command::Hankel(c) => commands::hankel(&c),
        Command::Pade(c) => commands::pade(&c),
        Command::Rationality(c) => commands::rationality(&c),
        Command::Cubature(c) => commands::cubature(&c),
        Command::Reproduce { name, config } => reproduce::run(&name, &config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}\n\nRun `mpade --help` for usage."),
                Failure::Verification(m) => eprintln!("verification failed: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
