//! `reeb`: stability verdicts, geometry checks, functionals and curl spectra for
//! quasi-regular Sasakian 3-manifolds and weighted 3-spheres.

mod catalog;

use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use reeb_core::functionals::{
    functional_report, FunctionalError, QuadratureGrid, DEFAULT_NPHI, DEFAULT_NS,
};
use reeb_core::sasaki_geometry::identities::{run_identity_suite, Tolerances};
use reeb_core::sasaki_geometry::{WeightedSphere, Weights};
use reeb_core::seifert_rr::{
    chern_number, validate, verdict, weighted_seifert, Rational, SeifertData,
};
use reeb_core::spectrum::{compute_spectrum, SpectrumConfig, SpectrumError};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use catalog::{Catalog, InlineSeifert};

/// Reals in JSON output are f64 values written in shortest round-trip form.
const REAL_FORMAT: &str = "f64 shortest round-trip";

#[derive(Debug, Error)]
enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "reeb",
    version,
    about = "Energy stability of Reeb fields on Sasakian 3-manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimizer or unstable verdict from Seifert invariants.
    Verdict(VerdictArgs),
    /// Pointwise geometry identity suite on a weighted sphere.
    Verify(VerifyArgs),
    /// Volume, helicity, Hopf invariant, Skyrme energy and second variation.
    Functionals(FunctionalsArgs),
    /// Clustered curl spectrum of a weighted sphere.
    Spectrum(SpectrumArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["named", "seifert", "weights"])))]
struct VerdictArgs {
    /// Catalog name, or a t1_sigma_<g> / lens_<p> family member
    #[arg(long)]
    named: Option<String>,
    /// Inline invariants, e.g. '{"deg": -2, "genus": 0, "fibers": [[2, 1], [3, 2], [5, 4]]}'
    #[arg(long)]
    seifert: Option<String>,
    /// Weighted sphere weights k,l
    #[arg(long, value_parser = parse_weights)]
    weights: Option<(i64, i64)>,
    /// Deformation constant a as an exact rational p/q
    #[arg(long, default_value = "1")]
    deform: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_weights)]
    weights: (i64, i64),
    /// Deformation constant a (decimal or p/q)
    #[arg(long, default_value = "1")]
    deform: String,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance override NAME=VALUE, repeatable
    #[arg(long = "tol")]
    tol: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FunctionalsArgs {
    #[arg(long, value_parser = parse_weights)]
    weights: (i64, i64),
    #[arg(long, default_value = "1")]
    deform: String,
    /// Quadrature grid n_s,n_phi
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, value_parser = parse_weights)]
    weights: (i64, i64),
    #[arg(long, default_value = "1")]
    deform: String,
    /// Fourier truncation M: modes with |m|, |n| <= M
    #[arg(long, default_value_t = 5)]
    modes: i64,
    /// Radial resolution N
    #[arg(long, default_value_t = 200)]
    radial: usize,
    /// Eigenpairs kept per mode
    #[arg(long, default_value_t = 40)]
    top: usize,
    /// Iteration cap of the per-mode eigensolver (0: no cap)
    #[arg(long, default_value_t = 0)]
    max_iterations: usize,
    #[arg(long)]
    json: bool,
}

fn parse_pair<T: std::str::FromStr>(s: &str, what: &str) -> Result<(T, T), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => match (a.parse(), b.parse()) {
            (Ok(a), Ok(b)) => Ok((a, b)),
            _ => Err(format!(
                "{what} must be two integers separated by a comma, got {s:?}"
            )),
        },
        _ => Err(format!(
            "{what} must be two integers separated by a comma, got {s:?}"
        )),
    }
}

fn parse_weights(s: &str) -> Result<(i64, i64), String> {
    parse_pair(s, "weights")
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    parse_pair(s, "grid")
}

fn weights_of((k, l): (i64, i64)) -> Result<Weights, CliError> {
    Weights::new(k, l).map_err(invalid)
}

/// Deformation constant from "p/q", an integer, or a decimal.
fn deformation(s: &str) -> Result<f64, CliError> {
    let a = match s.parse::<Rational>() {
        Ok(r) => r.to_f64(),
        Err(_) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| invalid(format!("deformation {s:?} is not a number")))?,
    };
    if !(a.is_finite() && a > 0.0) {
        return Err(invalid(format!("deformation {s:?} must be positive")));
    }
    Ok(a)
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("JSON values serialize")
    );
}

fn with_schema<T: Serialize>(schema: &str, report: &T) -> serde_json::Value {
    let mut value = serde_json::to_value(report).expect("reports serialize");
    if let serde_json::Value::Object(map) = &mut value {
        map.insert("schema".into(), json!(schema));
        map.insert("real_format".into(), json!(REAL_FORMAT));
    }
    value
}

fn cmd_verdict(args: &VerdictArgs) -> Result<u8, CliError> {
    let a: Rational = args.deform.parse().map_err(|_| {
        invalid(format!(
            "deformation {:?} must be an exact rational p/q",
            args.deform
        ))
    })?;
    let (source, data, notes): (String, SeifertData, String) = if let Some(name) = &args.named {
        let catalog = Catalog::load().map_err(invalid)?;
        let entry = catalog.resolve(name).map_err(invalid)?;
        (name.clone(), entry.data(), entry.notes)
    } else if let Some(text) = &args.seifert {
        let inline: InlineSeifert =
            serde_json::from_str(text).map_err(|e| invalid(format!("--seifert: {e}")))?;
        ("inline".into(), inline.data(), String::new())
    } else {
        let (k, l) = args.weights.expect("clap enforces one source");
        let data = weighted_seifert(k, l).map_err(invalid)?;
        (format!("weighted ({k}, {l})"), data, String::new())
    };
    let data = validate(&data).map_err(invalid)?;
    let c1 = chern_number(&data);
    let v = verdict(&data, a).map_err(invalid)?;
    if args.json {
        let mut value = with_schema("reeb.verdict/1", &v);
        if let serde_json::Value::Object(map) = &mut value {
            map.insert("source".into(), json!(source));
            map.insert(
                "seifert".into(),
                json!(catalog::CatalogEntry::from_data(&source, &data, &notes)),
            );
            map.insert("c1".into(), json!(c1));
        }
        print_json(&value);
    } else {
        println!("manifold   {source}");
        let fibers: Vec<String> = data
            .fibers
            .iter()
            .map(|f| format!("({}, {})", f.a, f.b))
            .collect();
        println!(
            "seifert    {{{}, {}; {}}}",
            data.deg,
            data.genus,
            if fibers.is_empty() {
                "-".into()
            } else {
                fibers.join(", ")
            }
        );
        if !notes.is_empty() {
            println!("notes      {notes}");
        }
        println!("c1         {c1}");
        println!("mu1_D      {}", v.mu1_d);
        println!("a0         {}", v.a0);
        println!("a          {}", v.a);
        println!("status     {}", v.status);
        println!();
        println!("{:>6}  {:>8}", "mu", "dim H1");
        for (mu, dim) in &v.dims {
            println!("{mu:>6}  {dim:>8}");
        }
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let weights = weights_of(args.weights)?;
    let a = deformation(&args.deform)?;
    if args.samples == 0 {
        return Err(invalid("--samples must be positive"));
    }
    let mut tol = Tolerances::default();
    for item in &args.tol {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| invalid(format!("--tol expects NAME=VALUE, got {item:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| invalid(format!("tolerance {value:?} is not a number")))?;
        tol.set(name.trim(), value).map_err(invalid)?;
    }
    let sphere = WeightedSphere::new(weights, a).map_err(invalid)?;
    let report = run_identity_suite(&sphere, args.samples, args.seed, &tol);
    if args.json {
        print_json(&with_schema("reeb.verify/1", &report));
    } else {
        println!(
            "weights ({}, {})  a = {}  samples = {}  seed = {}",
            weights.k(),
            weights.l(),
            a,
            args.samples,
            args.seed
        );
        println!("{:<32} {:>12} {:>10}  result", "identity", "max dev", "tol");
        for c in &report.checks {
            println!(
                "{:<32} {:>12.3e} {:>10.1e}  {}",
                c.name,
                c.max_deviation,
                c.tolerance,
                if c.passed { "PASS" } else { "FAIL" }
            );
        }
    }
    let failures = report.failures();
    if failures.is_empty() {
        Ok(0)
    } else {
        let names: Vec<&str> = failures.iter().map(|c| c.name.as_str()).collect();
        eprintln!("identity failures: {}", names.join(", "));
        Ok(1)
    }
}

fn cmd_functionals(args: &FunctionalsArgs) -> Result<u8, CliError> {
    let weights = weights_of(args.weights)?;
    let a = deformation(&args.deform)?;
    let (ns, nphi) = args.grid.unwrap_or((DEFAULT_NS, DEFAULT_NPHI));
    let grid = QuadratureGrid::new(ns, nphi).map_err(invalid)?;
    let report = functional_report(weights, a, &grid).map_err(|e| match e {
        FunctionalError::BadGrid(..) => invalid(e),
        _ => CliError::Numerical(e.to_string()),
    })?;
    if args.json {
        print_json(&with_schema("reeb.functionals/1", &report));
    } else {
        println!(
            "weights ({}, {})  a = {}  grid {} x {}",
            weights.k(),
            weights.l(),
            a,
            report.n_s,
            report.n_phi
        );
        let rows = [
            ("volume", report.volume),
            ("volume (closed form)", report.volume_exact),
            ("energy of Reeb field", report.energy),
            ("helicity of Reeb field", report.helicity),
            ("Hopf invariant Q", report.hopf_q),
            ("Skyrme energy F", report.skyrme_f),
            ("lower bound for F", report.bound_rhs),
            ("first variation (Reeb)", report.first_variation_reeb),
            (
                "first variation (eigenfield)",
                report.first_variation_eigenfield,
            ),
        ];
        for (name, value) in rows {
            println!("{name:<30} {value:>22.15e}");
        }
        println!();
        println!(
            "{:<16} {:>8} {:>10} {:>22} {:>22} {:>10}",
            "field", "a", "mu", "second variation", "mu(mu-2)|v|^2", "rel err"
        );
        for e in &report.second_variation {
            println!(
                "{:<16} {:>8} {:>10.6} {:>22.15e} {:>22.15e} {:>10.2e}",
                e.field, e.a, e.mu, e.value, e.expected, e.relative_error
            );
        }
    }
    Ok(0)
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<u8, CliError> {
    let weights = weights_of(args.weights)?;
    let a = deformation(&args.deform)?;
    if args.modes < 1 || args.top < 1 {
        return Err(invalid("--modes and --top must be positive"));
    }
    let cfg = SpectrumConfig {
        modes: args.modes,
        radial: args.radial,
        top: args.top,
        max_iterations: args.max_iterations,
        ..Default::default()
    };
    let report = compute_spectrum(weights, a, &cfg).map_err(|e| match e {
        SpectrumError::BadConfig(_) => invalid(e),
        _ => CliError::Numerical(e.to_string()),
    })?;
    if args.json {
        print_json(&with_schema("reeb.spectrum/1", &report));
    } else {
        println!(
            "weights ({}, {})  a = {}  modes M = {}  radial N = {}  top T = {}",
            weights.k(),
            weights.l(),
            a,
            cfg.modes,
            cfg.radial,
            cfg.top
        );
        let show = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.10}"));
        println!("mu1 = {}  mu1_D = {}", show(report.mu1), show(report.mu1_d));
        println!(
            "{:>16} {:>6} {:>10} {:>12}  note",
            "mu", "mult", "d_tangent", "max resid"
        );
        for c in &report.clusters {
            println!(
                "{:>16.10} {:>6} {:>10} {:>12.2e}  {}",
                c.mu,
                c.multiplicity,
                c.d_tangent,
                c.max_residual,
                if c.possibly_incomplete {
                    "possibly incomplete"
                } else {
                    ""
                }
            );
        }
        println!("discarded candidates: {}", report.discarded);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verdict(a) => cmd_verdict(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Functionals(a) => cmd_functionals(a),
        Command::Spectrum(a) => cmd_spectrum(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
