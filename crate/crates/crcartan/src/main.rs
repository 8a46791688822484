use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crcartan::analysis::{self, default_order, parse_point};
use crcartan::checks::{self, CheckConfig, Suite};
use crcartan::library;
use crcartan::report::{analysis_table, fefferman_table};
use crcartan::tol::Tolerances;
use crcartan::Error;

/// Pseudohermitian and Cartan invariants of CR manifolds given as spec files.
#[derive(Parser)]
#[command(name = "crcartan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Full invariant ladder at a point.
    Analyze {
        /// Spec file, or the name of a shipped spec (heisenberg, sphere3, heis_pert, heis_holo).
        spec: String,
        /// Comma-separated coordinates of the base point.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Jet order of the chart (default 6, or 7 for specs with a density).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Randomized invariant suites.
    Check {
        #[arg(value_parser = |s: &str| s.parse::<Suite>())]
        suite: Suite,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Random points per spec.
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Fefferman metric and its Ricci tensor computed both ways.
    Fefferman {
        spec: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

fn tolerances() -> Result<Tolerances, ExitCode> {
    Tolerances::from_env().map_err(|e| {
        eprintln!("crcartan: {e}");
        ExitCode::from(1)
    })
}

fn fail(e: Error) -> ExitCode {
    eprintln!("crcartan: {e}");
    ExitCode::from(e.exit_code())
}

fn verdict(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    let tols = tolerances()?;
    match cli.command {
        Command::Analyze { spec: path, point, order, format } => {
            let spec = library::load(&path).map_err(fail)?;
            let point = parse_point(&point).map_err(fail)?;
            let order = order.unwrap_or_else(|| default_order(&spec));
            let r = analysis::analyze(&spec.name, &spec, &point, order, &tols).map_err(fail)?;
            match format {
                Format::Table => print!("{}", analysis_table(&r)),
                Format::Json => println!("{}", json(&r)),
            }
            for f in r.residuals.iter().filter(|r| !r.pass) {
                eprintln!("crcartan: check {} failed: {:e} against {:e}", f.name, f.value, f.tolerance);
            }
            Ok(verdict(r.passed()))
        }
        Command::Fefferman { spec: path, point, order, format } => {
            let spec = library::load(&path).map_err(fail)?;
            let point = parse_point(&point).map_err(fail)?;
            let order = order.unwrap_or_else(|| default_order(&spec));
            let r = analysis::fefferman(&spec.name, &spec, &point, order, &tols).map_err(fail)?;
            match format {
                Format::Table => print!("{}", fefferman_table(&r)),
                Format::Json => println!("{}", json(&r)),
            }
            Ok(verdict(r.passed()))
        }
        Command::Check { suite, seed, points, format } => {
            let cfg = CheckConfig { seed, points, tols };
            let results = checks::run(suite, &cfg).map_err(fail)?;
            let failed = results.iter().filter(|r| !r.residual.pass).count();
            match format {
                Format::Table => {
                    for r in &results {
                        println!("{r}");
                    }
                    println!("{} checks, {} failed", results.len(), failed);
                }
                Format::Json => println!("{}", json(&results)),
            }
            Ok(verdict(failed == 0))
        }
    }
}

fn main() -> ExitCode {
    run(Cli::parse()).unwrap_or_else(|code| code)
}
