use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use nc_surfaces::audit::{parse_chain, parse_element, parse_projection, run_audit, AuditConfig};
use nc_surfaces::dirac::{commutator_d, spectrum};
use nc_surfaces::geometry::{orientation_obstruction, pairing_index, OrientationVerdict, PairingInput};
use nc_surfaces::real_structure::build_j;
use nc_surfaces::surfaces::SurfacePreset;
use nc_surfaces::{Error, Result};

#[derive(Parser)]
#[command(name = "ncsurf", version, about = "Audit the Dirac spectral triple on noncommutative surfaces")]
struct Cli {
    /// JSON audit config
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized batteries
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full audit and print the report
    Axioms,
    /// Print the truncated spectrum of D as CSV
    Spectrum {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// [D, π(a)] for a named element
    Commutator {
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 32)]
        n: usize,
    },
    /// Index pairing of two named projections
    Index {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 16)]
        n: usize,
    },
    /// Orientation obstruction for a chain such as "one|one|T_u|T_ubar"
    Orientation {
        #[arg(long)]
        chain: String,
        #[arg(long, default_value_t = 32)]
        n: usize,
    },
    /// Decay report of an element's symbol
    Decay {
        #[arg(long)]
        element: String,
    },
}

fn load_config(cli: &Cli) -> Result<AuditConfig> {
    let mut config = match &cli.config {
        Some(path) => AuditConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => AuditConfig::new(SurfacePreset::sphere()),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

/// Writes to stdout; a reader that closed the pipe early is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let config = load_config(cli)?;
    let kind = config.surface.kind();
    match &cli.command {
        Command::Axioms => {
            let report = run_audit(&config);
            let text = report.render();
            match &config.output.path {
                Some(p) => std::fs::write(p, text + "\n")?,
                None => emit(&(text + "\n"))?,
            }
            Ok(!report.has_failures())
        }
        Command::Spectrum { n, tol } => {
            if *n < 2 {
                return Err(Error::Config("spectrum needs n ≥ 2".into()));
            }
            emit(&spectrum(*n, *tol)?.to_csv())?;
            Ok(true)
        }
        Command::Commutator { element, n } => {
            let a = parse_element(element, kind)?.element;
            let c = commutator_d(&a);
            let t = c.truncate(*n)?;
            let w = c.degree() + 1;
            let out = json!({
                "element": element,
                "n": n,
                "upper_symbol": c.block(0, 1).symbol().to_string(),
                "lower_symbol": c.block(1, 0).symbol().to_string(),
                "upper_corner_size": c.block(0, 1).corner_size(),
                "lower_corner_size": c.block(1, 0).corner_size(),
                "interior_norm": t.interior_norm(w),
            });
            emit(&(serde_json::to_string_pretty(&out)? + "\n"))?;
            Ok(true)
        }
        Command::Index { p, q, n } => {
            let input = PairingInput::new(parse_projection(p)?, parse_projection(q)?)?;
            let r = pairing_index(&input, &build_j(*n), *n)?;
            emit(&format!("{}\n", r.index))?;
            Ok(true)
        }
        Command::Orientation { chain, n } => {
            let omega = parse_chain(chain, kind)?;
            let r = orientation_obstruction(&omega, &build_j(*n), *n, config.tolerance("orientation"))?;
            let out = json!({
                "chain": chain,
                "degree": omega.degree,
                "diag_top": r.diag_top.to_string(),
                "diag_bottom": r.diag_bottom.to_string(),
                "residual": r.residual,
                "verdict": r.verdict,
            });
            emit(&(serde_json::to_string_pretty(&out)? + "\n"))?;
            Ok(r.verdict != OrientationVerdict::NotObstructed)
        }
        Command::Decay { element } => {
            let p = parse_element(element, kind)?;
            let report = match &p.numeric {
                Some(series) => series.decay_report(),
                None => p.element.symbol().decay_report(),
            };
            emit(&(serde_json::to_string_pretty(&report)? + "\n"))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
