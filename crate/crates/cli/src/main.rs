//! `conemetric`: cone metrics on the Riemann sphere from the command line.
//!
//! Results are written as JSON (sorted keys, 17 significant digits) to
//! standard output or `--out`. Module errors exit with status 1 and
//! `{"error": ...}`; malformed input exits with status 2.

mod commands;
mod input;
mod json;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Module(#[from] conemetric::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Module(_) | CliError::Io(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Module(_) => "module",
            CliError::Io(_) => "io",
        }
    }
}

#[derive(Parser)]
#[command(name = "conemetric", version, about = "Spherical cone metrics on the Riemann sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Cone divisor, area and curvature of the metric pulled back by a rational map.
    Analyze {
        /// Rational map, {"num": [...], "den": [...]} with ascending coefficients.
        #[arg(long)]
        map: PathBuf,
        /// Also write the density on [-2, 2]^2 as CSV (x,y,density).
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Grid points per side.
        #[arg(long, default_value_t = 256)]
        res: usize,
        /// Quadrature tolerance for the area.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Schwarzian derivative and its Laurent tails at the cone points.
    Schwarzian {
        #[arg(long)]
        map: PathBuf,
        /// Also report the value and tail at a point: "re,im", "[re, im]" or "inf".
        #[arg(long)]
        at: Option<String>,
    },
    /// Metric data of a differential with simple poles and real residues.
    Build {
        /// {"poles": [{"point": [re, im] | "inf", "residue": r}, ...]}.
        #[arg(long)]
        omega: PathBuf,
        /// Open path for integration and development.
        #[arg(long)]
        path: Option<PathBuf>,
        /// Closed loop for a monodromy multiplier; may be repeated.
        #[arg(long = "loop")]
        loops: Vec<PathBuf>,
    },
    /// Local Frobenius solutions of x^2 u'' + q(x) u = 0.
    Frobenius {
        /// {"coeffs": [b0, b1, ...]}, each real or [re, im].
        #[arg(long)]
        q: PathBuf,
        /// Cone angle parameter; b0 must equal (1 - alpha^2)/4.
        #[arg(long)]
        alpha: f64,
        /// Truncation order of the series.
        #[arg(long, default_value_t = 32)]
        order: usize,
    },
    /// Role assignments a cone divisor admits for an abelian metric.
    Feasible {
        /// {"points": [{"point": [re, im] | "inf", "alpha": a}, ...]}.
        #[arg(long)]
        divisor: PathBuf,
    },
    /// Weak-cusp indicator of a model conformal factor near r = 0.
    Cusp {
        /// One of sph-cone, flat-cone, hyp-cusp.
        #[arg(long)]
        preset: String,
        /// Cone angle parameter for the cone presets.
        #[arg(long)]
        alpha: Option<f64>,
        /// Smallest sampled radius: a number in (0, 1) or exp(T) with T < 0.
        #[arg(long)]
        rmin: String,
    },
    /// Check the library invariants over a corpus and report each property.
    Verify {
        /// Directory of corpus JSON files; the shipped corpus by default.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Quadrature tolerance for areas.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Series truncation order.
        #[arg(long, default_value_t = 32)]
        order: usize,
    },
}

fn run(command: Command) -> Result<(Value, bool), CliError> {
    let ok = |v| Ok((v, true));
    match command {
        Command::Analyze { map, grid, res, tol } => ok(commands::analyze(&map, grid.as_deref(), res, tol)?),
        Command::Schwarzian { map, at } => ok(commands::schwarzian_cmd(&map, at.as_deref())?),
        Command::Build { omega, path, loops } => ok(commands::build(&omega, path.as_deref(), &loops)?),
        Command::Frobenius { q, alpha, order } => ok(commands::frobenius(&q, alpha, order)?),
        Command::Feasible { divisor } => ok(commands::feasible(&divisor)?),
        Command::Cusp { preset, alpha, rmin } => ok(commands::cusp(&preset, alpha, &rmin)?),
        Command::Verify { corpus, tol, order } => {
            let c = match corpus {
                Some(dir) => verify::Corpus::from_dir(&dir)?,
                None => verify::Corpus::shipped()?,
            };
            Ok(verify::run(&c, tol, order))
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli.command).and_then(|(v, pass)| emit(&json::to_string(&v), cli.out.as_ref()).map(|_| pass));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let v = json::object([("error", Value::from(e.to_string())), ("kind", Value::from(e.kind()))]);
            print!("{}", json::to_string(&v));
            ExitCode::from(e.exit_code())
        }
    }
}
