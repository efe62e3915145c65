//! `scq`: command-line front end for the circular-arc quadrilateral solvers.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use output::{Failure, Tolerances};

#[derive(Parser)]
#[command(name = "scq", version, about = "Conformal maps onto symmetric circular-arc quadrilaterals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; each subcommand picks its natural default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the map for given accessory parameters.
    Map(MapArgs),
    /// Solve for the accessory parameter from target geometry.
    Params(ParamsArgs),
    /// Univalence interval at one prevertex or over a sweep.
    Univalence(UnivalenceArgs),
    /// Construct the quadrilateral from its right edge.
    Geometry(GeometryArgs),
    /// Zero of the Weierstrass function for a rectangular lattice.
    WpZero(WpZeroArgs),
    /// Covering group of the disk punctured at ±a.
    Fuchsian(FuchsianArgs),
}

#[derive(Args)]
pub struct MapArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Rectangle accessory parameter; with --tau selects the rectangle problem.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Lattice ratio, e.g. `1.3i`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub tau: Option<Complex64>,
    /// Boundary samples.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(2..))]
    pub steps: u32,
    /// Radial offset for the boundary extrapolation.
    #[arg(long, default_value_t = 1e-4, value_parser = positive)]
    pub tol: f64,
}

#[derive(Args)]
pub struct ParamsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Prevertex; omitted when solving from both --kappa1 and --p2.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa1: Option<f64>,
    /// Imaginary part of the upper-right vertex ratio.
    #[arg(long)]
    pub p2: Option<f64>,
    /// Starting guess for the accessory parameter.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
}

#[derive(Args)]
pub struct UnivalenceArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    pub t: Option<f64>,
    /// Sweep t_k = k(π/2)/(n+1), k = 1..n.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub grid: Option<u32>,
}

#[derive(Args)]
pub struct GeometryArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "height")]
    pub kappa1: Option<f64>,
    /// Half-angle of the right edge.
    #[arg(long)]
    pub theta1: Option<f64>,
    /// Vertex height for a straight right edge.
    #[arg(long, conflicts_with = "theta1")]
    pub height: Option<f64>,
}

#[derive(Args)]
pub struct WpZeroArgs {
    /// Lattice ratio, e.g. `i` or `1.5i`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub tau: Complex64,
}

#[derive(Args)]
pub struct FuchsianArgs {
    #[arg(long, allow_negative_numbers = true, required_unless_present = "table")]
    pub a: Option<f64>,
    /// All rows a = 0.1, ..., 0.9.
    #[arg(long, conflicts_with_all = ["a", "geodesic"])]
    pub table: bool,
    /// Emit the closed geodesic with this many samples.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub geodesic: Option<u32>,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be positive and finite".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Parses `x`, `yi`, `i`, `-i` or `x±yi`.
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot read `{s}` as a complex number");
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().map_err(|_| bad())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            eprint!("{msg}");
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ");
            return fail(&Failure::Usage(first.to_string()), &Tolerances::default());
        }
    };
    let format = cli.format;
    let (tol, result) = match &cli.command {
        Command::Map(a) => commands::map(a, format),
        Command::Params(a) => commands::params(a, format),
        Command::Univalence(a) => commands::univalence(a, format),
        Command::Geometry(a) => commands::geometry(a, format),
        Command::WpZero(a) => commands::wp_zero(a, format),
        Command::Fuchsian(a) => commands::fuchsian(a, format),
    };
    match result.and_then(|o| output::write(&o, cli.out.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(&f, &tol),
    }
}

fn fail(f: &Failure, tol: &Tolerances) -> ExitCode {
    let doc = serde_json::to_string_pretty(&f.to_json(tol)).unwrap_or_default();
    let _ = writeln!(std::io::stdout(), "{doc}");
    ExitCode::from(f.exit_code())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1.5i").unwrap(), c(0.0, 1.5));
        assert_eq!(parse_complex("0.2+1.1i").unwrap(), c(0.2, 1.1));
        assert_eq!(parse_complex("0.2-i").unwrap(), c(0.2, -1.0));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), c(1e-3, 20.0));
        assert_eq!(parse_complex("0.7").unwrap(), c(0.7, 0.0));
        assert!(parse_complex("x").is_err());
        assert!(parse_complex("1+xi").is_err());
    }

    #[test]
    fn positivity() {
        assert!(positive("1e-5").is_ok());
        assert!(positive("0").is_err());
        assert!(positive("-1").is_err());
        assert!(positive("inf").is_err());
    }

    #[test]
    fn command_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
