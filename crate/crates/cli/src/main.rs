mod commands;
mod input;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Helix submanifolds of Euclidean space: frames, helix directions, flows
/// and theorem checks.
#[derive(Parser, Debug)]
#[command(name = "helixgeom", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Built-in surfaces and their curves
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Frenet frame and curvatures along a curve (CSV)
    Frenet(FrenetArgs),
    /// Estimate the space of helix directions (JSON)
    HelixSpace(HelixSpaceArgs),
    /// Check one theorem on a surface, curve and direction (JSON)
    Verify(VerifyArgs),
    /// Integrate a geodesic or a line of curvature (CSV)
    Trace(TraceArgs),
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// Entries, parameters, helix dimensions and curves
    List,
}

#[derive(Args, Debug)]
pub struct SurfaceArgs {
    /// Catalog entry name
    #[arg(long, conflicts_with = "immersion", required_unless_present = "immersion")]
    pub surface: Option<String>,
    /// Surface parameter, e.g. beta=pi/6 (repeatable)
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Immersion components over u1..um, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub immersion: Option<String>,
    /// Chart dimension of --immersion
    #[arg(long, requires = "immersion")]
    pub m: Option<usize>,
    /// Ambient dimension of --immersion (defaults to the component count)
    #[arg(long, requires = "immersion")]
    pub n: Option<usize>,
    /// Chart box: "lo,hi" for all axes or "lo,hi;lo,hi;..." per axis
    #[arg(long, requires = "immersion", allow_hyphen_values = true)]
    pub domain: Option<String>,
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Tolerance override, e.g. spread=1e-5 (repeatable)
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    pub tols: Vec<String>,
    /// Write the report here instead of stdout
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FrenetArgs {
    /// Catalog curve as ENTRY/CURVE
    #[arg(long, conflicts_with = "expr", required_unless_present = "expr")]
    pub curve: Option<String>,
    /// Catalog entry parameter (repeatable)
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Catalog curve parameter (repeatable)
    #[arg(long = "curve-param", value_name = "KEY=VALUE")]
    pub curve_params: Vec<String>,
    /// Ambient curve "x(t), y(t), ..."; reparametrized by arclength
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Option<String>,
    /// Parameter range "a,b"
    #[arg(long = "t-range", allow_hyphen_values = true)]
    pub t_range: Option<String>,
    /// Number of Frenet vectors
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    /// Number of rows
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct HelixSpaceArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Grid points per chart axis (default: 8, fewer when m > 3)
    #[arg(long)]
    pub samples: Option<usize>,
    /// Jitter seed for the sample grid; 0 keeps the grid exact
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Theorem id: 3.1, 3.2, 3.3, 3.5 or 3.6
    #[arg(long)]
    pub theorem: String,
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Catalog curve on --surface
    #[arg(long, conflicts_with = "chart_curve", required_unless_present = "chart_curve")]
    pub curve: Option<String>,
    /// Catalog curve parameter (repeatable)
    #[arg(long = "curve-param", value_name = "KEY=VALUE")]
    pub curve_params: Vec<String>,
    /// Chart curve "u1(t), ..., um(t)"; reparametrized by arclength
    #[arg(long = "chart-curve", allow_hyphen_values = true)]
    pub chart_curve: Option<String>,
    /// Parameter range of --chart-curve, "a,b"
    #[arg(long = "t-range", allow_hyphen_values = true)]
    pub t_range: Option<String>,
    /// Fixed direction: "e3" or "(0, 0, 1)"
    #[arg(long, allow_hyphen_values = true)]
    pub direction: String,
    /// Sample points along the curve
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    Geodesic,
    Curvline,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, value_enum)]
    pub kind: TraceKind,
    /// Start point in chart coordinates
    #[arg(long, allow_hyphen_values = true)]
    pub start: String,
    /// Initial chart velocity (geodesic)
    #[arg(long, allow_hyphen_values = true)]
    pub dir: Option<String>,
    /// Principal direction index, ascending curvature (curvline)
    #[arg(long, default_value_t = 0)]
    pub eig: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub length: String,
    #[arg(long, default_value = "0.01")]
    pub step: String,
    /// Write the CSV here instead of stdout
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Catalog { action: CatalogAction::List } => commands::catalog_list(),
        Command::Frenet(a) => commands::frenet(&a),
        Command::HelixSpace(a) => commands::helix_space(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Trace(a) => commands::trace(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
