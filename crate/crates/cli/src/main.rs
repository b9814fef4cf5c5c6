//! `invdesign`: forward solves, inverse design and the quartic-well
//! counterexample from the command line.
//!
//! Exit codes: 0 success, 1 I/O, 2 solver failure, 64 usage or config.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use invdesign::pde::HjScheme;

use config::RunConfig;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Io(_) => 1,
            Failure::Solver(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Solver(m) => write!(f, "solver error: {m}"),
        }
    }
}

impl From<invdesign::Error> for Failure {
    fn from(e: invdesign::Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Solver(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "invdesign", version, about = "Inverse design for Hamilton-Jacobi equations and convex conservation laws")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Flags layered over the JSON config.
#[derive(Debug, Args)]
struct Overrides {
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of grid cells
    #[arg(long = "grid-n", global = true)]
    grid_n: Option<usize>,
    #[arg(long = "x-min", global = true, allow_negative_numbers = true)]
    x_min: Option<f64>,
    #[arg(long = "x-max", global = true, allow_negative_numbers = true)]
    x_max: Option<f64>,
    /// Time horizon
    #[arg(long = "T", global = true)]
    horizon: Option<f64>,
    #[arg(long, global = true)]
    cfl: Option<f64>,
    #[arg(long = "dt-ode", global = true)]
    dt_ode: Option<f64>,
    #[arg(long, global = true)]
    snapshots: Option<usize>,
    #[arg(long, global = true, value_enum)]
    scheme: Option<Scheme>,
    #[arg(long = "tol-reach", global = true)]
    tol_reach: Option<f64>,
    #[arg(long = "tol-point", global = true)]
    tol_point: Option<f64>,
    #[arg(long = "tol-energy", global = true)]
    tol_energy: Option<f64>,
    #[arg(long = "tol-delta", global = true)]
    tol_delta: Option<f64>,
    #[arg(long = "tol-gap-cells", global = true)]
    tol_gap_cells: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scheme {
    Godunov,
    LaxFriedrichs,
    Eno2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Equation {
    Cl,
    Hj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Artifact {
    Period,
    Portrait,
    Exact,
    Sturm,
    Shock,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve forward from a datum file (columns x, value)
    Evolve {
        #[arg(value_enum)]
        equation: Equation,
        datum: PathBuf,
    },
    /// Compute U0*, reachability and the closure of pi_w for a terminal profile
    Invert {
        /// Terminal profile W (or w with --cl)
        w: PathBuf,
        /// Candidate initial datum to test for membership
        #[arg(long)]
        u0: Option<PathBuf>,
        /// Files hold conservation-law profiles w and u0 instead of primitives
        #[arg(long)]
        cl: bool,
    },
    /// Artifacts of the quartic-well counterexample
    Counterexample {
        #[arg(value_enum)]
        what: Artifact,
        /// Time for `shock` (defaults to T)
        #[arg(long)]
        t: Option<f64>,
        /// Number of period samples
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long = "p-min", default_value_t = 0.05)]
        p_min: f64,
        #[arg(long = "p-max", default_value_t = 1.40)]
        p_max: f64,
        /// Orbit length for `portrait`
        #[arg(long = "t-max", default_value_t = 10.0)]
        t_max: f64,
    },
    /// Overlay CSV series in an SVG line plot
    Plot {
        series: Vec<PathBuf>,
        /// Column for the horizontal axis (name or index)
        #[arg(long, default_value = "0")]
        x: String,
        /// Column for the vertical axis (name or index)
        #[arg(long, default_value = "1")]
        y: String,
        /// Start a new polyline whenever this column changes
        #[arg(long)]
        split: Option<String>,
        #[arg(long)]
        title: Option<String>,
        /// SVG file (defaults to <out>/plot.svg)
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn resolve(o: &Overrides) -> Result<RunConfig, Failure> {
    let mut c = match &o.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &o.out {
        c.out = v.clone();
    }
    if let Some(v) = o.grid_n {
        c.grid.n = v;
    }
    if let Some(v) = o.x_min {
        c.grid.x_min = v;
    }
    if let Some(v) = o.x_max {
        c.grid.x_max = v;
    }
    if let Some(v) = o.horizon {
        c.time.horizon = v;
    }
    if let Some(v) = o.cfl {
        c.time.cfl = v;
    }
    if let Some(v) = o.dt_ode {
        c.time.dt_ode = v;
    }
    if let Some(v) = o.snapshots {
        c.time.snapshots = v;
    }
    if let Some(s) = o.scheme {
        c.hj_scheme = match s {
            Scheme::Godunov => HjScheme::Godunov,
            Scheme::LaxFriedrichs => HjScheme::LaxFriedrichs,
            Scheme::Eno2 => HjScheme::Eno2,
        };
    }
    if o.tol_reach.is_some() {
        c.tolerances.reach = o.tol_reach;
    }
    if o.tol_point.is_some() {
        c.tolerances.point = o.tol_point;
    }
    if let Some(v) = o.tol_energy {
        c.tolerances.energy = v;
    }
    if let Some(v) = o.tol_delta {
        c.tolerances.delta = v;
    }
    if let Some(v) = o.tol_gap_cells {
        c.tolerances.gap_cells = v;
    }
    Ok(c)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = resolve(&cli.overrides)?;
    let model = config.validate()?;
    match cli.command {
        Command::Evolve { equation, datum } => commands::evolve(&config, &model, equation, &datum),
        Command::Invert { w, u0, cl } => commands::invert(&config, &model, &w, u0.as_deref(), cl),
        Command::Counterexample {
            what,
            t,
            count,
            p_min,
            p_max,
            t_max,
        } => commands::counterexample(&config, what, &commands::CounterexampleArgs {
            t,
            count,
            p_min,
            p_max,
            t_max,
        }),
        Command::Plot {
            series,
            x,
            y,
            split,
            title,
            output,
        } => {
            let output = output.unwrap_or_else(|| config.out.join("plot.svg"));
            svg::plot(&series, &svg::Columns { x, y, split }, title.as_deref(), &output)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("invdesign: {f}");
            ExitCode::from(f.code())
        }
    }
}
