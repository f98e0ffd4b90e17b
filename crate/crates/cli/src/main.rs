use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pentagram::maps::PentagramMap;
use pentagram::polygon::random_convex_polygon;
use pentagram::{io, AffinePolygon, Error};

mod commands;
mod output;
mod svg;

#[derive(Parser)]
#[command(
    name = "pentagram",
    version,
    about = "Convexity experiments for the inverse pentagram map"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report d_P, affinity of Glick's operator, the convexity horizon and,
    /// for pentagons, concentricity of the inscribed and circumscribed conics.
    Check {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Iterate S or D and write per-step statistics and a strip of frames.
    Orbit {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunFlags,
        #[arg(long, default_value = "S")]
        map: PentagramMap,
        /// CSV destination (defaults to standard output).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Move one vertex so that d_P = 0 and write the resulting polygon.
    Solve {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunFlags,
        /// Vertex to move (defaults to the best-conditioned one).
        #[arg(long)]
        vertex: Option<usize>,
    },
    /// Compare convexity horizons of random and variety-projected polygons.
    Experiment {
        #[arg(long, short, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        run: RunFlags,
    },
}

#[derive(Args)]
struct Input {
    /// Polygon JSON file: {"vertices": [[x, y], ...]}.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    file: Option<PathBuf>,
    /// Use a random convex n-gon drawn from --seed instead of a file.
    #[arg(long, value_name = "N")]
    random: Option<usize>,
}

#[derive(Args, Clone)]
pub struct RunFlags {
    /// Tolerance (check: |d_P| relative to its scale; solve: target residual).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    kmax: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep raw iterates instead of normalizing each one.
    #[arg(long)]
    no_renormalize: bool,
    /// Never re-project iterates onto d_P = 0.
    #[arg(long)]
    no_reproject: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub struct RunConfig {
    pub tolerance: f64,
    pub k_max: usize,
    pub seed: u64,
    pub renormalize: bool,
    pub reproject: bool,
    pub output_path: Option<PathBuf>,
}

impl RunFlags {
    fn config(&self, default_tol: f64) -> Result<RunConfig, CliError> {
        let tolerance = self.tol.unwrap_or(default_tol);
        if !(tolerance > 0.0) {
            return Err(CliError::Usage(format!(
                "--tol must be positive (got {tolerance})"
            )));
        }
        let k_max = self.kmax as usize;
        Ok(RunConfig {
            tolerance,
            k_max,
            seed: self.seed,
            renormalize: !self.no_renormalize,
            reproject: !self.no_reproject && pentagram::variety::reproject_by_default(k_max),
            output_path: self.out.clone(),
        })
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Geometry(Error),
    Io(anyhow::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Geometry(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Geometry(e) => match e {
                Error::TooFewVertices(_) | Error::Format(_) => 1,
                Error::NoConvergence { .. }
                | Error::MaxIterationsExceeded(_)
                | Error::ExhaustedAttempts(_) => 3,
                _ => 2,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Geometry(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e:#}"),
        }
    }
}

fn load(input: &Input, seed: u64) -> Result<AffinePolygon, CliError> {
    match (&input.file, input.random) {
        (_, Some(n)) if n < pentagram::polygon::MIN_VERTICES => {
            Err(Error::TooFewVertices(n).into())
        }
        (_, Some(n)) => Ok(random_convex_polygon(n, seed)),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Io(anyhow::Error::new(e).context(path.display().to_string()))
            })?;
            Ok(io::parse_polygon(&text)?)
        }
        (None, None) => Err(CliError::Usage("no input polygon".into())),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Check { input, run } => {
            let cfg = run.config(pentagram::glick::TOL_DP)?;
            commands::check(&load(&input, cfg.seed)?, &cfg)
        }
        Command::Orbit {
            input,
            run,
            map,
            csv,
            svg,
        } => {
            let cfg = run.config(pentagram::glick::TOL_DP)?;
            commands::run_orbit(&load(&input, cfg.seed)?, map, &cfg, csv, svg)
        }
        Command::Solve { input, run, vertex } => {
            let cfg = run.config(pentagram::variety::REPROJECT_TOL)?;
            commands::solve(&load(&input, cfg.seed)?, vertex, &cfg)
        }
        Command::Experiment { n, trials, run } => {
            let cfg = run.config(pentagram::variety::REPROJECT_TOL)?;
            if n < pentagram::polygon::MIN_VERTICES {
                return Err(Error::TooFewVertices(n).into());
            }
            if trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            commands::experiment(n, trials, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors share exit code 1 with bad input; help and version succeed
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
