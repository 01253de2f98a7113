mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spectral_forge::Error;

const SHAPE_HELP: &str = "\
Shape specs use the mini-grammar name[:key=value,...]:
  coulomb            f(r) = -1/r
  yukawa:mu=0.5      f(r) = -exp(-mu r)/r  (plain `yukawa` takes --mu)
  hulthen[:a=1]      f(r) = -(1/a)/(exp(r/a) - 1)
  table:path.csv     tabulated shape, CSV with header r,f

Exit status: 0 ok, 1 usage, 2 no bound state, 3 convergence failure, 4 bad data.";

#[derive(Debug, Parser)]
#[command(name = "spectral-forge", version, about = "Ground-state spectra, geometric spectral inversion and form factors of radial potentials", after_help = SHAPE_HELP)]
struct Cli {
    /// Worker threads for per-coupling parallelism.
    #[arg(long, global = true, env = "SPECTRAL_FORGE_JOBS")]
    jobs: Option<usize>,

    /// JSON file overriding grids, tolerances and iteration count.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for output files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ground-state energy and wavefunction of one shape at one coupling.
    Solve {
        /// Shape spec, e.g. yukawa:mu=0.5.
        shape: String,
        #[arg(long)]
        v: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// Screening mass for a bare `yukawa` spec.
        #[arg(long)]
        mu: Option<f64>,
        /// Wavefunction CSV path (default: <out-dir>/wavefunction.csv).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reconstructs a potential shape from spectral data.
    Invert {
        /// Builtin series (ladder-0.15, ladder-0.5, lcl-0.5) or a CSV path
        /// with header v,E or series,mu,v,E.
        #[arg(long)]
        data: String,
        /// Seed shape spec.
        #[arg(long, default_value = "coulomb")]
        seed: String,
        /// Number of iterations.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long)]
        mu: Option<f64>,
    },
    /// Momentum-space form factor of a ground state.
    Formfactor {
        /// Shape spec.
        #[arg(conflicts_with_all = ["trace", "compare"], required_unless_present_any = ["trace", "compare"])]
        shape: Option<String>,
        /// Inversion iterate, as <trace-dir>/f<n> (a CSV under the working
        /// or output directory) or <series>/f<n> to run the inversion.
        #[arg(long, conflicts_with = "compare")]
        trace: Option<String>,
        /// Iterates or shape specs whose half-maximum momenta are compared.
        #[arg(long, num_args = 2..)]
        compare: Vec<String>,
        #[arg(long, default_value_t = 5.0)]
        v: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long)]
        mu: Option<f64>,
        /// Evaluate at this single momentum and print the value.
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        k_min: Option<f64>,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        k_points: Option<usize>,
    },
    /// Exchange-mass scaling comparison.
    ScaleCheck {
        /// Mass ratio R = mu_ref/mu_obs, comparing one series with itself.
        #[arg(long = "R")]
        ratio: Option<f64>,
        /// Series used with --R.
        #[arg(long, default_value = "ladder-0.5")]
        series: String,
        /// Solver-generated check for a shape family (only `yukawa`).
        #[arg(long)]
        synthetic: Option<String>,
        /// Reference screening mass for --synthetic.
        #[arg(long, default_value_t = 0.5)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
    },
    /// Bundled Bethe–Salpeter data.
    Dataset {
        #[command(subcommand)]
        action: DatasetAction,
    },
}

#[derive(Debug, Subcommand)]
enum DatasetAction {
    /// Writes the data as CSV series,mu,v,E.
    Export {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) => match e {
                Error::NoBoundState { .. } | Error::NoBinding => 2,
                Error::Convergence { .. }
                | Error::Inversion { .. }
                | Error::Unbracketed(_)
                | Error::Admissibility { .. } => 3,
                Error::NonConcave { .. }
                | Error::NonMonotone { .. }
                | Error::InsufficientData(_)
                | Error::Parse(_)
                | Error::Csv(_)
                | Error::Json(_)
                | Error::Unnormalized { .. } => 4,
                _ => 1,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
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

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let config = match &cli.config {
        Some(p) => config::ConfigFile::load(p)?,
        None => config::ConfigFile::default(),
    };
    let ctx = commands::Context { out_dir: cli.out_dir, config, config_path: cli.config };
    match cli.command {
        Command::Solve { shape, v, m, mu, output } => commands::solve(&ctx, &shape, v, m, mu, output),
        Command::Invert { data, seed, n, m, mu } => commands::invert(&ctx, &data, &seed, n, m, mu),
        Command::Formfactor { shape, trace, compare, v, m, mu, k, k_min, k_max, k_points } => {
            let k_grid = match k {
                Some(k) if !(k >= 0.0) => return Err(CliError::Usage(format!("--k must be >= 0, got {k}"))),
                Some(k) => config::KGrid { k_min: k, k_max: k, points: 1 },
                None => ctx.config.k_grid(k_min, k_max, k_points)?,
            };
            if !compare.is_empty() {
                commands::formfactor_compare(&ctx, &compare, v, m, mu, k_grid)
            } else {
                let source = match (shape, trace) {
                    (Some(s), _) => commands::Source::Shape(s),
                    (None, Some(t)) => commands::Source::Trace(t),
                    (None, None) => return Err(CliError::Usage("give a shape, --trace or --compare".into())),
                };
                commands::formfactor(&ctx, source, v, m, mu, k_grid, k.is_some())
            }
        }
        Command::ScaleCheck { ratio, series, synthetic, mu, m } => {
            commands::scale_check(&ctx, ratio, &series, synthetic.as_deref(), mu, m)
        }
        Command::Dataset { action: DatasetAction::Export { output } } => commands::dataset_export(&ctx, output),
    }
}
