use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};
use log::debug;

use qubit_roof::oracle::OracleConfig;
use qubit_roof::roof::DEFAULT_TOL_PSD;
use qubit_roof::minkowski::DEFAULT_TAU_CAUSAL;
use qubit_roof::Tolerances;
use qubit_roof_cli::commands::{self, Settings};
use qubit_roof_cli::input::{read_json, BipartiteDescriptor, ChannelDescriptor, StateDescriptor};
use qubit_roof_cli::sweep::{self, ParamRange};
use qubit_roof_cli::{CliError, ExitCode};

/// Concurrence of stochastic qubit maps and rank-two 2×n states.
///
/// Exit codes: 0 success, 1 internal error, 2 parse error, 3 map not
/// positive, 4 invalid state, 5 rank above two.
#[derive(Debug, Parser)]
#[command(name = "qubit-roof", version)]
struct Cli {
    /// Relative tolerance for positive semidefiniteness of the quadratic form.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL_PSD)]
    tol_psd: f64,
    /// Tolerance on the Minkowski square when classifying kernel vectors.
    #[arg(long, global = true, default_value_t = DEFAULT_TAU_CAUSAL)]
    tol_causal: f64,
    /// Base seed for the brute-force oracle.
    #[arg(long, global = true, default_value_t = OracleConfig::default().seed)]
    seed: u64,
    /// Add wall-clock timing to reports (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Roof geometry of a channel: w0, PSD interval, flatness, kernel vector.
    ChannelInfo {
        /// Channel JSON file.
        channel: PathBuf,
    },
    /// Concurrence of a channel at a qubit state.
    Concurrence {
        /// Channel JSON file.
        channel: PathBuf,
        /// Qubit state JSON file.
        state: PathBuf,
        /// Also run the brute-force oracle and report the gap.
        #[arg(long)]
        oracle: bool,
        /// Report the optimal two-component decomposition.
        #[arg(long)]
        decompose: bool,
    },
    /// Map induced by the partial trace on the support of a rank-≤2 2×n state.
    Reduce {
        /// Bipartite state JSON file.
        bipartite: PathBuf,
        /// Also compute the concurrence and the entanglement-of-formation bound.
        #[arg(long)]
        then_concurrence: bool,
    },
    /// Evaluate a channel template over a parameter grid, writing CSV.
    Sweep {
        /// Channel JSON with "$name" placeholders.
        template: PathBuf,
        /// `name=start:stop:count` for each "$name" placeholder.
        #[arg(long = "param", required = true)]
        params: Vec<String>,
        /// Evaluate the concurrence at this state.
        #[arg(long, conflicts_with = "grid")]
        state: Option<PathBuf>,
        /// Evaluate at N states on the diameter along the third axis.
        #[arg(long)]
        grid: Option<usize>,
        /// Output file (standard output if absent).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Brute-force minimization over decompositions.
    Oracle {
        /// Channel JSON file.
        channel: PathBuf,
        /// Qubit state JSON file.
        state: PathBuf,
        #[command(flatten)]
        config: OracleArgs,
        /// Compare 2-, 3- and 4-point minima.
        #[arg(long)]
        sufficiency: bool,
    },
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Directions in the initial hemisphere scan.
    #[arg(long, default_value_t = OracleConfig::default().grid_resolution)]
    grid_resolution: usize,
    /// Nelder–Mead iterations per free parameter.
    #[arg(long, default_value_t = OracleConfig::default().refine_iterations)]
    refine_iterations: usize,
    /// Number of pure states in each decomposition.
    #[arg(long, default_value_t = OracleConfig::default().n_points)]
    n_points: usize,
    /// Local refinements started from the best scan points.
    #[arg(long, default_value_t = OracleConfig::default().restarts)]
    restarts: usize,
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::internal(format!("writing output failed: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings {
        tolerances: Tolerances {
            psd: cli.tol_psd,
            causal: cli.tol_causal,
        },
        seed: cli.seed,
        timing: cli.timing,
    };
    debug!("settings: {settings:?}");
    match cli.command {
        Command::ChannelInfo { channel } => {
            let report = commands::channel_info(&ChannelDescriptor::read(&channel)?, &settings)?;
            emit(&report.to_json())
        }
        Command::Concurrence {
            channel,
            state,
            oracle,
            decompose,
        } => {
            let report = commands::concurrence(
                &ChannelDescriptor::read(&channel)?,
                &StateDescriptor::read(&state)?,
                oracle,
                decompose,
                &settings,
            )?;
            emit(&report.to_json())
        }
        Command::Reduce {
            bipartite,
            then_concurrence,
        } => {
            let report = commands::reduce(&BipartiteDescriptor::read(&bipartite)?, then_concurrence, &settings)?;
            emit(&report.to_json())
        }
        Command::Sweep {
            template,
            params,
            state,
            grid,
            csv,
        } => {
            let template = read_json(&template)?;
            let ranges = params
                .iter()
                .map(|p| p.parse::<ParamRange>())
                .collect::<Result<Vec<_>, _>>()?;
            let states = match (state, grid) {
                (Some(path), _) => vec![StateDescriptor::read(&path)?.to_four_vector()?],
                (None, Some(n)) => sweep::axis_states(n),
                (None, None) => Vec::new(),
            };
            let rows = sweep::run(&template, &ranges, &states, &settings)?;
            let with_state = !states.is_empty();
            match csv {
                Some(path) => {
                    let file = File::create(&path)
                        .map_err(|e| CliError::parse(format!("cannot create {}: {e}", path.display())))?;
                    sweep::write_csv(BufWriter::new(file), &ranges, with_state, &rows)
                }
                None => sweep::write_csv(io::stdout().lock(), &ranges, with_state, &rows),
            }
        }
        Command::Oracle {
            channel,
            state,
            config,
            sufficiency,
        } => {
            let cfg = OracleConfig {
                grid_resolution: config.grid_resolution,
                refine_iterations: config.refine_iterations,
                n_points: config.n_points,
                restarts: config.restarts,
                seed: settings.seed,
            };
            let report = commands::oracle(
                &ChannelDescriptor::read(&channel)?,
                &StateDescriptor::read(&state)?,
                &cfg,
                sufficiency,
                &settings,
            )?;
            emit(&report.to_json())
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        process::exit(e.exit.code());
    }
    process::exit(ExitCode::Ok.code());
}
