use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::{Arc, Mutex};

use clap::{Parser, Subcommand, ValueEnum};

use taoist::aui::{SearchConfig, DEFAULT_CAPACITY};
use taoist::bench::{run_bench, to_csv, BenchConfig, DEFAULT_HARD_CAP};
use taoist::cli::{parse_layout, random_sequences, score_report, simulate_report, SimulateOptions};
use taoist::engine::{Engine, EngineConfig};
use taoist::sequence::{extract_lrs, format_log, parse_log};
use taoist::task_model::{parse_task_model, TaskModel};

#[derive(Parser)]
#[command(
    name = "taoist",
    version,
    about = "Adaptive user interfaces from task models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP/JSON service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, env = "TAOIST_STORE", default_value = "taoist-store.json")]
        store: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAPACITY)]
        capacity: usize,
        #[arg(long, default_value_t = 3)]
        max_order: usize,
        #[arg(long, default_value_t = 1)]
        threshold: u32,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train on a log and report LRS, predictions and candidate layouts.
    Simulate {
        model: PathBuf,
        /// Log file, one comma-separated sequence per line.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        sequences: Option<PathBuf>,
        /// Generate COUNT random executions from SEED instead of reading a log.
        #[arg(long, num_args = 2, value_names = ["SEED", "COUNT"])]
        random: Option<Vec<u64>>,
        #[arg(long, short = 'k', default_value_t = 2)]
        order: usize,
        #[arg(long, short = 't', default_value_t = 1)]
        threshold: u32,
        #[arg(long, default_value_t = DEFAULT_CAPACITY)]
        capacity: usize,
        #[arg(long, default_value_t = 5)]
        candidates: usize,
    },
    /// Enumerate layouts of all-concurrent models and print CSV rows.
    Bench {
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        improved: Mode,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        #[arg(long, default_value_t = DEFAULT_HARD_CAP)]
        hard_cap: usize,
    },
    /// Print the longest repeating subsequences of a log.
    Lrs {
        log: PathBuf,
        #[arg(long, short = 't', default_value_t = 1)]
        threshold: u32,
    },
    /// Score one layout, written `A,B|C,D`.
    Score {
        model: PathBuf,
        layout: String,
        /// Comma-separated actions already performed.
        #[arg(long, default_value = "")]
        history: String,
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long, short = 'k', default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_CAPACITY)]
        capacity: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    On,
    Off,
    Both,
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_model(path: &PathBuf) -> Result<TaskModel, String> {
    parse_task_model(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Serve {
            port,
            host,
            store,
            capacity,
            max_order,
            threshold,
            k,
            seed,
        } => {
            let config = EngineConfig {
                capacity,
                max_order,
                lrs_threshold: threshold,
                search: SearchConfig {
                    k,
                    seed,
                    ..SearchConfig::default()
                },
                store_path: Some(store),
            };
            let engine = Engine::new(config).map_err(|e| e.to_string())?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port))
                    .await
                    .map_err(|e| format!("bind {host}:{port}: {e}"))?;
                eprintln!(
                    "listening on {}",
                    listener.local_addr().map_err(|e| e.to_string())?
                );
                let shutdown = async {
                    let _ = tokio::signal::ctrl_c().await;
                };
                taoist::service::serve(listener, Arc::new(Mutex::new(engine)), shutdown)
                    .await
                    .map_err(|e| e.to_string())
            })
        }
        Command::Simulate {
            model,
            sequences,
            random,
            order,
            threshold,
            capacity,
            candidates,
        } => {
            let model = load_model(&model)?;
            let log = match (sequences, random) {
                (Some(path), _) => parse_log(&read(&path)?).map_err(|e| e.to_string())?,
                (None, Some(r)) => random_sequences(&model, r[0], r[1] as usize),
                (None, None) => return Err("either --sequences or --random is required".into()),
            };
            let opts = SimulateOptions {
                order,
                threshold,
                capacity,
                candidates,
                seed: 0,
            };
            print!(
                "{}",
                simulate_report(&model, &log, &opts).map_err(|e| e.to_string())?
            );
            Ok(())
        }
        Command::Bench {
            n_min,
            n_max,
            improved,
            repetitions,
            hard_cap,
        } => {
            let config = BenchConfig {
                n_min,
                n_max,
                improved: match improved {
                    Mode::On => Some(true),
                    Mode::Off => Some(false),
                    Mode::Both => None,
                },
                repetitions,
                hard_cap,
                ..BenchConfig::default()
            };
            let rows = run_bench(&config).map_err(|e| e.to_string())?;
            print!("{}", to_csv(&rows));
            Ok(())
        }
        Command::Lrs { log, threshold } => {
            let log = parse_log(&read(&log)?).map_err(|e| e.to_string())?;
            let lrs = extract_lrs(&log, threshold).map_err(|e| e.to_string())?;
            print!("{}", format_log(&lrs.sequences));
            Ok(())
        }
        Command::Score {
            model,
            layout,
            history,
            log,
            order,
            capacity,
        } => {
            let model = load_model(&model)?;
            let layout = parse_layout(&model, &layout).map_err(|e| e.to_string())?;
            let history: Vec<String> = history
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            let log = match log {
                Some(p) => parse_log(&read(&p)?).map_err(|e| e.to_string())?,
                None => Vec::new(),
            };
            let report = score_report(&model, &layout, &history, &log, order, capacity)
                .map_err(|e| e.to_string())?;
            print!("{report}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
