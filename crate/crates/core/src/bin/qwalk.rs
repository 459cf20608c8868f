//! `qwalk`: sweeps, probe optimization, figure data and self-verification.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qwalk::experiment::config::OutputSet;
use qwalk::experiment::output::{render_svg, write_file};
use qwalk::experiment::sweep::{optimize_table, sweep_series, sweep_table};
use qwalk::experiment::{
    emit_figure_data, run_optimize, run_sweep, run_verify, ExperimentConfig, ExperimentError, FigureConfig, Series,
    Table, VerifyOptions,
};

const THREADS_ENV: &str = "QWALK_THREADS";

#[derive(Parser, Debug)]
#[command(name = "qwalk", version, about = "Parameter estimation with qudit-coin quantum walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Experiment configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for result files; tables go to stdout when omitted.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Tabular format, overriding `output.formats`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (QWALK_THREADS takes precedence).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Seed for randomized restarts and sampled checks.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Metrology reports over a θ grid and a range of steps.
    Sweep,
    /// Optimal probe search for every (θ, t) cell.
    Optimize,
    /// Data for one of the built-in figures (1a, 1b, 2, 3a-3d, 4, 5a-5c).
    Figure {
        /// One of 1a, 1b, 2, 3a, 3b, 3c, 3d, 4, 5a, 5b, 5c.
        id: String,
    },
    /// Oracle cases and property checks; exits with 2 on any failure.
    Verify {
        #[arg(long, hide = true)]
        mutate_derivative_sign: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Jsonl,
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(2),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads(cli.common.threads)?;
    let common = &cli.common;
    match &cli.command {
        Command::Sweep => {
            let config = load_config(common)?;
            let rows = run_sweep(&config)?;
            let table = sweep_table(config.dim, &rows);
            let series = sweep_series(&rows, |r| r.qfi);
            let title = format!("QFI, {} coin, D = {}", config.family.name(), config.dim);
            emit(common, &config.name, config.outputs, &table, || {
                render_svg(&title, x_label(&series), "QFI", &series)
            })
        }
        Command::Optimize => {
            let config = load_config(common)?;
            let rows = run_optimize(&config)?;
            let table = optimize_table(config.dim, &rows);
            let mut ts: Vec<usize> = rows.iter().map(|r| r.t).collect();
            ts.dedup();
            let series: Vec<Series> = ts
                .iter()
                .map(|&t| Series {
                    label: format!("t={t}"),
                    points: rows.iter().filter(|r| r.t == t).map(|r| (r.theta, r.result.best_value)).collect(),
                })
                .collect();
            let title = format!("optimal {}, {} coin, D = {}", rows[0].result.objective, config.family.name(), config.dim);
            emit(common, &config.name, config.outputs, &table, || {
                render_svg(&title, "theta", "best value", &series)
            })
        }
        Command::Figure { id } => {
            let mut fig_config = match &common.config {
                Some(path) => FigureConfig::from_file(path)?,
                None => FigureConfig::default(),
            };
            if let Some(seed) = common.seed {
                fig_config.options.seed = seed;
            }
            let data = emit_figure_data(id, &fig_config.options)?;
            emit(common, &format!("fig{}", data.id), fig_config.outputs, &data.table, || {
                render_svg(&data.title, &data.x_label, &data.y_label, &data.series)
            })
        }
        Command::Verify { mutate_derivative_sign } => {
            if common.config.is_some() {
                return Err(Failure::Usage("verify takes no --config".into()));
            }
            let summary = run_verify(&VerifyOptions {
                seed: common.seed.unwrap_or(0),
                mutate_derivative_sign: *mutate_derivative_sign,
            });
            let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
            match &common.out {
                Some(dir) => {
                    let path = write_file(dir, "verify.json", &json)?;
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{json}"),
            }
            for line in summary.failures() {
                eprintln!("FAIL {line}");
            }
            eprintln!(
                "{} of {} cases and {} of {} properties passed",
                summary.cases_total - summary.cases_failed,
                summary.cases_total,
                summary.properties_total - summary.properties_failed,
                summary.properties_total
            );
            if summary.passed {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn configure_threads(flag: Option<usize>) -> Result<(), Failure> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("{THREADS_ENV} must be a nonnegative integer, got `{v}`")))?,
        ),
        Err(_) => flag,
    };
    // 0 keeps rayon's default of one worker per core
    if let Some(n) = threads.filter(|&n| n > 0) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start thread pool: {e}")))?;
    }
    Ok(())
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Failure> {
    let path = common
        .config
        .as_deref()
        .ok_or_else(|| Failure::Usage("this command needs --config PATH".into()))?;
    let mut config = ExperimentConfig::from_file(path)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn x_label(series: &[Series]) -> &'static str {
    if series.len() == 1 && series[0].label.starts_with("theta=") {
        "t"
    } else {
        "theta"
    }
}

fn emit(
    common: &Common,
    stem: &str,
    mut outputs: OutputSet,
    table: &Table,
    svg: impl FnOnce() -> String,
) -> Result<(), Failure> {
    if let Some(format) = common.format {
        outputs.csv = format == Format::Csv;
        outputs.jsonl = format == Format::Jsonl;
    }
    let Some(dir) = common.out.as_deref() else {
        let text = if outputs.jsonl && !outputs.csv {
            table.to_jsonl()
        } else {
            table.to_csv()
        };
        print!("{text}");
        return Ok(());
    };
    let mut written = Vec::new();
    if outputs.csv {
        written.push(write_file(dir, &format!("{stem}.csv"), &table.to_csv())?);
    }
    if outputs.jsonl {
        written.push(write_file(dir, &format!("{stem}.jsonl"), &table.to_jsonl())?);
    }
    if outputs.svg {
        written.push(write_file(dir, &format!("{stem}.svg"), &svg())?);
    }
    report(&written);
    Ok(())
}

fn report(paths: &[PathBuf]) {
    for p in paths.iter().map(PathBuf::as_path).map(Path::display) {
        eprintln!("wrote {p}");
    }
}
