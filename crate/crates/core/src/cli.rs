//! The `surgeflow` command line: `synth`, `forecast`, `simulate`, `report`.
//!
//! Exit codes: 0 success, 1 invalid input or configuration, 2 runtime
//! failure (training divergence, unwritable output).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::allocation::{assignments_csv, Hospital};
use crate::error::{Error, Result};
use crate::forecast::{self, LstmModel, TrainConfig, INPUT_WINDOW};
use crate::io::charts::{self, line_chart};
use crate::io::{self, export, SyntheticSpec};
use crate::queueing;
use crate::simulation::{self, ArrivalSource, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(
    name = "surgeflow",
    version,
    propagate_version = true,
    about = "Arrival forecasting and surge relocation simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic hourly arrival series (`hour,arrivals`).
    Synth(SynthArgs),
    /// Train the arrival forecaster and optionally predict the next 24 hours.
    Forecast(ForecastArgs),
    /// Run a surge scenario and export metric CSVs plus a manifest.
    Simulate(SimulateArgs),
    /// Summarize an exported metrics directory and optionally draw charts.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 31)]
    days: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ForecastArgs {
    /// Hourly history CSV with header `hour,arrivals`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    model_out: PathBuf,
    /// Per-epoch `epoch,train_loss,val_loss`.
    #[arg(long)]
    history_out: PathBuf,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write the next 24 hours to `forecast.csv` beside the model.
    #[arg(long)]
    predict: bool,
    /// Where `--predict` writes; overrides the default location.
    #[arg(long, requires = "predict")]
    forecast_out: Option<PathBuf>,
    /// Write a train/validation loss chart (SVG).
    #[arg(long)]
    loss_chart: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Use a historical `hour,arrivals` CSV instead of the scenario's source.
    #[arg(long, conflicts_with = "forecast")]
    arrivals: Option<PathBuf>,
    /// Use a `hour,predicted_arrivals` CSV from `forecast --predict`.
    #[arg(long)]
    forecast: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Also write `events.csv` and `assignments.csv`.
    #[arg(long)]
    event_log: bool,
    /// Run N seeds starting at the scenario seed; each lands in `seed_<s>/`.
    #[arg(long)]
    sweep: Option<usize>,
    /// Worker threads for `--sweep`.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    metrics: PathBuf,
    /// Write relocations, distribution, cost and acuity SVGs into the metrics dir.
    #[arg(long)]
    charts: bool,
    /// Print the M/M/1 expected-wait table for this service rate (patients/hour).
    #[arg(long)]
    wait_table_mu: Option<f64>,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Forecast(a) => cmd_forecast(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Report(a) => cmd_report(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        1
    } else {
        2
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| Error::write(dir, e)),
        _ => Ok(()),
    }
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let spec = SyntheticSpec {
        days: a.days,
        seed: a.seed,
        ..SyntheticSpec::default()
    };
    spec.validate_at("--")?;
    let series = io::generate_synthetic(&spec)?;
    ensure_parent(&a.out)?;
    io::write_atomic(&a.out, io::series_csv(&series).as_bytes())?;
    println!("wrote {} hours to {}", series.len(), a.out.display());
    Ok(())
}

fn cmd_forecast(a: &ForecastArgs) -> Result<()> {
    let config = TrainConfig {
        epochs: a.epochs,
        seed: a.seed,
        ..TrainConfig::default()
    };
    config.validate().map_err(|e| match e {
        Error::InvalidArgument { name, reason } => Error::Config {
            field: format!("--{name}"),
            reason,
        },
        other => other,
    })?;
    let series = io::load_series(&a.input)?;
    let (model, report) = forecast::train(&series, &config)?;
    ensure_parent(&a.model_out)?;
    model.save(&a.model_out)?;
    ensure_parent(&a.history_out)?;
    forecast::write_history_csv(&report, &a.history_out)?;
    println!(
        "trained {} epochs on {} pairs ({} validation): train {:.6} -> {:.6}, val {:.6}",
        report.epochs(),
        report.train_pairs,
        report.val_pairs,
        report.train_loss.first().copied().unwrap_or(f64::NAN),
        report.train_loss.last().copied().unwrap_or(f64::NAN),
        report.val_loss.last().copied().unwrap_or(f64::NAN),
    );
    if let Some(path) = &a.loss_chart {
        let svg = line_chart(
            "Model loss vs epochs",
            "epoch",
            "MSE (normalized)",
            &[("train", &report.train_loss), ("validation", &report.val_loss)],
        );
        match svg {
            Some(body) => {
                ensure_parent(path)?;
                io::write_atomic(path, body.as_bytes())?;
            }
            None => eprintln!("warning: empty loss history, no chart written"),
        }
    }
    if a.predict {
        let out = a.forecast_out.clone().unwrap_or_else(|| {
            a.model_out
                .parent()
                .map(|d| d.join("forecast.csv"))
                .unwrap_or_else(|| PathBuf::from("forecast.csv"))
        });
        write_prediction(&model, &series, &out)?;
        println!("wrote 24-hour forecast to {}", out.display());
    }
    Ok(())
}

fn write_prediction(model: &LstmModel, series: &forecast::ArrivalSeries, out: &Path) -> Result<()> {
    let recent = series.tail(INPUT_WINDOW).ok_or(Error::InsufficientHistory {
        needed: INPUT_WINDOW,
        got: series.len(),
    })?;
    let predicted = forecast::predict_next_24(model, recent)?;
    let next_hour = series.start_hour() + series.len() as u64;
    ensure_parent(out)?;
    io::write_atomic(out, io::forecast_csv(next_hour, &predicted).as_bytes())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let mut scenario = ScenarioConfig::load(&a.scenario)?;
    if let Some(path) = &a.arrivals {
        scenario.arrival_source = ArrivalSource::Historical { path: path.clone() };
    }
    if let Some(path) = &a.forecast {
        scenario.arrival_source = ArrivalSource::Forecast { path: path.clone() };
    }
    let arrivals = scenario.resolve_arrivals()?;
    let hospitals = scenario.hospitals.clone();

    let Some(n) = a.sweep else {
        let outcome = simulation::run(&scenario, &arrivals)?;
        write_outcome(&scenario, &hospitals, &outcome, &a.out, a.event_log)?;
        let s = simulation::summarize(&outcome.metrics, &hospitals);
        println!(
            "relocated {} patients, total cost {}, overflow {}; wrote {}",
            s.total_relocated,
            s.total_cost,
            s.overflow,
            a.out.display()
        );
        return Ok(());
    };
    if n == 0 {
        return Err(Error::config("--sweep", "must be at least 1"));
    }
    if a.jobs == 0 {
        return Err(Error::config("--jobs", "must be at least 1"));
    }
    let seeds: Vec<u64> = (0..n as u64).map(|k| scenario.seed.wrapping_add(k)).collect();
    let results = simulation::run_sweep(&scenario, &arrivals, &seeds, a.jobs);
    let mut table = String::from("seed,total_relocated,total_cost,overflow,peak_relocation_hour\n");
    for (&seed, result) in seeds.iter().zip(results) {
        let outcome = result?;
        let cfg = scenario.clone().with_seed(seed);
        write_outcome(
            &cfg,
            &hospitals,
            &outcome,
            &a.out.join(format!("seed_{seed}")),
            a.event_log,
        )?;
        let m = &outcome.metrics;
        let peak = m.peak_relocation_hour().map(|h| h.to_string()).unwrap_or_default();
        let _ = writeln!(
            table,
            "{seed},{},{},{},{peak}",
            m.total_relocated(),
            m.total_cost(),
            m.overflow_count
        );
    }
    io::write_atomic(&a.out.join("sweep.csv"), table.as_bytes())?;
    println!("ran {n} seeds; wrote {}", a.out.join("sweep.csv").display());
    Ok(())
}

fn write_outcome(
    scenario: &ScenarioConfig,
    hospitals: &[Hospital],
    outcome: &simulation::SimulationOutcome,
    dir: &Path,
    event_log: bool,
) -> Result<()> {
    let capacities: Vec<(String, u32)> = hospitals.iter().map(|h| (h.id.clone(), h.capacity)).collect();
    let mut manifest = export::export_metrics(&outcome.metrics, &capacities, &scenario.hash(), dir)?;
    if event_log {
        io::write_atomic(&dir.join("events.csv"), outcome.event_log_csv().as_bytes())?;
        io::write_atomic(
            &dir.join("assignments.csv"),
            assignments_csv(&outcome.assignments).as_bytes(),
        )?;
        manifest.add_file("events.csv");
        manifest.add_file("assignments.csv");
        manifest.save(dir)?;
    }
    Ok(())
}

fn cmd_report(a: &ReportArgs) -> Result<()> {
    let (metrics, mut manifest) = export::read_metrics(&a.metrics)?;
    let hospitals: Vec<Hospital> = manifest
        .summary
        .capacities
        .iter()
        .map(|(id, cap)| Hospital::new(id.clone(), *cap, 0.0))
        .collect();
    let summary = simulation::summarize(&metrics, &hospitals);
    print!("{}", summary.to_table());
    if a.charts {
        let out = charts::render_metric_charts(&metrics, &a.metrics)?;
        for w in &out.warnings {
            eprintln!("warning: {w}");
        }
        for name in out.file_names() {
            manifest.add_file(&name);
        }
        for w in out.warnings {
            if !manifest.warnings.contains(&w) {
                manifest.warnings.push(w);
            }
        }
        manifest.save(&a.metrics)?;
        println!("wrote {} charts to {}", out.files.len(), a.metrics.display());
    }
    if let Some(mu) = a.wait_table_mu {
        let lambdas: Vec<f64> = (1..=10).map(|k| mu * k as f64 / 11.0).collect();
        let rows = queueing::wait_table(&lambdas, &[mu]);
        if rows.is_empty() {
            return Err(Error::config("--wait-table-mu", "must be a positive, finite rate"));
        }
        print!("{}", queueing::wait_table_csv(&rows));
    }
    Ok(())
}
