//! The whole pipeline in-process: synthesize a month of arrivals, train the
//! forecaster, predict tomorrow, simulate H1 against that forecast, export
//! and chart the results.
//!
//! `cargo run --release --example full_pipeline -- [out_dir] [epochs]`

use std::path::PathBuf;

use surgeflow::forecast::{predict_next_24, train, TrainConfig, INPUT_WINDOW};
use surgeflow::io::charts::{render_loss_chart, render_metric_charts};
use surgeflow::io::{export_metrics, generate_synthetic, SyntheticSpec};
use surgeflow::simulation::{run, summarize, ScenarioConfig};
use surgeflow::ArrivalSeries;

fn main() -> surgeflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let out: PathBuf = args.next().unwrap_or_else(|| "target/pipeline".into()).into();
    let epochs = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);

    let history = generate_synthetic(&SyntheticSpec::default())?;
    let (model, report) = train(
        &history,
        &TrainConfig {
            epochs,
            ..TrainConfig::default()
        },
    )?;
    println!(
        "forecaster: train loss {:.4} -> {:.4}, validation {:.4}",
        report.train_loss[0],
        report.train_loss.last().unwrap(),
        report.val_loss.last().unwrap()
    );

    let predicted = predict_next_24(&model, history.tail(INPUT_WINDOW).expect("month of data"))?;
    let tomorrow = ArrivalSeries::with_start(predicted, history.len() as u64)?;
    println!(
        "forecast total for tomorrow: {:.0} patients",
        tomorrow.values().iter().sum::<f64>()
    );

    let config = ScenarioConfig::reference();
    let outcome = run(&config, &tomorrow)?;
    print!("{}", summarize(&outcome.metrics, &config.hospitals).to_table());

    let capacities: Vec<(String, u32)> = config.hospitals.iter().map(|h| (h.id.clone(), h.capacity)).collect();
    let mut manifest = export_metrics(&outcome.metrics, &capacities, &config.hash(), &out)?;
    for charts in [
        render_metric_charts(&outcome.metrics, &out)?,
        render_loss_chart(&report, &out)?,
    ] {
        for name in charts.file_names() {
            manifest.add_file(&name);
        }
        manifest.warnings.extend(charts.warnings);
    }
    manifest.save(&out)?;
    println!("wrote {} files to {}", manifest.files.len(), out.display());
    Ok(())
}
