//! Trains the forecaster on a month of synthetic hourly arrivals and
//! predicts the day after.
//!
//! `cargo run --release --example forecast_arrivals -- [epochs]`

use std::time::Instant;

use surgeflow::forecast::{predict_next_24, train, TrainConfig, INPUT_WINDOW};
use surgeflow::io::{generate_synthetic, SyntheticSpec};

fn main() -> surgeflow::Result<()> {
    let epochs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let series = generate_synthetic(&SyntheticSpec::default())?;
    println!("{} hourly observations", series.len());

    let started = Instant::now();
    let config = TrainConfig {
        epochs,
        ..TrainConfig::default()
    };
    let (model, report) = train(&series, &config)?;
    println!(
        "{} epochs in {:.1?}: {} training pairs, {} validation pairs",
        report.epochs(),
        started.elapsed(),
        report.train_pairs,
        report.val_pairs
    );
    for (e, (t, v)) in report.train_loss.iter().zip(&report.val_loss).enumerate() {
        if e == 0 || (e + 1) % 10 == 0 {
            println!("  epoch {:>3}  train {t:.5}  val {v:.5}", e + 1);
        }
    }

    let recent = series.tail(INPUT_WINDOW).expect("a month is longer than a day");
    let next = predict_next_24(&model, recent)?;
    println!("next 24 hours:");
    for (h, y) in next.iter().enumerate() {
        println!("  +{h:>2}h  {y:6.1}");
    }
    Ok(())
}
