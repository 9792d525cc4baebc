//! One run of the reference surge scenario: summary table, the relocation
//! profile by hour, and a sample of the audit trail.
//!
//! `cargo run --example simulate_reference -- [seed]`
//! `cargo run --example simulate_reference -- --print-scenario > reference.json`

use surgeflow::simulation::{run, summarize, ScenarioConfig};

fn main() -> surgeflow::Result<()> {
    let arg = std::env::args().nth(1);
    if arg.as_deref() == Some("--print-scenario") {
        println!("{}", ScenarioConfig::reference().to_json());
        return Ok(());
    }
    let seed = arg.and_then(|s| s.parse().ok()).unwrap_or(42);
    let config = ScenarioConfig::reference().with_seed(seed);
    let arrivals = config.resolve_arrivals()?;
    let outcome = run(&config, &arrivals)?;

    print!("{}", summarize(&outcome.metrics, &config.hospitals).to_table());
    println!();
    println!("hour  arrivals  relocated");
    for (h, n) in outcome.metrics.relocations_per_hour.iter().enumerate() {
        println!(
            "{h:>4}  {:>8.1}  {n:>9}  {}",
            arrivals.values()[h],
            "#".repeat(*n as usize)
        );
    }
    println!();
    for a in outcome.audits.iter().take(5) {
        println!(
            "patient {:>4} at t={:.3}h: trigger {}, waited {:.3}h, H1 {}/{} -> {}",
            a.patient_id,
            a.time,
            a.trigger,
            a.wait_hours,
            a.h1_occupancy,
            a.h1_capacity,
            a.hospital_id.as_deref().unwrap_or("overflow")
        );
    }
    Ok(())
}
