//! Simulates the reference scenario, exports the metric CSVs, then reads
//! them back and draws the SVG chart set.
//!
//! `cargo run --example render_charts -- [out_dir]`

use std::path::PathBuf;

use surgeflow::io::charts::render_metric_charts;
use surgeflow::io::{export_metrics, read_metrics};
use surgeflow::simulation::{run, ScenarioConfig};

fn main() -> surgeflow::Result<()> {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "target/charts".into()).into();
    let config = ScenarioConfig::reference();
    let outcome = run(&config, &config.resolve_arrivals()?)?;
    let capacities: Vec<(String, u32)> = config.hospitals.iter().map(|h| (h.id.clone(), h.capacity)).collect();
    export_metrics(&outcome.metrics, &capacities, &config.hash(), &out)?;

    let (metrics, mut manifest) = read_metrics(&out)?;
    assert_eq!(metrics, outcome.metrics, "CSV round trip is exact");
    let charts = render_metric_charts(&metrics, &out)?;
    for name in charts.file_names() {
        manifest.add_file(&name);
    }
    manifest.warnings.extend(charts.warnings);
    manifest.save(&out)?;
    for f in &manifest.files {
        println!("{}", out.join(f).display());
    }
    Ok(())
}
