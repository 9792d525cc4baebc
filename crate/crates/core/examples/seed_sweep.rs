//! Runs the reference scenario over many seeds in parallel and reports how
//! often the relocation peak lands in the surge window.
//!
//! `cargo run --release --example seed_sweep -- [seeds] [jobs]`

use surgeflow::simulation::{run_sweep, ScenarioConfig};

fn main() -> surgeflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let jobs: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);

    let config = ScenarioConfig::reference();
    let arrivals = config.resolve_arrivals()?;
    let seeds: Vec<u64> = (0..n).collect();

    let mut in_window = 0;
    let mut h1_dominant = 0;
    let (mut cost, mut relocated) = (0.0, 0);
    for (seed, outcome) in seeds.iter().zip(run_sweep(&config, &arrivals, &seeds, jobs)) {
        let m = outcome?.metrics;
        let peak = m.peak_relocation_hour();
        if matches!(peak, Some(2..=7)) {
            in_window += 1;
        }
        let h1 = m.served_per_hospital[0];
        if m.served_per_hospital[1..].iter().all(|&s| h1 > s) {
            h1_dominant += 1;
        }
        cost += m.total_cost();
        relocated += m.total_relocated();
        if *seed < 5 {
            println!(
                "seed {seed}: peak hour {peak:?}, served {:?}, cost {}",
                m.served_per_hospital,
                m.total_cost()
            );
        }
    }
    println!("peak in hours 2-7: {in_window}/{n}");
    println!("H1 served most:    {h1_dominant}/{n}");
    println!(
        "mean relocated {:.1}, mean cost {:.1}",
        relocated as f64 / n as f64,
        cost / n as f64
    );
    Ok(())
}
