//! Generates the default month of hourly arrivals and prints the daily
//! profile, weekday against weekend.
//!
//! `cargo run --example synthetic_series -- [seed] [out.csv]`

use surgeflow::io::{generate_synthetic, series_csv, write_atomic, SyntheticSpec};

fn main() -> surgeflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let spec = SyntheticSpec {
        seed,
        ..SyntheticSpec::default()
    };
    let series = generate_synthetic(&spec)?;

    let mut weekday = [0.0; 24];
    let mut weekend = [0.0; 24];
    let (mut nd, mut ne) = (0.0, 0.0);
    for (day, chunk) in series.values().chunks(24).enumerate() {
        let (acc, n) = if SyntheticSpec::is_weekend(day) {
            (&mut weekend, &mut ne)
        } else {
            (&mut weekday, &mut nd)
        };
        *n += 1.0;
        for (a, v) in acc.iter_mut().zip(chunk) {
            *a += v;
        }
    }
    println!("{} hours; mean arrivals per hour of day", series.len());
    println!("hour  weekday  weekend  profile");
    for h in 0..24 {
        println!(
            "{h:>4}  {:>7.1}  {:>7.1}  {:.1}",
            weekday[h] / nd,
            weekend[h] / ne,
            spec.weekday_base(h as u8)
        );
    }
    if let Some(path) = args.next() {
        write_atomic(path.as_ref(), series_csv(&series).as_bytes())?;
        println!("wrote {path}");
    }
    Ok(())
}
