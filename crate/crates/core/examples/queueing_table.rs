//! Expected triage wait at H1 as arrivals approach the service rate, and
//! when the relocation rule would fire.
//!
//! `cargo run --example queueing_table`

use surgeflow::queueing::{expected_wait, should_relocate, wait_table, wait_table_csv, QueueParams, RelocationPolicy};

fn main() {
    // Ten-minute mean triage puts mu at 6 patients per hour.
    let mu = QueueParams::from_service_minutes(1.0, 10.0).mu;
    let lambdas: Vec<f64> = [1.0, 2.0, 3.0, 4.0, 5.0, 5.5, 5.9].to_vec();
    print!("{}", wait_table_csv(&wait_table(&lambdas, &[mu])));

    let policy = RelocationPolicy::default();
    println!();
    for lambda in lambdas {
        let p = QueueParams::new(lambda, mu);
        let wq = expected_wait(p).expect("stable");
        let flag = should_relocate(wq, policy, 10, 60);
        println!(
            "lambda {lambda:>4}: rho {:.3}, Wq {:>6.1} min -> {}",
            p.utilization(),
            wq * 60.0,
            if flag { "relocate" } else { "keep" }
        );
    }
    match expected_wait(QueueParams::new(6.0, mu)) {
        Err(e) => println!("lambda = mu: {e}"),
        Ok(w) => println!("unexpected: {w}"),
    }
    println!("full H1 forces relocation: {}", should_relocate(0.0, policy, 60, 60));
}
