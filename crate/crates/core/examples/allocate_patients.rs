//! Places a batch of flagged patients on the secondary hospitals, including
//! one that only takes low-acuity cases, and shows the overflow path.
//!
//! `cargo run --example allocate_patients`

use surgeflow::allocation::{allocate_batch, assignment_cost, assignments_csv, utilization, Acuity, Hospital, Patient};

fn main() -> surgeflow::Result<()> {
    let mut hospitals = vec![
        Hospital::new("H2", 3, 10.0).with_capabilities(&[Acuity::Low]),
        Hospital::new("H3", 2, 15.0),
        Hospital::new("H4", 2, 20.0).with_occupancy(1),
        Hospital::new("H5", 1, 25.0),
    ];
    let acuities = [
        Acuity::High,
        Acuity::Low,
        Acuity::Low,
        Acuity::Medium,
        Acuity::High,
        Acuity::Low,
        Acuity::Low,
        Acuity::Medium,
    ];
    let mut patients: Vec<Patient> = acuities
        .iter()
        .enumerate()
        .map(|(id, &a)| Patient::waiting(id as u64, a, 2.0))
        .collect();

    let (assigned, overflow) = allocate_batch(&mut patients, &mut hospitals, 2.5)?;
    print!("{}", assignments_csv(&assigned));
    println!("total cost {}", assignment_cost(&assigned));
    println!("overflow {overflow:?}");
    for h in &hospitals {
        let served = assigned.iter().filter(|a| a.hospital_id == h.id).count() as u64;
        println!(
            "{}: {}/{} beds, allocated utilization {:.2}",
            h.id,
            h.occupancy,
            h.capacity,
            utilization(h, served)?
        );
    }
    for p in &patients {
        println!("patient {} ({}) -> {:?}", p.id, p.acuity, p.status);
    }
    Ok(())
}
