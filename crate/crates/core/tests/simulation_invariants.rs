mod common;

use common::{check_run, front_line_served_most, is_surge_peak};
use surgeflow::allocation::Acuity;
use surgeflow::simulation::{run, ArrivalMode, ScenarioConfig, Trigger};
use surgeflow::ArrivalSeries;

fn reference() -> (ScenarioConfig, ArrivalSeries) {
    let config = ScenarioConfig::reference();
    let arrivals = config.resolve_arrivals().unwrap();
    (config, arrivals)
}

#[test]
fn reference_runs_hold_every_invariant() {
    let (config, arrivals) = reference();
    for seed in 0..20 {
        if let Err(e) = check_run(&config.clone().with_seed(seed), &arrivals) {
            panic!("seed {seed}: {e}");
        }
    }
}

#[test]
fn heavier_load_forces_overflow_and_stays_consistent() {
    let (mut config, _) = reference();
    config.hospitals[0].capacity = 5;
    for h in &mut config.hospitals[1..] {
        h.capacity = 3;
    }
    let arrivals = ArrivalSeries::new(vec![30.0; 24]).unwrap();
    let outcome = check_run(&config, &arrivals).unwrap();
    assert!(outcome.metrics.overflow_count > 0);
    assert!(outcome.audits.iter().any(|a| a.trigger == Trigger::FrontLineFull));
}

#[test]
fn front_line_full_relocates_immediately() {
    let (mut config, _) = reference();
    config.hospitals[0].occupancy = config.hospitals[0].capacity;
    config.discharge_rate = 0.0;
    let arrivals = ArrivalSeries::new(vec![4.0; 24]).unwrap();
    let outcome = check_run(&config, &arrivals).unwrap();
    assert_eq!(outcome.metrics.served_per_hospital[0], 0);
    assert!(!outcome.audits.is_empty());
    for a in &outcome.audits {
        assert_eq!(a.trigger, Trigger::FrontLineFull);
        assert_eq!(a.wait_hours, 0.0);
    }
}

#[test]
fn light_load_never_relocates() {
    let (mut config, _) = reference();
    config.arrival_mode = ArrivalMode::Deterministic;
    let arrivals = ArrivalSeries::new(vec![2.0; 24]).unwrap();
    let outcome = check_run(&config, &arrivals).unwrap();
    assert_eq!(outcome.metrics.served_per_hospital[0], 48);
    assert_eq!(outcome.metrics.total_relocated(), 0);
    assert_eq!(outcome.metrics.total_cost(), 0.0);
}

#[test]
fn wait_relocations_exceed_threshold_strictly() {
    let (config, arrivals) = reference();
    let outcome = run(&config, &arrivals).unwrap();
    let waits: Vec<f64> = outcome
        .audits
        .iter()
        .filter(|a| a.trigger == Trigger::Wait)
        .map(|a| a.wait_hours)
        .collect();
    assert!(!waits.is_empty());
    assert!(waits
        .iter()
        .all(|&w| w > config.w_max_hours && w < config.w_max_hours + 1e-9));
}

#[test]
fn surge_shape_over_many_seeds() {
    let (config, arrivals) = reference();
    let mut peak_in_window = 0;
    for seed in 0..30 {
        let o = run(&config.clone().with_seed(seed), &arrivals).unwrap();
        peak_in_window += usize::from(is_surge_peak(&o));
        assert!(front_line_served_most(&o), "seed {seed}");
    }
    assert!(peak_in_window >= 27);
}

#[test]
fn seeds_change_outcomes() {
    let (config, arrivals) = reference();
    let a = run(&config.clone().with_seed(1), &arrivals).unwrap();
    let b = run(&config.clone().with_seed(2), &arrivals).unwrap();
    assert_ne!(a.event_log_csv(), b.event_log_csv());
}

#[test]
fn relocated_acuity_mix_tracks_configuration() {
    let (config, arrivals) = reference();
    let mut counts = [0u64; 3];
    for seed in 0..100 {
        let o = run(&config.clone().with_seed(seed), &arrivals).unwrap();
        for (c, n) in counts.iter_mut().zip(o.metrics.acuity_counts_relocated) {
            *c += n;
        }
    }
    let total: u64 = counts.iter().sum();
    let expected = config.acuity_mix.probabilities();
    for a in Acuity::ALL {
        let share = counts[a.index()] as f64 / total as f64;
        assert!((share - expected[a.index()]).abs() < 0.03, "{a}: {share}");
    }
}

#[test]
fn parallel_sweep_matches_serial_runs() {
    let (config, arrivals) = reference();
    let seeds = [3, 1, 4, 1, 5, 9];
    let swept = surgeflow::simulation::run_sweep(&config, &arrivals, &seeds, 3);
    for (&s, r) in seeds.iter().zip(swept) {
        let serial = run(&config.clone().with_seed(s), &arrivals).unwrap();
        assert_eq!(r.unwrap().metrics, serial.metrics);
    }
}

#[test]
fn short_arrival_series_is_rejected() {
    let (config, _) = reference();
    let err = run(&config, &ArrivalSeries::new(vec![1.0; 10]).unwrap()).unwrap_err();
    assert!(err.to_string().contains("insufficient history"));
}
