use crate::allocation::Hospital;
use crate::error::{Error, Result};
use crate::io::rng::RngStream;

/// Arrival times inside `[hour, hour + 1)` for a constant rate: the count is
/// Poisson(rate) and the times are uniform, returned sorted.
pub fn generate_arrivals(rate_per_hour: f64, hour_index: u32, rng: &mut RngStream) -> Result<Vec<f64>> {
    if !rate_per_hour.is_finite() || rate_per_hour < 0.0 {
        return Err(Error::invalid(
            "rate_per_hour",
            format!("must be finite and >= 0, got {rate_per_hour}"),
        ));
    }
    let n = rng.poisson(rate_per_hour);
    let start = hour_index as f64;
    let end = start + 1.0;
    let mut times: Vec<f64> = (0..n)
        .map(|_| {
            let t = start + rng.uniform();
            // Rounding can land exactly on the next hour.
            if t >= end {
                start
            } else {
                t
            }
        })
        .collect();
    times.sort_by(f64::total_cmp);
    Ok(times)
}

/// `round(rate)` arrivals spread evenly over the hour.
pub(crate) fn deterministic_arrivals(rate_per_hour: f64, hour_index: u32) -> Vec<f64> {
    let n = rate_per_hour.round().max(0.0) as u64;
    (0..n)
        .map(|k| hour_index as f64 + (k as f64 + 0.5) / n as f64)
        .collect()
}

/// Normal(mean, sd) service time in minutes, redrawn until positive.
pub fn sample_service_time(mean_min: f64, sd_min: f64, rng: &mut RngStream) -> f64 {
    debug_assert!(mean_min > 0.0 && sd_min >= 0.0);
    if sd_min == 0.0 {
        return mean_min;
    }
    loop {
        let x = rng.normal(mean_min, sd_min);
        if x > 0.0 {
            return x;
        }
    }
}

/// Discharges Binomial(occupancy, rate) patients and returns the count.
pub fn hourly_discharge(hospital: &mut Hospital, rate: f64, rng: &mut RngStream) -> u32 {
    let n = rng.binomial(hospital.occupancy, rate.clamp(0.0, 1.0));
    hospital.occupancy -= n;
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::rng::StreamId;

    #[test]
    fn zero_rate_gives_nothing() {
        let mut rng = RngStream::new(1, StreamId::Arrivals);
        assert!(generate_arrivals(0.0, 3, &mut rng).unwrap().is_empty());
        assert!(generate_arrivals(-1.0, 3, &mut rng).is_err());
    }

    #[test]
    fn arrivals_sorted_inside_their_hour() {
        let mut rng = RngStream::new(2, StreamId::Arrivals);
        for h in 0..50 {
            let ts = generate_arrivals(55.0, h, &mut rng).unwrap();
            assert!(ts.windows(2).all(|w| w[0] <= w[1]));
            assert!(ts.iter().all(|&t| t >= h as f64 && t < h as f64 + 1.0));
        }
    }

    #[test]
    fn even_spacing_mode() {
        assert_eq!(deterministic_arrivals(3.6, 2), vec![2.125, 2.375, 2.625, 2.875]);
        assert!(deterministic_arrivals(0.2, 0).is_empty());
    }

    #[test]
    fn degenerate_and_positive_service() {
        let mut rng = RngStream::new(3, StreamId::Service);
        assert_eq!(sample_service_time(10.0, 0.0, &mut rng), 10.0);
        for _ in 0..10_000 {
            assert!(sample_service_time(1.0, 3.0, &mut rng) > 0.0);
        }
    }

    #[test]
    fn discharge_edges() {
        let mut rng = RngStream::new(4, StreamId::Discharge);
        let mut empty = Hospital::new("H2", 10, 10.0);
        assert_eq!(hourly_discharge(&mut empty, 0.1, &mut rng), 0);
        let mut full = Hospital::new("H2", 10, 10.0).with_occupancy(7);
        assert_eq!(hourly_discharge(&mut full, 1.0, &mut rng), 7);
        assert_eq!(full.occupancy, 0);
    }
}
