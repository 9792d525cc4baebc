//! M/M/1 analytics for the front-line hospital and the relocation trigger.

use crate::error::{Error, Result};

/// Rates in patients per hour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueParams {
    pub lambda: f64,
    pub mu: f64,
}

impl QueueParams {
    pub fn new(lambda: f64, mu: f64) -> Self {
        Self { lambda, mu }
    }

    /// Service rate for a mean service time in minutes.
    pub fn from_service_minutes(lambda: f64, mean_service_min: f64) -> Self {
        Self::new(lambda, 60.0 / mean_service_min)
    }

    pub fn utilization(&self) -> f64 {
        self.lambda / self.mu
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelocationPolicy {
    /// Waiting-time threshold in hours.
    pub w_max: f64,
}

impl Default for RelocationPolicy {
    fn default() -> Self {
        Self { w_max: 0.5 }
    }
}

/// Expected time in queue, `λ / (μ (μ − λ))`, in hours.
pub fn expected_wait(params: QueueParams) -> Result<f64> {
    let QueueParams { lambda, mu } = params;
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::InvalidServiceRate(mu));
    }
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::invalid(
            "lambda",
            format!("arrival rate must be >= 0, got {lambda}"),
        ));
    }
    if lambda >= mu {
        return Err(Error::UnstableQueue { lambda, mu });
    }
    Ok(lambda / (mu * (mu - lambda)))
}

/// Relocate when the realized wait strictly exceeds `w_max` or H1 is full.
pub fn should_relocate(wait_so_far: f64, policy: RelocationPolicy, occupancy: u32, capacity: u32) -> bool {
    wait_so_far > policy.w_max || occupancy >= capacity
}

/// `(λ, μ, Wq)` rows for a planning table; unstable pairs are skipped.
pub fn wait_table(lambdas: &[f64], mus: &[f64]) -> Vec<(f64, f64, f64)> {
    let mut rows = Vec::new();
    for &mu in mus {
        for &lambda in lambdas {
            if let Ok(wq) = expected_wait(QueueParams { lambda, mu }) {
                rows.push((lambda, mu, wq));
            }
        }
    }
    rows
}

/// `lambda,mu,wq_hours` CSV.
pub fn wait_table_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("lambda,mu,wq_hours\n");
    for (l, m, w) in rows {
        out.push_str(&format!("{l},{m},{w}\n"));
    }
    out
}
