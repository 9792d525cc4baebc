use std::fmt::Write as _;

use crate::allocation::{utilization, Acuity, Hospital};

/// Per-run results. Hospital-indexed vectors follow `hospital_ids`, which is
/// the scenario order with the front line first.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationMetrics {
    pub hospital_ids: Vec<String>,
    /// Patients placed at a secondary hospital, per hour.
    pub relocations_per_hour: Vec<u64>,
    /// Front line: patients who started service. Others: transfers received.
    pub served_per_hospital: Vec<u64>,
    /// Transfer cost accumulated through the end of each hour.
    pub cumulative_cost_series: Vec<f64>,
    /// Placed patients by acuity (low, medium, high).
    pub acuity_counts_relocated: [u64; 3],
    /// Bed utilization (`occupancy / capacity`) at the end of each hour,
    /// `[hospital][hour]`.
    pub utilization_series: Vec<Vec<f64>>,
    pub overflow_count: u64,
}

impl SimulationMetrics {
    pub fn empty(hospital_ids: Vec<String>, horizon_hours: usize) -> Self {
        let n = hospital_ids.len();
        Self {
            hospital_ids,
            relocations_per_hour: vec![0; horizon_hours],
            served_per_hospital: vec![0; n],
            cumulative_cost_series: vec![0.0; horizon_hours],
            acuity_counts_relocated: [0; 3],
            utilization_series: vec![vec![0.0; horizon_hours]; n],
            overflow_count: 0,
        }
    }

    pub fn horizon_hours(&self) -> usize {
        self.relocations_per_hour.len()
    }

    pub fn served(&self, id: &str) -> Option<u64> {
        self.hospital_ids
            .iter()
            .position(|h| h == id)
            .map(|i| self.served_per_hospital[i])
    }

    pub fn total_cost(&self) -> f64 {
        self.cumulative_cost_series.last().copied().unwrap_or(0.0)
    }

    pub fn total_relocated(&self) -> u64 {
        self.relocations_per_hour.iter().sum()
    }

    /// Hour with the most relocations (earliest on ties), if any occurred.
    pub fn peak_relocation_hour(&self) -> Option<usize> {
        let max = *self.relocations_per_hour.iter().max()?;
        if max == 0 {
            return None;
        }
        self.relocations_per_hour.iter().position(|&c| c == max)
    }
}

/// Tabular view of a run: the four figure datasets plus totals.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub relocations: Vec<(usize, u64)>,
    pub distribution: Vec<(String, u64)>,
    pub cumulative_cost: Vec<(usize, f64)>,
    pub acuity: Vec<(Acuity, u64)>,
    /// max − min of allocated/capacity over the receiving hospitals.
    pub utilization_spread: f64,
    pub total_cost: f64,
    pub total_served: u64,
    pub total_relocated: u64,
    pub total_acuity_classified: u64,
    pub overflow: u64,
}

/// `hospitals[0]` is taken as the front line; the spread covers the rest.
pub fn summarize(metrics: &SimulationMetrics, hospitals: &[Hospital]) -> Summary {
    let distribution: Vec<(String, u64)> = metrics
        .hospital_ids
        .iter()
        .cloned()
        .zip(metrics.served_per_hospital.iter().copied())
        .collect();
    let utilizations: Vec<f64> = hospitals
        .iter()
        .skip(1)
        .filter_map(|h| utilization(h, metrics.served(&h.id).unwrap_or(0)).ok())
        .collect();
    let utilization_spread = if utilizations.is_empty() {
        0.0
    } else {
        let max = utilizations.iter().copied().fold(f64::MIN, f64::max);
        let min = utilizations.iter().copied().fold(f64::MAX, f64::min);
        max - min
    };
    let acuity: Vec<(Acuity, u64)> = Acuity::ALL
        .iter()
        .map(|&a| (a, metrics.acuity_counts_relocated[a.index()]))
        .collect();
    Summary {
        relocations: metrics.relocations_per_hour.iter().copied().enumerate().collect(),
        cumulative_cost: metrics.cumulative_cost_series.iter().copied().enumerate().collect(),
        total_served: distribution.iter().map(|(_, n)| n).sum(),
        total_relocated: distribution.iter().skip(1).map(|(_, n)| n).sum(),
        total_acuity_classified: acuity.iter().map(|(_, n)| n).sum(),
        distribution,
        acuity,
        utilization_spread,
        total_cost: metrics.total_cost(),
        overflow: metrics.overflow_count,
    }
}

impl Summary {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<10} {:>8}", "hospital", "served");
        for (id, n) in &self.distribution {
            let _ = writeln!(out, "{id:<10} {n:>8}");
        }
        let _ = writeln!(out, "{:<10} {:>8}", "total", self.total_served);
        let _ = writeln!(out);
        let _ = writeln!(out, "relocated           {}", self.total_relocated);
        let _ = writeln!(out, "overflow            {}", self.overflow);
        let _ = writeln!(out, "total cost          {}", self.total_cost);
        let _ = writeln!(out, "utilization spread  {:.4}", self.utilization_spread);
        for (a, n) in &self.acuity {
            let _ = writeln!(out, "acuity {:<12} {n}", a.as_str());
        }
        out
    }
}
