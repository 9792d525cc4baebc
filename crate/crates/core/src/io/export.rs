//! Metric CSVs and the manifest that lists them.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::allocation::Acuity;
use crate::error::{Error, Result};
use crate::io::{csv_rows, write_atomic};
use crate::simulation::SimulationMetrics;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RELOCATIONS_FILE: &str = "relocations.csv";
pub const DISTRIBUTION_FILE: &str = "distribution.csv";
pub const COST_FILE: &str = "cost.csv";
pub const ACUITY_FILE: &str = "acuity.csv";
pub const UTILIZATION_FILE: &str = "utilization.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestSummary {
    pub horizon_hours: usize,
    pub total_cost: f64,
    pub overflow_count: u64,
    /// `(hospital id, beds)` in scenario order.
    pub capacities: Vec<(String, u32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<String>,
    pub scenario_hash: String,
    pub warnings: Vec<String>,
    pub summary: ManifestSummary,
}

impl Manifest {
    pub fn add_file(&mut self, name: &str) {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_atomic(&dir.join(MANIFEST_FILE), text.as_bytes())
    }
}

fn metric_files(m: &SimulationMetrics) -> Vec<(&'static str, String)> {
    let mut relocations = String::from("hour,count\n");
    for (h, n) in m.relocations_per_hour.iter().enumerate() {
        relocations.push_str(&format!("{h},{n}\n"));
    }
    let mut distribution = String::from("hospital,served\n");
    for (id, n) in m.hospital_ids.iter().zip(&m.served_per_hospital) {
        distribution.push_str(&format!("{id},{n}\n"));
    }
    let mut cost = String::from("hour,cumulative_cost\n");
    for (h, c) in m.cumulative_cost_series.iter().enumerate() {
        cost.push_str(&format!("{h},{c}\n"));
    }
    let mut acuity = String::from("level,count\n");
    for a in Acuity::ALL {
        acuity.push_str(&format!("{},{}\n", a, m.acuity_counts_relocated[a.index()]));
    }
    let mut utilization = String::from("hour,hospital,utilization\n");
    for hour in 0..m.horizon_hours() {
        for (i, id) in m.hospital_ids.iter().enumerate() {
            utilization.push_str(&format!("{hour},{id},{}\n", m.utilization_series[i][hour]));
        }
    }
    vec![
        (RELOCATIONS_FILE, relocations),
        (DISTRIBUTION_FILE, distribution),
        (COST_FILE, cost),
        (ACUITY_FILE, acuity),
        (UTILIZATION_FILE, utilization),
    ]
}

/// Writes the five metric CSVs and `manifest.json` into `out_dir`, creating
/// it if needed. Each file is replaced atomically.
pub fn export_metrics(
    metrics: &SimulationMetrics,
    capacities: &[(String, u32)],
    scenario_hash: &str,
    out_dir: &Path,
) -> Result<Manifest> {
    fs::create_dir_all(out_dir).map_err(|e| Error::write(out_dir, e))?;
    let mut manifest = Manifest {
        files: Vec::new(),
        scenario_hash: scenario_hash.to_string(),
        warnings: Vec::new(),
        summary: ManifestSummary {
            horizon_hours: metrics.horizon_hours(),
            total_cost: metrics.total_cost(),
            overflow_count: metrics.overflow_count,
            capacities: capacities.to_vec(),
        },
    };
    for (name, body) in metric_files(metrics) {
        write_atomic(&out_dir.join(name), body.as_bytes())?;
        manifest.add_file(name);
    }
    manifest.add_file(MANIFEST_FILE);
    manifest.save(out_dir)?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path, source })
}

fn field<T: std::str::FromStr>(path: &Path, line: u64, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>().map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason: format!("`{raw}`: {e}"),
    })
}

/// Rebuilds metrics from an export directory.
pub fn read_metrics(dir: &Path) -> Result<(SimulationMetrics, Manifest)> {
    let manifest = read_manifest(dir)?;
    let ids: Vec<String> = manifest.summary.capacities.iter().map(|(id, _)| id.clone()).collect();
    let mut m = SimulationMetrics::empty(ids.clone(), manifest.summary.horizon_hours);
    m.overflow_count = manifest.summary.overflow_count;

    let p = dir.join(RELOCATIONS_FILE);
    for (line, row) in csv_rows(&p, &["hour", "count"])? {
        let h: usize = field(&p, line, &row[0])?;
        *m.relocations_per_hour
            .get_mut(h)
            .ok_or_else(|| out_of_range(&p, line))? = field(&p, line, &row[1])?;
    }
    let p = dir.join(DISTRIBUTION_FILE);
    for (line, row) in csv_rows(&p, &["hospital", "served"])? {
        let i = ids
            .iter()
            .position(|id| id == &row[0])
            .ok_or_else(|| out_of_range(&p, line))?;
        m.served_per_hospital[i] = field(&p, line, &row[1])?;
    }
    let p = dir.join(COST_FILE);
    for (line, row) in csv_rows(&p, &["hour", "cumulative_cost"])? {
        let h: usize = field(&p, line, &row[0])?;
        *m.cumulative_cost_series
            .get_mut(h)
            .ok_or_else(|| out_of_range(&p, line))? = field(&p, line, &row[1])?;
    }
    let p = dir.join(ACUITY_FILE);
    for (line, row) in csv_rows(&p, &["level", "count"])? {
        let a: Acuity = row[0].parse()?;
        m.acuity_counts_relocated[a.index()] = field(&p, line, &row[1])?;
    }
    let p = dir.join(UTILIZATION_FILE);
    for (line, row) in csv_rows(&p, &["hour", "hospital", "utilization"])? {
        let h: usize = field(&p, line, &row[0])?;
        let i = ids
            .iter()
            .position(|id| id == &row[1])
            .ok_or_else(|| out_of_range(&p, line))?;
        *m.utilization_series[i]
            .get_mut(h)
            .ok_or_else(|| out_of_range(&p, line))? = field(&p, line, &row[2])?;
    }
    Ok((m, manifest))
}

fn out_of_range(path: &Path, line: u64) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        reason: "row does not match the manifest's hospitals or horizon".into(),
    }
}
