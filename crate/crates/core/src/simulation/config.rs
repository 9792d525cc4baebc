use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::allocation::{Acuity, Hospital};
use crate::error::{Error, Result};
use crate::forecast::ArrivalSeries;
use crate::io::{self, SyntheticSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcuityMix {
    pub low: f64,
    pub medium: f64,
    pub high: f64,
}

impl Default for AcuityMix {
    /// Shares of relocated low/medium/high patients (252/173/107 of 532),
    /// rounded.
    fn default() -> Self {
        Self {
            low: 0.474,
            medium: 0.325,
            high: 0.201,
        }
    }
}

impl AcuityMix {
    pub fn probabilities(&self) -> [f64; 3] {
        [self.low, self.medium, self.high]
    }

    pub fn sample(&self, u: f64) -> Acuity {
        if u < self.low {
            Acuity::Low
        } else if u < self.low + self.medium {
            Acuity::Medium
        } else {
            Acuity::High
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ArrivalSource {
    /// `hour,arrivals` CSV.
    Historical { path: PathBuf },
    /// `hour,predicted_arrivals` CSV from the forecaster.
    Forecast { path: PathBuf },
    Synthetic {
        #[serde(default)]
        params: SyntheticSpec,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrivalMode {
    /// Poisson counts, uniform times within each hour.
    #[default]
    Poisson,
    /// Exactly `round(rate)` arrivals per hour, evenly spaced.
    Deterministic,
}

/// A simulation scenario. `hospitals[0]` is the front-line hospital; the
/// rest receive transfers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub horizon_hours: u32,
    pub w_max_hours: f64,
    pub service_mean_min: f64,
    pub service_sd_min: f64,
    pub discharge_rate: f64,
    pub acuity_mix: AcuityMix,
    pub seed: u64,
    pub hospitals: Vec<Hospital>,
    pub arrival_source: ArrivalSource,
    pub arrival_mode: ArrivalMode,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::reference()
    }
}

impl ScenarioConfig {
    pub fn reference_hospitals() -> Vec<Hospital> {
        vec![
            Hospital::new("H1", 60, 0.0),
            Hospital::new("H2", 40, 10.0),
            Hospital::new("H3", 30, 15.0),
            Hospital::new("H4", 30, 20.0),
            Hospital::new("H5", 30, 25.0),
        ]
    }

    /// Bundled reference scenario: five hospitals (60/40/30/30/30 beds,
    /// transfer costs 10/15/20/25) fed by a one-day surge of 22 patients/h
    /// over hours 2..=7 against 3 patients/h otherwise.
    pub fn reference() -> Self {
        Self {
            horizon_hours: 24,
            w_max_hours: 0.5,
            service_mean_min: 10.0,
            service_sd_min: 3.0,
            discharge_rate: 0.10,
            acuity_mix: AcuityMix::default(),
            seed: 42,
            hospitals: Self::reference_hospitals(),
            arrival_source: ArrivalSource::Synthetic {
                params: SyntheticSpec::surge(3.0, 22.0, 2..=7),
            },
            arrival_mode: ArrivalMode::Poisson,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn front_line(&self) -> &Hospital {
        &self.hospitals[0]
    }

    pub fn secondaries(&self) -> &[Hospital] {
        &self.hospitals[1..]
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon_hours < 1 {
            return Err(Error::config("horizon_hours", "must be >= 1"));
        }
        if !(self.w_max_hours > 0.0 && self.w_max_hours.is_finite()) {
            return Err(Error::config("w_max_hours", "must be finite and > 0"));
        }
        if !(self.service_mean_min > 0.0 && self.service_mean_min.is_finite()) {
            return Err(Error::config("service_mean_min", "must be finite and > 0"));
        }
        if !(self.service_sd_min >= 0.0 && self.service_sd_min.is_finite()) {
            return Err(Error::config("service_sd_min", "must be finite and >= 0"));
        }
        if !(0.0..=1.0).contains(&self.discharge_rate) {
            return Err(Error::config(
                "discharge_rate",
                format!("must lie in [0, 1], got {}", self.discharge_rate),
            ));
        }
        let mix = self.acuity_mix.probabilities();
        for (p, name) in mix.iter().zip(["low", "medium", "high"]) {
            if !(*p >= 0.0 && p.is_finite()) {
                return Err(Error::config(format!("acuity_mix.{name}"), "must be finite and >= 0"));
            }
        }
        let total: f64 = mix.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::config(
                "acuity_mix",
                format!("probabilities sum to {total}, not 1"),
            ));
        }
        if self.hospitals.len() < 2 {
            return Err(Error::config(
                "hospitals",
                "need a front-line hospital and at least one receiver",
            ));
        }
        let mut ids = HashSet::new();
        for (i, h) in self.hospitals.iter().enumerate() {
            let field = |name: &str| format!("hospitals[{i}].{name}");
            if h.id.trim().is_empty() {
                return Err(Error::config(field("id"), "must not be empty"));
            }
            if !ids.insert(h.id.as_str()) {
                return Err(Error::config(field("id"), format!("duplicate id {}", h.id)));
            }
            if h.capacity < 1 {
                return Err(Error::config(field("capacity"), "must be >= 1"));
            }
            if !(h.transfer_cost >= 0.0 && h.transfer_cost.is_finite()) {
                return Err(Error::config(field("transfer_cost"), "must be finite and >= 0"));
            }
            if h.acuity_capabilities.is_empty() {
                return Err(Error::config(field("acuity_capabilities"), "must not be empty"));
            }
            if h.occupancy > h.capacity {
                return Err(Error::config(field("occupancy"), "exceeds capacity"));
            }
        }
        if let ArrivalSource::Synthetic { params } = &self.arrival_source {
            params.validate_at("arrival_source.params.")?;
        }
        Ok(())
    }

    /// Parses and validates a scenario; relative arrival paths resolve
    /// against `base_dir`.
    pub fn from_json(text: &str, origin: &Path, base_dir: &Path) -> Result<Self> {
        let mut cfg: ScenarioConfig = serde_json::from_str(text).map_err(|source| Error::Json {
            path: origin.to_path_buf(),
            source,
        })?;
        match &mut cfg.arrival_source {
            ArrivalSource::Historical { path } | ArrivalSource::Forecast { path } if path.is_relative() => {
                *path = base_dir.join(&*path);
            }
            _ => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text, path, base)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scenario serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn resolve_arrivals(&self) -> Result<ArrivalSeries> {
        match &self.arrival_source {
            ArrivalSource::Historical { path } => io::load_series(path),
            ArrivalSource::Forecast { path } => io::load_forecast(path),
            ArrivalSource::Synthetic { params } => io::generate_synthetic(params),
        }
    }
}
