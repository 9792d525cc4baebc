//! Seeded stand-in for an hourly arrival dataset.
//!
//! The base curve sits at `base_high` on peak hours and `base_low` on trough
//! hours. Other hours rise from a floor of 40% of the band toward nearby
//! peaks along a Gaussian bump (σ = 1.5 h, circular distance). Weekend days
//! are scaled by `weekend_scale`; day 0 is a Friday. Gaussian noise is added
//! and the result floored at 0.

use serde::{Deserialize, Serialize};

use super::rng::{RngStream, StreamId};
use crate::error::{Error, Result};
use crate::forecast::ArrivalSeries;

const FLOOR: f64 = 0.4;
const BUMP_SD_HOURS: f64 = 1.5;
/// Day 0 weekday, Monday = 0.
const FIRST_WEEKDAY: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub days: usize,
    pub base_low: f64,
    pub base_high: f64,
    pub trough_hours: Vec<u8>,
    pub peak_hours: Vec<u8>,
    pub weekend_scale: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            days: 31,
            base_low: 50.0,
            base_high: 60.0,
            trough_hours: vec![3, 4, 5],
            peak_hours: vec![10, 16, 17],
            weekend_scale: 0.9,
            noise_sd: 1.0,
            seed: 42,
        }
    }
}

impl SyntheticSpec {
    /// A one-day surge profile: `peak_rate` per hour on `peak_hours`,
    /// `off_rate` on every other hour.
    pub fn surge(off_rate: f64, peak_rate: f64, peak_hours: impl IntoIterator<Item = u8>) -> Self {
        let peak_hours: Vec<u8> = peak_hours.into_iter().collect();
        Self {
            days: 1,
            base_low: off_rate,
            base_high: peak_rate,
            trough_hours: (0..24).filter(|h| !peak_hours.contains(h)).collect(),
            peak_hours,
            weekend_scale: 1.0,
            noise_sd: 1.0,
            seed: 42,
        }
    }

    /// Validates the spec, reporting fields under `prefix`.
    pub fn validate_at(&self, prefix: &str) -> Result<()> {
        let f = |name: &str| format!("{prefix}{name}");
        if self.days < 1 {
            return Err(Error::config(f("days"), "must be >= 1"));
        }
        if !(self.base_low > 0.0 && self.base_low.is_finite()) {
            return Err(Error::config(f("base_low"), "must be finite and > 0"));
        }
        if !(self.base_high >= self.base_low && self.base_high.is_finite()) {
            return Err(Error::config(f("base_high"), "must be finite and >= base_low"));
        }
        for (name, hours) in [("trough_hours", &self.trough_hours), ("peak_hours", &self.peak_hours)] {
            if let Some(h) = hours.iter().find(|&&h| h > 23) {
                return Err(Error::config(f(name), format!("hour {h} outside 0..=23")));
            }
        }
        if let Some(h) = self.peak_hours.iter().find(|h| self.trough_hours.contains(h)) {
            return Err(Error::config(
                f("peak_hours"),
                format!("hour {h} is also a trough hour"),
            ));
        }
        if !(self.weekend_scale >= 0.0 && self.weekend_scale.is_finite()) {
            return Err(Error::config(f("weekend_scale"), "must be finite and >= 0"));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::config(f("noise_sd"), "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at("")
    }

    /// Noise-free rate for hour-of-day `hour` on a weekday.
    pub fn weekday_base(&self, hour: u8) -> f64 {
        let band = self.base_high - self.base_low;
        self.base_low + band * self.shape(hour)
    }

    fn shape(&self, hour: u8) -> f64 {
        if self.peak_hours.contains(&hour) {
            return 1.0;
        }
        if self.trough_hours.contains(&hour) {
            return 0.0;
        }
        let bump = self
            .peak_hours
            .iter()
            .map(|&p| {
                let d = (hour as i32 - p as i32).rem_euclid(24);
                let d = d.min(24 - d) as f64;
                (-d * d / (2.0 * BUMP_SD_HOURS * BUMP_SD_HOURS)).exp()
            })
            .fold(0.0, f64::max);
        FLOOR + (1.0 - FLOOR) * bump
    }

    pub fn is_weekend(day: usize) -> bool {
        (FIRST_WEEKDAY + day) % 7 >= 5
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<ArrivalSeries> {
    spec.validate()?;
    let mut rng = RngStream::new(spec.seed, StreamId::SyntheticNoise);
    let base: Vec<f64> = (0..24u8).map(|h| spec.weekday_base(h)).collect();
    let mut values = Vec::with_capacity(spec.days * 24);
    for day in 0..spec.days {
        let scale = if SyntheticSpec::is_weekend(day) {
            spec.weekend_scale
        } else {
            1.0
        };
        for b in &base {
            let noise = if spec.noise_sd > 0.0 {
                spec.noise_sd * rng.standard_normal()
            } else {
                0.0
            };
            values.push((b * scale + noise).max(0.0));
        }
    }
    ArrivalSeries::new(values)
}
