use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Min-max scaling parameters. A constant series (`max == min`) maps every
/// value to 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub min: f64,
    pub max: f64,
}

impl ScalerParams {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || max < min {
            return Err(Error::invalid(
                "scaler",
                format!("need finite min <= max, got [{min}, {max}]"),
            ));
        }
        Ok(Self { min, max })
    }

    pub fn span(&self) -> f64 {
        self.max - self.min
    }

    pub fn transform(&self, x: f64) -> f64 {
        transform(*self, x)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        inverse_transform(*self, y)
    }
}

pub fn fit_scaler(values: &[f64]) -> Result<ScalerParams> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (min, max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    ScalerParams::new(min, max)
}

/// Values outside `[min, max]` extrapolate linearly.
pub fn transform(params: ScalerParams, x: f64) -> f64 {
    let span = params.span();
    if span == 0.0 {
        0.0
    } else {
        (x - params.min) / span
    }
}

pub fn inverse_transform(params: ScalerParams, y: f64) -> f64 {
    y * params.span() + params.min
}
