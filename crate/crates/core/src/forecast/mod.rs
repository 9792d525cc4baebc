//! Arrival forecasting: min-max scaling, 24-in/24-out windowing and a
//! single-layer LSTM with a dense head, trained by Adam on MSE.

mod adam;
mod lstm;
mod persist;
mod scaler;
mod train;
mod window;

pub use adam::Adam;
pub use lstm::{LstmGradients, LstmModel, Matrix, DEFAULT_HIDDEN_SIZE};
pub use persist::{read_history_csv, write_history_csv, MODEL_FORMAT_VERSION};
pub use scaler::{fit_scaler, inverse_transform, transform, ScalerParams};
pub use train::{predict_next_24, train, TrainConfig, TrainReport};
pub use window::{make_windows, WindowPair, INPUT_WINDOW, OUTPUT_WINDOW, PAIR_SPAN};

use crate::error::{Error, Result};

/// Hourly arrival counts; `values[k]` is the count for hour `start_hour + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalSeries {
    values: Vec<f64>,
    start_hour: u64,
}

impl ArrivalSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_start(values, 0)
    }

    pub fn with_start(values: Vec<f64>, start_hour: u64) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid(
                "values",
                format!("arrival count at index {k} is {} (must be finite and >= 0)", values[k]),
            ));
        }
        Ok(Self { values, start_hour })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn start_hour(&self) -> u64 {
        self.start_hour
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The trailing `n` values, or `None` when the series is shorter.
    pub fn tail(&self, n: usize) -> Option<&[f64]> {
        self.values.len().checked_sub(n).map(|k| &self.values[k..])
    }
}
