use super::scaler::{transform, ScalerParams};
use super::ArrivalSeries;
use crate::error::{Error, Result};

pub const INPUT_WINDOW: usize = 24;
pub const OUTPUT_WINDOW: usize = 24;
/// Source values consumed by one pair.
pub const PAIR_SPAN: usize = INPUT_WINDOW + OUTPUT_WINDOW;

/// 24 normalized hours of input followed immediately by the 24 to predict.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPair {
    pub input: [f64; INPUT_WINDOW],
    pub target: [f64; OUTPUT_WINDOW],
    /// Index into the source series of `input[0]`.
    pub offset: usize,
}

/// Stride-1 windows: a series of length `n` yields `n - 47` pairs.
pub fn make_windows(series: &ArrivalSeries, params: ScalerParams) -> Result<Vec<WindowPair>> {
    let values = series.values();
    if values.len() < PAIR_SPAN {
        return Err(Error::InsufficientHistory {
            needed: PAIR_SPAN,
            got: values.len(),
        });
    }
    let scaled: Vec<f64> = values.iter().map(|&v| transform(params, v)).collect();
    Ok(scaled
        .windows(PAIR_SPAN)
        .enumerate()
        .map(|(offset, w)| {
            let mut input = [0.0; INPUT_WINDOW];
            let mut target = [0.0; OUTPUT_WINDOW];
            input.copy_from_slice(&w[..INPUT_WINDOW]);
            target.copy_from_slice(&w[INPUT_WINDOW..]);
            WindowPair { input, target, offset }
        })
        .collect())
}
