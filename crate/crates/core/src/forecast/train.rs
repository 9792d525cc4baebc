use super::adam::Adam;
use super::lstm::{LstmModel, DEFAULT_HIDDEN_SIZE};
use super::scaler::{fit_scaler, ScalerParams};
use super::window::{make_windows, WindowPair, INPUT_WINDOW, OUTPUT_WINDOW, PAIR_SPAN};
use super::ArrivalSeries;
use crate::error::{Error, Result};
use crate::io::rng::{RngStream, StreamId};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub train_fraction: f64,
    pub seed: u64,
    pub grad_clip_norm: f64,
    pub hidden_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            learning_rate: 0.001,
            batch_size: 16,
            train_fraction: 0.8,
            seed: 42,
            grad_clip_norm: 1.0,
            hidden_size: DEFAULT_HIDDEN_SIZE,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::invalid("epochs", "must be >= 1"));
        }
        if self.batch_size < 1 {
            return Err(Error::invalid("batch_size", "must be >= 1"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::invalid("train_fraction", "must lie strictly between 0 and 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate", "must be finite and > 0"));
        }
        if self.grad_clip_norm.is_nan() || self.grad_clip_norm <= 0.0 {
            return Err(Error::invalid("grad_clip_norm", "must be > 0"));
        }
        if self.hidden_size < 1 {
            return Err(Error::invalid("hidden_size", "must be >= 1"));
        }
        Ok(())
    }
}

/// Per-epoch MSE in normalized units. `train_loss[e]` is the sample-weighted
/// mean of the mini-batch losses seen during epoch `e + 1`; `val_loss[e]` is
/// measured on the held-out pairs after that epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub train_pairs: usize,
    pub val_pairs: usize,
}

impl TrainReport {
    pub fn epochs(&self) -> usize {
        self.train_loss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_loss.is_empty()
    }
}

/// Shuffles all window pairs once, keeps the first `train_fraction` for
/// training, fits the scaler on the raw values those pairs cover, then runs
/// mini-batch Adam with global-norm clipping.
///
/// When the split leaves no validation pairs (a 48-hour series yields a
/// single pair) validation loss is measured on the training pairs.
pub fn train(series: &ArrivalSeries, config: &TrainConfig) -> Result<(LstmModel, TrainReport)> {
    config.validate()?;
    let n = series.len();
    if n < PAIR_SPAN {
        return Err(Error::InsufficientHistory {
            needed: PAIR_SPAN,
            got: n,
        });
    }
    let pairs = n - PAIR_SPAN + 1;

    let mut shuffle_rng = RngStream::new(config.seed, StreamId::TrainShuffle);
    let order = shuffle_rng.permutation(pairs);
    let n_train = ((config.train_fraction * pairs as f64).floor() as usize).clamp(1, pairs.saturating_sub(1).max(1));
    let (train_idx, val_idx) = order.split_at(n_train);

    let raw = series.values();
    let mut covered = vec![false; n];
    for &p in train_idx {
        covered[p..p + PAIR_SPAN].iter_mut().for_each(|c| *c = true);
    }
    let train_values: Vec<f64> = raw.iter().zip(&covered).filter(|(_, &c)| c).map(|(&v, _)| v).collect();
    let scaler = fit_scaler(&train_values)?;

    let windows = make_windows(series, scaler)?;
    let train_set: Vec<&WindowPair> = train_idx.iter().map(|&i| &windows[i]).collect();
    let val_set: Vec<&WindowPair> = if val_idx.is_empty() {
        train_set.clone()
    } else {
        val_idx.iter().map(|&i| &windows[i]).collect()
    };

    let mut init_rng = RngStream::new(config.seed, StreamId::WeightInit);
    let mut model = LstmModel::init(config.hidden_size, OUTPUT_WINDOW, scaler, &mut init_rng);
    let shapes: Vec<usize> = model.tensors().iter().map(|t| t.len()).collect();
    let mut adam = Adam::new(config.learning_rate, &shapes);

    let mut report = TrainReport {
        train_loss: Vec::with_capacity(config.epochs),
        val_loss: Vec::with_capacity(config.epochs),
        train_pairs: train_set.len(),
        val_pairs: if val_idx.is_empty() { 0 } else { val_set.len() },
    };

    let mut epoch_order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 1..=config.epochs {
        shuffle_rng.shuffle(&mut epoch_order);
        let mut weighted = 0.0;
        for chunk in epoch_order.chunks(config.batch_size) {
            let inputs: Vec<&[f64]> = chunk.iter().map(|&i| &train_set[i].input[..]).collect();
            let targets: Vec<&[f64]> = chunk.iter().map(|&i| &train_set[i].target[..]).collect();
            let (loss, mut grads) = model.loss_and_gradients(&inputs, &targets)?;
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            weighted += loss * chunk.len() as f64;
            grads.clip_global_norm(config.grad_clip_norm);
            let mut params = model.tensors_mut();
            adam.step(&mut params, &grads.tensors());
        }
        let train_loss = weighted / train_set.len() as f64;
        let val_loss = evaluate(&model, &val_set)?;
        if !train_loss.is_finite() || !val_loss.is_finite() || !model.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        report.train_loss.push(train_loss);
        report.val_loss.push(val_loss);
    }
    Ok((model, report))
}

fn evaluate(model: &LstmModel, set: &[&WindowPair]) -> Result<f64> {
    let inputs: Vec<&[f64]> = set.iter().map(|w| &w.input[..]).collect();
    let targets: Vec<&[f64]> = set.iter().map(|w| &w.target[..]).collect();
    model.loss(&inputs, &targets)
}

/// Forecasts the next 24 hours from the last 24 raw observations. Negative
/// forecasts are floored at 0.
pub fn predict_next_24(model: &LstmModel, recent: &[f64]) -> Result<Vec<f64>> {
    if recent.len() != INPUT_WINDOW {
        return Err(Error::invalid(
            "recent",
            format!("expected exactly {INPUT_WINDOW} values, got {}", recent.len()),
        ));
    }
    let scaler: ScalerParams = model.scaler;
    let x: Vec<f64> = recent.iter().map(|&v| scaler.transform(v)).collect();
    let y = model.forward(&x)?;
    Ok(y.into_iter().map(|v| scaler.inverse(v).max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sinusoid(days: usize) -> ArrivalSeries {
        ArrivalSeries::new(
            (0..days * 24)
                .map(|h| 55.0 + 5.0 * (std::f64::consts::TAU * h as f64 / 24.0).sin())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn one_epoch_report_shape() {
        let cfg = TrainConfig {
            epochs: 1,
            hidden_size: 8,
            ..Default::default()
        };
        let (_, report) = train(&sinusoid(4), &cfg).unwrap();
        assert_eq!(report.train_loss.len(), 1);
        assert_eq!(report.val_loss.len(), 1);
    }

    #[test]
    fn minimal_history_trains_on_single_pair() {
        let cfg = TrainConfig {
            epochs: 2,
            hidden_size: 4,
            ..Default::default()
        };
        let (_, report) = train(&sinusoid(2), &cfg).unwrap();
        assert_eq!(report.train_pairs, 1);
        assert_eq!(report.val_pairs, 0);
        assert!(report.val_loss.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn too_short_is_insufficient_history() {
        let s = ArrivalSeries::new(vec![50.0; 47]).unwrap();
        assert!(matches!(
            train(&s, &TrainConfig::default()),
            Err(Error::InsufficientHistory { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let bad = TrainConfig {
            train_fraction: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            epochs: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            batch_size: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn seeded_training_is_reproducible() {
        let cfg = TrainConfig {
            epochs: 3,
            hidden_size: 8,
            ..Default::default()
        };
        let (m1, r1) = train(&sinusoid(5), &cfg).unwrap();
        let (m2, r2) = train(&sinusoid(5), &cfg).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(m1, m2);
    }

    #[test]
    fn huge_learning_rate_reports_divergence_or_stays_finite() {
        let cfg = TrainConfig {
            epochs: 2,
            hidden_size: 4,
            learning_rate: 1e300,
            ..Default::default()
        };
        match train(&sinusoid(3), &cfg) {
            Err(Error::Divergence { epoch }) => assert!(epoch >= 1),
            Ok((m, r)) => {
                assert!(m.is_finite());
                assert!(r.train_loss.iter().all(|v| v.is_finite()));
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn prediction_with_zero_head_returns_scaler_min() {
        let m = LstmModel::zeros(50, 24, ScalerParams { min: 50.0, max: 60.0 });
        assert_eq!(predict_next_24(&m, &[55.0; 24]).unwrap(), vec![50.0; 24]);
        assert!(predict_next_24(&m, &[55.0; 23]).is_err());
    }

    #[test]
    fn prediction_is_floored_at_zero() {
        let mut m = LstmModel::zeros(4, 24, ScalerParams { min: 50.0, max: 60.0 });
        m.dense_bias = vec![-100.0; 24];
        assert!(predict_next_24(&m, &[55.0; 24]).unwrap().iter().all(|&v| v == 0.0));
    }
}
