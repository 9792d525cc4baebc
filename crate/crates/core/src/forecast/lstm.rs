//! Single-layer LSTM over a scalar-per-step sequence with a dense head on
//! the final hidden state.
//!
//! Per step, with gate pre-activations `z = W x + U h_prev + b`:
//!
//! ```text
//! i = sigmoid(z_i)   f = sigmoid(z_f)   g = tanh(z_g)   o = sigmoid(z_o)
//! c = f * c_prev + i * g
//! h = o * relu(c)
//! ```
//!
//! ReLU replaces the usual `tanh(c)` output squashing; the gates keep their
//! sigmoids. The head computes `y = h_T · D + d` with `D` of shape
//! `hidden × outputs`. Gate rows are stacked in the order input, forget,
//! cell, output.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::scaler::ScalerParams;
use crate::error::{Error, Result};
use crate::io::rng::RngStream;

pub const DEFAULT_HIDDEN_SIZE: usize = 50;

/// Dense row-major matrix, serialized as nested arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("matrix", "ragged rows"));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).map(<[f64]>::to_vec).collect()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.cols == 0 {
            return vec![Vec::<f64>::new(); self.rows].serialize(s);
        }
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmModel {
    pub hidden_size: usize,
    pub output_size: usize,
    /// `4H × 1`
    pub input_weights: Matrix,
    /// `4H × H`
    pub recurrent_weights: Matrix,
    /// `4H`
    pub gate_biases: Vec<f64>,
    /// `H × outputs`
    pub dense_weights: Matrix,
    pub dense_bias: Vec<f64>,
    pub scaler: ScalerParams,
}

/// Gradients with the same shapes as the trainable parts of [`LstmModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct LstmGradients {
    pub input_weights: Matrix,
    pub recurrent_weights: Matrix,
    pub gate_biases: Vec<f64>,
    pub dense_weights: Matrix,
    pub dense_bias: Vec<f64>,
}

impl LstmGradients {
    fn zeros_like(model: &LstmModel) -> Self {
        let h = model.hidden_size;
        Self {
            input_weights: Matrix::zeros(4 * h, 1),
            recurrent_weights: Matrix::zeros(4 * h, h),
            gate_biases: vec![0.0; 4 * h],
            dense_weights: Matrix::zeros(h, model.output_size),
            dense_bias: vec![0.0; model.output_size],
        }
    }

    pub fn tensors(&self) -> [&[f64]; 5] {
        [
            self.input_weights.as_slice(),
            self.recurrent_weights.as_slice(),
            &self.gate_biases,
            self.dense_weights.as_slice(),
            &self.dense_bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 5] {
        [
            self.input_weights.as_mut_slice(),
            self.recurrent_weights.as_mut_slice(),
            &mut self.gate_biases,
            self.dense_weights.as_mut_slice(),
            &mut self.dense_bias,
        ]
    }

    pub fn global_norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.iter())
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt()
    }

    /// Rescales so the global L2 norm is at most `max_norm`. Returns the
    /// norm before clipping.
    pub fn clip_global_norm(&mut self, max_norm: f64) -> f64 {
        let norm = self.global_norm();
        if norm > max_norm && norm > 0.0 {
            let k = max_norm / norm;
            for t in self.tensors_mut() {
                t.iter_mut().for_each(|g| *g *= k);
            }
        }
        norm
    }
}

/// Per-step activations kept for backpropagation.
struct Trace {
    /// Post-activation gates, `4H` per step.
    gates: Vec<f64>,
    cells: Vec<f64>,
    hidden: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl LstmModel {
    pub fn zeros(hidden_size: usize, output_size: usize, scaler: ScalerParams) -> Self {
        let h = hidden_size;
        Self {
            hidden_size,
            output_size,
            input_weights: Matrix::zeros(4 * h, 1),
            recurrent_weights: Matrix::zeros(4 * h, h),
            gate_biases: vec![0.0; 4 * h],
            dense_weights: Matrix::zeros(h, output_size),
            dense_bias: vec![0.0; output_size],
            scaler,
        }
    }

    /// Uniform `[-k, k]` initialization with `k = 1/sqrt(fan_in)`. A gate
    /// pre-activation sees `1 + H` inputs; the head sees `H`.
    pub fn init(hidden_size: usize, output_size: usize, scaler: ScalerParams, rng: &mut RngStream) -> Self {
        let mut m = Self::zeros(hidden_size, output_size, scaler);
        let k_gate = 1.0 / ((1 + hidden_size) as f64).sqrt();
        let k_dense = 1.0 / (hidden_size as f64).sqrt();
        for w in m.input_weights.as_mut_slice() {
            *w = rng.uniform_range(-k_gate, k_gate);
        }
        for w in m.recurrent_weights.as_mut_slice() {
            *w = rng.uniform_range(-k_gate, k_gate);
        }
        for w in m.gate_biases.iter_mut() {
            *w = rng.uniform_range(-k_gate, k_gate);
        }
        for w in m.dense_weights.as_mut_slice() {
            *w = rng.uniform_range(-k_dense, k_dense);
        }
        for w in m.dense_bias.iter_mut() {
            *w = rng.uniform_range(-k_dense, k_dense);
        }
        m
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn tensors(&self) -> [&[f64]; 5] {
        [
            self.input_weights.as_slice(),
            self.recurrent_weights.as_slice(),
            &self.gate_biases,
            self.dense_weights.as_slice(),
            &self.dense_bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 5] {
        [
            self.input_weights.as_mut_slice(),
            self.recurrent_weights.as_mut_slice(),
            &mut self.gate_biases,
            self.dense_weights.as_mut_slice(),
            &mut self.dense_bias,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.hidden_size;
        let shapes_ok = h > 0
            && self.output_size > 0
            && (self.input_weights.rows(), self.input_weights.cols()) == (4 * h, 1)
            && (self.recurrent_weights.rows(), self.recurrent_weights.cols()) == (4 * h, h)
            && self.gate_biases.len() == 4 * h
            && (self.dense_weights.rows(), self.dense_weights.cols()) == (h, self.output_size)
            && self.dense_bias.len() == self.output_size;
        if !shapes_ok {
            return Err(Error::invalid(
                "model",
                "weight shapes inconsistent with hidden_size/output_size",
            ));
        }
        if !self.is_finite() {
            return Err(Error::invalid("model", "non-finite weight"));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|w| w.is_finite()))
    }

    /// Runs the recurrence over `input` (normalized units) and returns the
    /// head output.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.is_empty() {
            return Err(Error::EmptyInput);
        }
        if input.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        let trace = self.run(input);
        Ok(self.head(&trace.hidden[(input.len() - 1) * self.hidden_size..]))
    }

    fn head(&self, h_last: &[f64]) -> Vec<f64> {
        let mut y = self.dense_bias.clone();
        for (j, &hj) in h_last.iter().enumerate() {
            if hj == 0.0 {
                continue;
            }
            for (yk, &w) in y.iter_mut().zip(self.dense_weights.row(j)) {
                *yk += hj * w;
            }
        }
        y
    }

    fn run(&self, input: &[f64]) -> Trace {
        let h = self.hidden_size;
        let steps = input.len();
        let mut trace = Trace {
            gates: vec![0.0; steps * 4 * h],
            cells: vec![0.0; steps * h],
            hidden: vec![0.0; steps * h],
        };
        let zero = vec![0.0; h];
        let w_in = self.input_weights.as_slice();
        for (t, &x) in input.iter().enumerate() {
            let (h_prev, c_prev) = if t == 0 {
                (&zero[..], &zero[..])
            } else {
                (&trace.hidden[(t - 1) * h..t * h], &trace.cells[(t - 1) * h..t * h])
            };
            let mut z: Vec<f64> = (0..4 * h)
                .map(|r| {
                    let u = self.recurrent_weights.row(r);
                    self.gate_biases[r] + w_in[r] * x + u.iter().zip(h_prev).map(|(a, b)| a * b).sum::<f64>()
                })
                .collect();
            for (r, zr) in z.iter_mut().enumerate() {
                *zr = if (2 * h..3 * h).contains(&r) {
                    zr.tanh()
                } else {
                    sigmoid(*zr)
                };
            }
            let mut c = vec![0.0; h];
            let mut hid = vec![0.0; h];
            for j in 0..h {
                let (i, f, g, o) = (z[j], z[h + j], z[2 * h + j], z[3 * h + j]);
                c[j] = f * c_prev[j] + i * g;
                hid[j] = o * c[j].max(0.0);
            }
            trace.gates[t * 4 * h..(t + 1) * 4 * h].copy_from_slice(&z);
            trace.cells[t * h..(t + 1) * h].copy_from_slice(&c);
            trace.hidden[t * h..(t + 1) * h].copy_from_slice(&hid);
        }
        trace
    }

    /// Mean squared error over every output of every sample.
    pub fn loss(&self, inputs: &[&[f64]], targets: &[&[f64]]) -> Result<f64> {
        check_batch(self, inputs, targets)?;
        let mut sum = 0.0;
        for (x, y) in inputs.iter().zip(targets) {
            let pred = self.forward(x)?;
            sum += pred.iter().zip(y.iter()).map(|(p, t)| (p - t).powi(2)).sum::<f64>();
        }
        Ok(sum / (inputs.len() * self.output_size) as f64)
    }

    /// Batch MSE and its gradient by backpropagation through time.
    pub fn loss_and_gradients(&self, inputs: &[&[f64]], targets: &[&[f64]]) -> Result<(f64, LstmGradients)> {
        check_batch(self, inputs, targets)?;
        let h = self.hidden_size;
        let scale = 1.0 / (inputs.len() * self.output_size) as f64;
        let mut grads = LstmGradients::zeros_like(self);
        let mut sum = 0.0;

        let mut dh = vec![0.0; h];
        let mut dh_prev = vec![0.0; h];
        let mut dc_next = vec![0.0; h];
        let mut da = vec![0.0; 4 * h];
        let zero = vec![0.0; h];

        for (x, y) in inputs.iter().zip(targets) {
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteInput);
            }
            let steps = x.len();
            let trace = self.run(x);
            let h_last = &trace.hidden[(steps - 1) * h..];
            let pred = self.head(h_last);

            let dy: Vec<f64> = pred
                .iter()
                .zip(y.iter())
                .map(|(p, t)| {
                    sum += (p - t).powi(2);
                    2.0 * (p - t) * scale
                })
                .collect();

            for (j, &hj) in h_last.iter().enumerate() {
                let dw = &mut grads.dense_weights.as_mut_slice()[j * self.output_size..(j + 1) * self.output_size];
                let w = self.dense_weights.row(j);
                let mut acc = 0.0;
                for k in 0..self.output_size {
                    dw[k] += hj * dy[k];
                    acc += w[k] * dy[k];
                }
                dh[j] = acc;
            }
            for (b, d) in grads.dense_bias.iter_mut().zip(&dy) {
                *b += d;
            }

            dc_next.iter_mut().for_each(|v| *v = 0.0);
            for t in (0..steps).rev() {
                let gates = &trace.gates[t * 4 * h..(t + 1) * 4 * h];
                let c = &trace.cells[t * h..(t + 1) * h];
                let (h_prev, c_prev) = if t == 0 {
                    (&zero[..], &zero[..])
                } else {
                    (&trace.hidden[(t - 1) * h..t * h], &trace.cells[(t - 1) * h..t * h])
                };
                for j in 0..h {
                    let (i, f, g, o) = (gates[j], gates[h + j], gates[2 * h + j], gates[3 * h + j]);
                    let active = c[j] > 0.0;
                    let d_o = if active { dh[j] * c[j] } else { 0.0 };
                    let dc = if active { dh[j] * o } else { 0.0 } + dc_next[j];
                    da[j] = dc * g * i * (1.0 - i);
                    da[h + j] = dc * c_prev[j] * f * (1.0 - f);
                    da[2 * h + j] = dc * i * (1.0 - g * g);
                    da[3 * h + j] = d_o * o * (1.0 - o);
                    dc_next[j] = dc * f;
                }

                let xt = x[t];
                dh_prev.iter_mut().for_each(|v| *v = 0.0);
                let d_in = grads.input_weights.as_mut_slice();
                let d_rec = grads.recurrent_weights.as_mut_slice();
                for r in 0..4 * h {
                    let a = da[r];
                    if a == 0.0 {
                        continue;
                    }
                    d_in[r] += a * xt;
                    grads.gate_biases[r] += a;
                    let u = self.recurrent_weights.row(r);
                    let du = &mut d_rec[r * h..(r + 1) * h];
                    for k in 0..h {
                        du[k] += a * h_prev[k];
                        dh_prev[k] += u[k] * a;
                    }
                }
                std::mem::swap(&mut dh, &mut dh_prev);
            }
        }
        Ok((sum * scale, grads))
    }
}

fn check_batch(model: &LstmModel, inputs: &[&[f64]], targets: &[&[f64]]) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if inputs.len() != targets.len() {
        return Err(Error::invalid("batch", "inputs and targets differ in length"));
    }
    if inputs.iter().any(|x| x.is_empty()) {
        return Err(Error::EmptyInput);
    }
    if let Some(t) = targets.iter().find(|t| t.len() != model.output_size) {
        return Err(Error::invalid(
            "batch",
            format!("target has {} values, model predicts {}", t.len(), model.output_size),
        ));
    }
    Ok(())
}
