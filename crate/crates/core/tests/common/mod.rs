//! Independent oracles shared by the integration targets.
#![allow(dead_code)]

use surgeflow::allocation::{allocate_batch, assignment_cost, Acuity, Hospital, Patient};
use surgeflow::forecast::{LstmModel, ScalerParams};
use surgeflow::simulation::{generate_arrivals, hourly_discharge, sample_service_time};
use surgeflow::{RngStream, StreamId};

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Straight-line transcription of the cell equations, one scalar at a time.
pub fn naive_forward(m: &LstmModel, xs: &[f64]) -> Vec<f64> {
    let hn = m.hidden_size;
    let mut h = vec![0.0; hn];
    let mut c = vec![0.0; hn];
    for &x in xs {
        let mut pre = vec![0.0; 4 * hn];
        for (r, p) in pre.iter_mut().enumerate() {
            let mut s = m.input_weights.get(r, 0) * x + m.gate_biases[r];
            for (k, hk) in h.iter().enumerate() {
                s += m.recurrent_weights.get(r, k) * hk;
            }
            *p = s;
        }
        let mut h_next = vec![0.0; hn];
        for j in 0..hn {
            let i = sigmoid(pre[j]);
            let f = sigmoid(pre[hn + j]);
            let g = pre[2 * hn + j].tanh();
            let o = sigmoid(pre[3 * hn + j]);
            c[j] = f * c[j] + i * g;
            h_next[j] = o * c[j].max(0.0);
        }
        h = h_next;
    }
    (0..m.output_size)
        .map(|k| m.dense_bias[k] + (0..hn).map(|j| h[j] * m.dense_weights.get(j, k)).sum::<f64>())
        .collect()
}

pub fn naive_loss(m: &LstmModel, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    let mut n = 0usize;
    for (x, t) in inputs.iter().zip(targets) {
        for (y, t) in naive_forward(m, x).iter().zip(t) {
            total += (y - t).powi(2);
            n += 1;
        }
    }
    total / n as f64
}

/// A small randomly initialised model with biases nudged so that cells are
/// comfortably away from the ReLU kink.
pub fn small_model(hidden: usize, outputs: usize, seed: u64) -> LstmModel {
    let mut rng = RngStream::new(seed, StreamId::WeightInit);
    let mut m = LstmModel::init(hidden, outputs, ScalerParams::new(0.0, 1.0).unwrap(), &mut rng);
    for b in m.gate_biases.iter_mut() {
        *b += rng.uniform_range(-0.5, 0.5);
    }
    m
}

pub fn random_batch(batch: usize, len: usize, outputs: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut rng = RngStream::new(seed, StreamId::SyntheticNoise);
    let inputs = (0..batch).map(|_| (0..len).map(|_| rng.uniform()).collect()).collect();
    let targets = (0..batch)
        .map(|_| (0..outputs).map(|_| rng.uniform()).collect())
        .collect();
    (inputs, targets)
}

/// Worst relative error between analytic gradients and central differences
/// over every trainable parameter, plus the parameter count checked.
pub fn gradient_check(hidden: usize, len: usize, outputs: usize, seed: u64) -> (f64, usize) {
    let model = small_model(hidden, outputs, seed);
    let (inputs, targets) = random_batch(3, len, outputs, seed ^ 0x5eed);
    let xs: Vec<&[f64]> = inputs.iter().map(|v| v.as_slice()).collect();
    let ts: Vec<&[f64]> = targets.iter().map(|v| v.as_slice()).collect();
    let (_, grads) = model.loss_and_gradients(&xs, &ts).unwrap();
    let analytic: Vec<f64> = grads.tensors().iter().flat_map(|t| t.iter().copied()).collect();

    let step = 1e-5;
    let mut worst: f64 = 0.0;
    let mut idx = 0;
    for tensor in 0..5 {
        let len = model.tensors()[tensor].len();
        for p in 0..len {
            let mut plus = model.clone();
            plus.tensors_mut()[tensor][p] += step;
            let mut minus = model.clone();
            minus.tensors_mut()[tensor][p] -= step;
            let numeric = (naive_loss(&plus, &inputs, &targets) - naive_loss(&minus, &inputs, &targets)) / (2.0 * step);
            let a = analytic[idx];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-7);
            worst = worst.max(rel);
            idx += 1;
        }
    }
    (worst, idx)
}

/// Brute-force minimum total cost: every acuity-compatible assignment of
/// each patient to a hospital with a free bed.
pub fn brute_force_min_cost(acuities: &[usize], caps: &[u32], costs: &[f64], handles: &[[bool; 3]]) -> Option<f64> {
    fn go(
        i: usize,
        acuities: &[usize],
        free: &mut [u32],
        costs: &[f64],
        handles: &[[bool; 3]],
        acc: f64,
        best: &mut Option<f64>,
    ) {
        if i == acuities.len() {
            if best.is_none_or(|b| acc < b) {
                *best = Some(acc);
            }
            return;
        }
        for h in 0..free.len() {
            if free[h] > 0 && handles[h][acuities[i]] {
                free[h] -= 1;
                go(i + 1, acuities, free, costs, handles, acc + costs[h], best);
                free[h] += 1;
            }
        }
    }
    let mut free = caps.to_vec();
    let mut best = None;
    go(0, acuities, &mut free, costs, handles, 0.0, &mut best);
    best
}

/// `λ / (μ (μ − λ))` written out independently.
pub fn wq_oracle(lambda: f64, mu: f64) -> f64 {
    let rho = lambda / mu;
    rho / (mu - lambda)
}

use surgeflow::simulation::{Engine, ScenarioConfig, SimulationOutcome, Trigger};
use surgeflow::ArrivalSeries;

/// Steps one run event by event, checking capacity and conservation after
/// every event, then audits, cost bookkeeping and replay. Returns the first
/// violation found.
pub fn check_run(config: &ScenarioConfig, arrivals: &ArrivalSeries) -> Result<SimulationOutcome, String> {
    let mut engine = Engine::new(config, arrivals).map_err(|e| e.to_string())?;
    let mut events = 0u64;
    while engine.step().map_err(|e| e.to_string())? {
        events += 1;
        let t = engine.now();
        let (held, cap) = engine.front_line_beds();
        if held > cap {
            return Err(format!("t={t}: H1 holds {held} of {cap} beds"));
        }
        for h in &engine.hospitals()[1..] {
            if h.occupancy > h.capacity {
                return Err(format!(
                    "t={t}: {} occupancy {} > capacity {}",
                    h.id, h.occupancy, h.capacity
                ));
            }
        }
        let c = engine.census();
        if c.arrived != c.accounted() || c.arrived != engine.patients().len() as u64 {
            return Err(format!("t={t}: conservation broken: {c:?}"));
        }
    }
    if events == 0 {
        return Err("no events processed".into());
    }
    let census = engine.census();
    let outcome = engine.into_outcome();

    let w_max = config.w_max_hours;
    for a in &outcome.audits {
        let justified = match a.trigger {
            Trigger::Wait => a.wait_hours > w_max,
            Trigger::FrontLineFull => a.h1_occupancy >= a.h1_capacity,
        };
        if !justified {
            return Err(format!("unjustified relocation: {a:?}"));
        }
    }
    if outcome.audits.len() as u64 != census.relocated + census.overflow {
        return Err("audit count differs from relocated + overflow".into());
    }

    let series = &outcome.metrics.cumulative_cost_series;
    if series.windows(2).any(|w| w[1] < w[0]) {
        return Err("cumulative cost decreased".into());
    }
    let expected: f64 = config.hospitals[1..]
        .iter()
        .zip(&outcome.metrics.served_per_hospital[1..])
        .map(|(h, &n)| h.transfer_cost * n as f64)
        .sum();
    let last = series.last().copied().unwrap_or(0.0);
    if last != expected {
        return Err(format!("final cost {last} != sum c_i n_i {expected}"));
    }

    let replay = surgeflow::simulation::run(config, arrivals).map_err(|e| e.to_string())?;
    if replay.metrics != outcome.metrics || replay.event_log_csv() != outcome.event_log_csv() {
        return Err("replay differs".into());
    }
    Ok(outcome)
}

pub fn is_surge_peak(outcome: &SimulationOutcome) -> bool {
    matches!(outcome.metrics.peak_relocation_hour(), Some(2..=7))
}

pub fn front_line_served_most(outcome: &SimulationOutcome) -> bool {
    let s = &outcome.metrics.served_per_hospital;
    s[1..].iter().all(|&n| s[0] > n)
}

pub struct Instance {
    pub acuities: Vec<usize>,
    pub caps: Vec<u32>,
    pub costs: Vec<f64>,
    pub handles: Vec<[bool; 3]>,
}

pub fn instance(rng: &mut RngStream) -> Instance {
    let n = 1 + rng.below(6) as usize;
    let acuities: Vec<usize> = (0..n).map(|_| rng.below(3) as usize).collect();
    // Distinct integer costs from disjoint bands, so sums are exact.
    let mut costs: Vec<f64> = (0..4).map(|k| (5 * (k + 1) + rng.below(5)) as f64).collect();
    rng.shuffle(&mut costs);
    let caps: Vec<u32> = (0..4).map(|_| n as u32 + rng.below(3) as u32).collect();
    let handles: Vec<[bool; 3]> = (0..4)
        .map(|_| [rng.bernoulli(0.8), rng.bernoulli(0.8), rng.bernoulli(0.8)])
        .collect();
    Instance {
        acuities,
        caps,
        costs,
        handles,
    }
}

pub fn greedy(inst: &Instance) -> (Option<f64>, usize) {
    let mut hospitals: Vec<Hospital> = (0..4)
        .map(|i| {
            let caps: Vec<Acuity> = Acuity::ALL
                .iter()
                .copied()
                .filter(|a| inst.handles[i][a.index()])
                .collect();
            Hospital::new(format!("H{}", i + 2), inst.caps[i], inst.costs[i]).with_capabilities(&caps)
        })
        .collect();
    let mut patients: Vec<Patient> = inst
        .acuities
        .iter()
        .enumerate()
        .map(|(id, &a)| Patient::waiting(id as u64, Acuity::ALL[a], 0.0))
        .collect();
    let (assigned, overflow) = allocate_batch(&mut patients, &mut hospitals, 0.0).unwrap();
    let cost = overflow.is_empty().then(|| assignment_cost(&assigned));
    (cost, overflow.len())
}

/// Runs `count` generated instances; returns (checked, feasible, mismatches).
pub fn compare(count: usize, seed: u64) -> (usize, usize, Vec<String>) {
    let mut rng = RngStream::new(seed, StreamId::Acuity);
    let mut feasible = 0;
    let mut bad = Vec::new();
    for k in 0..count {
        let inst = instance(&mut rng);
        let oracle = brute_force_min_cost(&inst.acuities, &inst.caps, &inst.costs, &inst.handles);
        let (g, _) = greedy(&inst);
        if oracle.is_some() {
            feasible += 1;
        }
        if g != oracle {
            bad.push(format!("instance {k}: greedy {g:?}, optimum {oracle:?}"));
        }
    }
    (count, feasible, bad)
}

pub fn service_mean(draws: usize, seed: u64) -> f64 {
    let mut rng = RngStream::new(seed, StreamId::Service);
    let total: f64 = (0..draws).map(|_| sample_service_time(10.0, 3.0, &mut rng)).sum();
    total / draws as f64
}

pub fn discharge_mean(trials: usize, occupancy: u32, seed: u64) -> f64 {
    let mut rng = RngStream::new(seed, StreamId::Discharge);
    let mut total = 0u64;
    for _ in 0..trials {
        let mut h = Hospital::new("H2", occupancy, 10.0).with_occupancy(occupancy);
        total += u64::from(hourly_discharge(&mut h, 0.1, &mut rng));
    }
    total as f64 / trials as f64
}

pub fn arrival_mean(hours: u32, rate: f64, seed: u64) -> f64 {
    let mut rng = RngStream::new(seed, StreamId::Arrivals);
    let total: usize = (0..hours)
        .map(|h| generate_arrivals(rate, h, &mut rng).unwrap().len())
        .sum();
    total as f64 / hours as f64
}
