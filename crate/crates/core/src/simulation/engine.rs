//! The event loop.
//!
//! H1 runs one FIFO triage server. A patient takes an H1 bed when triage
//! starts and keeps it until discharged, so triage needs both an idle server
//! and a free bed. Patients still queued when their wait passes `w_max`, or
//! who arrive to a full H1, are handed to the allocator. Receiving hospitals
//! are bed pools that only release capacity through hourly discharge.

use std::collections::VecDeque;
use std::fmt;

use super::config::{ArrivalMode, ScenarioConfig};
use super::events::{Event, EventQueue};
use super::metrics::SimulationMetrics;
use super::sampling::{deterministic_arrivals, generate_arrivals, hourly_discharge, sample_service_time};
use crate::allocation::{allocate_batch, Acuity, Assignment, Hospital, Patient, PatientStatus};
use crate::error::{Error, Result};
use crate::forecast::ArrivalSeries;
use crate::io::rng::{RngStream, StreamId};
use crate::queueing::{should_relocate, RelocationPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trigger {
    /// Realized wait exceeded `w_max`.
    Wait,
    /// H1 had no free bed on arrival.
    FrontLineFull,
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trigger::Wait => "wait",
            Trigger::FrontLineFull => "h1_full",
        })
    }
}

/// Why and where one flagged patient went.
#[derive(Debug, Clone, PartialEq)]
pub struct RelocationAudit {
    pub patient_id: u64,
    pub time: f64,
    pub wait_hours: f64,
    pub h1_occupancy: u32,
    pub h1_capacity: u32,
    pub trigger: Trigger,
    /// `None` when the patient overflowed.
    pub hospital_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    pub event: &'static str,
    pub patient_id: Option<u64>,
    pub hospital_id: Option<String>,
    pub detail: String,
}

/// Patients by lifecycle state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Census {
    pub arrived: u64,
    pub waiting: u64,
    pub in_service: u64,
    pub discharged: u64,
    pub relocated: u64,
    pub overflow: u64,
}

impl Census {
    pub fn accounted(&self) -> u64 {
        self.waiting + self.in_service + self.discharged + self.relocated + self.overflow
    }

    fn slot(&mut self, status: PatientStatus) -> &mut u64 {
        match status {
            PatientStatus::Waiting => &mut self.waiting,
            PatientStatus::InService => &mut self.in_service,
            PatientStatus::Discharged => &mut self.discharged,
            PatientStatus::Relocated => &mut self.relocated,
            PatientStatus::Overflow => &mut self.overflow,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub metrics: SimulationMetrics,
    pub assignments: Vec<Assignment>,
    pub audits: Vec<RelocationAudit>,
    pub log: Vec<EventRecord>,
}

impl SimulationOutcome {
    /// `time,event,patient_id,hospital_id,detail` CSV.
    pub fn event_log_csv(&self) -> String {
        let mut out = String::from("time,event,patient_id,hospital_id,detail\n");
        for r in &self.log {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.time,
                r.event,
                r.patient_id.map(|p| p.to_string()).unwrap_or_default(),
                r.hospital_id.as_deref().unwrap_or(""),
                r.detail
            ));
        }
        out
    }
}

/// Smallest time `t >= start + span` with `t - start > span` in floating point.
fn strictly_after(start: f64, span: f64) -> f64 {
    let mut t = start + span;
    while t - start <= span {
        t = f64::from_bits(t.to_bits() + 1);
    }
    t
}

pub struct Engine {
    config: ScenarioConfig,
    policy: RelocationPolicy,
    horizon: f64,
    now: f64,
    events: EventQueue,
    hospitals: Vec<Hospital>,
    patients: Vec<Patient>,
    arrival_times: Vec<f64>,
    queue: VecDeque<u64>,
    in_triage: Option<u64>,
    /// H1 patients past triage who still hold a bed.
    admitted: Vec<u64>,
    /// Anonymous H1 occupants from the scenario's starting occupancy.
    background: u32,
    census: Census,
    service_rng: RngStream,
    discharge_rng: RngStream,
    acuity_rng: RngStream,
    metrics: SimulationMetrics,
    cost_per_hour: Vec<f64>,
    snapshots_taken: usize,
    assignments: Vec<Assignment>,
    audits: Vec<RelocationAudit>,
    log: Vec<EventRecord>,
    finished: bool,
}

impl Engine {
    pub fn new(config: &ScenarioConfig, arrivals: &ArrivalSeries) -> Result<Self> {
        config.validate()?;
        let horizon = config.horizon_hours as usize;
        if arrivals.len() < horizon {
            return Err(Error::InsufficientHistory {
                needed: horizon,
                got: arrivals.len(),
            });
        }

        let mut arrival_rng = RngStream::new(config.seed, StreamId::Arrivals);
        let mut arrival_times = Vec::new();
        for (hour, &rate) in arrivals.values()[..horizon].iter().enumerate() {
            let times = match config.arrival_mode {
                ArrivalMode::Poisson => generate_arrivals(rate, hour as u32, &mut arrival_rng)?,
                ArrivalMode::Deterministic => deterministic_arrivals(rate, hour as u32),
            };
            arrival_times.extend(times);
        }

        let mut events = EventQueue::new();
        for (id, &t) in arrival_times.iter().enumerate() {
            events.schedule(t, Event::Arrival { patient: id as u64 });
        }
        for hour in 1..config.horizon_hours {
            events.schedule(hour as f64, Event::HourlyDischarge { hour });
        }

        let hospitals = config.hospitals.clone();
        let ids = hospitals.iter().map(|h| h.id.clone()).collect();
        Ok(Self {
            policy: RelocationPolicy {
                w_max: config.w_max_hours,
            },
            horizon: horizon as f64,
            now: 0.0,
            events,
            background: hospitals[0].occupancy,
            hospitals,
            patients: Vec::with_capacity(arrival_times.len()),
            arrival_times,
            queue: VecDeque::new(),
            in_triage: None,
            admitted: Vec::new(),
            census: Census::default(),
            service_rng: RngStream::new(config.seed, StreamId::Service),
            discharge_rng: RngStream::new(config.seed, StreamId::Discharge),
            acuity_rng: RngStream::new(config.seed, StreamId::Acuity),
            metrics: SimulationMetrics::empty(ids, horizon),
            cost_per_hour: vec![0.0; horizon],
            snapshots_taken: 0,
            assignments: Vec::new(),
            audits: Vec::new(),
            log: Vec::new(),
            config: config.clone(),
            finished: false,
        })
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn hospitals(&self) -> &[Hospital] {
        &self.hospitals
    }

    pub fn patients(&self) -> &[Patient] {
        &self.patients
    }

    pub fn census(&self) -> Census {
        self.census
    }

    /// Arrivals scheduled over the whole horizon.
    pub fn scheduled_arrivals(&self) -> usize {
        self.arrival_times.len()
    }

    pub fn log(&self) -> &[EventRecord] {
        &self.log
    }

    /// Number of H1 beds held by patients or background occupants.
    pub fn front_line_beds(&self) -> (u32, u32) {
        let held = self.background + self.admitted.len() as u32 + u32::from(self.in_triage.is_some());
        (held, self.hospitals[0].capacity)
    }

    /// Processes the next event. Returns `false` once the horizon is reached.
    pub fn step(&mut self) -> Result<bool> {
        if self.finished {
            return Ok(false);
        }
        let next = match self.events.peek() {
            Some(e) if e.time < self.horizon => *e,
            _ => {
                self.finish();
                return Ok(false);
            }
        };
        self.events.pop();
        self.snapshot_until(next.time);
        self.now = next.time;
        match next.event {
            Event::Arrival { patient } => self.on_arrival(patient)?,
            Event::ServiceComplete { patient } => self.on_service_complete(patient),
            Event::HourlyDischarge { hour } => self.on_discharge(hour),
            Event::WaitThresholdBreach { patient } => self.on_breach(patient)?,
        }
        Ok(true)
    }

    pub fn run_to_end(mut self) -> Result<SimulationOutcome> {
        while self.step()? {}
        Ok(self.into_outcome())
    }

    pub fn into_outcome(mut self) -> SimulationOutcome {
        self.finish();
        SimulationOutcome {
            metrics: self.metrics,
            assignments: self.assignments,
            audits: self.audits,
            log: self.log,
        }
    }

    fn finish(&mut self) {
        if self.finished {
            return;
        }
        self.snapshot_until(f64::INFINITY);
        let mut total = 0.0;
        for (slot, cost) in self.metrics.cumulative_cost_series.iter_mut().zip(&self.cost_per_hour) {
            total += cost;
            *slot = total;
        }
        self.finished = true;
    }

    /// Records end-of-hour utilization for every hour that ends at or before `t`.
    fn snapshot_until(&mut self, t: f64) {
        let horizon = self.metrics.horizon_hours();
        while self.snapshots_taken < horizon && t >= (self.snapshots_taken + 1) as f64 {
            let hour = self.snapshots_taken;
            let (h1_beds, _) = self.front_line_beds();
            for (i, h) in self.hospitals.iter().enumerate() {
                let occupancy = if i == 0 { h1_beds } else { h.occupancy };
                self.metrics.utilization_series[i][hour] = occupancy as f64 / h.capacity as f64;
            }
            self.snapshots_taken += 1;
        }
    }

    fn record(&mut self, event: &'static str, patient_id: Option<u64>, hospital_id: Option<String>, detail: String) {
        self.log.push(EventRecord {
            time: self.now,
            event,
            patient_id,
            hospital_id,
            detail,
        });
    }

    fn set_status(&mut self, id: u64, next: PatientStatus) {
        let p = &mut self.patients[id as usize];
        *self.census.slot(p.status) -= 1;
        p.transition(next);
        *self.census.slot(next) += 1;
    }

    fn h1_full(&self) -> bool {
        let (held, cap) = self.front_line_beds();
        held >= cap
    }

    fn on_arrival(&mut self, id: u64) -> Result<()> {
        debug_assert_eq!(id as usize, self.patients.len());
        let acuity = self.config.acuity_mix.sample(self.acuity_rng.uniform());
        self.patients.push(Patient::waiting(id, acuity, self.now));
        self.census.arrived += 1;
        self.census.waiting += 1;
        self.record("arrival", Some(id), None, format!("acuity={acuity}"));

        let (held, cap) = self.front_line_beds();
        if should_relocate(0.0, self.policy, held, cap) {
            return self.relocate(id, Trigger::FrontLineFull);
        }
        self.queue.push_back(id);
        let breach = strictly_after(self.now, self.policy.w_max);
        self.events.schedule(breach, Event::WaitThresholdBreach { patient: id });
        self.try_start_service();
        Ok(())
    }

    fn on_breach(&mut self, id: u64) -> Result<()> {
        if self.patients[id as usize].status != PatientStatus::Waiting {
            return Ok(());
        }
        let wait = self.now - self.patients[id as usize].wait_start;
        let (held, cap) = self.front_line_beds();
        if should_relocate(wait, self.policy, held, cap) {
            self.record("wait_breach", Some(id), None, format!("wait_hours={wait}"));
            self.relocate(id, Trigger::Wait)?;
        }
        Ok(())
    }

    fn on_service_complete(&mut self, id: u64) {
        debug_assert_eq!(self.in_triage, Some(id));
        self.in_triage = None;
        self.admitted.push(id);
        self.record(
            "service_complete",
            Some(id),
            Some(self.hospitals[0].id.clone()),
            String::new(),
        );
        self.try_start_service();
    }

    fn on_discharge(&mut self, hour: u32) {
        let rate = self.config.discharge_rate;

        let background_out = self.discharge_rng.binomial(self.background, rate);
        self.background -= background_out;
        let mut released = Vec::new();
        self.admitted.retain(|&id| {
            let out = self.discharge_rng.bernoulli(rate);
            if out {
                released.push(id);
            }
            !out
        });
        for &id in &released {
            self.set_status(id, PatientStatus::Discharged);
        }
        let h1_out = background_out + released.len() as u32;
        self.hospitals[0].occupancy = self.front_line_beds().0;
        let h1_id = self.hospitals[0].id.clone();
        self.record("discharge", None, Some(h1_id), format!("hour={hour};count={h1_out}"));

        for i in 1..self.hospitals.len() {
            let n = hourly_discharge(&mut self.hospitals[i], rate, &mut self.discharge_rng);
            let id = self.hospitals[i].id.clone();
            self.record("discharge", None, Some(id), format!("hour={hour};count={n}"));
        }
        self.try_start_service();
    }

    fn try_start_service(&mut self) {
        if self.in_triage.is_some() || self.h1_full() {
            return;
        }
        while let Some(id) = self.queue.pop_front() {
            if self.patients[id as usize].status != PatientStatus::Waiting {
                continue;
            }
            self.set_status(id, PatientStatus::InService);
            self.in_triage = Some(id);
            self.hospitals[0].occupancy = self.front_line_beds().0;
            self.metrics.served_per_hospital[0] += 1;
            let minutes = sample_service_time(
                self.config.service_mean_min,
                self.config.service_sd_min,
                &mut self.service_rng,
            );
            self.events
                .schedule(self.now + minutes / 60.0, Event::ServiceComplete { patient: id });
            let h1_id = self.hospitals[0].id.clone();
            let wait = self.now - self.patients[id as usize].wait_start;
            self.record(
                "service_start",
                Some(id),
                Some(h1_id),
                format!("wait_hours={wait};service_min={minutes}"),
            );
            return;
        }
    }

    fn relocate(&mut self, id: u64, trigger: Trigger) -> Result<()> {
        let idx = id as usize;
        let wait = self.now - self.patients[idx].wait_start;
        let (held, cap) = self.front_line_beds();
        let waiting_before = self.patients[idx].status;
        let hour = (self.now.floor() as usize).min(self.metrics.horizon_hours() - 1);

        let (assigned, _overflow) = allocate_batch(
            std::slice::from_mut(&mut self.patients[idx]),
            &mut self.hospitals[1..],
            self.now,
        )?;
        let after = self.patients[idx].status;
        *self.census.slot(waiting_before) -= 1;
        *self.census.slot(after) += 1;

        let detail = format!("trigger={trigger};wait_hours={wait};h1_occupancy={held};h1_capacity={cap}");
        let placed = assigned.into_iter().next();
        let hospital_id = placed.as_ref().map(|a| a.hospital_id.clone());
        match placed {
            Some(a) => {
                let i = self
                    .hospitals
                    .iter()
                    .position(|h| h.id == a.hospital_id)
                    .expect("receiver exists");
                self.metrics.served_per_hospital[i] += 1;
                self.metrics.relocations_per_hour[hour] += 1;
                self.metrics.acuity_counts_relocated[a.acuity.index()] += 1;
                self.cost_per_hour[hour] += a.cost;
                self.record(
                    "relocate",
                    Some(id),
                    Some(a.hospital_id.clone()),
                    format!("{detail};cost={}", a.cost),
                );
                self.assignments.push(a);
            }
            None => {
                self.metrics.overflow_count += 1;
                self.record("overflow", Some(id), None, detail);
            }
        }
        self.audits.push(RelocationAudit {
            patient_id: id,
            time: self.now,
            wait_hours: wait,
            h1_occupancy: held,
            h1_capacity: cap,
            trigger,
            hospital_id,
        });
        Ok(())
    }

    pub fn acuity_of(&self, id: u64) -> Option<Acuity> {
        self.patients.get(id as usize).map(|p| p.acuity)
    }
}

/// Runs one scenario to its horizon.
pub fn run(config: &ScenarioConfig, arrivals: &ArrivalSeries) -> Result<SimulationOutcome> {
    Engine::new(config, arrivals)?.run_to_end()
}

/// Runs the scenario once per seed on up to `jobs` threads. Results come
/// back in seed order; each run has its own engine and random streams.
pub fn run_sweep(
    config: &ScenarioConfig,
    arrivals: &ArrivalSeries,
    seeds: &[u64],
    jobs: usize,
) -> Vec<Result<SimulationOutcome>> {
    let jobs = jobs.clamp(1, seeds.len().max(1));
    let chunk = seeds.len().div_ceil(jobs).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&s| run(&config.clone().with_seed(s), arrivals))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}
