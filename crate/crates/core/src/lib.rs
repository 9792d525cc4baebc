//! Hospital surge toolkit.
//!
//! Two halves that compose through files or in-process calls:
//!
//! * [`forecast`] trains a single-layer LSTM on hourly arrival counts and
//!   predicts the next 24 hours from the previous 24.
//! * [`simulation`] runs a discrete-event model of a front-line hospital (H1)
//!   and four secondary hospitals (H2..H5). H1 is a single FIFO triage server;
//!   patients who wait too long, or who arrive while H1 is full, are relocated
//!   by the min-cost allocator in [`allocation`].
//!
//! [`queueing`] holds the closed-form M/M/1 analytics and the relocation
//! predicate, [`io`] the seeded random streams, synthetic arrival generator,
//! CSV/JSON persistence and SVG charts, and [`cli`] the `surgeflow` binary.
//!
//! Runnable walkthroughs live in `examples/`; start with
//! `cargo run --example full_pipeline`.

pub mod allocation;
pub mod cli;
pub mod error;
pub mod forecast;
pub mod io;
pub mod queueing;
pub mod simulation;

pub use allocation::{Acuity, Assignment, Hospital, Patient, PatientStatus};
pub use error::{Error, Result};
pub use forecast::{ArrivalSeries, LstmModel, ScalerParams, TrainConfig, TrainReport};
pub use io::rng::{RngStream, StreamId};
pub use queueing::{QueueParams, RelocationPolicy};
pub use simulation::{ScenarioConfig, SimulationMetrics};
