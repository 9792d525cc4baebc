//! Discrete-event model of a front-line hospital and its transfer network.

mod config;
mod engine;
mod events;
mod metrics;
mod sampling;

pub use config::{AcuityMix, ArrivalMode, ArrivalSource, ScenarioConfig};
pub use engine::{run, run_sweep, Census, Engine, EventRecord, RelocationAudit, SimulationOutcome, Trigger};
pub use events::{Event, EventKind, EventQueue, ScheduledEvent};
pub use metrics::{summarize, SimulationMetrics, Summary};
pub use sampling::{generate_arrivals, hourly_discharge, sample_service_time};
