//! Min-cost relocation of flagged patients to secondary hospitals.
//!
//! Transfer cost depends only on the receiving hospital, so assigning each
//! patient in flag order to the cheapest compatible hospital with a free bed
//! minimizes the total cost of the batch. Ties go to the hospital with the
//! lowest current bed utilization, then the lowest id.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Acuity {
    Low,
    Medium,
    High,
}

impl Acuity {
    pub const ALL: [Acuity; 3] = [Acuity::Low, Acuity::Medium, Acuity::High];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Acuity::Low => "low",
            Acuity::Medium => "medium",
            Acuity::High => "high",
        }
    }
}

impl fmt::Display for Acuity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Acuity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Ok(Acuity::Low),
            "medium" => Ok(Acuity::Medium),
            "high" => Ok(Acuity::High),
            other => Err(Error::invalid("acuity", format!("unknown level {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hospital {
    pub id: String,
    pub capacity: u32,
    pub transfer_cost: f64,
    pub acuity_capabilities: Vec<Acuity>,
    #[serde(default)]
    pub occupancy: u32,
}

impl Hospital {
    pub fn new(id: impl Into<String>, capacity: u32, transfer_cost: f64) -> Self {
        Self {
            id: id.into(),
            capacity,
            transfer_cost,
            acuity_capabilities: Acuity::ALL.to_vec(),
            occupancy: 0,
        }
    }

    pub fn with_capabilities(mut self, caps: &[Acuity]) -> Self {
        self.acuity_capabilities = caps.to_vec();
        self
    }

    pub fn with_occupancy(mut self, occupancy: u32) -> Self {
        self.occupancy = occupancy;
        self
    }

    pub fn handles(&self, acuity: Acuity) -> bool {
        self.acuity_capabilities.contains(&acuity)
    }

    pub fn residual(&self) -> u32 {
        self.capacity.saturating_sub(self.occupancy)
    }

    pub fn is_full(&self) -> bool {
        self.occupancy >= self.capacity
    }

    /// Current bed utilization, `occupancy / capacity`.
    pub fn bed_utilization(&self) -> f64 {
        if self.capacity == 0 {
            1.0
        } else {
            self.occupancy as f64 / self.capacity as f64
        }
    }

    fn check(&self) -> Result<()> {
        if self.occupancy > self.capacity {
            return Err(Error::InconsistentState {
                id: self.id.clone(),
                occupancy: self.occupancy,
                capacity: self.capacity,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PatientStatus {
    Waiting,
    InService,
    Discharged,
    Relocated,
    Overflow,
}

impl PatientStatus {
    /// Allowed lifecycle: Waiting → (InService → Discharged) | Relocated | Overflow.
    pub fn can_become(self, next: PatientStatus) -> bool {
        use PatientStatus::*;
        matches!(
            (self, next),
            (Waiting, InService) | (Waiting, Relocated) | (Waiting, Overflow) | (InService, Discharged)
        )
    }

    pub fn is_terminal(self) -> bool {
        matches!(
            self,
            PatientStatus::Discharged | PatientStatus::Relocated | PatientStatus::Overflow
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Patient {
    pub id: u64,
    pub acuity: Acuity,
    pub arrival_hour: f64,
    pub wait_start: f64,
    pub status: PatientStatus,
}

impl Patient {
    pub fn waiting(id: u64, acuity: Acuity, arrival_hour: f64) -> Self {
        Self {
            id,
            acuity,
            arrival_hour,
            wait_start: arrival_hour,
            status: PatientStatus::Waiting,
        }
    }

    /// Moves to `next`, panicking on a transition the lifecycle forbids.
    pub fn transition(&mut self, next: PatientStatus) {
        assert!(
            self.status.can_become(next),
            "patient {}: illegal transition {:?} -> {:?}",
            self.id,
            self.status,
            next
        );
        self.status = next;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub patient_id: u64,
    pub hospital_id: String,
    pub cost: f64,
    pub hour: f64,
    pub acuity: Acuity,
}

/// Sort key for ids like `H2`, `H10`: numeric suffix first, then the text.
fn id_order(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let cut = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        (&s[..cut], s[cut..].parse().ok())
    }
    let (pa, na) = split(a);
    let (pb, nb) = split(b);
    pa.cmp(pb).then(na.cmp(&nb)).then(a.cmp(b))
}

fn preference(a: &Hospital, b: &Hospital) -> Ordering {
    a.transfer_cost
        .total_cmp(&b.transfer_cost)
        .then(a.bed_utilization().total_cmp(&b.bed_utilization()))
        .then_with(|| id_order(&a.id, &b.id))
}

/// Index of the hospital a patient of `acuity` would be sent to now.
pub fn best_receiver(acuity: Acuity, hospitals: &[Hospital]) -> Option<usize> {
    hospitals
        .iter()
        .enumerate()
        .filter(|(_, h)| h.handles(acuity) && !h.is_full())
        .min_by(|(_, a), (_, b)| preference(a, b))
        .map(|(i, _)| i)
}

/// Places each patient, in order, at the cheapest compatible hospital with a
/// free bed, incrementing that hospital's occupancy. Every candidate in
/// `hospitals` is treated as a receiver; callers exclude the front line.
///
/// Patients get status `Relocated` when placed and `Overflow` when nothing
/// can take them. Returns the assignments and the overflow ids.
pub fn allocate_batch(
    patients: &mut [Patient],
    hospitals: &mut [Hospital],
    hour: f64,
) -> Result<(Vec<Assignment>, Vec<u64>)> {
    let mut seen = HashSet::with_capacity(patients.len());
    for p in patients.iter() {
        if !seen.insert(p.id) {
            return Err(Error::DuplicatePatient(p.id));
        }
    }
    for h in hospitals.iter() {
        h.check()?;
    }

    let mut assignments = Vec::new();
    let mut overflow = Vec::new();
    for p in patients.iter_mut() {
        match best_receiver(p.acuity, hospitals) {
            Some(i) => {
                let h = &mut hospitals[i];
                h.occupancy += 1;
                p.transition(PatientStatus::Relocated);
                assignments.push(Assignment {
                    patient_id: p.id,
                    hospital_id: h.id.clone(),
                    cost: h.transfer_cost,
                    hour,
                    acuity: p.acuity,
                });
            }
            None => {
                p.transition(PatientStatus::Overflow);
                overflow.push(p.id);
            }
        }
    }
    Ok((assignments, overflow))
}

pub fn assignment_cost(assignments: &[Assignment]) -> f64 {
    assignments.iter().map(|a| a.cost).sum()
}

/// Equity metric: patients allocated to a hospital over its capacity.
pub fn utilization(hospital: &Hospital, served_count: u64) -> Result<f64> {
    if hospital.capacity == 0 {
        return Err(Error::invalid(
            "capacity",
            format!("hospital {} has zero capacity", hospital.id),
        ));
    }
    Ok(served_count as f64 / hospital.capacity as f64)
}

/// `patient_id,hospital_id,cost,hour,acuity` CSV.
pub fn assignments_csv(assignments: &[Assignment]) -> String {
    let mut out = String::from("patient_id,hospital_id,cost,hour,acuity\n");
    for a in assignments {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            a.patient_id, a.hospital_id, a.cost, a.hour, a.acuity
        ));
    }
    out
}
