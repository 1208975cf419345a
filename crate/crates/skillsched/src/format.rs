//! JSON instance files, schedule and trace exports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use skillsched_core::edm::{EdmTrace, SkillRun};
use skillsched_core::model::{validate_raw, ModelError, ObjectiveBreakdown};
use skillsched_core::{build_instance, Instance, RawInstance, Schedule, ScheduleStatus};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed instance: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid instance ({} problem(s))", .0.len())]
    Invalid(Vec<ModelError>),
}

pub fn parse_raw(text: &str) -> Result<RawInstance, FormatError> {
    Ok(serde_json::from_str(text)?)
}

/// Builds a validated instance, reporting every validation problem at once.
pub fn instance_from_raw(raw: &RawInstance) -> Result<Instance, FormatError> {
    let errors = validate_raw(raw);
    if !errors.is_empty() {
        return Err(FormatError::Invalid(errors));
    }
    build_instance(raw).map_err(|e| FormatError::Invalid(vec![e]))
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    instance_from_raw(&parse_raw(text)?)
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(&instance.to_raw()).expect("instance serializes")
}

/// SHA-256 of the compact JSON of the instance as supplied.
pub fn checksum(instance: &Instance) -> String {
    let bytes = serde_json::to_vec(&instance.to_raw()).expect("instance serializes");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpRef {
    pub job: String,
    pub skill: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StartExport {
    pub job: String,
    pub skill: String,
    pub start: u32,
    pub duration: u32,
    pub crew: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveExport {
    /// TWCT with normalized weights.
    #[serde(rename = "Z")]
    pub z: f64,
    /// TWCT with the weights as supplied.
    #[serde(rename = "Z_unit")]
    pub z_unit: f64,
    #[serde(rename = "Z_k")]
    pub z_k: BTreeMap<String, f64>,
    /// Completion time per job.
    pub phi: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleExport {
    pub status: String,
    pub starts: Vec<StartExport>,
    pub objective: Option<ObjectiveExport>,
    pub unplaced: Vec<OpRef>,
}

pub fn status_name(status: &ScheduleStatus) -> &'static str {
    match status {
        ScheduleStatus::Complete => "complete",
        ScheduleStatus::Overflow(_) => "overflow",
        ScheduleStatus::Partial => "partial",
    }
}

impl ObjectiveExport {
    pub fn new(instance: &Instance, obj: &ObjectiveBreakdown) -> Self {
        ObjectiveExport {
            z: obj.z,
            z_unit: obj.unit_z(instance),
            z_k: instance
                .skills()
                .iter()
                .zip(&obj.z_by_skill)
                .map(|(s, &z)| (s.id.clone(), z))
                .collect(),
            phi: instance
                .jobs()
                .iter()
                .zip(&obj.phi)
                .map(|(j, &c)| (j.id().to_string(), c))
                .collect(),
        }
    }
}

impl ScheduleExport {
    pub fn new(instance: &Instance, schedule: &Schedule, objective: Option<&ObjectiveBreakdown>) -> Self {
        let starts = instance
            .operations()
            .filter_map(|op| {
                let start = schedule.start(op.job, op.skill)?;
                let d = instance.demand(op.job, op.skill);
                Some(StartExport {
                    job: instance.jobs()[op.job].id().to_string(),
                    skill: instance.skills()[op.skill].id.clone(),
                    start,
                    duration: d.duration,
                    crew: d.crew,
                })
            })
            .collect();
        let unplaced = match schedule.status() {
            ScheduleStatus::Overflow(ops) => ops
                .iter()
                .filter(|op| schedule.start(op.job, op.skill).is_none())
                .map(|op| OpRef {
                    job: instance.jobs()[op.job].id().to_string(),
                    skill: instance.skills()[op.skill].id.clone(),
                })
                .collect(),
            _ => Vec::new(),
        };
        ScheduleExport {
            status: status_name(schedule.status()).to_string(),
            starts,
            objective: objective.map(|o| ObjectiveExport::new(instance, o)),
            unplaced,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationExport {
    pub t: u32,
    pub capacity: i64,
    pub psi: Vec<String>,
    pub m0: usize,
    pub theta: i64,
    pub residual_fill: Vec<String>,
    pub started: Vec<String>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceExport {
    pub skill: String,
    pub iterations: Vec<IterationExport>,
}

impl TraceExport {
    pub fn new(instance: &Instance, trace: &EdmTrace) -> Self {
        let ids = |jobs: &[usize]| -> Vec<String> {
            jobs.iter().map(|&m| instance.jobs()[m].id().to_string()).collect()
        };
        TraceExport {
            skill: instance.skills()[trace.skill].id.clone(),
            iterations: trace
                .iterations
                .iter()
                .map(|it| IterationExport {
                    t: it.t,
                    capacity: it.capacity,
                    psi: ids(&it.psi),
                    m0: it.m0,
                    theta: it.theta,
                    residual_fill: ids(&it.residual_fill),
                    started: ids(&it.started),
                    value: it.value,
                })
                .collect(),
        }
    }
}

pub fn traces(instance: &Instance, runs: &[SkillRun]) -> Vec<TraceExport> {
    runs.iter().map(|r| TraceExport::new(instance, &r.trace)).collect()
}
