//! Instances, schedules, the TWCT objective and schedule validators.
//!
//! Time is discrete. A horizon of length `T` has units `1..=T`; unit `t`
//! covers the interval `[t-1, t)`. Operations start at instants `0..T`, and an
//! operation of duration `p` started at `s` occupies units `s+1..=s+p`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Tolerance on `sum(w) == 1` after normalization.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("horizon must be at least one time unit, got {0}")]
    Horizon(u32),
    #[error("instance has no jobs")]
    NoJobs,
    #[error("duplicate skill id `{0}`")]
    DuplicateSkill(String),
    #[error("duplicate job id `{0}`")]
    DuplicateJob(String),
    #[error("job `{job}`: weight {weight} must be positive and finite")]
    Weight { job: String, weight: f64 },
    #[error("job `{job}` references unknown skill `{skill}`")]
    UnknownSkillRef { job: String, skill: String },
    #[error("job `{0}` does not require any skill")]
    NoRequirement(String),
    #[error("job `{job}`, skill `{skill}`: {issue}")]
    Demand {
        job: String,
        skill: String,
        issue: DemandIssue,
    },
    #[error(
        "skill `{skill}`: workload {workload} man-hours exceeds the {capacity} man-hours available over the horizon"
    )]
    Feasibility {
        skill: String,
        workload: u64,
        capacity: u64,
    },
    #[error("unknown skill index {0}")]
    UnknownSkill(usize),
    #[error("workforce vector has {got} entries but the instance has {expected} skills")]
    WorkforceLength { expected: usize, got: usize },
    #[error("schedule has no start for job `{job}` on skill `{skill}`")]
    IncompleteSchedule { job: String, skill: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DemandIssue {
    #[error("duration {duration} exceeds the horizon {horizon}")]
    DurationExceedsHorizon { duration: u32, horizon: u32 },
    #[error("positive duration with a zero crew")]
    MissingCrew,
    #[error("crew {0} given for a zero duration")]
    CrewWithoutDuration(u32),
    #[error("crew {crew} exceeds the {available} technicians available")]
    CrewExceedsAvailable { crew: u32, available: u32 },
    #[error("skill listed more than once")]
    Duplicate,
}

/// Instance description as it arrives from outside, before validation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RawInstance {
    pub horizon: u32,
    pub skills: Vec<RawSkill>,
    pub jobs: Vec<RawJob>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RawSkill {
    pub id: String,
    pub available: u32,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RawJob {
    pub id: String,
    pub weight: f64,
    pub demands: Vec<RawDemand>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RawDemand {
    pub skill: String,
    pub duration: u32,
    pub crew: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Horizon(u32);

impl Horizon {
    pub fn new(length: u32) -> Result<Self, ModelError> {
        if length == 0 {
            return Err(ModelError::Horizon(length));
        }
        Ok(Self(length))
    }

    #[allow(clippy::len_without_is_empty)] // never empty by construction
    pub fn len(self) -> u32 {
        self.0
    }
}

/// Duration and crew size of one job on one skill. A zero duration means the
/// skill is not required.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SkillDemand {
    pub duration: u32,
    pub crew: u32,
}

impl SkillDemand {
    pub const NONE: SkillDemand = SkillDemand {
        duration: 0,
        crew: 0,
    };

    pub fn is_required(&self) -> bool {
        self.duration > 0
    }

    /// Man-hours `duration * crew`.
    pub fn workload(&self) -> u64 {
        u64::from(self.duration) * u64::from(self.crew)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Skill {
    pub id: String,
    pub available: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    id: String,
    weight: f64,
    raw_weight: f64,
    demands: Vec<SkillDemand>,
}

impl Job {
    pub fn id(&self) -> &str {
        &self.id
    }

    /// Normalized weight; weights of an instance sum to one.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Weight as supplied before normalization.
    pub fn raw_weight(&self) -> f64 {
        self.raw_weight
    }

    /// Demands indexed by skill.
    pub fn demands(&self) -> &[SkillDemand] {
        &self.demands
    }
}

/// A required (job, skill) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Operation {
    pub job: usize,
    pub skill: usize,
}

/// Validated scheduling instance. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    horizon: Horizon,
    skills: Vec<Skill>,
    jobs: Vec<Job>,
    weight_total: f64,
    warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpCount {
    pub total: usize,
    pub per_skill: Vec<usize>,
}

/// Validates a raw description and builds the instance, normalizing weights.
///
/// Fails with the first problem found; [`validate_raw`] lists all of them.
pub fn build_instance(raw: &RawInstance) -> Result<Instance, ModelError> {
    let mut errors = Vec::new();
    let built = check_raw(raw, &mut errors);
    match (errors.into_iter().next(), built) {
        (None, Some(instance)) => Ok(instance),
        (Some(e), _) => Err(e),
        (None, None) => unreachable!("instance rejected without an error"),
    }
}

/// Every validation problem of a raw description, in input order.
pub fn validate_raw(raw: &RawInstance) -> Vec<ModelError> {
    let mut errors = Vec::new();
    check_raw(raw, &mut errors);
    errors
}

fn check_raw(raw: &RawInstance, errors: &mut Vec<ModelError>) -> Option<Instance> {
    let horizon = match Horizon::new(raw.horizon) {
        Ok(h) => Some(h),
        Err(e) => {
            errors.push(e);
            None
        }
    };
    if raw.jobs.is_empty() {
        errors.push(ModelError::NoJobs);
    }

    let mut seen = BTreeSet::new();
    for s in &raw.skills {
        if !seen.insert(s.id.as_str()) {
            errors.push(ModelError::DuplicateSkill(s.id.clone()));
        }
    }
    let skill_index = |id: &str| raw.skills.iter().position(|s| s.id == id);

    let mut job_ids = BTreeSet::new();
    let mut jobs = Vec::with_capacity(raw.jobs.len());
    for rj in &raw.jobs {
        if !job_ids.insert(rj.id.as_str()) {
            errors.push(ModelError::DuplicateJob(rj.id.clone()));
        }
        if !(rj.weight.is_finite() && rj.weight > 0.0) {
            errors.push(ModelError::Weight {
                job: rj.id.clone(),
                weight: rj.weight,
            });
        }
        let mut demands = vec![SkillDemand::NONE; raw.skills.len()];
        let mut listed = vec![false; raw.skills.len()];
        for d in &rj.demands {
            let Some(k) = skill_index(&d.skill) else {
                errors.push(ModelError::UnknownSkillRef {
                    job: rj.id.clone(),
                    skill: d.skill.clone(),
                });
                continue;
            };
            let demand_error = |issue| ModelError::Demand {
                job: rj.id.clone(),
                skill: d.skill.clone(),
                issue,
            };
            if listed[k] {
                errors.push(demand_error(DemandIssue::Duplicate));
                continue;
            }
            listed[k] = true;
            if d.duration == 0 {
                if d.crew > 0 {
                    errors.push(demand_error(DemandIssue::CrewWithoutDuration(d.crew)));
                }
                continue;
            }
            if d.crew == 0 {
                errors.push(demand_error(DemandIssue::MissingCrew));
                continue;
            }
            if d.duration > raw.horizon {
                errors.push(demand_error(DemandIssue::DurationExceedsHorizon {
                    duration: d.duration,
                    horizon: raw.horizon,
                }));
            }
            let available = raw.skills[k].available;
            if d.crew > available {
                errors.push(demand_error(DemandIssue::CrewExceedsAvailable {
                    crew: d.crew,
                    available,
                }));
            }
            demands[k] = SkillDemand {
                duration: d.duration,
                crew: d.crew,
            };
        }
        if !demands.iter().any(SkillDemand::is_required) {
            errors.push(ModelError::NoRequirement(rj.id.clone()));
        }
        jobs.push(Job {
            id: rj.id.clone(),
            weight: rj.weight,
            raw_weight: rj.weight,
            demands,
        });
    }

    if let Some(h) = horizon {
        for (k, skill) in raw.skills.iter().enumerate() {
            let workload: u64 = jobs.iter().map(|j| j.demands[k].workload()).sum();
            let capacity = u64::from(h.len()) * u64::from(skill.available);
            if workload > capacity {
                errors.push(ModelError::Feasibility {
                    skill: skill.id.clone(),
                    workload,
                    capacity,
                });
            }
        }
    }

    if !errors.is_empty() {
        return None;
    }

    let weight_total: f64 = jobs.iter().map(|j| j.raw_weight).sum();
    let mut warnings = Vec::new();
    if (weight_total - 1.0).abs() > WEIGHT_TOLERANCE {
        warnings.push(format!(
            "job weights summed to {weight_total}; renormalized to 1"
        ));
    }
    for j in &mut jobs {
        j.weight = j.raw_weight / weight_total;
    }

    Some(Instance {
        horizon: horizon?,
        skills: raw
            .skills
            .iter()
            .map(|s| Skill {
                id: s.id.clone(),
                available: s.available,
            })
            .collect(),
        jobs,
        weight_total,
        warnings,
    })
}

impl Instance {
    pub fn horizon(&self) -> u32 {
        self.horizon.len()
    }

    pub fn skills(&self) -> &[Skill] {
        &self.skills
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn num_jobs(&self) -> usize {
        self.jobs.len()
    }

    pub fn num_skills(&self) -> usize {
        self.skills.len()
    }

    pub fn demand(&self, job: usize, skill: usize) -> SkillDemand {
        self.jobs[job].demands[skill]
    }

    pub fn weight(&self, job: usize) -> f64 {
        self.jobs[job].weight
    }

    /// Sum of the weights as supplied. Multiplying a normalized objective by
    /// this gives the objective under the original weights.
    pub fn weight_total(&self) -> f64 {
        self.weight_total
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn skill_index(&self, id: &str) -> Option<usize> {
        self.skills.iter().position(|s| s.id == id)
    }

    pub fn job_index(&self, id: &str) -> Option<usize> {
        self.jobs.iter().position(|j| j.id == id)
    }

    pub fn workforce(&self) -> Vec<u32> {
        self.skills.iter().map(|s| s.available).collect()
    }

    fn check_skill(&self, skill: usize) -> Result<(), ModelError> {
        if skill < self.skills.len() {
            Ok(())
        } else {
            Err(ModelError::UnknownSkill(skill))
        }
    }

    /// Jobs that require `skill`, in job order.
    pub fn jobs_requiring(&self, skill: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.jobs.len()).filter(move |&m| self.jobs[m].demands[skill].is_required())
    }

    /// All required (job, skill) pairs in (job, skill) order.
    pub fn operations(&self) -> impl Iterator<Item = Operation> + '_ {
        (0..self.jobs.len()).flat_map(move |m| {
            (0..self.skills.len())
                .filter(move |&k| self.jobs[m].demands[k].is_required())
                .map(move |k| Operation { job: m, skill: k })
        })
    }

    /// Total man-hours `W_k` the jobs need from `skill`.
    pub fn total_workload(&self, skill: usize) -> Result<u64, ModelError> {
        self.check_skill(skill)?;
        Ok(self.jobs.iter().map(|j| j.demands[skill].workload()).sum())
    }

    /// Number of required operations, overall and per skill.
    pub fn op_count(&self) -> OpCount {
        let per_skill: Vec<usize> = (0..self.skills.len())
            .map(|k| self.jobs_requiring(k).count())
            .collect();
        OpCount {
            total: per_skill.iter().sum(),
            per_skill,
        }
    }

    /// Same jobs with a different headcount per skill, revalidated.
    pub fn with_workforce(&self, workforce: &[u32]) -> Result<Instance, ModelError> {
        if workforce.len() != self.skills.len() {
            return Err(ModelError::WorkforceLength {
                expected: self.skills.len(),
                got: workforce.len(),
            });
        }
        let mut raw = self.to_raw();
        for (s, &b) in raw.skills.iter_mut().zip(workforce) {
            s.available = b;
        }
        build_instance(&raw)
    }

    /// Raw description with the original weights; rebuilding it yields an
    /// equal instance.
    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            horizon: self.horizon(),
            skills: self
                .skills
                .iter()
                .map(|s| RawSkill {
                    id: s.id.clone(),
                    available: s.available,
                })
                .collect(),
            jobs: self
                .jobs
                .iter()
                .map(|j| RawJob {
                    id: j.id.clone(),
                    weight: j.raw_weight,
                    demands: j
                        .demands
                        .iter()
                        .enumerate()
                        .filter(|(_, d)| d.is_required())
                        .map(|(k, d)| RawDemand {
                            skill: self.skills[k].id.clone(),
                            duration: d.duration,
                            crew: d.crew,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleStatus {
    /// Every required operation starts and ends inside the horizon.
    Complete,
    /// Listed operations are unplaced, or (when every start is present)
    /// finish after the horizon.
    Overflow(Vec<Operation>),
    /// Some required operation has no start.
    Partial,
}

/// Start instant per (job, skill). `None` means unscheduled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    starts: Vec<Vec<Option<u32>>>,
    status: ScheduleStatus,
}

impl Schedule {
    /// Builds a schedule from a `[job][skill]` start matrix and derives its
    /// status.
    pub fn from_starts(instance: &Instance, starts: Vec<Vec<Option<u32>>>) -> Self {
        let status = derive_status(instance, &starts);
        Self { starts, status }
    }

    /// Builds a schedule from `(job, skill, start)` triples.
    pub fn from_triples(instance: &Instance, triples: &[(usize, usize, u32)]) -> Self {
        let mut starts = vec![vec![None; instance.num_skills()]; instance.num_jobs()];
        for &(m, k, s) in triples {
            starts[m][k] = Some(s);
        }
        Self::from_starts(instance, starts)
    }

    pub fn empty(instance: &Instance) -> Self {
        Self::from_starts(
            instance,
            vec![vec![None; instance.num_skills()]; instance.num_jobs()],
        )
    }

    pub(crate) fn with_status(starts: Vec<Vec<Option<u32>>>, status: ScheduleStatus) -> Self {
        Self { starts, status }
    }

    pub fn start(&self, job: usize, skill: usize) -> Option<u32> {
        self.starts
            .get(job)
            .and_then(|row| row.get(skill))
            .copied()
            .flatten()
    }

    pub fn starts(&self) -> &[Vec<Option<u32>>] {
        &self.starts
    }

    pub fn status(&self) -> &ScheduleStatus {
        &self.status
    }

    pub fn is_complete(&self) -> bool {
        self.status == ScheduleStatus::Complete
    }

    /// Derived indicator: operation started somewhere within `[0, t)`.
    pub fn started_before(&self, job: usize, skill: usize, t: u32) -> bool {
        self.start(job, skill).is_some_and(|s| s < t)
    }
}

fn derive_status(instance: &Instance, starts: &[Vec<Option<u32>>]) -> ScheduleStatus {
    let t_max = instance.horizon();
    let mut late = Vec::new();
    for op in instance.operations() {
        let start = starts.get(op.job).and_then(|r| r.get(op.skill)).copied().flatten();
        match start {
            None => return ScheduleStatus::Partial,
            Some(s) => {
                if u64::from(s) + u64::from(instance.demand(op.job, op.skill).duration)
                    > u64::from(t_max)
                {
                    late.push(op);
                }
            }
        }
    }
    if late.is_empty() {
        ScheduleStatus::Complete
    } else {
        ScheduleStatus::Overflow(late)
    }
}

/// Completion times and the objective of a fully started schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveBreakdown {
    /// `c_mk = start + p_mk` for required pairs.
    pub completion: Vec<Vec<Option<u32>>>,
    /// `phi_m = max_k c_mk`.
    pub phi: Vec<u32>,
    /// `Z = sum_m w_m phi_m` with normalized weights.
    pub z: f64,
    /// `Z_k = Q_k + sum_m w_m start_mk`.
    pub z_by_skill: Vec<f64>,
    /// Constant part `Q_k = sum_m w_m p_mk`.
    pub constant_by_skill: Vec<f64>,
}

impl ObjectiveBreakdown {
    /// Objective under the weights as supplied.
    pub fn unit_z(&self, instance: &Instance) -> f64 {
        self.z * instance.weight_total()
    }
}

/// TWCT of a schedule in which every required operation has a start.
///
/// Starts past the horizon are accepted; [`check_schedule`] reports them.
pub fn objective(instance: &Instance, schedule: &Schedule) -> Result<ObjectiveBreakdown, ModelError> {
    let (nj, nk) = (instance.num_jobs(), instance.num_skills());
    let mut completion = vec![vec![None; nk]; nj];
    let mut phi = vec![0u32; nj];
    let mut z_by_skill = vec![0.0; nk];
    let mut constant_by_skill = vec![0.0; nk];
    for op in instance.operations() {
        let Some(s) = schedule.start(op.job, op.skill) else {
            return Err(ModelError::IncompleteSchedule {
                job: instance.jobs[op.job].id.clone(),
                skill: instance.skills[op.skill].id.clone(),
            });
        };
        let p = instance.demand(op.job, op.skill).duration;
        let w = instance.weight(op.job);
        let c = s + p;
        completion[op.job][op.skill] = Some(c);
        phi[op.job] = phi[op.job].max(c);
        constant_by_skill[op.skill] += w * f64::from(p);
        z_by_skill[op.skill] += w * f64::from(s);
    }
    for (zk, q) in z_by_skill.iter_mut().zip(&constant_by_skill) {
        *zk += q;
    }
    let z = phi
        .iter()
        .enumerate()
        .map(|(m, &f)| instance.weight(m) * f64::from(f))
        .sum();
    Ok(ObjectiveBreakdown {
        completion,
        phi,
        z,
        z_by_skill,
        constant_by_skill,
    })
}

/// Technicians of `skill` busy in each unit `t = 1..=T` (index `t - 1`).
/// Unscheduled operations contribute nothing; work past `T` is dropped.
pub fn headcount_profile(
    instance: &Instance,
    schedule: &Schedule,
    skill: usize,
) -> Result<Vec<u32>, ModelError> {
    instance.check_skill(skill)?;
    let horizon = instance.horizon() as usize;
    let mut usage = vec![0u32; horizon];
    for m in instance.jobs_requiring(skill) {
        let Some(s) = schedule.start(m, skill) else {
            continue;
        };
        let d = instance.demand(m, skill);
        let from = s as usize;
        let to = (from + d.duration as usize).min(horizon);
        for u in usage.iter_mut().take(to).skip(from) {
            *u += d.crew;
        }
    }
    Ok(usage)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MissingStart(Operation),
    /// A start was given for a pair the job does not require.
    UnexpectedStart(Operation),
    ExceedsHorizon {
        op: Operation,
        completion: u64,
    },
    OverCapacity {
        skill: usize,
        unit: u32,
        usage: u32,
        available: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every way the schedule breaks the start, horizon and per-unit headcount
/// constraints. An empty report means the schedule is feasible.
pub fn check_schedule(instance: &Instance, schedule: &Schedule) -> FeasibilityReport {
    let mut violations = Vec::new();
    let horizon = u64::from(instance.horizon());
    for m in 0..instance.num_jobs() {
        for k in 0..instance.num_skills() {
            let op = Operation { job: m, skill: k };
            let d = instance.demand(m, k);
            match (d.is_required(), schedule.start(m, k)) {
                (true, None) => violations.push(Violation::MissingStart(op)),
                (false, Some(_)) => violations.push(Violation::UnexpectedStart(op)),
                (true, Some(s)) => {
                    let completion = u64::from(s) + u64::from(d.duration);
                    if completion > horizon {
                        violations.push(Violation::ExceedsHorizon { op, completion });
                    }
                }
                (false, None) => {}
            }
        }
    }
    for k in 0..instance.num_skills() {
        let available = instance.skills[k].available;
        let usage = headcount_profile(instance, schedule, k).expect("skill index in range");
        for (i, &u) in usage.iter().enumerate() {
            if u > available {
                violations.push(Violation::OverCapacity {
                    skill: k,
                    unit: i as u32 + 1,
                    usage: u,
                    available,
                });
            }
        }
    }
    FeasibilityReport { violations }
}

/// Man-hours of `skill` consumed inside `[0, t)` by operations started
/// before `t`.
pub fn nested_load(instance: &Instance, schedule: &Schedule, skill: usize, t: u32) -> u64 {
    instance
        .jobs_requiring(skill)
        .filter_map(|m| {
            let s = schedule.start(m, skill)?;
            (s < t).then(|| {
                let d = instance.demand(m, skill);
                u64::from(d.duration.min(t - s)) * u64::from(d.crew)
            })
        })
        .sum()
}

/// For each `t = 1..=T`, whether the load of `[0, t)` fits `t * b_k`.
pub fn nested_capacity_check(
    instance: &Instance,
    schedule: &Schedule,
    skill: usize,
) -> Result<Vec<bool>, ModelError> {
    instance.check_skill(skill)?;
    let b = u64::from(instance.skills[skill].available);
    Ok((1..=instance.horizon())
        .map(|t| nested_load(instance, schedule, skill, t) <= u64::from(t) * b)
        .collect())
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn boundary_workload_equal_to_capacity_is_accepted() {
        let inst = build_instance(&raw(2, &[("k", 1)], &[("a", 1.0, &[("k", 2, 1)])])).unwrap();
        assert_eq!(inst.total_workload(0).unwrap(), 2);
        assert!(inst.warnings().is_empty());
    }

    #[test]
    fn workload_over_capacity_is_rejected() {
        let err = build_instance(&raw(
            2,
            &[("k", 1)],
            &[
                ("a", 1.0, &[("k", 1, 1)]),
                ("b", 1.0, &[("k", 1, 1)]),
                ("c", 1.0, &[("k", 1, 1)]),
            ],
        ))
        .unwrap_err();
        assert_eq!(
            err,
            ModelError::Feasibility {
                skill: "k".into(),
                workload: 3,
                capacity: 2
            }
        );
    }

    #[test]
    fn pair_weights_are_renormalized() {
        let inst = pair(5, 3);
        assert_eq!(inst.weight(0), 0.5);
        assert_eq!(inst.weight(1), 0.5);
        assert_eq!(inst.weight_total(), 2.0);
        assert_eq!(inst.warnings().len(), 1);
    }

    #[test]
    fn demand_errors() {
        let horizon = build_instance(&raw(0, &[("k", 1)], &[("a", 1.0, &[("k", 1, 1)])]));
        assert!(matches!(horizon, Err(ModelError::Horizon(0))));

        let long = build_instance(&raw(2, &[("k", 1)], &[("a", 1.0, &[("k", 3, 1)])]));
        assert!(matches!(
            long,
            Err(ModelError::Demand {
                issue: DemandIssue::DurationExceedsHorizon { duration: 3, horizon: 2 },
                ..
            })
        ));

        let no_crew = build_instance(&raw(4, &[("k", 1)], &[("a", 1.0, &[("k", 1, 0)])]));
        assert!(matches!(
            no_crew,
            Err(ModelError::Demand {
                issue: DemandIssue::MissingCrew,
                ..
            })
        ));

        let big_crew = build_instance(&raw(4, &[("k", 2)], &[("a", 1.0, &[("k", 1, 3)])]));
        assert!(matches!(
            big_crew,
            Err(ModelError::Demand {
                issue: DemandIssue::CrewExceedsAvailable { crew: 3, available: 2 },
                ..
            })
        ));

        let ambiguous = build_instance(&raw(
            4,
            &[("k", 2), ("l", 1)],
            &[("a", 1.0, &[("k", 1, 1), ("l", 0, 1)])],
        ));
        assert!(matches!(
            ambiguous,
            Err(ModelError::Demand {
                issue: DemandIssue::CrewWithoutDuration(1),
                ..
            })
        ));

        let nothing = build_instance(&raw(4, &[("k", 2)], &[("a", 1.0, &[])]));
        assert_eq!(nothing, Err(ModelError::NoRequirement("a".into())));

        let weight = build_instance(&raw(4, &[("k", 2)], &[("a", 0.0, &[("k", 1, 1)])]));
        assert!(matches!(weight, Err(ModelError::Weight { .. })));
    }

    #[test]
    fn validate_raw_collects_everything() {
        let errors = validate_raw(&raw(
            0,
            &[("k", 1), ("k", 1)],
            &[("a", -1.0, &[("z", 1, 1)])],
        ));
        assert!(errors.len() >= 4, "{errors:?}");
    }

    #[test]
    fn workload_examples() {
        let inst = pair(5, 3);
        assert_eq!(inst.total_workload(0).unwrap(), 7);
        assert_eq!(inst.total_workload(1), Err(ModelError::UnknownSkill(1)));

        let two = build_instance(&raw(
            6,
            &[("k", 2), ("l", 1)],
            &[("a", 1.0, &[("k", 3, 2)])],
        ))
        .unwrap();
        assert_eq!(two.total_workload(0).unwrap(), 6);
        assert_eq!(two.total_workload(1).unwrap(), 0);
    }

    #[test]
    fn op_count_examples() {
        assert_eq!(
            pair(5, 3).op_count(),
            OpCount {
                total: 2,
                per_skill: vec![2]
            }
        );
        let inst = build_instance(&raw(
            4,
            &[("s1", 1), ("s2", 1)],
            &[
                ("a", 1.0, &[("s1", 1, 1), ("s2", 1, 1)]),
                ("b", 1.0, &[("s2", 1, 1)]),
            ],
        ))
        .unwrap();
        assert_eq!(
            inst.op_count(),
            OpCount {
                total: 3,
                per_skill: vec![1, 2]
            }
        );
    }

    #[test]
    fn objective_examples() {
        let single = build_instance(&raw(2, &[("k", 1)], &[("a", 1.0, &[("k", 2, 1)])])).unwrap();
        let s = Schedule::from_triples(&single, &[(0, 0, 0)]);
        let obj = objective(&single, &s).unwrap();
        assert_eq!(obj.completion[0][0], Some(2));
        assert_eq!(obj.phi, vec![2]);
        assert_eq!(obj.z, 2.0);

        let inst = pair(5, 3);
        let s = Schedule::from_triples(&inst, &[(1, 0, 0), (0, 0, 2)]);
        let obj = objective(&inst, &s).unwrap();
        assert_eq!(obj.phi, vec![3, 2]);
        assert_eq!(obj.z, 2.5);
        assert_eq!(obj.unit_z(&inst), 5.0);
        assert_eq!(obj.constant_by_skill[0], 1.5);
        assert_eq!(obj.z_by_skill[0], 2.5);

        let s = Schedule::from_triples(&inst, &[(0, 0, 0), (1, 0, 1)]);
        assert_eq!(objective(&inst, &s).unwrap().unit_z(&inst), 4.0);

        let partial = Schedule::from_triples(&inst, &[(0, 0, 0)]);
        assert_eq!(*partial.status(), ScheduleStatus::Partial);
        assert!(matches!(
            objective(&inst, &partial),
            Err(ModelError::IncompleteSchedule { .. })
        ));
    }

    #[test]
    fn headcount_examples() {
        let one = build_instance(&raw(4, &[("k", 3)], &[("a", 1.0, &[("k", 2, 3)])])).unwrap();
        let s = Schedule::from_triples(&one, &[(0, 0, 1)]);
        assert_eq!(headcount_profile(&one, &s, 0).unwrap(), vec![0, 3, 3, 0]);
        assert_eq!(
            headcount_profile(&one, &Schedule::empty(&one), 0).unwrap(),
            vec![0, 0, 0, 0]
        );

        let inst = pair(5, 4);
        let s = Schedule::from_triples(&inst, &[(1, 0, 0), (0, 0, 2)]);
        assert_eq!(headcount_profile(&inst, &s, 0).unwrap(), vec![1, 1, 5, 0]);
    }

    #[test]
    fn check_schedule_examples() {
        let inst = pair(5, 3);
        let good = Schedule::from_triples(&inst, &[(1, 0, 0), (0, 0, 2)]);
        assert!(check_schedule(&inst, &good).is_feasible());
        assert!(good.is_complete());

        let clash = Schedule::from_triples(&inst, &[(1, 0, 0), (0, 0, 1)]);
        assert_eq!(
            check_schedule(&inst, &clash).violations,
            vec![Violation::OverCapacity {
                skill: 0,
                unit: 2,
                usage: 6,
                available: 5
            }]
        );

        let missing = Schedule::from_triples(&inst, &[(1, 0, 0)]);
        assert_eq!(
            check_schedule(&inst, &missing).violations,
            vec![Violation::MissingStart(Operation { job: 0, skill: 0 })]
        );

        let late = Schedule::from_triples(&inst, &[(1, 0, 2), (0, 0, 0)]);
        assert_eq!(
            *late.status(),
            ScheduleStatus::Overflow(vec![Operation { job: 1, skill: 0 }])
        );
        assert!(matches!(
            check_schedule(&inst, &late).violations[..],
            [Violation::ExceedsHorizon { completion: 4, .. }]
        ));
    }

    #[test]
    fn nested_capacity_examples() {
        let inst = pair(5, 3);
        let good = Schedule::from_triples(&inst, &[(1, 0, 0), (0, 0, 2)]);
        assert_eq!(nested_capacity_check(&inst, &good, 0).unwrap(), vec![true; 3]);
        assert_eq!(
            nested_capacity_check(&inst, &Schedule::empty(&inst), 0).unwrap(),
            vec![true; 3]
        );

        // Two (p=1, crew 1) jobs at 0 with one technician load unit 1 twice.
        let inst = build_instance(&raw(
            2,
            &[("k", 1)],
            &[("a", 1.0, &[("k", 1, 1)]), ("b", 1.0, &[("k", 1, 1)])],
        ))
        .unwrap();
        let s = Schedule::from_triples(&inst, &[(0, 0, 0), (1, 0, 0)]);
        assert_eq!(nested_load(&inst, &s, 0, 1), 2);
        assert_eq!(nested_capacity_check(&inst, &s, 0).unwrap(), vec![false, true]);
    }

    #[test]
    fn nested_check_accepts_per_unit_violation() {
        // b = 2: (p=2, crew 1) at 0 and (p=1, crew 2) at 1 use 3 technicians
        // in unit 2 but satisfy every nested prefix.
        let inst = build_instance(&raw(
            3,
            &[("k", 2)],
            &[("a", 1.0, &[("k", 2, 1)]), ("b", 1.0, &[("k", 1, 2)])],
        ))
        .unwrap();
        let s = Schedule::from_triples(&inst, &[(0, 0, 0), (1, 0, 1)]);
        assert_eq!(nested_capacity_check(&inst, &s, 0).unwrap(), vec![true; 3]);
        assert_eq!(
            check_schedule(&inst, &s).violations,
            vec![Violation::OverCapacity {
                skill: 0,
                unit: 2,
                usage: 3,
                available: 2
            }]
        );
    }

    #[test]
    fn raw_round_trip() {
        let inst = triple(5, 6);
        assert_eq!(build_instance(&inst.to_raw()).unwrap(), inst);
    }

    #[test]
    fn with_workforce_revalidates() {
        let inst = pair(5, 3);
        assert_eq!(inst.with_workforce(&[6]).unwrap().workforce(), vec![6]);
        assert!(matches!(
            inst.with_workforce(&[4]),
            Err(ModelError::Demand { .. })
        ));
        assert!(matches!(
            inst.with_workforce(&[5, 1]),
            Err(ModelError::WorkforceLength { .. })
        ));
    }
}
