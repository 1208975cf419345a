//! Extended Dantzig Method: a per-skill greedy over nested knapsacks.
//!
//! For one skill with `b` technicians the interval `[0, t)` is a knapsack of
//! `t * b` man-hours. Iteration `t` computes what is left of that knapsack
//! after the work already started, ranks the unstarted jobs by efficacy,
//! packs the longest prefix that fits, then tops up the leftover with the
//! smallest rejected jobs. Every packed job starts at instant `t - 1`.
//!
//! Packing alone only bounds cumulative man-hours, which does not stop two
//! jobs overlapping above the headcount in a single unit. In
//! [`CapacityMode::HeadcountGated`] each packed job must also fit the per-unit
//! headcount profile before it starts; [`CapacityMode::PaperLiteral`] skips
//! that gate.

use alloc::vec;
use alloc::vec::Vec;

use crate::knapsack::{residual_fill, KnapsackItem, OrderingRule};
use crate::model::{
    objective, Instance, ModelError, ObjectiveBreakdown, Operation, Schedule, ScheduleStatus,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CapacityMode {
    /// A packed job starts only if the headcount stays within `b` in every
    /// unit it occupies.
    #[default]
    HeadcountGated,
    /// A packed job starts whenever it finishes inside the horizon.
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct EdmConfig {
    pub ordering: OrderingRule,
    pub capacity_mode: CapacityMode,
    /// Keep iterating past the horizon instead of reporting unplaced jobs.
    pub allow_overflow: bool,
}

/// Per-unit technician usage of one skill. Unit `u` (1-based) is index `u-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadcountProfile {
    usage: Vec<u32>,
}

impl HeadcountProfile {
    pub fn new(units: usize) -> Self {
        Self {
            usage: vec![0; units],
        }
    }

    pub fn usage(&self) -> &[u32] {
        &self.usage
    }

    /// Whether `crew` more technicians fit in units `start+1..=start+duration`
    /// without exceeding `available`. Units beyond the stored range are idle.
    pub fn fits(&self, start: u32, duration: u32, crew: u32, available: u32) -> bool {
        let from = start as usize;
        let to = from + duration as usize;
        self.usage
            .iter()
            .take(to)
            .skip(from)
            .all(|&u| u + crew <= available)
    }

    pub fn occupy(&mut self, start: u32, duration: u32, crew: u32) {
        let to = start as usize + duration as usize;
        if to > self.usage.len() {
            self.usage.resize(to, 0);
        }
        for u in &mut self.usage[start as usize..to] {
            *u += crew;
        }
    }

    pub fn release(&mut self, start: u32, duration: u32, crew: u32) {
        let to = start as usize + duration as usize;
        for u in &mut self.usage[start as usize..to] {
            *u -= crew;
        }
    }
}

/// Work already started on one skill: `(start, duration, crew)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StartedWork {
    pub start: u32,
    pub duration: u32,
    pub crew: u32,
}

/// Residual capacity of knapsack `t`:
/// `t * b - sum over starts s < t of min(p, t - s) * crew`.
pub fn knapsack_capacity(started: &[StartedWork], t: u32, available: u32) -> i64 {
    let used: u64 = started
        .iter()
        .filter(|w| w.start < t)
        .map(|w| u64::from(w.duration.min(t - w.start)) * u64::from(w.crew))
        .sum();
    i64::from(t) * i64::from(available) - used as i64
}

/// One iteration of the procedure for one skill.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub t: u32,
    /// Knapsack capacity `C_t` at iteration entry.
    pub capacity: i64,
    /// Unstarted jobs in efficacy order.
    pub psi: Vec<usize>,
    /// Length of the packed prefix of `psi`.
    pub m0: usize,
    /// Capacity left after the prefix, `theta_t`.
    pub theta: i64,
    /// Jobs after the prefix cut, `R_t`.
    pub rejected: Vec<usize>,
    /// Rejected jobs chosen to fill `theta_t`, `nu_t`.
    pub residual_fill: Vec<usize>,
    /// Packed jobs that failed the admission gate.
    pub gated: Vec<usize>,
    /// Jobs started at `t - 1`.
    pub started: Vec<usize>,
    /// Weight of all jobs started within `[0, t)`, `v(t)`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdmTrace {
    pub skill: usize,
    pub iterations: Vec<IterationRecord>,
}

/// Result of the procedure on one skill.
#[derive(Debug, Clone, PartialEq)]
pub struct SkillRun {
    pub skill: usize,
    /// Start per job; `None` for jobs not requiring the skill or unplaced.
    pub starts: Vec<Option<u32>>,
    /// Jobs never started inside the horizon.
    pub unplaced: Vec<usize>,
    /// Jobs finishing after the horizon (only with `allow_overflow`).
    pub late: Vec<usize>,
    /// Weighted completion `Z_k` over placed jobs.
    pub z_k: f64,
    pub trace: EdmTrace,
}

impl SkillRun {
    pub fn is_complete(&self) -> bool {
        self.unplaced.is_empty() && self.late.is_empty()
    }
}

struct Gate<'a> {
    mode: CapacityMode,
    profile: &'a mut HeadcountProfile,
    available: u32,
    horizon: Option<u32>,
}

impl Gate<'_> {
    fn try_start(&mut self, start: u32, duration: u32, crew: u32) -> bool {
        if let Some(h) = self.horizon {
            if start + duration > h {
                return false;
            }
        }
        if self.mode == CapacityMode::HeadcountGated
            && !self.profile.fits(start, duration, crew, self.available)
        {
            return false;
        }
        self.profile.occupy(start, duration, crew);
        true
    }
}

/// Runs the procedure on a single skill.
pub fn edm_single_skill(
    instance: &Instance,
    skill: usize,
    config: &EdmConfig,
) -> Result<SkillRun, ModelError> {
    if skill >= instance.num_skills() {
        return Err(ModelError::UnknownSkill(skill));
    }
    let horizon = instance.horizon();
    let available = instance.skills()[skill].available;
    let items: Vec<KnapsackItem> = instance
        .jobs_requiring(skill)
        .map(|m| {
            let d = instance.demand(m, skill);
            KnapsackItem {
                job: m,
                value: instance.weight(m),
                duration: d.duration,
                crew: d.crew,
            }
        })
        .collect();

    let mut starts = vec![None; instance.num_jobs()];
    let mut started_work: Vec<StartedWork> = Vec::with_capacity(items.len());
    let mut pending: Vec<KnapsackItem> = items.clone();
    let mut profile = HeadcountProfile::new(horizon as usize);
    let mut iterations = Vec::new();
    let mut value = 0.0;

    // Past the horizon the loop runs only with allow_overflow; it ends once
    // capacity has grown past all remaining work.
    let total_duration: u32 = items.iter().map(|i| i.duration).sum();
    let last_t = if config.allow_overflow {
        horizon + total_duration + 1
    } else {
        horizon
    };

    for t in 1..=last_t {
        if pending.is_empty() {
            break;
        }
        let capacity = knapsack_capacity(&started_work, t, available);
        let rule = config.ordering;
        pending.sort_by(|a, b| rule.compare(a, b));
        let psi: Vec<usize> = pending.iter().map(|i| i.job).collect();

        let mut gate = Gate {
            mode: config.capacity_mode,
            profile: &mut profile,
            available,
            horizon: (t <= horizon).then_some(horizon),
        };
        let start = t - 1;
        let mut remaining = capacity;
        let mut admitted = Vec::new();
        let mut gated = Vec::new();

        let mut m0 = pending.len();
        for (i, item) in pending.iter().enumerate() {
            let size = item.size() as i64;
            if size > remaining {
                m0 = i;
                break;
            }
            if gate.try_start(start, item.duration, item.crew) {
                remaining -= size;
                admitted.push(i);
            } else {
                gated.push(item.job);
            }
        }
        let theta = remaining;

        let rejected_items = &pending[m0..];
        let fill = residual_fill(rejected_items, theta.max(0) as u64);
        for &r in &fill {
            let item = &rejected_items[r];
            if gate.try_start(start, item.duration, item.crew) {
                admitted.push(m0 + r);
            } else {
                gated.push(item.job);
            }
        }

        let rejected: Vec<usize> = rejected_items.iter().map(|i| i.job).collect();
        let fill_jobs: Vec<usize> = fill.iter().map(|&r| rejected_items[r].job).collect();
        admitted.sort_unstable();
        let mut started = Vec::with_capacity(admitted.len());
        for &i in admitted.iter().rev() {
            let item = pending.remove(i);
            starts[item.job] = Some(start);
            started_work.push(StartedWork {
                start,
                duration: item.duration,
                crew: item.crew,
            });
            value += item.value;
            started.push(item.job);
        }
        started.reverse();

        iterations.push(IterationRecord {
            t,
            capacity,
            psi,
            m0,
            theta,
            rejected,
            residual_fill: fill_jobs,
            gated,
            started,
            value,
        });
    }

    let mut unplaced: Vec<usize> = pending.iter().map(|i| i.job).collect();
    unplaced.sort_unstable();
    let late: Vec<usize> = items
        .iter()
        .filter(|i| starts[i.job].is_some_and(|s| s + i.duration > horizon))
        .map(|i| i.job)
        .collect();
    let z_k = items
        .iter()
        .filter_map(|i| starts[i.job].map(|s| i.value * f64::from(s + i.duration)))
        .sum();

    Ok(SkillRun {
        skill,
        starts,
        unplaced,
        late,
        z_k,
        trace: EdmTrace { skill, iterations },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdmSolution {
    pub schedule: Schedule,
    /// Present when every required operation has a start.
    pub objective: Option<ObjectiveBreakdown>,
    pub runs: Vec<SkillRun>,
}

impl EdmSolution {
    pub fn is_complete(&self) -> bool {
        self.schedule.is_complete()
    }
}

/// Runs every skill independently and merges the partial schedules.
pub fn edm_solve(instance: &Instance, config: &EdmConfig) -> EdmSolution {
    let runs: Vec<SkillRun> = (0..instance.num_skills())
        .map(|k| edm_single_skill(instance, k, config).expect("skill index in range"))
        .collect();
    merge_runs(instance, runs)
}

/// Merges per-skill runs (one per skill, in skill order) into a schedule.
pub fn merge_runs(instance: &Instance, runs: Vec<SkillRun>) -> EdmSolution {
    let mut starts = vec![vec![None; instance.num_skills()]; instance.num_jobs()];
    let mut unplaced = Vec::new();
    let mut late = Vec::new();
    for run in &runs {
        for (m, s) in run.starts.iter().enumerate() {
            starts[m][run.skill] = *s;
        }
        unplaced.extend(run.unplaced.iter().map(|&job| Operation {
            job,
            skill: run.skill,
        }));
        late.extend(run.late.iter().map(|&job| Operation {
            job,
            skill: run.skill,
        }));
    }
    unplaced.sort_unstable();
    late.sort_unstable();
    let status = if !unplaced.is_empty() {
        ScheduleStatus::Overflow(unplaced)
    } else if !late.is_empty() {
        ScheduleStatus::Overflow(late)
    } else {
        ScheduleStatus::Complete
    };
    let schedule = Schedule::with_status(starts, status);
    let objective = objective(instance, &schedule).ok();
    EdmSolution {
        schedule,
        objective,
        runs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum BoundError {
    #[error("no per-skill values given")]
    EmptyInput,
}

/// `max_k Z_k*`, a lower bound on the optimal TWCT when each `Z_k*` is the
/// optimum of the single-skill subproblem.
pub fn skill_lower_bound(values: &[f64]) -> Result<f64, BoundError> {
    values
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or(BoundError::EmptyInput)
}
