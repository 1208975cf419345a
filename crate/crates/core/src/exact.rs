//! Depth-first branch-and-bound over start instants, for desk-scale
//! instances.
//!
//! Operations are branched jobs by non-increasing weight, then skills by
//! non-increasing workload within a job; start instants are tried earliest
//! first. A node is pruned when some unplaced operation has no feasible
//! start left, or when its completion bound cannot beat the incumbent. Only
//! strict improvements replace the incumbent, so among equal-valued optima
//! the one found first (lexicographically smallest start vector in branching
//! order) is returned.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering};
use core::time::Duration;

use crate::clock::{NoClock, Stopwatch};
use crate::edm::HeadcountProfile;
use crate::model::{Instance, Operation, Schedule};

/// Improvements smaller than this do not replace the incumbent.
pub const VALUE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// Hitting a limit is an error: the caller wants a proof.
    #[default]
    ProveOptimal,
    /// Hitting a limit returns the incumbent.
    BestEffort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_nodes: u64,
    pub max_time: Option<Duration>,
    pub mode: SearchMode,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_nodes: 10_000_000,
            max_time: None,
            mode: SearchMode::ProveOptimal,
        }
    }
}

impl SearchLimits {
    pub fn new(max_nodes: u64, max_time: Option<Duration>, mode: SearchMode) -> Result<Self, ExactError> {
        if max_nodes == 0 {
            return Err(ExactError::InvalidLimits);
        }
        Ok(Self {
            max_nodes,
            max_time,
            mode,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proof {
    Optimal,
    BestFound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incumbent {
    pub nodes: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub schedule: Schedule,
    /// Normalized-weight objective of `schedule` (TWCT, or `Z_k` for a
    /// single-skill search).
    pub value: f64,
    pub proof: Proof,
    pub nodes: u64,
    pub incumbents: Vec<Incumbent>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExactError {
    #[error("search limits must allow at least one node")]
    InvalidLimits,
    #[error("unknown skill index {0}")]
    UnknownSkill(usize),
    #[error("no feasible schedule exists ({nodes} nodes searched)")]
    NoFeasibleSchedule { nodes: u64 },
    #[error("search stopped after {nodes} nodes without a feasible schedule")]
    LimitsExceededWithoutIncumbent { nodes: u64 },
    #[error("search stopped after {nodes} nodes before proving optimality (best {best})")]
    NotProven { nodes: u64, best: f64 },
}

/// External controls checked between node expansions.
#[derive(Clone, Copy)]
pub struct SearchControl<'a> {
    pub clock: &'a dyn Stopwatch,
    pub cancel: Option<&'a AtomicBool>,
}

impl Default for SearchControl<'_> {
    fn default() -> Self {
        Self {
            clock: &NoClock,
            cancel: None,
        }
    }
}

/// Optimal schedule for the full problem.
pub fn exact_solve(instance: &Instance, limits: &SearchLimits) -> Result<ExactResult, ExactError> {
    exact_solve_with(instance, limits, SearchControl::default())
}

pub fn exact_solve_with(
    instance: &Instance,
    limits: &SearchLimits,
    control: SearchControl<'_>,
) -> Result<ExactResult, ExactError> {
    let ops: Vec<Operation> = instance.operations().collect();
    Search::new(instance, ops, limits, control).run()
}

/// Optimal schedule of the single-skill subproblem; `value` is `Z_k*`.
pub fn exact_single_skill(
    instance: &Instance,
    skill: usize,
    limits: &SearchLimits,
) -> Result<ExactResult, ExactError> {
    exact_single_skill_with(instance, skill, limits, SearchControl::default())
}

pub fn exact_single_skill_with(
    instance: &Instance,
    skill: usize,
    limits: &SearchLimits,
    control: SearchControl<'_>,
) -> Result<ExactResult, ExactError> {
    if skill >= instance.num_skills() {
        return Err(ExactError::UnknownSkill(skill));
    }
    let ops: Vec<Operation> = instance
        .jobs_requiring(skill)
        .map(|job| Operation { job, skill })
        .collect();
    Search::new(instance, ops, limits, control).run()
}

/// Size of the unpruned search tree: product over operations of the number
/// of start instants that keep them inside the horizon.
pub fn estimated_search_size(instance: &Instance) -> f64 {
    let t = f64::from(instance.horizon());
    instance
        .operations()
        .map(|op| t - f64::from(instance.demand(op.job, op.skill).duration) + 1.0)
        .product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum GapError {
    #[error("reference value {0} must be positive")]
    NonpositiveReference(OrderedValue),
}

/// `f64` wrapper so the error can be `Eq`.
#[derive(Debug, Clone, Copy)]
pub struct OrderedValue(pub f64);

impl PartialEq for OrderedValue {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for OrderedValue {}

impl core::fmt::Display for OrderedValue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        self.0.fmt(f)
    }
}

/// Relative gap in percent, `100 * (heuristic - reference) / reference`.
pub fn gap_percent(heuristic: f64, reference: f64) -> Result<f64, GapError> {
    if reference.is_nan() || reference <= 0.0 {
        return Err(GapError::NonpositiveReference(OrderedValue(reference)));
    }
    Ok(100.0 * (heuristic - reference) / reference)
}

/// Rounds half away from zero to two decimals, as gaps are tabulated.
pub fn round2(x: f64) -> f64 {
    libm::round(x * 100.0) / 100.0
}

/// Lower bound on the TWCT of every completion of a partial schedule: fixed
/// jobs contribute their completion, and every other operation is assumed
/// to finish at its earliest feasible completion given the fixed starts.
///
/// `None` when the fixed starts already overload a skill or leave some
/// operation with no feasible start.
pub fn completion_lower_bound(instance: &Instance, partial: &Schedule) -> Option<f64> {
    let ops: Vec<Operation> = instance.operations().collect();
    let mut profiles = empty_profiles(instance);
    let mut starts = vec![None; ops.len()];
    for (i, op) in ops.iter().enumerate() {
        if let Some(s) = partial.start(op.job, op.skill) {
            let d = instance.demand(op.job, op.skill);
            let available = instance.skills()[op.skill].available;
            if s + d.duration > instance.horizon()
                || !profiles[op.skill].fits(s, d.duration, d.crew, available)
            {
                return None;
            }
            profiles[op.skill].occupy(s, d.duration, d.crew);
            starts[i] = Some(s);
        }
    }
    bound(instance, &ops, &starts, &profiles)
}

fn empty_profiles(instance: &Instance) -> Vec<HeadcountProfile> {
    (0..instance.num_skills())
        .map(|_| HeadcountProfile::new(instance.horizon() as usize))
        .collect()
}

fn earliest_completion(
    instance: &Instance,
    op: Operation,
    profile: &HeadcountProfile,
) -> Option<u32> {
    let d = instance.demand(op.job, op.skill);
    let available = instance.skills()[op.skill].available;
    (0..=instance.horizon() - d.duration)
        .find(|&s| profile.fits(s, d.duration, d.crew, available))
        .map(|s| s + d.duration)
}

fn bound(
    instance: &Instance,
    ops: &[Operation],
    starts: &[Option<u32>],
    profiles: &[HeadcountProfile],
) -> Option<f64> {
    let mut phi = vec![0u32; instance.num_jobs()];
    let mut involved = vec![false; instance.num_jobs()];
    for (op, start) in ops.iter().zip(starts) {
        involved[op.job] = true;
        let c = match start {
            Some(s) => s + instance.demand(op.job, op.skill).duration,
            None => earliest_completion(instance, *op, &profiles[op.skill])?,
        };
        phi[op.job] = phi[op.job].max(c);
    }
    Some(
        phi.iter()
            .enumerate()
            .filter(|&(m, _)| involved[m])
            .map(|(m, &c)| instance.weight(m) * f64::from(c))
            .sum(),
    )
}

enum Stop {
    Exhausted,
    Limit,
}

struct Search<'a> {
    instance: &'a Instance,
    ops: Vec<Operation>,
    limits: &'a SearchLimits,
    control: SearchControl<'a>,
    started_at: Duration,
    profiles: Vec<HeadcountProfile>,
    starts: Vec<Option<u32>>,
    best: Option<(f64, Vec<u32>)>,
    nodes: u64,
    incumbents: Vec<Incumbent>,
}

impl<'a> Search<'a> {
    fn new(
        instance: &'a Instance,
        mut ops: Vec<Operation>,
        limits: &'a SearchLimits,
        control: SearchControl<'a>,
    ) -> Self {
        ops.sort_by(|a, b| {
            let wa = instance.weight(a.job);
            let wb = instance.weight(b.job);
            wb.partial_cmp(&wa)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.job.cmp(&b.job))
                .then_with(|| {
                    let la = instance.demand(a.job, a.skill).workload();
                    let lb = instance.demand(b.job, b.skill).workload();
                    lb.cmp(&la)
                })
                .then(a.skill.cmp(&b.skill))
        });
        let n = ops.len();
        Self {
            instance,
            ops,
            limits,
            started_at: control.clock.now(),
            control,
            profiles: empty_profiles(instance),
            starts: vec![None; n],
            best: None,
            nodes: 0,
            incumbents: Vec::new(),
        }
    }

    fn out_of_budget(&self) -> bool {
        if self.nodes >= self.limits.max_nodes {
            return true;
        }
        if !self.nodes.is_multiple_of(256) {
            return false;
        }
        if let Some(flag) = self.control.cancel {
            if flag.load(Ordering::Relaxed) {
                return true;
            }
        }
        match self.limits.max_time {
            Some(limit) => self.control.clock.now().saturating_sub(self.started_at) >= limit,
            None => false,
        }
    }

    fn run(mut self) -> Result<ExactResult, ExactError> {
        let outcome = self.expand(0);
        let proof = match outcome {
            Stop::Exhausted => Proof::Optimal,
            Stop::Limit => Proof::BestFound,
        };
        let Some((value, starts)) = self.best else {
            return Err(match outcome {
                Stop::Exhausted => ExactError::NoFeasibleSchedule { nodes: self.nodes },
                Stop::Limit => ExactError::LimitsExceededWithoutIncumbent { nodes: self.nodes },
            });
        };
        if proof == Proof::BestFound && self.limits.mode == SearchMode::ProveOptimal {
            return Err(ExactError::NotProven {
                nodes: self.nodes,
                best: value,
            });
        }
        let triples: Vec<(usize, usize, u32)> = self
            .ops
            .iter()
            .zip(&starts)
            .map(|(op, &s)| (op.job, op.skill, s))
            .collect();
        Ok(ExactResult {
            schedule: Schedule::from_triples(self.instance, &triples),
            value,
            proof,
            nodes: self.nodes,
            incumbents: self.incumbents,
        })
    }

    fn expand(&mut self, depth: usize) -> Stop {
        if self.out_of_budget() {
            return Stop::Limit;
        }
        self.nodes += 1;

        let Some(lb) = bound(self.instance, &self.ops, &self.starts, &self.profiles) else {
            return Stop::Exhausted;
        };
        if let Some((best, _)) = &self.best {
            if lb >= best - VALUE_TOLERANCE {
                return Stop::Exhausted;
            }
        }
        if depth == self.ops.len() {
            // Every start is fixed, so the bound is the exact value.
            let starts = self.starts.iter().map(|s| s.expect("leaf")).collect();
            self.best = Some((lb, starts));
            self.incumbents.push(Incumbent {
                nodes: self.nodes,
                value: lb,
            });
            return Stop::Exhausted;
        }

        let op = self.ops[depth];
        let d = self.instance.demand(op.job, op.skill);
        let available = self.instance.skills()[op.skill].available;
        for s in 0..=self.instance.horizon() - d.duration {
            if !self.profiles[op.skill].fits(s, d.duration, d.crew, available) {
                continue;
            }
            self.profiles[op.skill].occupy(s, d.duration, d.crew);
            self.starts[depth] = Some(s);
            let outcome = self.expand(depth + 1);
            self.starts[depth] = None;
            self.profiles[op.skill].release(s, d.duration, d.crew);
            if let Stop::Limit = outcome {
                return Stop::Limit;
            }
        }
        Stop::Exhausted
    }
}
