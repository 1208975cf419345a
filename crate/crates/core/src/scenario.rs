//! Workforce sensitivity: bounds, `A_alpha` levels, per-skill allocation and
//! scenario sweeps.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::time::Duration;

use crate::clock::Stopwatch;
use crate::edm::{edm_solve, EdmConfig};
use crate::exact::{
    exact_single_skill_with, exact_solve_with, gap_percent, Proof, SearchControl, SearchLimits,
};
use crate::model::Instance;

/// Workforce levels of the standard sensitivity study.
pub const ALPHA_GRID: [f64; 7] = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5];

// Slack for ceil() on interpolated integers such as 0.7 * 10 + 0.3 * 10.
const CEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("alpha {0} outside (0, 1]")]
    AlphaOutOfRange(f64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkforceBounds {
    /// `sum_k max_m crew_mk`: the smallest workforce that can staff every job.
    pub w_min: u64,
    /// `sum_k sum_m crew_mk`: enough to run every operation at once.
    pub w_max: u64,
    pub per_skill_min: Vec<u32>,
    pub per_skill_max: Vec<u64>,
}

pub fn workforce_bounds(instance: &Instance) -> WorkforceBounds {
    let per_skill_min: Vec<u32> = (0..instance.num_skills())
        .map(|k| {
            instance
                .jobs_requiring(k)
                .map(|m| instance.demand(m, k).crew)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let per_skill_max: Vec<u64> = (0..instance.num_skills())
        .map(|k| {
            instance
                .jobs_requiring(k)
                .map(|m| u64::from(instance.demand(m, k).crew))
                .sum()
        })
        .collect();
    WorkforceBounds {
        w_min: per_skill_min.iter().map(|&x| u64::from(x)).sum(),
        w_max: per_skill_max.iter().sum(),
        per_skill_min,
        per_skill_max,
    }
}

fn check_alpha(alpha: f64) -> Result<(), ScenarioError> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(ScenarioError::AlphaOutOfRange(alpha))
    }
}

fn interpolate_ceil(low: f64, high: f64, alpha: f64) -> u64 {
    libm::ceil((1.0 - alpha) * low + alpha * high - CEIL_SLACK) as u64
}

/// `A_alpha = ceil((1 - alpha) W_min + alpha W_max)`.
pub fn alpha_workforce(bounds: &WorkforceBounds, alpha: f64) -> Result<u64, ScenarioError> {
    check_alpha(alpha)?;
    Ok(interpolate_ceil(
        bounds.w_min as f64,
        bounds.w_max as f64,
        alpha,
    ))
}

/// Per-skill headcounts for level `alpha`: the same interpolation applied to
/// each skill's own bounds. The result sums to at least `A_alpha` and never
/// drops below the largest crew of a skill.
pub fn allocate_per_skill(instance: &Instance, alpha: f64) -> Result<Vec<u32>, ScenarioError> {
    check_alpha(alpha)?;
    let bounds = workforce_bounds(instance);
    Ok(bounds
        .per_skill_min
        .iter()
        .zip(&bounds.per_skill_max)
        .map(|(&low, &high)| interpolate_ceil(f64::from(low), high as f64, alpha) as u32)
        .collect())
}

/// Size index `(OP * K) / A^0.1` used to order scenarios by scale.
pub fn scale_index(op: usize, skills: usize, workforce: u64) -> f64 {
    debug_assert!(workforce >= 1);
    (op * skills) as f64 / libm::pow(workforce as f64, 0.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    /// The exact search proved its value optimal.
    Optimal,
    /// The exact search stopped early; the reference is its best schedule.
    Best,
    /// The heuristic could not place every job inside the horizon, or the
    /// workforce level cannot carry the workload at all.
    Infeasible,
    /// Heuristic only; no exact run was requested or it failed.
    EdmOnly,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Optimal => "optimal",
            RowStatus::Best => "best",
            RowStatus::Infeasible => "infeasible",
            RowStatus::EdmOnly => "edm-only",
        }
    }
}

/// One workforce level of a sweep. Objective values use normalized weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub alpha: f64,
    pub jobs: usize,
    pub operations: usize,
    pub skills: usize,
    pub a_alpha: u64,
    pub workforce: Vec<u32>,
    pub z_edm: Option<f64>,
    /// Exact optimum or best found, per `status`.
    pub z_ref: Option<f64>,
    /// `max_k Z_k*` when every single-skill subproblem was solved optimally.
    pub z_lb: Option<f64>,
    pub gap: Option<f64>,
    pub status: RowStatus,
    pub edm_time: Duration,
    pub exact_time: Option<Duration>,
    pub note: Option<String>,
}

/// Evaluates one workforce level.
pub fn sweep_row(
    instance: &Instance,
    alpha: f64,
    config: &EdmConfig,
    limits: &SearchLimits,
    run_exact: bool,
    clock: &dyn Stopwatch,
) -> ScenarioResult {
    let ops = instance.op_count().total;
    let mut row = ScenarioResult {
        alpha,
        jobs: instance.num_jobs(),
        operations: ops,
        skills: instance.num_skills(),
        a_alpha: 0,
        workforce: Vec::new(),
        z_edm: None,
        z_ref: None,
        z_lb: None,
        gap: None,
        status: RowStatus::Infeasible,
        edm_time: Duration::ZERO,
        exact_time: None,
        note: None,
    };
    let (a_alpha, workforce) = match alpha_workforce(&workforce_bounds(instance), alpha)
        .and_then(|a| Ok((a, allocate_per_skill(instance, alpha)?)))
    {
        Ok(v) => v,
        Err(e) => {
            row.note = Some(format!("{e}"));
            return row;
        }
    };
    row.a_alpha = a_alpha;
    row.workforce = workforce.clone();
    let scenario = match instance.with_workforce(&workforce) {
        Ok(inst) => inst,
        Err(e) => {
            row.note = Some(format!("{e}"));
            return row;
        }
    };

    let t0 = clock.now();
    let edm = edm_solve(&scenario, config);
    row.edm_time = clock.now().saturating_sub(t0);
    let edm_feasible = edm.is_complete();
    if edm_feasible {
        row.z_edm = edm.objective.as_ref().map(|o| o.z);
        row.status = RowStatus::EdmOnly;
    } else {
        row.note = Some(String::from("heuristic schedule overflows the horizon"));
    }

    if !run_exact {
        return row;
    }
    let control = SearchControl {
        clock,
        cancel: None,
    };
    let t1 = clock.now();
    match exact_solve_with(&scenario, limits, control) {
        Ok(res) => {
            row.z_ref = Some(res.value);
            if edm_feasible {
                row.status = match res.proof {
                    Proof::Optimal => RowStatus::Optimal,
                    Proof::BestFound => RowStatus::Best,
                };
            }
        }
        Err(e) => row.note = Some(format!("exact search: {e}")),
    }
    let per_skill: Option<Vec<f64>> = (0..scenario.num_skills())
        .map(|k| {
            exact_single_skill_with(&scenario, k, limits, control)
                .ok()
                .filter(|r| r.proof == Proof::Optimal)
                .map(|r| r.value)
        })
        .collect();
    row.z_lb = per_skill.and_then(|v| v.into_iter().reduce(f64::max));
    row.exact_time = Some(clock.now().saturating_sub(t1));
    if let (Some(h), Some(r)) = (row.z_edm, row.z_ref) {
        row.gap = gap_percent(h, r).ok();
    }
    row
}

/// One row per alpha, sorted by alpha ascending. Row failures are recorded
/// in the row and never abort the sweep.
pub fn sweep(
    instance: &Instance,
    alphas: &[f64],
    config: &EdmConfig,
    limits: &SearchLimits,
    run_exact: bool,
    clock: &dyn Stopwatch,
) -> Vec<ScenarioResult> {
    let mut rows: Vec<ScenarioResult> = alphas
        .iter()
        .map(|&a| sweep_row(instance, a, config, limits, run_exact, clock))
        .collect();
    sort_rows(&mut rows);
    rows
}

pub fn sort_rows(rows: &mut [ScenarioResult]) {
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
}
