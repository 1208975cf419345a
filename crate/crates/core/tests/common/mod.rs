#![allow(dead_code)]

use proptest::prelude::*;
use skillsched_core::generator::{random_instance, GeneratorParams, WeightLaw};
use skillsched_core::model::{check_schedule, objective};
use skillsched_core::{Instance, Schedule};

pub fn params(jobs: usize, skills: usize, horizon: u32, density: f64, alpha: f64) -> GeneratorParams {
    GeneratorParams {
        jobs,
        skills,
        horizon,
        duration: (1, 3.min(horizon)),
        crew: (1, 3),
        density,
        weights: WeightLaw::Uniform,
        alpha,
        workforce: None,
    }
}

/// Random small instances, sized for brute force when `tiny` is set.
pub fn instances(tiny: bool) -> impl Strategy<Value = Instance> {
    let (jobs, skills, horizon) = if tiny { (1..=4usize, 1..=2usize, 2..=6u32) } else { (1..=8, 1..=3, 2..=12) };
    (any::<u64>(), jobs, skills, horizon, 0.2f64..0.9, 0.01f64..1.0).prop_filter_map(
        "generator rejected",
        |(seed, m, k, t, d, a)| random_instance(&params(m, k, t, d, a), seed).ok(),
    )
}

/// Exhaustive optimum: every combination of start instants, feasible ones
/// scored. `None` when nothing is feasible or the space exceeds `cap`.
pub fn brute_force(inst: &Instance, cap: u64) -> Option<Option<(f64, Schedule)>> {
    let ops: Vec<_> = inst.operations().collect();
    let choices: Vec<u32> = ops
        .iter()
        .map(|op| inst.horizon() - inst.demand(op.job, op.skill).duration + 1)
        .collect();
    let space: u64 = choices.iter().map(|&c| u64::from(c)).product();
    if space > cap {
        return None;
    }
    let mut best: Option<(f64, Schedule)> = None;
    let mut idx = vec![0u32; ops.len()];
    loop {
        let triples: Vec<_> = ops
            .iter()
            .zip(&idx)
            .map(|(op, &s)| (op.job, op.skill, s))
            .collect();
        let sched = Schedule::from_triples(inst, &triples);
        if check_schedule(inst, &sched).is_feasible() {
            let z = objective(inst, &sched).unwrap().z;
            if best.as_ref().is_none_or(|(b, _)| z < *b - 1e-12) {
                best = Some((z, sched));
            }
        }
        let mut i = 0;
        loop {
            if i == idx.len() {
                return Some(best);
            }
            idx[i] += 1;
            if idx[i] < choices[i] {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}
