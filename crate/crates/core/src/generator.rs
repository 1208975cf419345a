//! Seeded random instances.
//!
//! Every job needs at least one skill. Each skill gets the headcount of the
//! scenario level `alpha`, raised where needed so that its total workload
//! fits in the horizon.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{build_instance, Instance, ModelError, RawDemand, RawInstance, RawJob, RawSkill};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightLaw {
    /// Integer weights drawn uniformly from 1..=10 before normalization.
    #[default]
    Uniform,
    Equal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub jobs: usize,
    pub skills: usize,
    pub horizon: u32,
    /// Inclusive duration range.
    pub duration: (u32, u32),
    /// Inclusive crew range.
    pub crew: (u32, u32),
    /// Probability that a job needs a given skill.
    pub density: f64,
    pub weights: WeightLaw,
    pub alpha: f64,
    /// Fixed headcounts; overrides `alpha` when set.
    pub workforce: Option<Vec<u32>>,
}

impl Default for GeneratorParams {
    /// Ten jobs over seven skills in a one-day horizon of 16 units.
    fn default() -> Self {
        GeneratorParams {
            jobs: 10,
            skills: 7,
            horizon: 16,
            duration: (1, 4),
            crew: (1, 3),
            density: 0.25,
            weights: WeightLaw::Uniform,
            alpha: 0.3,
            workforce: None,
        }
    }
}

impl GeneratorParams {
    /// Small enough for the exact search: 5 jobs, 2 skills, 8 units.
    pub fn desk_scale() -> Self {
        GeneratorParams {
            jobs: 5,
            skills: 2,
            horizon: 8,
            duration: (1, 3),
            crew: (1, 3),
            density: 0.6,
            weights: WeightLaw::Uniform,
            alpha: 0.3,
            workforce: None,
        }
    }

    /// Shaped like a plant turnaround: 229 jobs, 34 crafts, 80 units.
    pub fn plant_scale() -> Self {
        GeneratorParams {
            jobs: 229,
            skills: 34,
            horizon: 80,
            duration: (1, 8),
            crew: (1, 4),
            density: 0.032,
            weights: WeightLaw::Uniform,
            alpha: 0.3,
            workforce: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeneratorError {
    #[error("unsatisfiable generator parameters: {0}")]
    UnsatisfiableParams(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn check(params: &GeneratorParams) -> Result<(), GeneratorError> {
    let bad = GeneratorError::UnsatisfiableParams;
    if params.jobs == 0 {
        return Err(bad("no jobs"));
    }
    if params.skills == 0 {
        return Err(bad("no skills"));
    }
    if params.horizon == 0 {
        return Err(bad("empty horizon"));
    }
    let (dl, dh) = params.duration;
    if dl == 0 || dl > dh {
        return Err(bad("duration range"));
    }
    if dh > params.horizon {
        return Err(bad("durations longer than the horizon"));
    }
    let (cl, ch) = params.crew;
    if cl == 0 || cl > ch {
        return Err(bad("crew range"));
    }
    if !(params.density >= 0.0 && params.density <= 1.0) {
        return Err(bad("density outside [0, 1]"));
    }
    if params.workforce.is_none() && !(params.alpha > 0.0 && params.alpha <= 1.0) {
        return Err(bad("alpha outside (0, 1]"));
    }
    if let Some(w) = &params.workforce {
        if w.len() != params.skills {
            return Err(bad("workforce length"));
        }
    }
    Ok(())
}

fn ceil_interp(low: u64, high: u64, alpha: f64) -> u64 {
    libm::ceil((1.0 - alpha) * low as f64 + alpha * high as f64 - 1e-9) as u64
}

/// Draws an instance. The same parameters and seed give the same instance.
pub fn random_instance(params: &GeneratorParams, seed: u64) -> Result<Instance, GeneratorError> {
    check(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k_count = params.skills;

    let mut min_crew = alloc::vec![0u64; k_count];
    let mut sum_crew = alloc::vec![0u64; k_count];
    let mut workload = alloc::vec![0u64; k_count];
    let mut jobs = Vec::with_capacity(params.jobs);
    for m in 0..params.jobs {
        let mut needs: Vec<usize> = (0..k_count)
            .filter(|_| rng.random_bool(params.density))
            .collect();
        if needs.is_empty() {
            needs.push(rng.random_range(0..k_count));
        }
        let mut demands = Vec::with_capacity(needs.len());
        for k in needs {
            let duration = rng.random_range(params.duration.0..=params.duration.1);
            let crew = rng.random_range(params.crew.0..=params.crew.1);
            min_crew[k] = min_crew[k].max(u64::from(crew));
            sum_crew[k] += u64::from(crew);
            workload[k] += u64::from(duration) * u64::from(crew);
            demands.push(RawDemand {
                skill: format!("S{}", k + 1),
                duration,
                crew,
            });
        }
        let weight = match params.weights {
            WeightLaw::Uniform => f64::from(rng.random_range(1u32..=10)),
            WeightLaw::Equal => 1.0,
        };
        jobs.push(RawJob {
            id: format!("J{}", m + 1),
            weight,
            demands,
        });
    }

    let horizon = u64::from(params.horizon);
    let skills = (0..k_count)
        .map(|k| {
            let available = match &params.workforce {
                Some(w) => u64::from(w[k]),
                None => ceil_interp(min_crew[k], sum_crew[k], params.alpha)
                    .max(workload[k].div_ceil(horizon))
                    .max(1),
            };
            RawSkill {
                id: format!("S{}", k + 1),
                available: available as u32,
            }
        })
        .collect();

    let raw = RawInstance {
        horizon: params.horizon,
        skills,
        jobs,
    };
    Ok(build_instance(&raw)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::allocate_per_skill;

    #[test]
    fn same_seed_same_instance() {
        let p = GeneratorParams::desk_scale();
        assert_eq!(random_instance(&p, 7).unwrap(), random_instance(&p, 7).unwrap());
    }

    #[test]
    fn every_job_needs_a_skill() {
        let p = GeneratorParams::plant_scale();
        let inst = random_instance(&p, 1).unwrap();
        assert_eq!(inst.num_jobs(), 229);
        assert_eq!(inst.num_skills(), 34);
        for m in 0..inst.num_jobs() {
            assert!(inst.jobs()[m].demands().iter().any(|d| d.is_required()));
        }
    }

    #[test]
    fn headcount_at_least_alpha_level() {
        let p = GeneratorParams::desk_scale();
        for seed in 0..50 {
            let inst = random_instance(&p, seed).unwrap();
            let level = allocate_per_skill(&inst, p.alpha).unwrap();
            for (b, a) in inst.workforce().iter().zip(level) {
                assert!(*b >= a.max(1));
            }
        }
    }

    #[test]
    fn default_has_an_operation_per_job() {
        for seed in 0..20 {
            let inst = random_instance(&GeneratorParams::default(), seed).unwrap();
            assert_eq!(inst.horizon(), 16);
            assert!(inst.op_count().total >= 10);
        }
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = GeneratorParams::desk_scale();
        p.duration = (1, 9);
        assert!(random_instance(&p, 0).is_err());
        let mut p = GeneratorParams::desk_scale();
        p.crew = (0, 2);
        assert!(random_instance(&p, 0).is_err());
        let mut p = GeneratorParams::desk_scale();
        p.workforce = Some(alloc::vec![1]);
        assert!(random_instance(&p, 0).is_err());
    }
}
