//! Acceptance checks, one PASS/FAIL line each. Exits non-zero if any fails.
//!
//! Run alone with `cargo test -p skillsched-tests --test acceptance`.

use std::time::{Duration, Instant};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skillsched::fixture::{closure, embedded, fixture_stats, BENCHMARK_ROWS};
use skillsched::format::parse_instance;
use skillsched::report::WallClock;
use skillsched_core::edm::HeadcountProfile;
use skillsched_core::exact::ExactError;
use skillsched_core::generator::{random_instance, GeneratorParams, WeightLaw};
use skillsched_core::knapsack::{
    dantzig_fractional, dantzig_integer_prefix, efficacy_order, residual_fill, KnapsackItem,
};
use skillsched_core::model::{check_schedule, nested_capacity_check, objective, Violation};
use skillsched_core::scenario::{sweep, RowStatus, ALPHA_GRID};
use skillsched_core::stats::weibull_moments;
use skillsched_core::{
    build_instance, edm_solve, exact_single_skill, exact_solve, EdmConfig, Instance, OrderingRule,
    RawInstance, Schedule, SearchLimits,
};

const C1_BUDGET: Duration = Duration::from_millis(10);
const C2_POPULATED: usize = 209;
const C2_NA_ROWS: [usize; 3] = [164, 177, 212];
const C3_PEARSON: (f64, f64) = (0.14, 0.28);
const C3_SHAPE: (f64, f64) = (0.63, 1.03);
const C3_SCALE: (f64, f64) = (0.16, 0.32);
const C3_MEAN_TARGET: f64 = 0.26;
const C3_MEAN_TOL: f64 = 0.02;
const C3_BUDGET: Duration = Duration::from_secs(1);
const C4_INSTANCES: usize = 300;
const C4_BUDGET: Duration = Duration::from_secs(60);
const C5_INSTANCES: usize = 100;
const C5_TOL: f64 = 1e-9;
const C6_SETS: usize = 1000;
const C6_BUDGET: Duration = Duration::from_secs(30);
const C7_SCHEDULES: usize = 500;
const C8_EDM_BUDGET: Duration = Duration::from_secs(1);
const C8_SWEEP_BUDGET: Duration = Duration::from_secs(5);
const VALUE_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unit_z(inst: &Instance, s: &Schedule) -> f64 {
    objective(inst, s).unwrap().unit_z(inst)
}

fn c1_worked_example() -> Outcome {
    let inst = parse_instance(include_str!("../../skillsched/data/pair.json")).map_err(|e| e.to_string())?;
    let t = Instant::now();
    let gated = edm_solve(&inst, &EdmConfig::default());
    let per_time = edm_solve(
        &inst,
        &EdmConfig {
            ordering: OrderingRule::EfficacyPerTime,
            ..EdmConfig::default()
        },
    );
    let exact = exact_solve(&inst, &SearchLimits::default()).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();

    let z = |s: &Schedule| unit_z(&inst, s);
    let (z_gated, z_time, z_exact) = (z(&gated.schedule), z(&per_time.schedule), z(&exact.schedule));
    let starts = (gated.schedule.start(0, 0), gated.schedule.start(1, 0));
    ensure(z_gated == 5.0, || format!("EDM gave {z_gated}, want 5"))?;
    ensure(starts == (Some(2), Some(0)), || format!("EDM starts job1/job2 = {starts:?}"))?;
    ensure(z_time == 4.0, || format!("w/p ordering gave {z_time}, want 4"))?;
    ensure(z_exact == 4.0, || format!("exact gave {z_exact}, want 4"))?;
    ensure(elapsed < C1_BUDGET, || format!("took {}", ms(elapsed)))?;
    Ok(format!("EDM 5 (job2:0, job1:2), w/p 4, exact 4 in {}", ms(elapsed)))
}

fn c2_fixture_closure() -> Outcome {
    let rows = embedded().map_err(|e| e.to_string())?;
    ensure(rows.len() == BENCHMARK_ROWS, || format!("{} rows", rows.len()))?;
    let c = closure(&rows);
    ensure(c.populated == C2_POPULATED, || format!("{} populated rows", c.populated))?;
    ensure(c.mismatches.is_empty(), || format!("mismatches {:?}", c.mismatches))?;
    ensure(c.infeasible == C2_NA_ROWS, || format!("infeasible rows {:?}", c.infeasible))?;
    for no in C2_NA_ROWS {
        let status = rows.iter().find(|r| r.no == no).map(|r| r.status());
        ensure(status == Some(RowStatus::Infeasible), || format!("row {no} is {status:?}"))?;
    }
    Ok(format!(
        "{} rows recomputed, max deviation {:.4}, rows {:?} infeasible",
        c.populated, c.max_deviation, c.infeasible
    ))
}

fn c3_fixture_statistics() -> Outcome {
    let t = Instant::now();
    let rows = embedded().map_err(|e| e.to_string())?;
    let s = fixture_stats(&rows).map_err(|e| e.to_string())?;
    let (mean, _) = weibull_moments(0.83, 0.24).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let within = |x: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&x);
    let summary = format!(
        "pearson {:.4}, shape {:.4}, scale {:.4}, Weibull(0.83, 0.24) mean {:.4}, {}",
        s.correlation_with_scale,
        s.weibull_shape,
        s.weibull_scale,
        mean,
        ms(elapsed)
    );
    let mut failed = Vec::new();
    if !within(s.correlation_with_scale, C3_PEARSON) {
        failed.push(format!("pearson outside {C3_PEARSON:?}"));
    }
    if !within(s.weibull_shape, C3_SHAPE) {
        failed.push(format!("shape outside {C3_SHAPE:?}"));
    }
    if !within(s.weibull_scale, C3_SCALE) {
        failed.push(format!("scale outside {C3_SCALE:?}"));
    }
    if (mean - C3_MEAN_TARGET).abs() > C3_MEAN_TOL {
        failed.push(format!("mean not within {C3_MEAN_TOL} of {C3_MEAN_TARGET}"));
    }
    if elapsed >= C3_BUDGET {
        failed.push("over time budget".into());
    }
    if failed.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", failed.join(", ")))
    }
}

fn desk_params(rng: &mut ChaCha8Rng) -> GeneratorParams {
    let horizon = rng.random_range(2..=8);
    GeneratorParams {
        jobs: rng.random_range(1..=5),
        skills: rng.random_range(1..=2),
        horizon,
        duration: (1, 3.min(horizon)),
        crew: (1, 3),
        density: rng.random_range(0.2..0.9),
        weights: WeightLaw::Uniform,
        alpha: rng.random_range(0.01..=1.0),
        workforce: None,
    }
}

fn c4_oracle_study() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let limits = SearchLimits::default();
    let (mut solved, mut overflow, mut no_schedule) = (0, 0, 0);
    let mut gaps = Vec::new();
    for i in 0..C4_INSTANCES {
        let params = desk_params(&mut rng);
        let inst = random_instance(&params, i as u64).map_err(|e| format!("instance {i}: {e}"))?;
        let edm = edm_solve(&inst, &EdmConfig::default());
        let report = check_schedule(&inst, &edm.schedule);
        let z_edm = if edm.is_complete() {
            ensure(report.is_feasible(), || format!("instance {i}: EDM violations {:?}", report.violations))?;
            Some(objective(&inst, &edm.schedule).unwrap().z)
        } else {
            let only_missing = report.violations.iter().all(|v| matches!(v, Violation::MissingStart(_)));
            ensure(only_missing, || format!("instance {i}: partial EDM violations {:?}", report.violations))?;
            overflow += 1;
            None
        };
        let exact = match exact_solve(&inst, &limits) {
            Ok(r) => r,
            Err(ExactError::NoFeasibleSchedule { .. }) => {
                ensure(z_edm.is_none(), || format!("instance {i}: EDM scheduled an infeasible instance"))?;
                no_schedule += 1;
                continue;
            }
            Err(e) => return Err(format!("instance {i}: {e}")),
        };
        ensure(check_schedule(&inst, &exact.schedule).is_feasible(), || format!("instance {i}: exact schedule infeasible"))?;
        let mut z_k_max = 0.0f64;
        for k in 0..inst.num_skills() {
            let r = exact_single_skill(&inst, k, &limits).map_err(|e| format!("instance {i}, skill {k}: {e}"))?;
            z_k_max = z_k_max.max(r.value);
        }
        ensure(z_k_max <= exact.value + VALUE_TOL, || {
            format!("instance {i}: max Z_k* {z_k_max} > Z* {}", exact.value)
        })?;
        if let Some(z) = z_edm {
            ensure(exact.value <= z + VALUE_TOL, || format!("instance {i}: Z* {} > Z_EDM {z}", exact.value))?;
            gaps.push((z - exact.value) / exact.value);
        }
        solved += 1;
    }
    let elapsed = t.elapsed();
    ensure(elapsed < C4_BUDGET, || format!("took {elapsed:?}"))?;
    let mean_gap = 100.0 * gaps.iter().sum::<f64>() / gaps.len().max(1) as f64;
    let zero = gaps.iter().filter(|&&g| g <= VALUE_TOL).count();
    Ok(format!(
        "{C4_INSTANCES} instances: {solved} solved exactly, {overflow} EDM overflows, {no_schedule} without any schedule; \
         mean gap {mean_gap:.2}% over {} ({zero} at zero); {:.1} s",
        gaps.len(),
        elapsed.as_secs_f64()
    ))
}

fn c5_single_skill_composition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let limits = SearchLimits::default();
    let mut checked = 0;
    let mut attempt = 0u64;
    while checked < C5_INSTANCES {
        attempt += 1;
        let horizon = rng.random_range(3..=8);
        let params = GeneratorParams {
            jobs: rng.random_range(2..=6),
            skills: rng.random_range(1..=3),
            horizon,
            duration: (1, 3),
            crew: (1, 3),
            density: 0.0,
            weights: WeightLaw::Uniform,
            alpha: rng.random_range(0.05..=1.0),
            workforce: None,
        };
        let inst = random_instance(&params, attempt).map_err(|e| e.to_string())?;
        ensure(inst.jobs().iter().all(|j| j.demands().iter().filter(|d| d.is_required()).count() == 1), || {
            format!("attempt {attempt}: a job needs several skills")
        })?;
        let global = match exact_solve(&inst, &limits) {
            Ok(r) => r,
            Err(ExactError::NoFeasibleSchedule { .. }) => continue,
            Err(e) => return Err(format!("attempt {attempt}: {e}")),
        };
        let mut triples = Vec::new();
        let mut composed = 0.0;
        for k in 0..inst.num_skills() {
            let r = exact_single_skill(&inst, k, &limits).map_err(|e| format!("attempt {attempt}: {e}"))?;
            composed += r.value;
            triples.extend(inst.jobs_requiring(k).map(|m| (m, k, r.schedule.start(m, k).unwrap())));
        }
        let merged = Schedule::from_triples(&inst, &triples);
        ensure(check_schedule(&inst, &merged).is_feasible(), || format!("attempt {attempt}: composed schedule infeasible"))?;
        let z_merged = objective(&inst, &merged).unwrap().z;
        ensure((composed - global.value).abs() <= C5_TOL && (z_merged - global.value).abs() <= C5_TOL, || {
            format!("attempt {attempt}: sum of Z_k* {composed}, composed Z {z_merged}, Z* {}", global.value)
        })?;
        checked += 1;
    }
    Ok(format!("{checked} one-skill-per-job instances, composed optimum equals Z* within {C5_TOL:e}"))
}

/// Best value and largest cardinality over all subsets fitting `cap`.
fn brute_knapsack(items: &[KnapsackItem], cap: u64) -> (f64, usize) {
    let n = items.len();
    let mut size = vec![0u64; 1 << n];
    let mut value = vec![0.0f64; 1 << n];
    let (mut best, mut card) = (0.0f64, 0usize);
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        size[mask] = size[rest] + items[low].size();
        value[mask] = value[rest] + items[low].value;
        if size[mask] <= cap {
            best = best.max(value[mask]);
            card = card.max(mask.count_ones() as usize);
        }
    }
    (best, card)
}

fn random_items(rng: &mut ChaCha8Rng, max: usize) -> Vec<KnapsackItem> {
    let n = rng.random_range(0..=max);
    (0..n)
        .map(|job| KnapsackItem {
            job,
            value: f64::from(rng.random_range(1u32..=100)) / 100.0,
            duration: rng.random_range(1..=6),
            crew: rng.random_range(1..=4),
        })
        .collect()
}

fn c6_knapsack_suite() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut integral = 0;
    for set in 0..C6_SETS {
        let mut items = random_items(&mut rng, 15);
        let cap = rng.random_range(0..=60u64);
        let rule = if rng.random_bool(0.5) { OrderingRule::EfficacyPerWorkload } else { OrderingRule::EfficacyPerTime };
        efficacy_order(&mut items, rule);
        let rejected = random_items(&mut rng, 12);
        let residual = rng.random_range(0..=40u64);
        let fill = residual_fill(&rejected, residual);
        let load: u64 = fill.iter().map(|&i| rejected[i].size()).sum();
        let (_, card) = brute_knapsack(&rejected, residual);
        ensure(load <= residual && fill.len() == card, || {
            format!("set {set}: residual fill {} items, max {card}", fill.len())
        })?;

        let frac = dantzig_fractional(&items, cap as i64).map_err(|e| e.to_string())?;
        let prefix = dantzig_integer_prefix(&items, cap as i64).map_err(|e| e.to_string())?;
        let (opt, _) = brute_knapsack(&items, cap);
        ensure(opt >= prefix.value - VALUE_TOL, || format!("set {set}: optimum {opt} < prefix {}", prefix.value))?;
        // The relaxation bounds the optimum only under the value-per-man-hour key.
        if rule == OrderingRule::EfficacyPerTime {
            continue;
        }
        ensure(frac.value >= opt - VALUE_TOL, || format!("set {set}: fractional {} < optimum {opt}", frac.value))?;
        if frac.fractions.iter().all(|&x| x == 0.0 || x == 1.0) {
            integral += 1;
            ensure((prefix.value - opt).abs() <= VALUE_TOL, || {
                format!("set {set}: integral relaxation but prefix {} != optimum {opt}", prefix.value)
            })?;
        }
    }
    let elapsed = t.elapsed();
    ensure(elapsed < C6_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{C6_SETS} item sets ({integral} with integral relaxation), {:.2} s", elapsed.as_secs_f64()))
}

/// Places operations one at a time at a random start that keeps every unit
/// within the headcount. `None` if some operation has no such start.
fn random_feasible_schedule(inst: &Instance, rng: &mut ChaCha8Rng) -> Option<Schedule> {
    let t = inst.horizon();
    let mut profiles: Vec<HeadcountProfile> = (0..inst.num_skills()).map(|_| HeadcountProfile::new(t as usize)).collect();
    let mut ops: Vec<_> = inst.operations().collect();
    ops.shuffle(rng);
    let mut triples = Vec::new();
    for op in ops {
        let d = inst.demand(op.job, op.skill);
        let available = inst.skills()[op.skill].available;
        let starts: Vec<u32> = (0..=t - d.duration)
            .filter(|&s| profiles[op.skill].fits(s, d.duration, d.crew, available))
            .collect();
        let &s = starts.choose(rng)?;
        profiles[op.skill].occupy(s, d.duration, d.crew);
        triples.push((op.job, op.skill, s));
    }
    Some(Schedule::from_triples(inst, &triples))
}

fn c7_feasibility_implication() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < C7_SCHEDULES {
        seed += 1;
        let horizon = rng.random_range(2..=12);
        let params = GeneratorParams {
            jobs: rng.random_range(1..=8),
            skills: rng.random_range(1..=3),
            horizon,
            duration: (1, 4.min(horizon)),
            crew: (1, 3),
            density: rng.random_range(0.2..0.9),
            weights: WeightLaw::Uniform,
            alpha: rng.random_range(0.01..=1.0),
            workforce: None,
        };
        let inst = random_instance(&params, seed).map_err(|e| e.to_string())?;
        let Some(s) = random_feasible_schedule(&inst, &mut rng) else { continue };
        if !check_schedule(&inst, &s).is_feasible() {
            continue;
        }
        for k in 0..inst.num_skills() {
            let nested = nested_capacity_check(&inst, &s, k).map_err(|e| e.to_string())?;
            ensure(nested.iter().all(|&ok| ok), || format!("seed {seed}, skill {k}: nested check {nested:?}"))?;
        }
        checked += 1;
    }

    let raw: RawInstance = serde_json::from_str(
        r#"{"horizon": 3, "skills": [{"id": "k", "available": 2}],
            "jobs": [{"id": "long", "weight": 1, "demands": [{"skill": "k", "duration": 2, "crew": 1}]},
                     {"id": "wide", "weight": 1, "demands": [{"skill": "k", "duration": 1, "crew": 2}]}]}"#,
    )
    .map_err(|e| e.to_string())?;
    let inst = build_instance(&raw).map_err(|e| e.to_string())?;
    let s = Schedule::from_triples(&inst, &[(0, 0, 0), (1, 0, 1)]);
    let nested = nested_capacity_check(&inst, &s, 0).map_err(|e| e.to_string())?;
    let report = check_schedule(&inst, &s);
    let expected = vec![Violation::OverCapacity {
        skill: 0,
        unit: 2,
        usage: 3,
        available: 2,
    }];
    ensure(nested.iter().all(|&ok| ok), || format!("counterexample nested check {nested:?}"))?;
    ensure(report.violations == expected, || format!("counterexample report {:?}", report.violations))?;
    Ok(format!(
        "{checked} feasible schedules pass the nested check; b=2 counterexample passes it yet uses 3 in unit 2"
    ))
}

fn c8_performance() -> Outcome {
    let inst = random_instance(&GeneratorParams::plant_scale(), 1).map_err(|e| e.to_string())?;
    let ops = inst.op_count().total;
    let t = Instant::now();
    let sol = edm_solve(&inst, &EdmConfig::default());
    let edm = t.elapsed();
    let t = Instant::now();
    let rows = sweep(&inst, &ALPHA_GRID, &EdmConfig::default(), &SearchLimits::default(), false, &WallClock::start());
    let sweep_time = t.elapsed();
    ensure(rows.len() == ALPHA_GRID.len(), || format!("{} sweep rows", rows.len()))?;
    ensure(edm <= C8_EDM_BUDGET, || format!("EDM took {}", ms(edm)))?;
    ensure(sweep_time <= C8_SWEEP_BUDGET, || format!("sweep took {}", ms(sweep_time)))?;
    Ok(format!(
        "M=229 K=34 T=80 ({ops} operations, {}): EDM {}, 7-point sweep {}",
        if sol.is_complete() { "complete" } else { "overflow" },
        ms(edm),
        ms(sweep_time)
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("C1 worked example", c1_worked_example),
        ("C2 fixture closure", c2_fixture_closure),
        ("C3 fixture statistics", c3_fixture_statistics),
        ("C4 oracle study", c4_oracle_study),
        ("C5 single-skill composition", c5_single_skill_composition),
        ("C6 knapsack suite", c6_knapsack_suite),
        ("C7 feasibility implication", c7_feasibility_implication),
        ("C8 performance", c8_performance),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
