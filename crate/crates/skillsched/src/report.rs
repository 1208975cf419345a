//! Sweep reports laid out like the published benchmark table.
//!
//! Timings are off by default so that equal inputs give byte-identical
//! reports.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use skillsched_core::scenario::{scale_index, sort_rows, sweep_row, ScenarioResult};
use skillsched_core::{EdmConfig, Instance, SearchLimits, Stopwatch};

/// How the aggregate workforce level is split across skills.
pub const ALLOCATION_RULE: &str =
    "per skill: ceil((1 - alpha) * max crew + alpha * sum of crews)";

pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Stopwatch for WallClock {
    fn now(&self) -> std::time::Duration {
        self.0.elapsed()
    }
}

/// Rows evaluated in parallel, returned in ascending alpha order.
pub fn parallel_sweep(
    instance: &Instance,
    alphas: &[f64],
    config: &EdmConfig,
    limits: &SearchLimits,
    run_exact: bool,
) -> Vec<ScenarioResult> {
    let mut rows: Vec<ScenarioResult> = alphas
        .par_iter()
        .map(|&a| sweep_row(instance, a, config, limits, run_exact, &WallClock::start()))
        .collect();
    sort_rows(&mut rows);
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    #[serde(rename = "M")]
    pub jobs: usize,
    #[serde(rename = "OP")]
    pub operations: usize,
    #[serde(rename = "K")]
    pub skills: usize,
    #[serde(rename = "A_alpha")]
    pub a_alpha: u64,
    pub workforce: Vec<u32>,
    #[serde(rename = "Z_LB")]
    pub z_lb: Option<f64>,
    #[serde(rename = "Z_ref")]
    pub z_ref: Option<f64>,
    #[serde(rename = "CPU_sec")]
    pub cpu_sec: Option<f64>,
    #[serde(rename = "Z_EDM")]
    pub z_edm: Option<f64>,
    #[serde(rename = "Gap_pct")]
    pub gap_pct: Option<f64>,
    pub status: String,
    pub edm_sec: Option<f64>,
    pub scale_index: Option<f64>,
    pub note: Option<String>,
}

impl SweepRow {
    pub fn new(r: &ScenarioResult, timings: bool) -> Self {
        SweepRow {
            alpha: r.alpha,
            jobs: r.jobs,
            operations: r.operations,
            skills: r.skills,
            a_alpha: r.a_alpha,
            workforce: r.workforce.clone(),
            z_lb: r.z_lb,
            z_ref: r.z_ref,
            cpu_sec: r.exact_time.filter(|_| timings).map(|d| d.as_secs_f64()),
            z_edm: r.z_edm,
            gap_pct: r.gap,
            status: r.status.as_str().to_string(),
            edm_sec: timings.then_some(r.edm_time.as_secs_f64()),
            scale_index: (r.a_alpha > 0).then(|| scale_index(r.operations, r.skills, r.a_alpha)),
            note: r.note.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub allocation: String,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn new(rows: &[ScenarioResult], timings: bool) -> Self {
        SweepReport {
            allocation: ALLOCATION_RULE.to_string(),
            rows: rows.iter().map(|r| SweepRow::new(r, timings)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "alpha", "M", "OP", "K", "A_alpha", "Z_LB", "Z_ref", "CPU_sec", "Z_EDM", "Gap_pct",
            "status", "workforce", "edm_sec", "note",
        ])
        .expect("write to memory");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            let workforce: Vec<String> = r.workforce.iter().map(u32::to_string).collect();
            w.write_record([
                r.alpha.to_string(),
                r.jobs.to_string(),
                r.operations.to_string(),
                r.skills.to_string(),
                r.a_alpha.to_string(),
                opt(r.z_lb),
                opt(r.z_ref),
                opt(r.cpu_sec),
                opt(r.z_edm),
                r.gap_pct.map(|g| format!("{g:.2}")).unwrap_or_default(),
                r.status.clone(),
                workforce.join(";"),
                opt(r.edm_sec),
                r.note.clone().unwrap_or_default(),
            ])
            .expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }

    pub fn to_human(&self) -> String {
        let mut out = format!(
            "{:>6} {:>7} {:>10} {:>10} {:>10} {:>8}  {}\n",
            "alpha", "A_alpha", "Z_EDM", "Z_ref", "Z_LB", "gap%", "status"
        );
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
        for r in &self.rows {
            out.push_str(&format!(
                "{:>6} {:>7} {:>10} {:>10} {:>10} {:>8}  {}{}\n",
                r.alpha,
                r.a_alpha,
                cell(r.z_edm),
                cell(r.z_ref),
                cell(r.z_lb),
                r.gap_pct.map(|g| format!("{g:.2}")).unwrap_or_else(|| "N/A".into()),
                r.status,
                r.note.as_ref().map(|n| format!(" ({n})")).unwrap_or_default(),
            ));
        }
        out
    }
}
