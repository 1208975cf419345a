//! The published benchmark table, shipped as `data/benchmark.csv`.
//!
//! Empty fields are absent values. A CPU time written `>10800` marks a run
//! stopped at the three-hour limit; its reference value is then the best
//! schedule found rather than a proven optimum.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use skillsched_core::exact::{gap_percent, round2};
use skillsched_core::scenario::{scale_index, RowStatus};
use skillsched_core::stats::{gap_stats, GapStats, StatsError};

pub const BENCHMARK_CSV: &str = include_str!("../data/benchmark.csv");
pub const BENCHMARK_SHA256: &str = "1db07ea2484e8f0e28f54ec60312926ae0f27334536b5c2ab5a88e21c3507a0e";
pub const BENCHMARK_ROWS: usize = 212;

/// Printed gaps carry two decimals.
pub const GAP_TOLERANCE: f64 = 0.005;

#[derive(Debug, thiserror::Error)]
pub enum FixtureParseError {
    #[error("fixture io: {0}")]
    Io(#[from] std::io::Error),
    #[error("fixture csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: bad CPU time `{value}`")]
    CpuTime { row: usize, value: String },
    #[error("row {row}: gap and heuristic value must be both present or both absent")]
    HalfPopulated { row: usize },
    #[error("fixture checksum {got} does not match the pinned {expected}")]
    Checksum { expected: &'static str, got: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CpuTime {
    Seconds(f64),
    /// Stopped at the given limit in seconds.
    OverLimit(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureRow {
    pub no: usize,
    pub jobs: usize,
    pub operations: usize,
    pub skills: usize,
    pub a_alpha: u64,
    pub z_lb: Option<f64>,
    pub z_ref: f64,
    pub cpu: CpuTime,
    pub z_edm: Option<f64>,
    pub gap: Option<f64>,
}

impl FixtureRow {
    pub fn status(&self) -> RowStatus {
        match (self.z_edm, self.cpu) {
            (None, _) => RowStatus::Infeasible,
            (Some(_), CpuTime::OverLimit(_)) => RowStatus::Best,
            (Some(_), CpuTime::Seconds(_)) => RowStatus::Optimal,
        }
    }

    pub fn scale_index(&self) -> f64 {
        scale_index(self.operations, self.skills, self.a_alpha)
    }

    /// Gap from the two objective columns, rounded like the printed one.
    pub fn recomputed_gap(&self) -> Option<f64> {
        let z = self.z_edm?;
        gap_percent(z, self.z_ref).ok().map(round2)
    }
}

#[derive(Deserialize)]
struct Record {
    no: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "OP")]
    op: usize,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "A_alpha")]
    a: u64,
    #[serde(rename = "Z_LB")]
    z_lb: Option<f64>,
    #[serde(rename = "Z_ref")]
    z_ref: f64,
    #[serde(rename = "CPU_sec")]
    cpu: String,
    #[serde(rename = "Z_EDM")]
    z_edm: Option<f64>,
    #[serde(rename = "Gap_pct")]
    gap: Option<f64>,
}

pub fn parse_fixture(text: &str) -> Result<Vec<FixtureRow>, FixtureParseError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        let r: Record = record?;
        let cpu = match r.cpu.strip_prefix('>') {
            Some(limit) => limit.parse().map(CpuTime::OverLimit),
            None => r.cpu.parse().map(CpuTime::Seconds),
        }
        .map_err(|_| FixtureParseError::CpuTime {
            row: r.no,
            value: r.cpu.clone(),
        })?;
        if r.z_edm.is_some() != r.gap.is_some() {
            return Err(FixtureParseError::HalfPopulated { row: r.no });
        }
        rows.push(FixtureRow {
            no: r.no,
            jobs: r.m,
            operations: r.op,
            skills: r.k,
            a_alpha: r.a,
            z_lb: r.z_lb,
            z_ref: r.z_ref,
            cpu,
            z_edm: r.z_edm,
            gap: r.gap,
        });
    }
    Ok(rows)
}

pub fn load_fixture(path: &Path) -> Result<Vec<FixtureRow>, FixtureParseError> {
    parse_fixture(&std::fs::read_to_string(path)?)
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// The embedded table, after checking it against the pinned checksum.
pub fn embedded() -> Result<Vec<FixtureRow>, FixtureParseError> {
    let got = sha256_hex(BENCHMARK_CSV);
    if got != BENCHMARK_SHA256 {
        return Err(FixtureParseError::Checksum {
            expected: BENCHMARK_SHA256,
            got,
        });
    }
    parse_fixture(BENCHMARK_CSV)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Closure {
    pub populated: usize,
    pub infeasible: Vec<usize>,
    /// Rows whose recomputed gap misses the printed one, with both values.
    pub mismatches: Vec<(usize, f64, f64)>,
    pub max_deviation: f64,
}

/// Recomputes every printed gap from its objective columns.
pub fn closure(rows: &[FixtureRow]) -> Closure {
    let mut out = Closure {
        populated: 0,
        infeasible: Vec::new(),
        mismatches: Vec::new(),
        max_deviation: 0.0,
    };
    for row in rows {
        let (Some(printed), Some(recomputed)) = (row.gap, row.recomputed_gap()) else {
            if row.status() == RowStatus::Infeasible {
                out.infeasible.push(row.no);
            }
            continue;
        };
        out.populated += 1;
        let dev = (printed - recomputed).abs();
        out.max_deviation = out.max_deviation.max(dev);
        if dev > GAP_TOLERANCE + 1e-9 {
            out.mismatches.push((row.no, printed, recomputed));
        }
    }
    out
}

/// Gap statistics over populated rows against their scale index.
pub fn fixture_stats(rows: &[FixtureRow]) -> Result<GapStats, StatsError> {
    let (gaps, scales): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| Some((r.gap?, r.scale_index())))
        .unzip();
    gap_stats(&gaps, &scales)
}
