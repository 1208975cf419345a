//! The `skillsched` command line.
//!
//! Exit codes: 0 success, 1 the run worked but the schedule is infeasible
//! or unproven, 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use skillsched_core::exact::{exact_solve, ExactError, Proof};
use skillsched_core::generator::{random_instance, GeneratorParams, WeightLaw};
use skillsched_core::scenario::{workforce_bounds, ALPHA_GRID};
use skillsched_core::{
    edm_solve, CapacityMode, EdmConfig, Instance, OrderingRule, SearchLimits, SearchMode,
};

use crate::fixture::{closure, embedded, fixture_stats, load_fixture};
use crate::format::{instance_to_json, parse_instance, traces, FormatError, ScheduleExport, TraceExport};
use crate::report::{parallel_sweep, SweepReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(name = "skillsched", version, about = "Skilled-workforce work-order scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file and print its workforce bounds.
    Validate {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Schedule with the nested-knapsack heuristic.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        edm: EdmFlags,
        /// Comma-separated headcount per skill, in file order.
        #[arg(long, value_delimiter = ',')]
        workforce: Option<Vec<u32>>,
        /// Include the per-iteration trace.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Optimal schedule by branch and bound (small instances only).
    Exact {
        input: PathBuf,
        #[command(flatten)]
        limits: LimitFlags,
        /// Return the best schedule found when a limit hits.
        #[arg(long)]
        best_effort: bool,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Evaluate workforce levels alpha in (0, 1].
    Sweep {
        input: PathBuf,
        #[command(flatten)]
        edm: EdmFlags,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        /// Also run the exact search per level.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        limits: LimitFlags,
        /// Report run times (makes output vary between runs).
        #[arg(long)]
        timings: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Write a random instance.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "default")]
        preset: Preset,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        skills: Option<usize>,
        #[arg(long)]
        horizon: Option<u32>,
        #[arg(long)]
        density: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        equal_weights: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Gap statistics of the benchmark table.
    FixtureStats {
        /// Table to read instead of the embedded one.
        #[arg(long, env = "SKILLSCHED_FIXTURE")]
        fixture: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
}

#[derive(Args)]
struct EdmFlags {
    #[arg(long, value_enum, default_value = "workload")]
    ordering: Ordering,
    #[arg(long, value_enum, default_value = "gated")]
    capacity: Capacity,
    /// Keep scheduling past the horizon instead of stopping.
    #[arg(long)]
    allow_overflow: bool,
}

impl EdmFlags {
    fn config(&self) -> EdmConfig {
        EdmConfig {
            ordering: match self.ordering {
                Ordering::Workload => OrderingRule::EfficacyPerWorkload,
                Ordering::Time => OrderingRule::EfficacyPerTime,
            },
            capacity_mode: match self.capacity {
                Capacity::Gated => CapacityMode::HeadcountGated,
                Capacity::Literal => CapacityMode::PaperLiteral,
            },
            allow_overflow: self.allow_overflow,
        }
    }
}

#[derive(Args)]
struct LimitFlags {
    #[arg(long, default_value_t = 10_000_000)]
    max_nodes: u64,
    #[arg(long)]
    max_seconds: Option<f64>,
}

impl LimitFlags {
    fn limits(&self, mode: SearchMode) -> Result<SearchLimits, String> {
        let time = match self.max_seconds {
            Some(s) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
            Some(s) => return Err(format!("--max-seconds must be positive, got {s}")),
            None => None,
        };
        SearchLimits::new(self.max_nodes, time, mode).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Ordering {
    Workload,
    Time,
}

#[derive(Clone, Copy, ValueEnum)]
enum Capacity {
    Gated,
    Literal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Default,
    Desk,
    Plant,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, msg: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "error: {msg}");
        EXIT_USAGE
    }
}

/// Runs the CLI with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    match cli.command {
        Command::Validate { input, format } => validate(&mut io, &input, format),
        Command::Solve {
            input,
            edm,
            workforce,
            trace,
            format,
            output,
        } => solve(&mut io, &input, &edm.config(), workforce.as_deref(), trace, format, output.as_deref()),
        Command::Exact {
            input,
            limits,
            best_effort,
            format,
        } => {
            let mode = if best_effort { SearchMode::BestEffort } else { SearchMode::ProveOptimal };
            match limits.limits(mode) {
                Ok(l) => exact(&mut io, &input, &l, format),
                Err(e) => io.fail(e),
            }
        }
        Command::Sweep {
            input,
            edm,
            alphas,
            exact,
            limits,
            timings,
            format,
        } => match limits.limits(SearchMode::BestEffort) {
            Ok(l) => sweep(&mut io, &input, &edm.config(), alphas, exact, &l, timings, format),
            Err(e) => io.fail(e),
        },
        Command::Gen {
            seed,
            preset,
            jobs,
            skills,
            horizon,
            density,
            alpha,
            equal_weights,
            output,
        } => {
            let mut p = match preset {
                Preset::Default => GeneratorParams::default(),
                Preset::Desk => GeneratorParams::desk_scale(),
                Preset::Plant => GeneratorParams::plant_scale(),
            };
            p.jobs = jobs.unwrap_or(p.jobs);
            p.skills = skills.unwrap_or(p.skills);
            p.horizon = horizon.unwrap_or(p.horizon);
            p.density = density.unwrap_or(p.density);
            p.alpha = alpha.unwrap_or(p.alpha);
            if equal_weights {
                p.weights = WeightLaw::Equal;
            }
            match random_instance(&p, seed) {
                Ok(inst) => emit(&mut io, &(instance_to_json(&inst) + "\n"), output.as_deref()),
                Err(e) => io.fail(e),
            }
        }
        Command::FixtureStats { fixture, format } => fixture_stats_cmd(&mut io, fixture.as_deref(), format),
    }
}

fn read_instance(io: &mut Io, path: &Path) -> Result<Instance, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| io.fail(format!("{}: {e}", path.display())))?;
    match parse_instance(&text) {
        Ok(inst) => {
            for w in inst.warnings() {
                let _ = writeln!(io.err, "warning: {w}");
            }
            Ok(inst)
        }
        Err(FormatError::Invalid(errors)) => {
            for e in &errors {
                let _ = writeln!(io.err, "invalid: {e}");
            }
            Err(io.fail(format!("{}: {} validation error(s)", path.display(), errors.len())))
        }
        Err(e) => Err(io.fail(format!("{}: {e}", path.display()))),
    }
}

fn emit(io: &mut Io, text: &str, output: Option<&Path>) -> i32 {
    match output {
        Some(p) => match std::fs::write(p, text) {
            Ok(()) => EXIT_OK,
            Err(e) => io.fail(format!("{}: {e}", p.display())),
        },
        None => {
            let _ = io.out.write_all(text.as_bytes());
            EXIT_OK
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    jobs: usize,
    skills: usize,
    operations: usize,
    horizon: u32,
    w_min: u64,
    w_max: u64,
    warnings: Vec<String>,
}

fn validate(io: &mut Io, input: &Path, format: Format) -> i32 {
    let inst = match read_instance(io, input) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let b = workforce_bounds(&inst);
    let report = ValidateReport {
        valid: true,
        jobs: inst.num_jobs(),
        skills: inst.num_skills(),
        operations: inst.op_count().total,
        horizon: inst.horizon(),
        w_min: b.w_min,
        w_max: b.w_max,
        warnings: inst.warnings().to_vec(),
    };
    let text = match format {
        Format::Json => to_json(&report),
        _ => format!(
            "valid: {} jobs, {} skills, {} operations, horizon {}\nworkforce bounds: W_min {} W_max {}\n",
            report.jobs, report.skills, report.operations, report.horizon, report.w_min, report.w_max
        ),
    };
    emit(io, &text, None)
}

#[derive(Serialize, serde::Deserialize, Debug, PartialEq)]
pub struct SolveOutput {
    pub schedule: ScheduleExport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceExport>>,
}

fn solve(
    io: &mut Io,
    input: &Path,
    config: &EdmConfig,
    workforce: Option<&[u32]>,
    trace: bool,
    format: Format,
    output: Option<&Path>,
) -> i32 {
    let mut inst = match read_instance(io, input) {
        Ok(i) => i,
        Err(code) => return code,
    };
    if let Some(w) = workforce {
        inst = match inst.with_workforce(w) {
            Ok(i) => i,
            Err(e) => return io.fail(e),
        };
    }
    let sol = edm_solve(&inst, config);
    let export = ScheduleExport::new(&inst, &sol.schedule, sol.objective.as_ref());
    let text = match format {
        Format::Json => to_json(&SolveOutput {
            schedule: export.clone(),
            trace: trace.then(|| traces(&inst, &sol.runs)),
        }),
        Format::Csv => schedule_csv(&export),
        Format::Human => schedule_human(&export, trace.then(|| traces(&inst, &sol.runs))),
    };
    let code = emit(io, &text, output);
    if code != EXIT_OK {
        return code;
    }
    if sol.is_complete() {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    }
}

fn schedule_csv(export: &ScheduleExport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["job", "skill", "start", "duration", "crew"]).expect("memory");
    for s in &export.starts {
        w.serialize((&s.job, &s.skill, s.start, s.duration, s.crew)).expect("memory");
    }
    String::from_utf8(w.into_inner().expect("memory")).expect("utf-8")
}

fn schedule_human(export: &ScheduleExport, trace: Option<Vec<TraceExport>>) -> String {
    let mut out = format!("status: {}\n", export.status);
    if let Some(o) = &export.objective {
        out.push_str(&format!("Z = {} (normalized weights), {} (weights as given)\n", o.z, o.z_unit));
        for (k, z) in &o.z_k {
            out.push_str(&format!("  Z_{k} = {z}\n"));
        }
    }
    for s in &export.starts {
        out.push_str(&format!(
            "  {:<12} {:<8} start {:>3}  p={} crew={}\n",
            s.job, s.skill, s.start, s.duration, s.crew
        ));
    }
    for u in &export.unplaced {
        out.push_str(&format!("  unplaced: {} on {}\n", u.job, u.skill));
    }
    for t in trace.iter().flatten() {
        out.push_str(&format!("trace {}\n", t.skill));
        for it in &t.iterations {
            out.push_str(&format!(
                "  t={} C={} psi={:?} m0={} theta={} fill={:?} started={:?} v={}\n",
                it.t, it.capacity, it.psi, it.m0, it.theta, it.residual_fill, it.started, it.value
            ));
        }
    }
    out
}

#[derive(Serialize, serde::Deserialize, Debug, PartialEq)]
pub struct ExactOutput {
    pub proof: String,
    pub nodes: u64,
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "Z_unit")]
    pub z_unit: f64,
    pub schedule: ScheduleExport,
}

fn exact(io: &mut Io, input: &Path, limits: &SearchLimits, format: Format) -> i32 {
    let inst = match read_instance(io, input) {
        Ok(i) => i,
        Err(code) => return code,
    };
    match exact_solve(&inst, limits) {
        Ok(res) => {
            let obj = skillsched_core::model::objective(&inst, &res.schedule).ok();
            let out = ExactOutput {
                proof: match res.proof {
                    Proof::Optimal => "optimal".into(),
                    Proof::BestFound => "best-found".into(),
                },
                nodes: res.nodes,
                z: res.value,
                z_unit: res.value * inst.weight_total(),
                schedule: ScheduleExport::new(&inst, &res.schedule, obj.as_ref()),
            };
            let text = match format {
                Format::Json => to_json(&out),
                Format::Csv => schedule_csv(&out.schedule),
                Format::Human => format!(
                    "{} after {} nodes\n{}",
                    out.proof,
                    out.nodes,
                    schedule_human(&out.schedule, None)
                ),
            };
            emit(io, &text, None);
            if res.proof == Proof::Optimal || limits.mode == SearchMode::BestEffort {
                EXIT_OK
            } else {
                EXIT_INFEASIBLE
            }
        }
        Err(e @ (ExactError::NoFeasibleSchedule { .. }
        | ExactError::LimitsExceededWithoutIncumbent { .. }
        | ExactError::NotProven { .. })) => {
            let _ = writeln!(io.out, "{e}");
            EXIT_INFEASIBLE
        }
        Err(e) => io.fail(e),
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    io: &mut Io,
    input: &Path,
    config: &EdmConfig,
    alphas: Option<Vec<f64>>,
    run_exact: bool,
    limits: &SearchLimits,
    timings: bool,
    format: Format,
) -> i32 {
    let inst = match read_instance(io, input) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let alphas = alphas.unwrap_or_else(|| ALPHA_GRID.to_vec());
    let rows = parallel_sweep(&inst, &alphas, config, limits, run_exact);
    let report = SweepReport::new(&rows, timings);
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
        Format::Human => report.to_human(),
    };
    emit(io, &text, None)
}

#[derive(Serialize)]
struct FixtureStatsOutput {
    rows: usize,
    populated: usize,
    infeasible_rows: Vec<usize>,
    gap_mismatches: usize,
    n: usize,
    mean: f64,
    std: f64,
    weibull_shape: f64,
    weibull_scale: f64,
    excluded_zero_count: usize,
    correlation_with_scale: f64,
}

fn fixture_stats_cmd(io: &mut Io, path: Option<&Path>, format: Format) -> i32 {
    let rows = match path {
        Some(p) => load_fixture(p),
        None => embedded(),
    };
    let rows = match rows {
        Ok(r) => r,
        Err(e) => return io.fail(e),
    };
    let c = closure(&rows);
    let s = match fixture_stats(&rows) {
        Ok(s) => s,
        Err(e) => return io.fail(e),
    };
    let out = FixtureStatsOutput {
        rows: rows.len(),
        populated: c.populated,
        infeasible_rows: c.infeasible,
        gap_mismatches: c.mismatches.len(),
        n: s.n,
        mean: s.mean,
        std: s.std,
        weibull_shape: s.weibull_shape,
        weibull_scale: s.weibull_scale,
        excluded_zero_count: s.excluded_zero_count,
        correlation_with_scale: s.correlation_with_scale,
    };
    let text = match format {
        Format::Json => to_json(&out),
        _ => format!(
            "rows {} (populated {}, N/A {:?}), gap mismatches {}\n\
             gaps: n {} mean {:.4} std {:.4}\n\
             Weibull fit on {} positive gaps: shape {:.4} scale {:.4}\n\
             Pearson(scale index, gap) = {:.4}\n",
            out.rows,
            out.populated,
            out.infeasible_rows,
            out.gap_mismatches,
            out.n,
            out.mean,
            out.std,
            out.n - out.excluded_zero_count,
            out.weibull_shape,
            out.weibull_scale,
            out.correlation_with_scale
        ),
    };
    emit(io, &text, None)
}
