//! Scheduling of multi-skill maintenance jobs against a fixed skilled workforce.
//!
//! Every job needs, for each skill it uses, a crew of `crew` technicians for
//! `duration` consecutive time units. Each skill has a fixed headcount over a
//! horizon of `T` units. The objective is the total weighted completion time
//! (TWCT) of the jobs, where a job completes when its last skill finishes.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation:
//!
//!  * [`model`] instances, schedules, the objective and feasibility checks
//!  * [`knapsack`] Dantzig ordering, fractional bound, prefix rule, residual fill
//!  * [`edm`] the per-skill nested-knapsack heuristic and its trace
//!  * [`exact`] a depth-first branch-and-bound oracle for desk-scale instances
//!  * [`scenario`] workforce bounds, `A_alpha` levels and scenario sweeps
//!  * [`stats`] Weibull fitting, moments and correlation for gap studies
//!  * [`generator`] seeded random instances
//!
//! File formats, the CLI and the HTTP service live in the `skillsched` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod clock;
pub mod edm;
pub mod exact;
pub mod generator;
pub mod knapsack;
pub mod model;
pub mod scenario;
pub mod stats;

pub use clock::{NoClock, Stopwatch};
pub use edm::{edm_solve, edm_single_skill, CapacityMode, EdmConfig, EdmSolution, EdmTrace};
pub use exact::{exact_single_skill, exact_solve, ExactResult, SearchLimits, SearchMode};
pub use knapsack::OrderingRule;
pub use model::{build_instance, Instance, ModelError, RawInstance, Schedule, ScheduleStatus};
