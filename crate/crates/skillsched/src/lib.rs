//! IO, formats and front ends for `skillsched-core`: JSON instance files,
//! schedule and trace exports, the benchmark table, sweep reports, the
//! `skillsched` CLI and the what-if HTTP service.

pub mod cli;
pub mod fixture;
pub mod format;
pub mod report;
pub mod service;
