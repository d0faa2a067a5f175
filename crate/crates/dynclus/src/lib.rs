//! File formats, solver dispatch, verification and benchmarks on top of
//! `dynclus-core`.

pub mod bench;
pub mod format;
pub mod run;
pub mod seeds;

pub use format::{instance_from_json, instance_to_json, read_instance, read_schedule, InstanceFile, ScheduleFile};
pub use run::{solve, solve_with_report, verify, OracleCheck, RunReport, SolveParams, Solved};
