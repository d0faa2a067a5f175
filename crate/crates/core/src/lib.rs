//! Approximation algorithms for dynamic clustering problems over a sequence
//! of time steps: Dynamic Ordered k-Median, Dynamic k-Supplier (with and
//! without outliers) and facility-weighted mobile facility location.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line driver live in the `dynclus` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod assignment;
pub mod cost;
pub mod dks;
pub mod dokm;
pub mod flow;
pub mod gen;
pub mod instance;
pub mod lp;
pub mod metric;
pub mod num;
pub mod oracle;
pub mod outlier;

pub use cost::{evaluate_schedule, min_matching_cost, ordered_cost, top_m_cost, CostBreakdown, Schedule};
pub use instance::{Instance, InstanceError, ProblemKind, TimeStep};
pub use metric::{Metric, MetricError, PointId};
