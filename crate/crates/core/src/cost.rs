//! Objective evaluation: ordered service costs, movement matchings and
//! full schedule evaluation.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::assignment::{bottleneck, hungarian};
use crate::instance::{Instance, ProblemKind};
use crate::metric::{Metric, PointId};
use crate::num::{cmp_f64, EPS};

#[derive(Debug, Clone, PartialEq)]
pub enum CostError {
    LengthMismatch { left: usize, right: usize },
    WeightsNotSorted,
    OutOfRange { m: usize, len: usize },
}

impl fmt::Display for CostError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostError::LengthMismatch { left, right } => write!(f, "length mismatch: {left} vs {right}"),
            CostError::WeightsNotSorted => write!(f, "weights are not nonincreasing"),
            CostError::OutOfRange { m, len } => write!(f, "m={m} is outside 1..={len}"),
        }
    }
}

/// `D` sorted nonincreasing; ties keep input order.
pub fn sorted_desc(d: &[f64]) -> Vec<f64> {
    let mut v = d.to_vec();
    v.sort_by(|a, b| cmp_f64(*b, *a));
    v
}

/// `w . D` with `D` sorted nonincreasing.
pub fn ordered_cost(w: &[f64], d: &[f64]) -> Result<f64, CostError> {
    if w.len() != d.len() {
        return Err(CostError::LengthMismatch { left: w.len(), right: d.len() });
    }
    if w.windows(2).any(|p| p[1] > p[0] + EPS) {
        return Err(CostError::WeightsNotSorted);
    }
    Ok(w.iter().zip(sorted_desc(d)).map(|(a, b)| a * b).sum())
}

/// Sum of the `m` largest entries of `D`.
pub fn top_m_cost(m: usize, d: &[f64]) -> Result<f64, CostError> {
    if m == 0 || m > d.len() {
        return Err(CostError::OutOfRange { m, len: d.len() });
    }
    Ok(sorted_desc(d).iter().take(m).sum())
}

/// Minimum-cost perfect matching between equal-size multisets, with the
/// realizing pairs `(x, y)` listed in the order of `xs`.
pub fn min_matching_cost(metric: &Metric, xs: &[PointId], ys: &[PointId]) -> Result<(f64, Vec<(PointId, PointId)>), CostError> {
    weighted_matching(metric, xs, ys, None)
}

/// As [`min_matching_cost`], with each pair's distance scaled by the weight
/// of its `xs` element.
pub fn weighted_matching(
    metric: &Metric,
    xs: &[PointId],
    ys: &[PointId],
    weights: Option<&[f64]>,
) -> Result<(f64, Vec<(PointId, PointId)>), CostError> {
    if xs.len() != ys.len() {
        return Err(CostError::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    let n = xs.len();
    let mut c = vec![0.0; n * n];
    for (r, &x) in xs.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[r]);
        for (s, &y) in ys.iter().enumerate() {
            c[r * n + s] = w * metric.dist(x, y);
        }
    }
    let (total, col) = hungarian(n, &c);
    Ok((total, xs.iter().enumerate().map(|(r, &x)| (x, ys[col[r]])).collect()))
}

/// Distance from each client to its nearest open facility.
pub fn service_distances(metric: &Metric, clients: &[PointId], open: &[PointId]) -> Vec<f64> {
    clients.iter().map(|&j| open.iter().map(|&i| metric.dist(i, j)).fold(f64::INFINITY, f64::min)).collect()
}

/// Decomposed objective of a schedule.
///
/// For the supplier kinds `service` and `total` hold the radius, `movement`
/// is zero and `max_moves` holds the longest pair of each transition.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CostBreakdown {
    pub service: f64,
    pub movement: f64,
    pub total: f64,
    pub radius: Option<f64>,
    pub max_moves: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub open_sets: Vec<Vec<PointId>>,
    pub transitions: Vec<Vec<(PointId, PointId)>>,
    pub costs: CostBreakdown,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleError {
    StepCount { expected: usize, found: usize },
    Cardinality { step: usize, size: usize, k: usize },
    NotAFacility { step: usize, point: PointId },
    TransitionCount { expected: usize, found: usize },
    NotABijection { transition: usize },
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleError::StepCount { expected, found } => {
                write!(f, "schedule has {found} open sets, instance has {expected} steps")
            }
            ScheduleError::Cardinality { step, size, k } => {
                write!(f, "step {step} opens {size} facilities, expected k={k}")
            }
            ScheduleError::NotAFacility { step, point } => {
                write!(f, "step {step} opens point {point}, which is not a facility of that step")
            }
            ScheduleError::TransitionCount { expected, found } => {
                write!(f, "schedule has {found} transitions, expected {expected}")
            }
            ScheduleError::NotABijection { transition } => {
                write!(f, "transition {transition} is not a bijection between consecutive open sets")
            }
        }
    }
}

fn same_multiset(a: &[PointId], b: &[PointId]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// Structural validation: step count, `|A_t| = k`, `A_t` drawn from `F_t`,
/// and (when given) every transition a bijection `A_t -> A_{t+1}`.
pub fn validate_schedule(
    inst: &Instance,
    open_sets: &[Vec<PointId>],
    transitions: &[Vec<(PointId, PointId)>],
) -> Result<(), ScheduleError> {
    let t_count = inst.num_steps();
    if open_sets.len() != t_count {
        return Err(ScheduleError::StepCount { expected: t_count, found: open_sets.len() });
    }
    for (t, a) in open_sets.iter().enumerate() {
        if a.len() != inst.k {
            return Err(ScheduleError::Cardinality { step: t, size: a.len(), k: inst.k });
        }
        if let Some(&p) = a.iter().find(|p| !inst.steps[t].facilities.contains(p)) {
            return Err(ScheduleError::NotAFacility { step: t, point: p });
        }
    }
    if !transitions.is_empty() {
        if transitions.len() != t_count - 1 {
            return Err(ScheduleError::TransitionCount { expected: t_count - 1, found: transitions.len() });
        }
        for (t, m) in transitions.iter().enumerate() {
            let from: Vec<PointId> = m.iter().map(|p| p.0).collect();
            let to: Vec<PointId> = m.iter().map(|p| p.1).collect();
            if !same_multiset(&from, &open_sets[t]) || !same_multiset(&to, &open_sets[t + 1]) {
                return Err(ScheduleError::NotABijection { transition: t });
            }
        }
    }
    Ok(())
}

/// The `l`-th smallest entry (1-based) of `d`, or 0 when `l = 0`.
pub fn lth_smallest(d: &[f64], l: usize) -> f64 {
    if l == 0 {
        return 0.0;
    }
    let mut v = d.to_vec();
    v.sort_by(|a, b| cmp_f64(*a, *b));
    v[l - 1]
}

/// Validates a schedule and fills in its costs.
///
/// * `dokm`: ordered service cost plus `gamma` times the minimum matching
///   cost of each transition; `transitions` is replaced by those matchings.
/// * `tm_mfl`: facility-weighted moves plus demand-weighted service; missing
///   transitions are filled by a weighted minimum matching.
/// * `dks`, `dks_outlier`: the radius (the `l_t`-th closest client per step for
///   outliers); missing transitions are filled by bottleneck matchings.
pub fn evaluate_schedule(
    inst: &Instance,
    open_sets: &[Vec<PointId>],
    transitions: &[Vec<(PointId, PointId)>],
) -> Result<Schedule, ScheduleError> {
    validate_schedule(inst, open_sets, transitions)?;
    let m = &inst.metric;
    let t_count = inst.num_steps();
    let mut out = Schedule { open_sets: open_sets.to_vec(), ..Default::default() };
    match inst.kind {
        ProblemKind::Dokm => {
            let mut service = 0.0;
            for (t, s) in inst.steps.iter().enumerate() {
                let d = service_distances(m, &s.clients, &open_sets[t]);
                service += ordered_cost(&s.weights, &d).expect("validated weights");
            }
            let mut movement = 0.0;
            for t in 0..t_count - 1 {
                let (c, pairs) = min_matching_cost(m, &open_sets[t], &open_sets[t + 1]).expect("sizes equal k");
                movement += c;
                out.transitions.push(pairs);
            }
            let movement = inst.gamma * movement;
            out.costs = CostBreakdown { service, movement, total: service + movement, radius: None, max_moves: Vec::new() };
        }
        ProblemKind::TmMfl => {
            let start = &inst.steps[0];
            let end = &inst.steps[1];
            let weight_of = |p: PointId| {
                let idx = start.facilities.iter().position(|&f| f == p).expect("validated start");
                start.facility_weights[idx]
            };
            let pairs = if transitions.is_empty() {
                let w: Vec<f64> = open_sets[0].iter().map(|&p| weight_of(p)).collect();
                weighted_matching(m, &open_sets[0], &open_sets[1], Some(&w)).expect("sizes equal k").1
            } else {
                transitions[0].clone()
            };
            let movement: f64 = pairs.iter().map(|&(a, b)| weight_of(a) * m.dist(a, b)).sum();
            let d = service_distances(m, &end.clients, &open_sets[1]);
            let service: f64 = d.iter().zip(&end.demands).map(|(a, b)| a * b).sum();
            out.transitions = vec![pairs];
            out.costs = CostBreakdown { service, movement, total: service + movement, radius: None, max_moves: Vec::new() };
        }
        ProblemKind::Dks | ProblemKind::DksOutlier => {
            let mut radius: f64 = 0.0;
            for (t, s) in inst.steps.iter().enumerate() {
                let d = service_distances(m, &s.clients, &open_sets[t]);
                let r =
                    if inst.kind == ProblemKind::Dks { d.iter().cloned().fold(0.0, f64::max) } else { lth_smallest(&d, s.outlier_target) };
                radius = radius.max(r);
            }
            let mut max_moves = Vec::new();
            for t in 0..t_count - 1 {
                let pairs = if transitions.is_empty() {
                    let (a, b) = (&open_sets[t], &open_sets[t + 1]);
                    let n = a.len();
                    let mut c = vec![0.0; n * n];
                    for r in 0..n {
                        for q in 0..n {
                            c[r * n + q] = m.dist(a[r], b[q]);
                        }
                    }
                    let (_, col) = bottleneck(n, &c);
                    (0..n).map(|r| (a[r], b[col[r]])).collect()
                } else {
                    transitions[t].clone()
                };
                max_moves.push(pairs.iter().map(|&(a, b)| m.dist(a, b)).fold(0.0, f64::max));
                out.transitions.push(pairs);
            }
            out.costs = CostBreakdown { service: radius, movement: 0.0, total: radius, radius: Some(radius), max_moves };
        }
    }
    Ok(out)
}
