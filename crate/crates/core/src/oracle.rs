//! Exhaustive reference solvers for small instances. They enumerate every
//! multiset of open facilities per step and run a dynamic program over the
//! steps, so they are exact but only usable at desk scale.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::assignment::perfect_matching;
use crate::cost::{evaluate_schedule, lth_smallest, min_matching_cost, ordered_cost, service_distances, Schedule};
use crate::instance::{Instance, InstanceError, ProblemKind};
use crate::metric::PointId;

/// Default limit on the enumerated search space.
pub const DEFAULT_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    Instance(InstanceError),
    CapExceeded {
        states: u128,
        cap: u128,
    },
    /// No schedule satisfies the movement bound.
    Infeasible,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Instance(e) => write!(f, "{e}"),
            OracleError::CapExceeded { states, cap } => write!(f, "search space {states} exceeds the cap {cap}"),
            OracleError::Infeasible => write!(f, "no schedule satisfies the movement bound"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub objective: f64,
    pub schedule: Schedule,
    pub search_space: u128,
}

/// `C(n, r)`, saturating.
pub fn binomial(n: u128, r: u128) -> u128 {
    let r = r.min(n.saturating_sub(r));
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// All size-`k` multisets over `items`, as nondecreasing index sequences
/// mapped back to the items.
pub fn multisets(items: &[PointId], k: usize) -> Vec<Vec<PointId>> {
    let mut out = Vec::new();
    if items.is_empty() {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut idx = vec![0usize; k];
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let Some(p) = (0..k).rev().find(|&p| idx[p] + 1 < items.len()) else { return out };
        let v = idx[p] + 1;
        for q in idx[p..].iter_mut() {
            *q = v;
        }
    }
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).fold(1u128, |a, b| a.saturating_mul(b))
}

/// `prod_t C(|F_t| + k - 1, k) * (k!)^(T-1)`: placements times matchings.
pub fn search_space(inst: &Instance) -> u128 {
    let k = inst.k as u128;
    let mut s: u128 = 1;
    for st in &inst.steps {
        s = s.saturating_mul(binomial(st.facilities.len() as u128 + k - 1, k));
    }
    for _ in 1..inst.num_steps() {
        s = s.saturating_mul(factorial(inst.k));
    }
    s
}

fn check_cap(states: u128, cap: u128) -> Result<(), OracleError> {
    if states > cap {
        Err(OracleError::CapExceeded { states, cap })
    } else {
        Ok(())
    }
}

/// Minimum over paths of `node_cost` combined along the path by `combine`
/// (`+` for sums, `max` for radii) with `edge_cost` between consecutive
/// placements; `None` edges are forbidden. Returns the chosen placement
/// index per step.
fn path_dp(
    node_cost: &[Vec<f64>],
    mut edge_cost: impl FnMut(usize, usize, usize) -> Option<f64>,
    combine: impl Fn(f64, f64) -> f64,
) -> Option<(f64, Vec<usize>)> {
    let t_count = node_cost.len();
    let mut best: Vec<Vec<Option<f64>>> = vec![node_cost[0].iter().map(|&c| Some(c)).collect()];
    let mut back: Vec<Vec<usize>> = vec![vec![0; node_cost[0].len()]];
    for t in 1..t_count {
        let mut b = vec![None; node_cost[t].len()];
        let mut bk = vec![0; node_cost[t].len()];
        for a in 0..node_cost[t].len() {
            for p in 0..node_cost[t - 1].len() {
                let Some(prev) = best[t - 1][p] else { continue };
                let Some(e) = edge_cost(t - 1, p, a) else { continue };
                let v = combine(combine(prev, e), node_cost[t][a]);
                if b[a].is_none_or(|x| v < x) {
                    b[a] = Some(v);
                    bk[a] = p;
                }
            }
        }
        best.push(b);
        back.push(bk);
    }
    let last = &best[t_count - 1];
    let (mut a, val) = last.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).min_by(|x, y| crate::num::cmp_f64(x.1, y.1))?;
    let mut path = vec![0; t_count];
    for t in (0..t_count).rev() {
        path[t] = a;
        a = back[t][a];
    }
    Some((val, path))
}

fn finish(inst: &Instance, open: Vec<Vec<PointId>>, search_space: u128) -> OracleResult {
    let schedule = evaluate_schedule(inst, &open, &[]).expect("oracle placements are valid");
    OracleResult { objective: schedule.costs.total, schedule, search_space }
}

pub fn brute_force_dokm(inst: &Instance, cap: u128) -> Result<OracleResult, OracleError> {
    inst.validate().map_err(OracleError::Instance)?;
    inst.expect_kind(ProblemKind::Dokm).map_err(OracleError::Instance)?;
    let states = search_space(inst);
    check_cap(states, cap)?;
    let places: Vec<Vec<Vec<PointId>>> = inst.steps.iter().map(|s| multisets(&s.facilities, inst.k)).collect();
    let node: Vec<Vec<f64>> = places
        .iter()
        .zip(&inst.steps)
        .map(|(ps, s)| {
            ps.iter().map(|a| ordered_cost(&s.weights, &service_distances(&inst.metric, &s.clients, a)).expect("validated")).collect()
        })
        .collect();
    let edge = |t: usize, p: usize, a: usize| {
        let (c, _) = min_matching_cost(&inst.metric, &places[t][p], &places[t + 1][a]).expect("sizes equal k");
        Some(inst.gamma * c)
    };
    let (_, path) = path_dp(&node, edge, |x, y| x + y).expect("unconstrained transitions");
    let open = path.iter().enumerate().map(|(t, &a)| places[t][a].clone()).collect();
    Ok(finish(inst, open, states))
}

fn movement_feasible(inst: &Instance, a: &[PointId], b: &[PointId], bound: f64) -> bool {
    let n = a.len();
    let mut allowed = vec![false; n * n];
    for r in 0..n {
        for q in 0..n {
            allowed[r * n + q] = inst.dist(a[r], b[q]) <= bound;
        }
    }
    perfect_matching(n, &allowed).is_some()
}

fn brute_force_radius(inst: &Instance, cap: u128, outliers: bool) -> Result<OracleResult, OracleError> {
    inst.validate().map_err(OracleError::Instance)?;
    let bound = inst.movement_bound.ok_or(OracleError::Instance(InstanceError::MissingBound))?;
    let states = search_space(inst);
    check_cap(states, cap)?;
    let places: Vec<Vec<Vec<PointId>>> = inst.steps.iter().map(|s| multisets(&s.facilities, inst.k)).collect();
    let node: Vec<Vec<f64>> = places
        .iter()
        .zip(&inst.steps)
        .map(|(ps, s)| {
            ps.iter()
                .map(|a| {
                    let d = service_distances(&inst.metric, &s.clients, a);
                    if outliers {
                        lth_smallest(&d, s.outlier_target)
                    } else {
                        d.iter().cloned().fold(0.0, f64::max)
                    }
                })
                .collect()
        })
        .collect();
    let edge = |t: usize, p: usize, a: usize| {
        if movement_feasible(inst, &places[t][p], &places[t + 1][a], bound) {
            Some(0.0)
        } else {
            None
        }
    };
    let (_, path) = path_dp(&node, edge, f64::max).ok_or(OracleError::Infeasible)?;
    let open = path.iter().enumerate().map(|(t, &a)| places[t][a].clone()).collect();
    Ok(finish(inst, open, states))
}

/// Optimal radius under the movement bound.
pub fn brute_force_dks(inst: &Instance, cap: u128) -> Result<OracleResult, OracleError> {
    inst.expect_kind(ProblemKind::Dks).map_err(OracleError::Instance)?;
    brute_force_radius(inst, cap, false)
}

/// Optimal radius when step `t` only needs its `l_t` closest clients
/// covered.
pub fn brute_force_dks_outlier(inst: &Instance, cap: u128) -> Result<OracleResult, OracleError> {
    inst.expect_kind(ProblemKind::DksOutlier).map_err(OracleError::Instance)?;
    brute_force_radius(inst, cap, true)
}

/// Every assignment of a destination to each starting facility.
pub fn brute_force_tm_mfl(inst: &Instance, cap: u128) -> Result<OracleResult, OracleError> {
    inst.validate().map_err(OracleError::Instance)?;
    inst.expect_kind(ProblemKind::TmMfl).map_err(OracleError::Instance)?;
    let starts = &inst.steps[0].facilities;
    let dests = &inst.steps[1].facilities;
    let states = (dests.len() as u128).saturating_pow(starts.len() as u32);
    check_cap(states, cap)?;
    let mut choice = vec![0usize; starts.len()];
    let mut best: Option<Schedule> = None;
    loop {
        let dest: Vec<PointId> = choice.iter().map(|&c| dests[c]).collect();
        let pairs: Vec<(PointId, PointId)> = starts.iter().cloned().zip(dest.iter().cloned()).collect();
        let s = evaluate_schedule(inst, &[starts.clone(), dest], &[pairs]).expect("valid placement");
        if best.as_ref().is_none_or(|b| s.costs.total < b.costs.total) {
            best = Some(s);
        }
        let Some(p) = (0..choice.len()).find(|&p| choice[p] + 1 < dests.len()) else { break };
        choice[p] += 1;
        for q in choice[..p].iter_mut() {
            *q = 0;
        }
    }
    let schedule = best.expect("at least one placement");
    Ok(OracleResult { objective: schedule.costs.total, schedule, search_space: states })
}
