//! Guess enumeration and instance reduction.

use alloc::vec;
use alloc::vec::Vec;

use super::within;
use crate::instance::Instance;
use crate::metric::PointId;
use crate::num::{ceil, cmp_f64};

/// Guessed top facilities `t1 ⊆ F_1`, `t2 ⊆ F_2` with forced moves
/// `t1[a] -> g[a]` and `h[b] -> t2[b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessTuple {
    pub t1: Vec<PointId>,
    pub t2: Vec<PointId>,
    pub g: Vec<PointId>,
    pub h: Vec<PointId>,
}

impl GuessTuple {
    /// Distinct forced moves, sorted.
    pub fn reserved_edges(&self) -> Vec<(PointId, PointId)> {
        let mut e: Vec<(PointId, PointId)> = self.t1.iter().cloned().zip(self.g.iter().cloned()).collect();
        e.extend(self.h.iter().cloned().zip(self.t2.iter().cloned()));
        e.sort_unstable();
        e.dedup();
        e
    }
}

/// `ceil(gamma / epsilon)`.
pub fn guess_size(gamma: f64, epsilon: f64) -> usize {
    ceil(gamma / epsilon - 1e-9).max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuessList {
    pub guesses: Vec<GuessTuple>,
    /// Number of guesses before truncation.
    pub total: usize,
    pub truncated: bool,
}

/// Stop generating past this many raw guesses; the tail is never sorted in.
pub const GENERATION_LIMIT: usize = 2_000_000;

fn combinations(n: usize, s: usize, out: &mut Vec<Vec<usize>>) {
    let mut idx: Vec<usize> = (0..s).collect();
    if s > n {
        return;
    }
    loop {
        out.push(idx.clone());
        let Some(p) = (0..s).rev().find(|&p| idx[p] < n - s + p) else { return };
        idx[p] += 1;
        for q in p + 1..s {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Every map from `from` into the allowed targets of each element.
fn maps(allowed: &[Vec<PointId>], out: &mut Vec<Vec<PointId>>) {
    if allowed.iter().any(|a| a.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; allowed.len()];
    loop {
        out.push(idx.iter().zip(allowed).map(|(&i, a)| a[i]).collect());
        let Some(p) = (0..idx.len()).find(|&p| idx[p] + 1 < allowed[p].len()) else { return };
        idx[p] += 1;
        for q in idx[..p].iter_mut() {
            *q = 0;
        }
    }
}

pub(crate) fn ball(inst: &Instance, t: usize, i: PointId, r: f64) -> Vec<bool> {
    inst.steps[t].clients.iter().map(|&j| within(inst.dist(i, j), r)).collect()
}

fn union_count(inst: &Instance, t: usize, fs: impl Iterator<Item = PointId>, r: f64) -> usize {
    let mut cov = vec![false; inst.steps[t].clients.len()];
    for i in fs {
        for (c, b) in cov.iter_mut().zip(ball(inst, t, i, r)) {
            *c |= b;
        }
    }
    cov.iter().filter(|&&c| c).count()
}

/// All guesses with `|T_t|` from 1 to `min(size, k, |F_t|)` whose forced
/// moves respect the bound and number at most `k`, ordered by the clients
/// `T_1 ∪ h(T_2)` and `T_2 ∪ g(T_1)` cover within `3r` (descending, stable),
/// then truncated to `max_guesses`.
pub fn enumerate_guesses(inst: &Instance, r: f64, size: usize, max_guesses: usize) -> GuessList {
    let bound = inst.movement_bound.unwrap_or(f64::INFINITY);
    let (f1, f2) = (&inst.steps[0].facilities, &inst.steps[1].facilities);
    let near = |i: PointId, other: &[PointId]| -> Vec<PointId> { other.iter().cloned().filter(|&o| inst.dist(i, o) <= bound).collect() };
    // (set, map) choices per side
    let side = |own: &[PointId], other: &[PointId]| -> Vec<(Vec<PointId>, Vec<PointId>)> {
        let mut out = Vec::new();
        for s in 1..=size.min(inst.k).min(own.len()) {
            let mut combos = Vec::new();
            combinations(own.len(), s, &mut combos);
            for c in combos {
                let set: Vec<PointId> = c.iter().map(|&u| own[u]).collect();
                let allowed: Vec<Vec<PointId>> = set.iter().map(|&i| near(i, other)).collect();
                let mut ms = Vec::new();
                maps(&allowed, &mut ms);
                out.extend(ms.into_iter().map(|m| (set.clone(), m)));
            }
        }
        out
    };
    let a = side(f1, f2);
    let b = side(f2, f1);
    let r3 = 3.0 * r;
    let mut scored: Vec<(usize, GuessTuple)> = Vec::new();
    let mut total = 0usize;
    let mut truncated = false;
    'outer: for (t1, g) in &a {
        for (t2, h) in &b {
            let guess = GuessTuple { t1: t1.clone(), t2: t2.clone(), g: g.clone(), h: h.clone() };
            if guess.reserved_edges().len() > inst.k {
                continue;
            }
            total += 1;
            if scored.len() >= GENERATION_LIMIT {
                truncated = true;
                continue 'outer;
            }
            let cov =
                union_count(inst, 0, t1.iter().chain(h.iter()).cloned(), r3) + union_count(inst, 1, t2.iter().chain(g.iter()).cloned(), r3);
            scored.push((cov, guess));
        }
    }
    scored.sort_by(|x, y| y.0.cmp(&x.0));
    if scored.len() > max_guesses {
        scored.truncate(max_guesses);
        truncated = true;
    }
    GuessList { guesses: scored.into_iter().map(|s| s.1).collect(), total, truncated }
}

/// The instance left once the guessed facilities are committed.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedProblem {
    /// `C_t'`: clients no guessed facility covers within `3R`.
    pub clients: [Vec<PointId>; 2],
    /// `F_t'`: facilities that survive pruning, `T_t` included.
    pub facilities: [Vec<PointId>; 2],
    /// Residual targets `l_t'`.
    pub targets: [usize; 2],
    /// Clients first covered by the forced destinations `h(T_2)` / `g(T_1)`.
    pub u0: [usize; 2],
    /// `T_t` in greedy order with its marginal coverage `u_i`.
    pub order: [Vec<(PointId, usize)>; 2],
    /// `|C_t - C_t'|`.
    pub removed: [usize; 2],
    /// Forced moves target surviving facilities.
    pub survives: bool,
}

impl ReducedProblem {
    /// Smallest marginal `u_i`; unbounded when `T_t` is empty, so nothing is pruned.
    pub fn min_u(&self, t: usize) -> usize {
        self.order[t].iter().map(|p| p.1).min().unwrap_or(usize::MAX)
    }
}

/// Greedy ordering of `T_t` by marginal coverage within `3r`, residual
/// clients, pruning of facilities that cover more residual clients than
/// the least useful guessed one, and residual targets.
pub fn reduce_instance(inst: &Instance, guess: &GuessTuple, r: f64) -> ReducedProblem {
    let r3 = 3.0 * r;
    let mut clients: [Vec<PointId>; 2] = [Vec::new(), Vec::new()];
    let mut facilities: [Vec<PointId>; 2] = [Vec::new(), Vec::new()];
    let mut targets = [0usize; 2];
    let mut u0 = [0usize; 2];
    let mut order: [Vec<(PointId, usize)>; 2] = [Vec::new(), Vec::new()];
    let mut removed = [0usize; 2];
    for t in 0..2 {
        let (mine, forced) = if t == 0 { (&guess.t1, &guess.h) } else { (&guess.t2, &guess.g) };
        let step = &inst.steps[t];
        let mut covered = vec![false; step.clients.len()];
        let mut left: Vec<PointId> = mine.clone();
        while !left.is_empty() {
            let gain = |i: PointId| ball(inst, t, i, r3).iter().zip(&covered).filter(|(b, c)| **b && !**c).count();
            let mut pos = 0;
            let mut best = gain(left[0]);
            for (p, &i) in left.iter().enumerate().skip(1) {
                let v = gain(i);
                if v > best {
                    pos = p;
                    best = v;
                }
            }
            let i = left.remove(pos);
            for (c, b) in covered.iter_mut().zip(ball(inst, t, i, r3)) {
                *c |= b;
            }
            order[t].push((i, best));
        }
        let before = covered.iter().filter(|&&c| c).count();
        for &i in forced {
            for (c, b) in covered.iter_mut().zip(ball(inst, t, i, r3)) {
                *c |= b;
            }
        }
        removed[t] = covered.iter().filter(|&&c| c).count();
        u0[t] = removed[t] - before;
        clients[t] = step.clients.iter().zip(&covered).filter(|(_, c)| !**c).map(|(&j, _)| j).collect();
        let min_u = order[t].iter().map(|p| p.1).min().unwrap_or(usize::MAX);
        facilities[t] = step
            .facilities
            .iter()
            .cloned()
            .filter(|&i| mine.contains(&i) || clients[t].iter().filter(|&&j| within(inst.dist(i, j), r3)).count() <= min_u)
            .collect();
        let sum_u: usize = order[t].iter().map(|p| p.1).sum();
        targets[t] = step.outlier_target.saturating_sub(u0[t] + sum_u);
    }
    let survives = guess.h.iter().all(|i| facilities[0].contains(i)) && guess.g.iter().all(|i| facilities[1].contains(i));
    ReducedProblem { clients, facilities, targets, u0, order, removed, survives }
}

/// Sorts candidate radii ascending.
pub(crate) fn sorted_radii(inst: &Instance) -> Vec<f64> {
    let mut v = inst.client_facility_distances();
    v.sort_by(|a, b| cmp_f64(*a, *b));
    if v.is_empty() {
        v.push(0.0);
    }
    v
}
