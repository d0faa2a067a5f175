//! Radius search and certificate checking for the outlier variant.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::filter::greedy_filter;
use super::guess::{enumerate_guesses, guess_size, reduce_instance, sorted_radii, GuessTuple, ReducedProblem};
use super::lp::build_outlier_lp;
use super::matching::{decompose_basic, min_cardinality_lp, patch_matchings, Route};
use super::split::{split, BudgetedMatchingProblem};
use super::within;
use crate::cost::{evaluate_schedule, Schedule};
use crate::instance::{Instance, InstanceError, ProblemKind};
use crate::lp::LpError;
use crate::metric::PointId;
use crate::num::ceil;

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierParams {
    pub epsilon: f64,
    pub gamma: f64,
    /// Guesses kept per radius after ordering.
    pub max_guesses: usize,
}

impl Default for OutlierParams {
    fn default() -> Self {
        OutlierParams { epsilon: 0.25, gamma: 8.0, max_guesses: 50_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OutlierError {
    Instance(InstanceError),
    NotTwoSteps(usize),
    BadParameter(&'static str),
    /// No radius and guess produced a certified schedule.
    Infeasible,
}

impl fmt::Display for OutlierError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutlierError::Instance(e) => write!(f, "{e}"),
            OutlierError::NotTwoSteps(t) => write!(f, "the outlier solver needs exactly two steps, got {t}"),
            OutlierError::BadParameter(m) => write!(f, "bad parameter: {m}"),
            OutlierError::Infeasible => write!(f, "no certified schedule within the guess caps"),
        }
    }
}

/// What the emitted schedule is certified to do.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCertificate {
    /// Radius guess `R`; coverage is counted within `3R`.
    pub radius_guess: f64,
    pub cover_radius: f64,
    /// Covered clients per step, each listed once.
    pub covered: [Vec<PointId>; 2],
    /// `ceil((1 - epsilon) l_t)`.
    pub required: [usize; 2],
    pub max_move: f64,
    /// Pairs of the final matching, reserved moves included.
    pub matching: Vec<(PointId, PointId)>,
    /// `L_t` of the patched matching against `l_t' - 8 max_e l_t(e)`.
    pub budget_after_patch: [f64; 2],
    pub budget_floor: [f64; 2],
    /// `1ᵀz0 <= k - kappa`.
    pub z0_cardinality: f64,
    pub kappa: usize,
    /// Whether every patch met its contract through either route.
    pub patches_ok: bool,
    pub decomposition_route: Route,
    pub patch_routes: Vec<Route>,
    /// Pruning bound for surviving facilities: largest residual coverage
    /// of a non-guessed facility, against `min u_i`.
    pub pruning: [(usize, usize); 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierOutcome {
    pub schedule: Schedule,
    pub certificate: CoverageCertificate,
    pub guess: GuessTuple,
    pub reduced: ReducedProblem,
    /// Index of the certified radius among the sorted candidates.
    pub radius_index: usize,
    /// Position of the certified guess in its ordered list.
    pub guess_index: usize,
    /// LP solves over the whole search.
    pub guesses_tried: usize,
    /// Some radius had its guess list truncated.
    pub truncated: bool,
}

struct Attempt {
    open: [Vec<PointId>; 2],
    pairs: Vec<(PointId, PointId)>,
    certificate: CoverageCertificate,
}

fn coverage(inst: &Instance, t: usize, open: &[PointId], r3: f64) -> Vec<PointId> {
    inst.steps[t].clients.iter().cloned().filter(|&j| open.iter().any(|&i| within(inst.dist(i, j), r3))).collect()
}

fn required(inst: &Instance, eps: f64) -> [usize; 2] {
    let q = |t: usize| ceil((1.0 - eps) * inst.steps[t].outlier_target as f64 - 1e-9).max(0.0) as usize;
    [q(0), q(1)]
}

/// Runs the rounding pipeline for one `(R, guess)`; `None` when the LP is
/// infeasible or the guess does not survive reduction.
fn attempt(inst: &Instance, guess: &GuessTuple, r: f64, eps: f64) -> Result<Option<(Attempt, ReducedProblem)>, LpError> {
    let red = reduce_instance(inst, guess, r);
    if !red.survives {
        return Ok(None);
    }
    let olp = build_outlier_lp(inst, &red, guess, r);
    let sol = match olp.solve() {
        Ok(s) => s,
        Err(LpError::Infeasible) => return Ok(None),
        Err(e) => return Err(e),
    };
    let filt = greedy_filter(&sol);
    let bmp = split(inst, &red, guess, &sol, &filt);
    let z0 = match min_cardinality_lp(&bmp) {
        Ok(z) => z,
        Err(LpError::Infeasible) => return Ok(None),
        Err(e) => return Err(e),
    };
    let z0_card: f64 = z0.iter().sum();
    let (matched, route, patch_routes, ok) = if z0.is_empty() {
        (Vec::new(), Route::Primary, Vec::new(), true)
    } else {
        let Some(dec) = decompose_basic(&bmp, &z0) else { return Ok(None) };
        let mut cur = dec.matchings[0].clone();
        let mut acc = dec.coeffs[0];
        let mut routes = Vec::new();
        let mut ok = true;
        for (m, &a) in dec.matchings.iter().zip(&dec.coeffs).skip(1) {
            let lam = acc / (acc + a);
            let pr = patch_matchings(&bmp, &cur, m, lam);
            ok &= pr.ok;
            routes.push(pr.route);
            cur = pr.matching;
            acc += a;
        }
        (cur, dec.route, routes, ok)
    };
    let vals = {
        let mut v = vec![0.0; bmp.edges.len()];
        for &e in &matched {
            v[e] = 1.0;
        }
        v
    };
    let patches = patch_routes.len().max(1) as f64;
    let budget_after_patch = [bmp.l1(&vals), bmp.l2(&vals)];
    let budget_floor = [bmp.targets[0] - 4.0 * patches * bmp.max_l1(), bmp.targets[1] - 4.0 * patches * bmp.max_l2()];
    let r3 = 3.0 * r;
    let mut pairs: Vec<(PointId, PointId)> = bmp.reserved.clone();
    pairs.extend(assemble(inst, &bmp, &matched, r3));
    let k = inst.k;
    if pairs.len() > k {
        pairs.truncate(k);
    }
    pad(inst, &mut pairs, k, r3);
    let open = [pairs.iter().map(|p| p.0).collect::<Vec<_>>(), pairs.iter().map(|p| p.1).collect::<Vec<_>>()];
    let covered = [coverage(inst, 0, &open[0], r3), coverage(inst, 1, &open[1], r3)];
    let max_move = pairs.iter().map(|&(a, b)| inst.dist(a, b)).fold(0.0, f64::max);
    let pruning = [0, 1].map(|t| {
        let worst = red.facilities[t]
            .iter()
            .filter(|i| !red.order[t].iter().any(|p| p.0 == **i))
            .map(|&i| red.clients[t].iter().filter(|&&j| within(inst.dist(i, j), r3)).count())
            .max()
            .unwrap_or(0);
        (worst, red.min_u(t))
    });
    let certificate = CoverageCertificate {
        radius_guess: r,
        cover_radius: r3,
        covered,
        required: required(inst, eps),
        max_move,
        matching: pairs.clone(),
        budget_after_patch,
        budget_floor,
        z0_cardinality: z0_card,
        kappa: bmp.reserved.len(),
        patches_ok: ok,
        decomposition_route: route,
        patch_routes,
        pruning,
    };
    Ok(Some((Attempt { open, pairs, certificate }, red)))
}

/// Picks, for each matched edge, the underlying move whose endpoints cover
/// the most clients within `r3`.
fn assemble(inst: &Instance, p: &BudgetedMatchingProblem, matched: &[usize], r3: f64) -> Vec<(PointId, PointId)> {
    matched
        .iter()
        .map(|&e| {
            let score = |&(a, b): &(PointId, PointId)| coverage(inst, 0, &[a], r3).len() + coverage(inst, 1, &[b], r3).len();
            let moves = &p.edges[e].moves;
            let mut best = moves[0];
            for m in moves.iter().skip(1) {
                if score(m) > score(&best) {
                    best = *m;
                }
            }
            best
        })
        .collect()
}

/// Adds moves within the bound until there are `k`, each time the one
/// that newly covers the most clients.
fn pad(inst: &Instance, pairs: &mut Vec<(PointId, PointId)>, k: usize, r3: f64) {
    let bound = inst.movement_bound.unwrap_or(f64::INFINITY);
    while pairs.len() < k {
        let open0: Vec<PointId> = pairs.iter().map(|p| p.0).collect();
        let open1: Vec<PointId> = pairs.iter().map(|p| p.1).collect();
        let base = coverage(inst, 0, &open0, r3).len() + coverage(inst, 1, &open1, r3).len();
        let mut best: Option<(usize, (PointId, PointId))> = None;
        for &a in &inst.steps[0].facilities {
            for &b in &inst.steps[1].facilities {
                if inst.dist(a, b) > bound {
                    continue;
                }
                let mut o0 = open0.clone();
                o0.push(a);
                let mut o1 = open1.clone();
                o1.push(b);
                let gain = coverage(inst, 0, &o0, r3).len() + coverage(inst, 1, &o1, r3).len() - base;
                if best.is_none_or(|x| gain > x.0) {
                    best = Some((gain, (a, b)));
                }
            }
        }
        match best {
            Some((_, m)) => pairs.push(m),
            None => return,
        }
    }
}

fn certified(inst: &Instance, a: &Attempt) -> bool {
    let c = &a.certificate;
    let bound = inst.movement_bound.unwrap_or(f64::INFINITY);
    a.pairs.len() == inst.k && a.pairs.iter().all(|&(x, y)| inst.dist(x, y) <= bound) && (0..2).all(|t| c.covered[t].len() >= c.required[t])
}

/// Tries radii in ascending order and, per radius, guesses in coverage
/// order; returns the first schedule whose certificate shows `|A_t| = k`,
/// moves within `B`, and at least `ceil((1 - epsilon) l_t)` clients within
/// `3R` in both steps.
pub fn solve_dks_outlier(inst: &Instance, params: &OutlierParams) -> Result<OutlierOutcome, OutlierError> {
    inst.validate().map_err(OutlierError::Instance)?;
    inst.expect_kind(ProblemKind::DksOutlier).map_err(OutlierError::Instance)?;
    if inst.num_steps() != 2 {
        return Err(OutlierError::NotTwoSteps(inst.num_steps()));
    }
    if !(params.epsilon > 0.0 && params.epsilon <= 1.0) || !(params.gamma > 0.0) || params.max_guesses == 0 {
        return Err(OutlierError::BadParameter("need 0 < epsilon <= 1, gamma > 0, max_guesses > 0"));
    }
    let size = guess_size(params.gamma, params.epsilon);
    let mut tried = 0;
    let mut truncated = false;
    for (ri, &r) in sorted_radii(inst).iter().enumerate() {
        let list = enumerate_guesses(inst, r, size, params.max_guesses);
        truncated |= list.truncated;
        for (gi, guess) in list.guesses.iter().enumerate() {
            tried += 1;
            let res = match attempt(inst, guess, r, params.epsilon) {
                Ok(v) => v,
                // A numerically failed LP only loses this guess.
                Err(_) => None,
            };
            let Some((a, red)) = res else { continue };
            if !certified(inst, &a) {
                continue;
            }
            let schedule = evaluate_schedule(inst, &a.open, core::slice::from_ref(&a.pairs)).expect("certified schedules are valid");
            return Ok(OutlierOutcome {
                schedule,
                certificate: a.certificate,
                guess: guess.clone(),
                reduced: red,
                radius_index: ri,
                guess_index: gi,
                guesses_tried: tried,
                truncated,
            });
        }
    }
    Err(OutlierError::Infeasible)
}
