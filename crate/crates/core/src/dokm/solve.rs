//! The guess-solve-round driver.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::filter::{oblivious_filter, FilterOutput};
use super::guess::{round_weights, GuessSpace, ReducedCostGuess};
use super::lp::{build_reduced_lp, extract_solution};
use super::network::{build_dokm_network, reroute, DokmNetwork, Rerouted};
use super::solution::{duplicate_facilities, FractionalSolution};
use crate::cost::{evaluate_schedule, Schedule};
use crate::flow::FlowError;
use crate::instance::{Instance, InstanceError, ProblemKind};
use crate::lp::{solve, LpError};
use crate::num::{round, sqrt};

/// Certified factor for two steps, before the `(1 + delta)` weight rounding.
pub fn base_factor() -> f64 {
    48.0 + 20.0 * sqrt(3.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DokmParams {
    pub delta: f64,
    /// Floor parameter of the weight rounding; defaults to `delta`.
    pub epsilon: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub max_guesses: usize,
}

impl Default for DokmParams {
    fn default() -> Self {
        DokmParams { delta: 0.1, epsilon: None, samples: 200, seed: 42, max_guesses: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DokmError {
    Instance(InstanceError),
    TooFewSteps,
    BadParameter(&'static str),
    Lp(LpError),
    Flow(FlowError),
    MalformedFlow,
}

impl fmt::Display for DokmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DokmError::Instance(e) => write!(f, "{e}"),
            DokmError::TooFewSteps => write!(f, "at least two time steps are required"),
            DokmError::BadParameter(m) => write!(f, "bad parameter: {m}"),
            DokmError::Lp(e) => write!(f, "{e}"),
            DokmError::Flow(e) => write!(f, "{e}"),
            DokmError::MalformedFlow => write!(f, "integral flow does not follow the network structure"),
        }
    }
}

impl From<FlowError> for DokmError {
    fn from(e: FlowError) -> Self {
        DokmError::Flow(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DokmOutcome {
    pub schedule: Schedule,
    /// Size of the full guess space.
    pub guess_count: usize,
    pub evaluated: usize,
    pub truncated: bool,
    /// Guess index that produced the returned schedule.
    pub best_guess: usize,
    /// LP optimum per evaluated guess, in guess order.
    pub lp_values: Vec<f64>,
    /// Guesses whose LP solution repeated an earlier one and were not resampled.
    pub skipped_duplicates: usize,
    pub samples_drawn: usize,
    /// Smallest true weight across steps.
    pub min_weight: f64,
    /// Set for three or more steps when some weight is zero.
    pub weight_warning: bool,
    /// Approximation factor the run is certified against.
    pub factor: f64,
}

/// A filtered, duplicated LP solution embedded in its network, ready to
/// sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub solution: FractionalSolution,
    pub filter: FilterOutput,
    pub network: DokmNetwork,
}

/// Solves the LP for `guess`, returning its value and solution.
pub fn solve_guess(inst: &Instance, guess: &ReducedCostGuess) -> Result<(f64, FractionalSolution), DokmError> {
    let (lp, lay) = build_reduced_lp(inst, guess);
    let s = solve(&lp).map_err(DokmError::Lp)?;
    Ok((s.objective_value, extract_solution(inst, &lay, &s.values)))
}

pub fn prepare(inst: &Instance, sol: &FractionalSolution) -> Result<Prepared, DokmError> {
    let dup = duplicate_facilities(sol);
    let filter = oblivious_filter(&inst.metric, &dup.steps);
    let network = build_dokm_network(&dup, &filter)?;
    Ok(Prepared { solution: dup, filter, network })
}

/// One dependent rounding of a prepared solution.
pub fn sample<R: rand::Rng + ?Sized>(p: &Prepared, rng: &mut R) -> Result<Rerouted, DokmError> {
    let flow = p.network.net.dependent_round(rng)?;
    reroute(&p.network, &p.solution, &p.filter, &flow).map_err(|_| DokmError::MalformedFlow)
}

fn solution_key(sol: &FractionalSolution) -> Vec<i64> {
    let q = |v: f64| round(v * 1e8) as i64;
    let mut key = Vec::new();
    for s in &sol.steps {
        key.extend(s.y.iter().map(|&v| q(v)));
        key.extend(s.x.iter().flatten().map(|&v| q(v)));
    }
    key.extend(sol.z.iter().flatten().flatten().map(|&v| q(v)));
    key
}

/// Rounded weights of every step.
pub fn rounded_weights(inst: &Instance, params: &DokmParams) -> Vec<Vec<f64>> {
    let eps = params.epsilon.unwrap_or(params.delta);
    inst.steps.iter().map(|s| round_weights(&s.weights, params.delta, eps)).collect()
}

/// Enumerates threshold guesses over the rounded weights, solves each
/// surrogate LP, rounds every distinct LP solution `samples` times and
/// returns the cheapest schedule under the true weights.
pub fn solve_dokm(inst: &Instance, params: &DokmParams) -> Result<DokmOutcome, DokmError> {
    inst.validate().map_err(DokmError::Instance)?;
    inst.expect_kind(ProblemKind::Dokm).map_err(DokmError::Instance)?;
    if inst.num_steps() < 2 {
        return Err(DokmError::TooFewSteps);
    }
    if !(params.delta > 0.0) || params.samples == 0 || params.max_guesses == 0 {
        return Err(DokmError::BadParameter("delta must be positive, samples and max_guesses nonzero"));
    }
    let space = GuessSpace::new(inst, &rounded_weights(inst, params));
    let guess_count = space.len();
    let evaluate = guess_count.min(params.max_guesses);

    let min_weight = inst.steps.iter().flat_map(|s| s.weights.iter().cloned()).fold(f64::INFINITY, f64::min);
    let min_weight = if min_weight.is_finite() { min_weight } else { 0.0 };
    let three_plus = inst.num_steps() >= 3;
    let weight_warning = three_plus && min_weight <= 0.0;
    let factor = if three_plus {
        (base_factor() + 6.0 * inst.gamma / min_weight) * (1.0 + params.delta)
    } else {
        base_factor() * (1.0 + params.delta)
    };

    let mut best: Option<(f64, Schedule, usize)> = None;
    let mut lp_values = Vec::with_capacity(evaluate);
    let mut seen = BTreeSet::new();
    let mut skipped = 0;
    let mut drawn = 0;
    for g in 0..evaluate {
        let guess = space.get(g);
        let (value, sol) = solve_guess(inst, &guess)?;
        lp_values.push(value);
        if !seen.insert(solution_key(&sol)) {
            skipped += 1;
            continue;
        }
        let prepared = prepare(inst, &sol)?;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ g as u64);
        for _ in 0..params.samples {
            let r = sample(&prepared, &mut rng)?;
            drawn += 1;
            let s = evaluate_schedule(inst, &r.open_sets, &[]).map_err(|_| DokmError::MalformedFlow)?;
            if best.as_ref().is_none_or(|b| s.costs.total < b.0) {
                best = Some((s.costs.total, s, g));
            }
        }
    }
    let (_, schedule, best_guess) = best.expect("at least one guess is evaluated");
    Ok(DokmOutcome {
        schedule,
        guess_count,
        evaluated: evaluate,
        truncated: evaluate < guess_count,
        best_guess,
        lp_values,
        skipped_duplicates: skipped,
        samples_drawn: drawn,
        min_weight,
        weight_warning,
        factor,
    })
}
