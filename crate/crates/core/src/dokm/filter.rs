//! Oblivious filtering of clients, bundles, and nearest-neighbor pairing.

use alloc::vec::Vec;

use super::solution::StepSolution;
use crate::metric::Metric;
use crate::num::EPS;

/// A client that survived filtering. `client` is its position in the
/// step's client list.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredClient {
    pub client: usize,
    pub d_av: f64,
    /// Index into [`StepFilter::filtered`] of the nearest other survivor.
    pub nearest: Option<usize>,
    /// Half the distance to `nearest`; infinite for a lone survivor.
    pub radius: f64,
    /// Units with positive assignment strictly inside `radius`.
    pub bundle: Vec<usize>,
    pub mass: f64,
}

/// Parts of the pairing; indices point into [`StepFilter::filtered`].
/// `Pair(j, n)` always has `n` the nearest survivor of `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    Pair(usize, usize),
    Single(usize),
}

impl Pairing {
    pub fn members(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Pairing::Pair(a, b) => (a, Some(b)),
            Pairing::Single(a) => (a, None),
        };
        core::iter::once(a).chain(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepFilter {
    /// Average service cost of every client position.
    pub d_av: Vec<f64>,
    /// Survivors in the order they were picked.
    pub filtered: Vec<FilteredClient>,
    pub pairs: Vec<Pairing>,
    /// `bundle_of[u]` is the survivor whose bundle holds unit `u`.
    pub bundle_of: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    pub steps: Vec<StepFilter>,
}

/// Filtering for one step of a duplicated solution.
pub fn filter_step(metric: &Metric, s: &StepSolution) -> StepFilter {
    let n = s.clients.len();
    let d_av: Vec<f64> = (0..n).map(|j| s.d_av(metric, j)).collect();
    let dc = |a: usize, b: usize| metric.dist(s.clients[a], s.clients[b]);

    let mut alive: Vec<bool> = alloc::vec![true; n];
    let mut picked: Vec<usize> = Vec::new();
    // smallest d_av first, ties by client position; deleting against the
    // larger of the two averages keeps survivors 4-separated in the max sense
    while let Some(j) = (0..n).filter(|&j| alive[j]).min_by(|&a, &b| crate::num::cmp_f64(d_av[a], d_av[b]).then(a.cmp(&b))) {
        picked.push(j);
        alive[j] = false;
        for j2 in 0..n {
            if alive[j2] && dc(j, j2) <= 4.0 * d_av[j].max(d_av[j2]) {
                alive[j2] = false;
            }
        }
    }

    let m = picked.len();
    let mut filtered: Vec<FilteredClient> = Vec::with_capacity(m);
    let mut bundle_of = alloc::vec![None; s.units.len()];
    for a in 0..m {
        let j = picked[a];
        let nearest = (0..m)
            .filter(|&b| b != a)
            .min_by(|&x, &y| crate::num::cmp_f64(dc(j, picked[x]), dc(j, picked[y])).then(picked[x].cmp(&picked[y])));
        let radius = nearest.map_or(f64::INFINITY, |b| 0.5 * dc(j, picked[b]));
        let bundle: Vec<usize> =
            (0..s.units.len()).filter(|&u| s.x[j][u] > EPS && metric.dist(s.units[u], s.clients[j]) < radius).collect();
        for &u in &bundle {
            bundle_of[u] = Some(a);
        }
        let mass = s.mass(&bundle);
        filtered.push(FilteredClient { client: j, d_av: d_av[j], nearest, radius, bundle, mass });
    }

    let mut free = alloc::vec![true; m];
    let mut pairs = Vec::new();
    loop {
        let best = (0..m).filter(|&a| free[a] && filtered[a].nearest.is_some_and(|b| free[b])).min_by(|&a, &b| {
            let da = 2.0 * filtered[a].radius;
            let db = 2.0 * filtered[b].radius;
            crate::num::cmp_f64(da, db).then(filtered[a].client.cmp(&filtered[b].client))
        });
        let Some(a) = best else { break };
        let b = filtered[a].nearest.expect("filtered above");
        pairs.push(Pairing::Pair(a, b));
        free[a] = false;
        free[b] = false;
    }
    for a in 0..m {
        if free[a] {
            pairs.push(Pairing::Single(a));
        }
    }
    StepFilter { d_av, filtered, pairs, bundle_of }
}

pub fn oblivious_filter(metric: &Metric, steps: &[StepSolution]) -> FilterOutput {
    FilterOutput { steps: steps.iter().map(|s| filter_step(metric, s)).collect() }
}
