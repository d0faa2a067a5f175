//! Weight rounding and enumeration of reduced-cost threshold guesses.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::Instance;
use crate::num::{ceil, distinct_sorted, ln, powi, EPS};

/// Rounded weights `w*`: the first weight is kept, every other weight at
/// least `eps * w_1 / |C|` is rounded up to a power of `1 + delta` (capped at
/// `w_1`), and smaller weights are raised to `eps * w_1 / |C|`.
pub fn round_weights(w: &[f64], delta: f64, eps: f64) -> Vec<f64> {
    if w.is_empty() {
        return Vec::new();
    }
    let w1 = w[0];
    if w1 <= 0.0 {
        return vec![0.0; w.len()];
    }
    let floor_w = eps * w1 / w.len() as f64;
    let base = 1.0 + delta;
    w.iter()
        .enumerate()
        .map(|(r, &wr)| {
            if r == 0 {
                w1
            } else if wr >= floor_w {
                let e = ln(wr) / ln(base);
                // guard exact powers against log round-off
                let e = if (e - crate::num::round(e)).abs() < 1e-9 { crate::num::round(e) } else { ceil(e) };
                powi(base, e as i32).min(w1)
            } else {
                floor_w
            }
        })
        .collect()
}

/// Distinct positive values of a nonincreasing weight vector, largest first.
pub fn distinct_levels(w: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = w.iter().cloned().filter(|&x| x > EPS).collect();
    distinct_sorted(&mut v);
    v.reverse();
    v
}

/// One threshold per distinct weight level at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedCostGuess {
    /// Distinct rounded weight values per step, decreasing.
    pub levels: Vec<Vec<f64>>,
    /// Nonincreasing thresholds per step, one per level.
    pub thresholds: Vec<Vec<f64>>,
}

impl ReducedCostGuess {
    /// `w_{r0} * d` with `r0` the first level whose threshold is at most
    /// `d`; zero when `d` is below every threshold.
    pub fn reduced_cost(&self, t: usize, d: f64) -> f64 {
        let tol = 1e-12 * d.abs().max(1.0);
        for (r, &th) in self.thresholds[t].iter().enumerate() {
            if th <= d + tol {
                return self.levels[t][r] * d;
            }
        }
        0.0
    }
}

/// Lazily indexed space of guesses: a Cartesian product over steps of the
/// nonincreasing threshold tuples drawn from that step's realized
/// client-facility distances plus 0.
#[derive(Debug, Clone)]
pub struct GuessSpace {
    levels: Vec<Vec<f64>>,
    tuples: Vec<Vec<Vec<f64>>>,
}

impl GuessSpace {
    /// `rounded[t]` holds the rounded weights of step `t`.
    pub fn new(inst: &Instance, rounded: &[Vec<f64>]) -> Self {
        let mut levels = Vec::new();
        let mut tuples = Vec::new();
        for (t, s) in inst.steps.iter().enumerate() {
            let lv = distinct_levels(&rounded[t]);
            let mut cand = vec![0.0];
            for &i in &s.facilities {
                for &j in &s.clients {
                    cand.push(inst.dist(i, j));
                }
            }
            distinct_sorted(&mut cand);
            cand.reverse();
            tuples.push(nonincreasing_tuples(&cand, lv.len()));
            levels.push(lv);
        }
        GuessSpace { levels, tuples }
    }

    /// Total number of guesses (saturating).
    pub fn len(&self) -> usize {
        self.tuples.iter().fold(1usize, |acc, t| acc.saturating_mul(t.len()))
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Guess number `index` in lexicographic order (first step slowest).
    pub fn get(&self, mut index: usize) -> ReducedCostGuess {
        let mut thresholds = vec![Vec::new(); self.tuples.len()];
        for t in (0..self.tuples.len()).rev() {
            let n = self.tuples[t].len();
            thresholds[t] = self.tuples[t][index % n].clone();
            index /= n;
        }
        ReducedCostGuess { levels: self.levels.clone(), thresholds }
    }
}

/// All nonincreasing length-`n` tuples over `cand` (given decreasing).
fn nonincreasing_tuples(cand: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    if n == 0 {
        return vec![Vec::new()];
    }
    loop {
        out.push(idx.iter().map(|&i| cand[i]).collect());
        // advance the rightmost index that can grow, reset the tail to it
        let mut p = n;
        while p > 0 && idx[p - 1] == cand.len() - 1 {
            p -= 1;
        }
        if p == 0 {
            return out;
        }
        idx[p - 1] += 1;
        let v = idx[p - 1];
        for q in idx.iter_mut().skip(p) {
            *q = v;
        }
    }
}
