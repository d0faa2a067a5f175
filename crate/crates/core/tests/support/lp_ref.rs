//! Exact reference for small LPs: enumerate every basic solution in
//! rational arithmetic and keep the cheapest feasible one.
//!
//! Shared with the acceptance suite through `#[path]`.

#![allow(dead_code)]

use dynclus_core::lp::{LinearProgram, Relation};
use num::rational::BigRational;
use num::{BigInt, One, ToPrimitive, Zero};
use rand::Rng;

type Q = BigRational;

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Integer data of a random LP. Variables have lower bound `lower[j]` and an
/// optional finite upper bound.
#[derive(Debug, Clone)]
pub struct IntLp {
    pub cost: Vec<i64>,
    pub lower: Vec<i64>,
    pub upper: Vec<Option<i64>>,
    pub rows: Vec<(Vec<i64>, Relation, i64)>,
}

impl IntLp {
    pub fn to_lp(&self) -> LinearProgram {
        let mut lp = LinearProgram::new();
        for j in 0..self.cost.len() {
            let hi = self.upper[j].map_or(f64::INFINITY, |u| u as f64);
            lp.add_var(self.cost[j] as f64, self.lower[j] as f64, hi);
        }
        for (a, rel, b) in &self.rows {
            let coeffs = a.iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, &v)| (j, v as f64)).collect();
            lp.add_constraint(coeffs, *rel, *b as f64);
        }
        lp
    }
}

/// Random bounded LP with at most `max_vars` variables. Variables with a
/// negative cost always get a finite upper bound, so the optimum is finite
/// whenever the LP is feasible.
pub fn random_int_lp<R: Rng>(rng: &mut R, max_vars: usize, max_rows: usize) -> IntLp {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(1..=max_rows);
    let mut cost = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut bounded = 0;
    for _ in 0..n {
        let c = rng.gen_range(-3..=5);
        let lo = if rng.gen_bool(0.2) { 1 } else { 0 };
        let want_hi = c < 0 || (bounded < 3 && rng.gen_bool(0.2));
        let hi = if want_hi {
            bounded += 1;
            Some(lo + rng.gen_range(1..=3))
        } else {
            None
        };
        cost.push(c);
        lower.push(lo);
        upper.push(hi);
    }
    let mut rows = Vec::new();
    let mut has_eq = false;
    for _ in 0..m {
        let mut a: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.6) { rng.gen_range(-2..=4) } else { 0 }).collect();
        if a.iter().all(|&v| v == 0) {
            a[rng.gen_range(0..n)] = rng.gen_range(1..=3);
        }
        // a single equality row keeps the row system full rank
        let rel = match rng.gen_range(0..6) {
            0 if !has_eq => {
                has_eq = true;
                Relation::Eq
            }
            0 => Relation::Ge,
            1 | 2 => Relation::Le,
            _ => Relation::Ge,
        };
        let b = match rel {
            Relation::Le => rng.gen_range(2..=12),
            _ => rng.gen_range(0..=8),
        };
        rows.push((a, rel, b));
    }
    IntLp { cost, lower, upper, rows }
}

/// Solves the square system in place; `None` when singular.
fn solve_square(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Q::one() / a[col][col].clone();
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone() * inv.clone();
                for c in col..n {
                    let v = a[col][c].clone() * f.clone();
                    a[r][c] -= v;
                }
                let v = b[col].clone() * f;
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| b[i].clone() / a[i][i].clone()).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Exact optimum, or `None` when infeasible. The problem must be bounded.
pub fn vertex_enumeration(p: &IntLp) -> Option<(Q, Vec<Q>)> {
    let n = p.cost.len();
    let m = p.rows.len();
    // column layout: structurals, then one slack per inequality row
    let mut slack_of = vec![None; m];
    let mut cols = n;
    for (i, (_, rel, _)) in p.rows.iter().enumerate() {
        if *rel != Relation::Eq {
            slack_of[i] = Some(cols);
            cols += 1;
        }
    }
    let coef = |i: usize, c: usize| -> Q {
        if c < n {
            q(p.rows[i].0[c])
        } else if slack_of[i] == Some(c) {
            match p.rows[i].1 {
                Relation::Le => q(1),
                _ => q(-1),
            }
        } else {
            Q::zero()
        }
    };
    let lo = |c: usize| if c < n { q(p.lower[c]) } else { Q::zero() };
    let hi = |c: usize| if c < n { p.upper[c].map(q) } else { None };

    let mut best: Option<(Q, Vec<Q>)> = None;
    for basis in combinations(cols, m) {
        let nonbasic: Vec<usize> = (0..cols).filter(|c| !basis.contains(c)).collect();
        let flexible: Vec<usize> = nonbasic.iter().copied().filter(|&c| hi(c).is_some()).collect();
        for mask in 0u32..(1 << flexible.len()) {
            let mut val = vec![Q::zero(); cols];
            for &c in &nonbasic {
                val[c] = lo(c);
            }
            for (bit, &c) in flexible.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    val[c] = hi(c).unwrap();
                }
            }
            let a: Vec<Vec<Q>> = (0..m).map(|i| basis.iter().map(|&c| coef(i, c)).collect()).collect();
            let b: Vec<Q> = (0..m)
                .map(|i| {
                    let mut r = q(p.rows[i].2);
                    for &c in &nonbasic {
                        r -= coef(i, c) * val[c].clone();
                    }
                    r
                })
                .collect();
            let Some(xb) = solve_square(a, b) else { continue };
            let ok = basis.iter().zip(&xb).all(|(&c, v)| *v >= lo(c) && hi(c).is_none_or(|h| *v <= h));
            if !ok {
                continue;
            }
            for (&c, v) in basis.iter().zip(xb) {
                val[c] = v;
            }
            let obj: Q = (0..n).map(|j| q(p.cost[j]) * val[j].clone()).fold(Q::zero(), |a, b| a + b);
            if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                best = Some((obj, val[..n].to_vec()));
            }
        }
    }
    best
}

pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().expect("small rationals convert")
}
