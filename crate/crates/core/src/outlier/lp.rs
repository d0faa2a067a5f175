//! The coverage LP of the reduced problem.

use alloc::vec;
use alloc::vec::Vec;

use super::guess::{GuessTuple, ReducedProblem};
use crate::instance::Instance;
use crate::lp::{solve, LinearProgram, LpError, Relation};

/// Variable indices: `x[t][j][i]` exists only when facility `i` of `F_t'`
/// is within `R` of client `j` of `C_t'`; `z[i][i2]` only within `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlierLp {
    pub lp: LinearProgram,
    pub x: [Vec<Vec<Option<usize>>>; 2],
    pub y: [Vec<usize>; 2],
    pub z: Vec<Vec<Option<usize>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierLpSolution {
    pub x: [Vec<Vec<f64>>; 2],
    pub y: [Vec<f64>; 2],
    pub z: Vec<Vec<f64>>,
}

/// Coverage `>= l_t'`, client mass `<= 1`, `k` open units per step,
/// `x <= y`, the two movement conservation rows, and a pin `z >= 1` on every
/// reserved move. The objective is zero; any feasible point will do.
pub fn build_outlier_lp(inst: &Instance, red: &ReducedProblem, guess: &GuessTuple, r: f64) -> OutlierLp {
    let bound = inst.movement_bound.unwrap_or(f64::INFINITY);
    let mut lp = LinearProgram::new();
    let inf = f64::INFINITY;
    let mut x: [Vec<Vec<Option<usize>>>; 2] = [Vec::new(), Vec::new()];
    let mut y: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for t in 0..2 {
        y[t] = red.facilities[t].iter().map(|_| lp.add_var(0.0, 0.0, inf)).collect();
        x[t] = red.clients[t]
            .iter()
            .map(|&j| {
                red.facilities[t].iter().map(|&i| if inst.dist(i, j) <= r { Some(lp.add_var(0.0, 0.0, inf)) } else { None }).collect()
            })
            .collect();
    }
    let (f1, f2) = (&red.facilities[0], &red.facilities[1]);
    let z: Vec<Vec<Option<usize>>> = f1
        .iter()
        .map(|&i| f2.iter().map(|&i2| if inst.dist(i, i2) <= bound { Some(lp.add_var(0.0, 0.0, inf)) } else { None }).collect())
        .collect();
    for t in 0..2 {
        let all: Vec<(usize, f64)> = x[t].iter().flatten().flatten().map(|&v| (v, 1.0)).collect();
        lp.add_constraint(all, Relation::Ge, red.targets[t] as f64);
        for row in &x[t] {
            let r: Vec<(usize, f64)> = row.iter().flatten().map(|&v| (v, 1.0)).collect();
            if !r.is_empty() {
                lp.add_constraint(r, Relation::Le, 1.0);
            }
        }
        lp.add_constraint(y[t].iter().map(|&v| (v, 1.0)).collect(), Relation::Eq, inst.k as f64);
        for row in &x[t] {
            for (u, v) in row.iter().enumerate() {
                if let Some(v) = *v {
                    lp.add_constraint(vec![(v, 1.0), (y[t][u], -1.0)], Relation::Le, 0.0);
                }
            }
        }
    }
    for (v, _) in f2.iter().enumerate() {
        let mut row: Vec<(usize, f64)> = (0..f1.len()).filter_map(|u| z[u][v]).map(|e| (e, 1.0)).collect();
        row.push((y[1][v], -1.0));
        lp.add_constraint(row, Relation::Eq, 0.0);
    }
    for (u, _) in f1.iter().enumerate() {
        let mut row: Vec<(usize, f64)> = z[u].iter().flatten().map(|&e| (e, 1.0)).collect();
        row.push((y[0][u], -1.0));
        lp.add_constraint(row, Relation::Eq, 0.0);
    }
    for (a, b) in guess.reserved_edges() {
        let u = f1.iter().position(|&i| i == a);
        let v = f2.iter().position(|&i| i == b);
        match (u, v) {
            (Some(u), Some(v)) if z[u][v].is_some() => {
                lp.add_constraint(vec![(z[u][v].unwrap(), 1.0)], Relation::Ge, 1.0);
            }
            // Unreachable pin: force infeasibility explicitly.
            _ => lp.add_constraint(Vec::new(), Relation::Ge, 1.0),
        }
    }
    OutlierLp { lp, x, y, z }
}

impl OutlierLp {
    pub fn solve(&self) -> Result<OutlierLpSolution, LpError> {
        let s = solve(&self.lp)?;
        let val = |v: &Option<usize>| v.map_or(0.0, |v| snap(s.values[v]));
        Ok(OutlierLpSolution {
            x: [
                self.x[0].iter().map(|r| r.iter().map(val).collect()).collect(),
                self.x[1].iter().map(|r| r.iter().map(val).collect()).collect(),
            ],
            y: [self.y[0].iter().map(|&v| snap(s.values[v])).collect(), self.y[1].iter().map(|&v| snap(s.values[v])).collect()],
            z: self.z.iter().map(|r| r.iter().map(val).collect()).collect(),
        })
    }
}

fn snap(v: f64) -> f64 {
    let r = crate::num::round(v);
    if (v - r).abs() <= crate::num::EPS {
        r
    } else {
        v
    }
}
