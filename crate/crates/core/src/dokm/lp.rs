//! The surrogate LP over reduced costs.

use alloc::vec;
use alloc::vec::Vec;

use super::guess::ReducedCostGuess;
use super::solution::{FractionalSolution, StepSolution};
use crate::instance::Instance;
use crate::lp::{LinearProgram, Relation};

/// Variable indices of a reduced LP.
#[derive(Debug, Clone, PartialEq)]
pub struct LpLayout {
    /// `x[t][j][i]` for client position `j`, facility position `i`.
    pub x: Vec<Vec<Vec<usize>>>,
    pub y: Vec<Vec<usize>>,
    /// `z[t][i][i2]`.
    pub z: Vec<Vec<Vec<usize>>>,
}

/// Builds the LP minimizing reduced service cost plus `gamma` times
/// movement, subject to full assignment, `k` open per step, `x <= y` and
/// movement marginals matching the openings on both sides.
pub fn build_reduced_lp(inst: &Instance, guess: &ReducedCostGuess) -> (LinearProgram, LpLayout) {
    let mut lp = LinearProgram::new();
    let inf = f64::INFINITY;
    let mut lay = LpLayout { x: Vec::new(), y: Vec::new(), z: Vec::new() };
    for (t, s) in inst.steps.iter().enumerate() {
        lay.y.push(s.facilities.iter().map(|_| lp.add_var(0.0, 0.0, inf)).collect());
        let xs = s
            .clients
            .iter()
            .map(|&j| s.facilities.iter().map(|&i| lp.add_var(guess.reduced_cost(t, inst.dist(i, j)), 0.0, inf)).collect())
            .collect();
        lay.x.push(xs);
    }
    for t in 0..inst.num_steps() - 1 {
        let (a, b) = (&inst.steps[t], &inst.steps[t + 1]);
        let zs = a
            .facilities
            .iter()
            .map(|&i| b.facilities.iter().map(|&i2| lp.add_var(inst.gamma * inst.dist(i, i2), 0.0, inf)).collect())
            .collect();
        lay.z.push(zs);
    }
    for (t, s) in inst.steps.iter().enumerate() {
        for j in 0..s.clients.len() {
            lp.add_constraint(lay.x[t][j].iter().map(|&v| (v, 1.0)).collect(), Relation::Eq, 1.0);
        }
        lp.add_constraint(lay.y[t].iter().map(|&v| (v, 1.0)).collect(), Relation::Eq, inst.k as f64);
        for j in 0..s.clients.len() {
            for i in 0..s.facilities.len() {
                lp.add_constraint(vec![(lay.x[t][j][i], 1.0), (lay.y[t][i], -1.0)], Relation::Le, 0.0);
            }
        }
    }
    for t in 0..inst.num_steps() - 1 {
        let (na, nb) = (inst.steps[t].facilities.len(), inst.steps[t + 1].facilities.len());
        for i in 0..na {
            let mut row: Vec<(usize, f64)> = (0..nb).map(|i2| (lay.z[t][i][i2], 1.0)).collect();
            row.push((lay.y[t][i], -1.0));
            lp.add_constraint(row, Relation::Eq, 0.0);
        }
        for i2 in 0..nb {
            let mut row: Vec<(usize, f64)> = (0..na).map(|i| (lay.z[t][i][i2], 1.0)).collect();
            row.push((lay.y[t + 1][i2], -1.0));
            lp.add_constraint(row, Relation::Eq, 0.0);
        }
    }
    (lp, lay)
}

/// Reads an LP value vector back into a fractional solution over the
/// original facility lists.
pub fn extract_solution(inst: &Instance, lay: &LpLayout, values: &[f64]) -> FractionalSolution {
    let steps = inst
        .steps
        .iter()
        .enumerate()
        .map(|(t, s)| StepSolution {
            clients: s.clients.clone(),
            units: s.facilities.clone(),
            origin: (0..s.facilities.len()).collect(),
            x: lay.x[t].iter().map(|row| row.iter().map(|&v| values[v]).collect()).collect(),
            y: lay.y[t].iter().map(|&v| values[v]).collect(),
        })
        .collect();
    let z = lay.z.iter().map(|m| m.iter().map(|row| row.iter().map(|&v| values[v]).collect()).collect()).collect();
    let mut sol = FractionalSolution { steps, z };
    sol.clean();
    sol
}
