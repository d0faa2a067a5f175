//! Turns a filtered LP solution into a budgeted bipartite matching:
//! reserved moves are taken out, facilities are split into copies of mass
//! at most one, and the copies inside each kept cluster are merged into a
//! single node carrying that cluster's budget.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::filter::GreedyFilter;
use super::guess::{GuessTuple, ReducedProblem};
use super::lp::OutlierLpSolution;
use crate::instance::Instance;
use crate::metric::PointId;
use crate::num::{floor, EPS};

#[derive(Debug, Clone, PartialEq)]
pub struct MatchNode {
    /// Facility locations merged or split into this node.
    pub underlying: Vec<PointId>,
    /// Kept client (index into `C_t'`) for a merged cluster node.
    pub cluster: Option<usize>,
    pub y: f64,
    /// `c_j` for merged nodes, zero otherwise.
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchEdge {
    pub a: usize,
    pub b: usize,
    pub value: f64,
    pub l1: f64,
    pub l2: f64,
    /// Underlying moves within the bound.
    pub moves: Vec<(PointId, PointId)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetedMatchingProblem {
    pub left: Vec<MatchNode>,
    pub right: Vec<MatchNode>,
    pub edges: Vec<MatchEdge>,
    /// `(l_1', l_2')`.
    pub targets: [f64; 2],
    /// `k - kappa`.
    pub cardinality: usize,
    pub reserved: Vec<(PointId, PointId)>,
}

impl BudgetedMatchingProblem {
    pub fn l1(&self, m: &[f64]) -> f64 {
        self.edges.iter().zip(m).map(|(e, v)| e.l1 * v).sum()
    }

    pub fn l2(&self, m: &[f64]) -> f64 {
        self.edges.iter().zip(m).map(|(e, v)| e.l2 * v).sum()
    }

    pub fn max_l1(&self) -> f64 {
        self.edges.iter().map(|e| e.l1).fold(0.0, f64::max)
    }

    pub fn max_l2(&self) -> f64 {
        self.edges.iter().map(|e| e.l2).fold(0.0, f64::max)
    }

    /// Largest degree over all nodes.
    pub fn max_degree(&self, m: &[f64]) -> f64 {
        let mut dl = vec![0.0; self.left.len()];
        let mut dr = vec![0.0; self.right.len()];
        for (e, v) in self.edges.iter().zip(m) {
            dl[e.a] += v;
            dr[e.b] += v;
        }
        dl.iter().chain(&dr).cloned().fold(0.0, f64::max)
    }

    /// Current edge values.
    pub fn values(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.value).collect()
    }
}

/// Copies of one facility: `(node, mass)`.
fn pieces(
    nodes: &mut Vec<MatchNode>,
    merged: &[usize],
    point: PointId,
    residual: f64,
    in_cluster: Option<(usize, f64)>,
) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let mut rest = residual;
    if let Some((c, x)) = in_cluster {
        let m = x.min(rest);
        if m > EPS {
            out.push((merged[c], m));
            nodes[merged[c]].y += m;
            rest -= m;
        }
    }
    let whole = floor(rest + EPS) as usize;
    for _ in 0..whole {
        nodes.push(MatchNode { underlying: vec![point], cluster: None, y: 1.0, budget: 0 });
        out.push((nodes.len() - 1, 1.0));
    }
    let frac = rest - whole as f64;
    if frac > EPS {
        nodes.push(MatchNode { underlying: vec![point], cluster: None, y: frac, budget: 0 });
        out.push((nodes.len() - 1, frac));
    }
    out
}

pub fn split(
    inst: &Instance,
    red: &ReducedProblem,
    guess: &GuessTuple,
    sol: &OutlierLpSolution,
    filt: &[GreedyFilter; 2],
) -> BudgetedMatchingProblem {
    let bound = inst.movement_bound.unwrap_or(f64::INFINITY);
    let (f1, f2) = (&red.facilities[0], &red.facilities[1]);
    let reserved = guess.reserved_edges();
    let mut z = sol.z.clone();
    for &(a, b) in &reserved {
        let u = f1.iter().position(|&i| i == a).expect("pinned facility survives");
        let v = f2.iter().position(|&i| i == b).expect("pinned facility survives");
        z[u][v] = (z[u][v] - 1.0).max(0.0);
    }
    let res1: Vec<f64> = z.iter().map(|r| r.iter().sum()).collect();
    let res2: Vec<f64> = (0..f2.len()).map(|v| z.iter().map(|r| r[v]).sum()).collect();

    let mut sides: [Vec<MatchNode>; 2] = [Vec::new(), Vec::new()];
    let mut parts: [Vec<Vec<(usize, f64)>>; 2] = [Vec::new(), Vec::new()];
    for t in 0..2 {
        let (fac, res) = if t == 0 { (f1, &res1) } else { (f2, &res2) };
        let fl = &filt[t];
        let merged: Vec<usize> = fl
            .kept
            .iter()
            .zip(&fl.counts)
            .map(|(&j, &c)| {
                sides[t].push(MatchNode {
                    underlying: fl.clusters[j].iter().map(|&u| fac[u]).collect(),
                    cluster: Some(j),
                    y: 0.0,
                    budget: c,
                });
                sides[t].len() - 1
            })
            .collect();
        for (u, &p) in fac.iter().enumerate() {
            let member = fl.kept.iter().position(|&j| fl.clusters[j].contains(&u)).map(|c| (c, sol.x[t][fl.kept[c]][u]));
            let ps = pieces(&mut sides[t], &merged, p, res[u], member);
            parts[t].push(ps);
        }
    }
    let [left, right] = sides;

    let mut edges: Vec<MatchEdge> = Vec::new();
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (a, na) in left.iter().enumerate() {
        for (b, nb) in right.iter().enumerate() {
            let moves: Vec<(PointId, PointId)> = na
                .underlying
                .iter()
                .flat_map(|&i| nb.underlying.iter().map(move |&i2| (i, i2)))
                .filter(|&(i, i2)| inst.dist(i, i2) <= bound)
                .collect();
            if moves.is_empty() {
                continue;
            }
            index.insert((a, b), edges.len());
            edges.push(MatchEdge { a, b, value: 0.0, l1: na.budget as f64, l2: nb.budget as f64, moves });
        }
    }
    for u in 0..f1.len() {
        for v in 0..f2.len() {
            if z[u][v] <= EPS {
                continue;
            }
            for &(na, ma) in &parts[0][u] {
                for &(nb, mb) in &parts[1][v] {
                    let e = index[&(na, nb)];
                    edges[e].value += z[u][v] * (ma / res1[u]) * (mb / res2[v]);
                }
            }
        }
    }
    BudgetedMatchingProblem {
        left,
        right,
        edges,
        targets: [red.targets[0] as f64, red.targets[1] as f64],
        cardinality: inst.k - reserved.len(),
        reserved,
    }
}
