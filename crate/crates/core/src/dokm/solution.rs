//! Fractional (x, y, z) solutions and facility duplication.

use alloc::vec;
use alloc::vec::Vec;

use crate::metric::{Metric, PointId};
use crate::num::EPS;

/// Fractional solution of one step. A unit is a (possibly duplicated) copy
/// of a candidate location; `origin[u]` indexes the step's facility list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepSolution {
    pub clients: Vec<PointId>,
    pub units: Vec<PointId>,
    pub origin: Vec<usize>,
    /// `x[j][u]`, client position `j`, unit `u`.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl StepSolution {
    /// Average unweighted service cost of client position `j`.
    pub fn d_av(&self, metric: &Metric, j: usize) -> f64 {
        let c = self.clients[j];
        self.x[j].iter().zip(&self.units).map(|(&x, &u)| x * metric.dist(u, c)).sum()
    }

    pub fn mass(&self, units: &[usize]) -> f64 {
        units.iter().map(|&u| self.y[u]).sum()
    }

    /// True when every positive assignment equals its unit's opening.
    pub fn is_saturated(&self, tol: f64) -> bool {
        self.x.iter().all(|row| row.iter().zip(&self.y).all(|(&x, &y)| x <= tol || (x - y).abs() <= tol))
    }
}

/// `z[t][u][v]` is the movement from unit `u` of step `t` to unit `v` of step
/// `t + 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FractionalSolution {
    pub steps: Vec<StepSolution>,
    pub z: Vec<Vec<Vec<f64>>>,
}

impl FractionalSolution {
    /// `sum d(u, v) z_uv` over a transition.
    pub fn movement(&self, metric: &Metric, t: usize) -> f64 {
        let (a, b) = (&self.steps[t], &self.steps[t + 1]);
        let mut s = 0.0;
        for (u, row) in self.z[t].iter().enumerate() {
            for (v, &z) in row.iter().enumerate() {
                s += z * metric.dist(a.units[u], b.units[v]);
            }
        }
        s
    }

    /// Zeroes values within `EPS` of 0 and rounds values within `EPS` of 1.
    pub fn clean(&mut self) {
        let snap = |v: &mut f64| {
            if v.abs() <= EPS {
                *v = 0.0;
            } else if (*v - crate::num::round(*v)).abs() <= EPS {
                *v = crate::num::round(*v);
            }
        };
        for s in self.steps.iter_mut() {
            s.y.iter_mut().for_each(snap);
            s.x.iter_mut().flatten().for_each(snap);
        }
        self.z.iter_mut().flatten().flatten().for_each(snap);
    }
}

/// Splits the units of one step so that every positive `x` equals the
/// unit's `y` and every `y <= 1`. Returns the new step and, for each new
/// unit, the old unit it came from together with its share `y_new / y_old`.
pub fn duplicate_step(s: &StepSolution) -> (StepSolution, Vec<(usize, f64)>) {
    let mut out = StepSolution { clients: s.clients.clone(), ..Default::default() };
    let mut parent = Vec::new();
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); s.clients.len()];
    for u in 0..s.units.len() {
        let y = s.y[u];
        if y <= EPS {
            continue;
        }
        let mut levels: Vec<f64> = s.x.iter().map(|r| r[u].min(y)).filter(|&v| v > EPS).collect();
        crate::num::distinct_sorted(&mut levels);
        // pieces between consecutive levels, then the unassigned remainder
        let mut pieces: Vec<(f64, f64)> = Vec::new();
        let mut prev = 0.0;
        for &l in &levels {
            pieces.push((l - prev, l));
            prev = l;
        }
        let mut rest = y - prev;
        while rest > EPS {
            let p = rest.min(1.0);
            pieces.push((p, f64::INFINITY));
            rest -= p;
        }
        for (size, top) in pieces {
            out.units.push(s.units[u]);
            out.origin.push(s.origin[u]);
            out.y.push(size);
            parent.push((u, size / y));
            for (j, row) in rows.iter_mut().enumerate() {
                let xj = s.x[j][u];
                // client j covers every piece up to its own level
                let assigned = xj > EPS && top <= xj + EPS;
                row.push(if assigned { size } else { 0.0 });
            }
        }
    }
    out.x = rows;
    (out, parent)
}

/// Duplication of every step, with `z` split by the product of shares.
pub fn duplicate_facilities(sol: &FractionalSolution) -> FractionalSolution {
    let mut steps = Vec::new();
    let mut parents = Vec::new();
    for s in &sol.steps {
        let (d, p) = duplicate_step(s);
        steps.push(d);
        parents.push(p);
    }
    let mut z = Vec::new();
    for t in 0..sol.z.len() {
        let (pa, pb) = (&parents[t], &parents[t + 1]);
        let mut m = vec![vec![0.0; pb.len()]; pa.len()];
        for (u, &(ou, su)) in pa.iter().enumerate() {
            for (v, &(ov, sv)) in pb.iter().enumerate() {
                m[u][v] = sol.z[t][ou][ov] * su * sv;
            }
        }
        z.push(m);
    }
    FractionalSolution { steps, z }
}
