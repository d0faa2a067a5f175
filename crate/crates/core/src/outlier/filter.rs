//! Greedy filtering of the LP clusters.

use alloc::vec;
use alloc::vec::Vec;

use super::lp::OutlierLpSolution;
use crate::num::{cmp_f64, EPS};

/// One step of the filter. Indices refer to `C_t'` (clients) and `F_t'`
/// (facilities) of the reduced problem.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyFilter {
    /// `E_j`: facilities with positive assignment to `j`.
    pub clusters: Vec<Vec<usize>>,
    /// `s_j`: the mass of `E_j`.
    pub mass: Vec<f64>,
    /// `C_t''` in selection order.
    pub kept: Vec<usize>,
    /// `c_j` for each kept client, aligned with `kept`.
    pub counts: Vec<usize>,
    /// The kept client whose iteration marked `j`.
    pub marked_by: Vec<Option<usize>>,
}

/// Processes clusters by decreasing mass (ties by index); each unmarked
/// cluster is kept and marks every unmarked cluster it intersects,
/// itself included. Empty clusters are never kept.
pub fn greedy_filter(sol: &OutlierLpSolution) -> [GreedyFilter; 2] {
    let one = |t: usize| {
        let x = &sol.x[t];
        let clusters: Vec<Vec<usize>> =
            x.iter().map(|row| row.iter().enumerate().filter(|(_, &v)| v > EPS).map(|(i, _)| i).collect()).collect();
        let mass: Vec<f64> = x.iter().map(|row| row.iter().filter(|&&v| v > EPS).sum()).collect();
        let mut order: Vec<usize> = (0..clusters.len()).filter(|&j| !clusters[j].is_empty()).collect();
        order.sort_by(|&a, &b| cmp_f64(mass[b], mass[a]).then(a.cmp(&b)));
        let mut marked_by = vec![None; clusters.len()];
        let mut kept = Vec::new();
        let mut counts = Vec::new();
        for &j in &order {
            if marked_by[j].is_some() {
                continue;
            }
            let mut c = 0;
            for &j2 in &order {
                if marked_by[j2].is_none() && clusters[j2].iter().any(|i| clusters[j].contains(i)) {
                    marked_by[j2] = Some(j);
                    c += 1;
                }
            }
            kept.push(j);
            counts.push(c);
        }
        GreedyFilter { clusters, mass, kept, counts, marked_by }
    };
    [one(0), one(1)]
}
