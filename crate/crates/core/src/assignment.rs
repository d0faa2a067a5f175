//! Square assignment problems (Hungarian method) and bipartite matching
//! helpers used for movement costs.

use alloc::vec;
use alloc::vec::Vec;

/// Minimum-cost perfect assignment on an `n x n` cost matrix given in
/// row-major order. Returns the cost and `col[row]`.
///
/// O(n^3) shortest augmenting path variant with potentials.
pub fn hungarian(n: usize, cost: &[f64]) -> (f64, Vec<usize>) {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    if n == 0 {
        return (0.0, Vec::new());
    }
    // 1-based arrays; index 0 is the virtual root column.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0usize; n];
    for j in 1..=n {
        col[p[j] - 1] = j - 1;
    }
    let total = (0..n).map(|r| cost[r * n + col[r]]).sum();
    (total, col)
}

/// Perfect matching in the bipartite graph `allowed[r * n + c]`, if any
/// (augmenting paths). Returns `col[row]`.
pub fn perfect_matching(n: usize, allowed: &[bool]) -> Option<Vec<usize>> {
    assert_eq!(allowed.len(), n * n);
    let mut match_col: Vec<Option<usize>> = vec![None; n];
    for r in 0..n {
        let mut seen = vec![false; n];
        if !augment(r, n, allowed, &mut seen, &mut match_col) {
            return None;
        }
    }
    let mut col = vec![0usize; n];
    for (c, r) in match_col.iter().enumerate() {
        col[r.expect("perfect matching")] = c;
    }
    Some(col)
}

fn augment(r: usize, n: usize, allowed: &[bool], seen: &mut [bool], match_col: &mut [Option<usize>]) -> bool {
    for c in 0..n {
        if allowed[r * n + c] && !seen[c] {
            seen[c] = true;
            let free = match match_col[c] {
                None => true,
                Some(r2) => augment(r2, n, allowed, seen, match_col),
            };
            if free {
                match_col[c] = Some(r);
                return true;
            }
        }
    }
    false
}

/// Matching minimizing the largest used cost (bottleneck assignment).
/// Returns the bottleneck value and `col[row]`.
pub fn bottleneck(n: usize, cost: &[f64]) -> (f64, Vec<usize>) {
    if n == 0 {
        return (0.0, Vec::new());
    }
    let mut levels: Vec<f64> = cost.to_vec();
    crate::num::distinct_sorted(&mut levels);
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        let allowed: Vec<bool> = cost.iter().map(|&c| c <= levels[mid]).collect();
        if perfect_matching(n, &allowed).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let allowed: Vec<bool> = cost.iter().map(|&c| c <= levels[lo]).collect();
    (levels[lo], perfect_matching(n, &allowed).expect("complete graph has a matching"))
}
