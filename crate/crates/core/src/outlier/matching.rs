//! Rounding of the budgeted matching: a basic minimum-cardinality point,
//! its decomposition into at most three matchings, and patching of two
//! matchings into one that nearly preserves both budgets.

use alloc::vec;
use alloc::vec::Vec;

use super::split::BudgetedMatchingProblem;
use crate::assignment::perfect_matching;
use crate::lp::{solve, LinearProgram, LpError, Relation};
use crate::num::EPS;

/// Which construction produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Primary,
    Exhaustive,
}

/// Basic solution of `min 1ᵀz` over fractional matchings meeting both
/// budget lower bounds.
pub fn min_cardinality_lp(p: &BudgetedMatchingProblem) -> Result<Vec<f64>, LpError> {
    let mut lp = LinearProgram::new();
    let vars: Vec<usize> = p.edges.iter().map(|_| lp.add_var(1.0, 0.0, f64::INFINITY)).collect();
    if vars.is_empty() {
        return if p.targets.iter().all(|&t| t <= 0.0) { Ok(Vec::new()) } else { Err(LpError::Infeasible) };
    }
    for a in 0..p.left.len() {
        let row: Vec<(usize, f64)> = p.edges.iter().enumerate().filter(|(_, e)| e.a == a).map(|(i, _)| (vars[i], 1.0)).collect();
        if !row.is_empty() {
            lp.add_constraint(row, Relation::Le, 1.0);
        }
    }
    for b in 0..p.right.len() {
        let row: Vec<(usize, f64)> = p.edges.iter().enumerate().filter(|(_, e)| e.b == b).map(|(i, _)| (vars[i], 1.0)).collect();
        if !row.is_empty() {
            lp.add_constraint(row, Relation::Le, 1.0);
        }
    }
    lp.add_constraint(p.edges.iter().zip(&vars).map(|(e, &v)| (v, e.l1)).collect(), Relation::Ge, p.targets[0]);
    lp.add_constraint(p.edges.iter().zip(&vars).map(|(e, &v)| (v, e.l2)).collect(), Relation::Ge, p.targets[1]);
    let s = solve(&lp)?;
    Ok(vars.iter().map(|&v| snap01(s.values[v])).collect())
}

fn snap01(v: f64) -> f64 {
    if v.abs() <= EPS {
        0.0
    } else if (v - 1.0).abs() <= EPS {
        1.0
    } else {
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Edge indices of each matching.
    pub matchings: Vec<Vec<usize>>,
    pub coeffs: Vec<f64>,
    pub route: Route,
    /// `max_e |sum_i alpha_i z_i(e) - z0(e)|`.
    pub residual: f64,
}

fn indicator(m: &[usize], n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for &e in m {
        v[e] = 1.0;
    }
    v
}

fn residual(n: usize, ms: &[Vec<usize>], alpha: &[f64], z0: &[f64]) -> f64 {
    let mut v = vec![0.0; n];
    for (m, a) in ms.iter().zip(alpha) {
        for &e in m {
            v[e] += a;
        }
    }
    v.iter().zip(z0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Nonzero `lambda` with `sum lambda_i cols_i = 0`, if the columns are
/// dependent.
fn null_vector(cols: &[Vec<f64>]) -> Option<Vec<f64>> {
    let m = cols.len();
    let rows = cols.first().map_or(0, |c| c.len());
    let mut a: Vec<Vec<f64>> = (0..rows).map(|r| (0..m).map(|c| cols[c][r]).collect()).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..m {
        if row == rows {
            break;
        }
        let Some(best) = (row..rows).max_by(|&x, &y| crate::num::cmp_f64(a[x][col].abs(), a[y][col].abs())) else { break };
        if a[best][col].abs() <= 1e-9 {
            continue;
        }
        a.swap(row, best);
        let pv = a[row][col];
        for c in 0..m {
            a[row][c] /= pv;
        }
        for r in 0..rows {
            if r != row && a[r][col] != 0.0 {
                let f = a[r][col];
                for c in 0..m {
                    a[r][c] -= f * a[row][c];
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    let free = (0..m).find(|c| !pivots.iter().any(|p| p.1 == *c))?;
    let mut lambda = vec![0.0; m];
    lambda[free] = 1.0;
    for &(r, c) in &pivots {
        lambda[c] = -a[r][free];
    }
    Some(lambda)
}

/// Drops matchings until the remaining ones are affinely independent,
/// keeping the convex combination fixed.
fn caratheodory(n: usize, ms: &mut Vec<Vec<usize>>, alpha: &mut Vec<f64>) {
    loop {
        let cols: Vec<Vec<f64>> = ms
            .iter()
            .map(|m| {
                let mut v = indicator(m, n);
                v.push(1.0);
                v
            })
            .collect();
        let Some(mut lambda) = null_vector(&cols) else { return };
        if !lambda.iter().any(|&l| l > 1e-12) {
            lambda.iter_mut().for_each(|l| *l = -*l);
        }
        let t = lambda.iter().zip(alpha.iter()).filter(|(l, _)| **l > 1e-12).map(|(l, a)| a / l).fold(f64::INFINITY, f64::min);
        let mut drop = None;
        for (i, (a, l)) in alpha.iter_mut().zip(&lambda).enumerate() {
            *a -= t * l;
            if *l > 1e-12 && *a <= 1e-12 && drop.is_none() {
                drop = Some(i);
            }
        }
        let d = drop.expect("some coefficient reaches zero");
        ms.remove(d);
        alpha.remove(d);
        let mut i = 0;
        while i < alpha.len() {
            if alpha[i] <= 1e-12 {
                ms.remove(i);
                alpha.remove(i);
            } else {
                i += 1;
            }
        }
    }
}

/// Birkhoff decomposition of the doubly stochastic completion of `z0`:
/// rows are left nodes then right dummies, columns right nodes then left
/// dummies.
fn birkhoff(p: &BudgetedMatchingProblem, z0: &[f64]) -> Option<(Vec<Vec<usize>>, Vec<f64>)> {
    let (n1, n2) = (p.left.len(), p.right.len());
    let n = n1 + n2;
    let mut mat = vec![0.0; n * n];
    let mut edge_at = vec![usize::MAX; n1 * n2];
    let mut dl = vec![0.0; n1];
    let mut dr = vec![0.0; n2];
    for (i, e) in p.edges.iter().enumerate() {
        edge_at[e.a * n2 + e.b] = i;
        mat[e.a * n + e.b] += z0[i];
        mat[(n1 + e.b) * n + n2 + e.a] += z0[i];
        dl[e.a] += z0[i];
        dr[e.b] += z0[i];
    }
    for a in 0..n1 {
        mat[a * n + n2 + a] = (1.0 - dl[a]).max(0.0);
    }
    for b in 0..n2 {
        mat[(n1 + b) * n + b] = (1.0 - dr[b]).max(0.0);
    }
    let mut ms: Vec<Vec<usize>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut left = 1.0;
    for _ in 0..n * n + 1 {
        if left <= 1e-9 {
            break;
        }
        let allowed: Vec<bool> = mat.iter().map(|&v| v > 1e-9).collect();
        let cols = perfect_matching(n, &allowed)?;
        let theta = (0..n).map(|r| mat[r * n + cols[r]]).fold(f64::INFINITY, f64::min);
        for r in 0..n {
            mat[r * n + cols[r]] -= theta;
        }
        left -= theta;
        let mut m: Vec<usize> = (0..n1).filter(|&a| cols[a] < n2).map(|a| edge_at[a * n2 + cols[a]]).collect();
        m.sort_unstable();
        if let Some(pos) = ms.iter().position(|x| *x == m) {
            alpha[pos] += theta;
        } else {
            ms.push(m);
            alpha.push(theta);
        }
    }
    Some((ms, alpha))
}

/// Every matching inside `support`, up to `cap` of them.
fn matchings_within(p: &BudgetedMatchingProblem, support: &[usize], cap: usize) -> Vec<Vec<usize>> {
    fn rec(
        p: &BudgetedMatchingProblem,
        support: &[usize],
        at: usize,
        used_l: &mut Vec<bool>,
        used_r: &mut Vec<bool>,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if at == support.len() {
            out.push(cur.clone());
            return;
        }
        rec(p, support, at + 1, used_l, used_r, cur, out, cap);
        let e = &p.edges[support[at]];
        if !used_l[e.a] && !used_r[e.b] {
            used_l[e.a] = true;
            used_r[e.b] = true;
            cur.push(support[at]);
            rec(p, support, at + 1, used_l, used_r, cur, out, cap);
            cur.pop();
            used_l[e.a] = false;
            used_r[e.b] = false;
        }
    }
    let mut out = Vec::new();
    rec(p, support, 0, &mut vec![false; p.left.len()], &mut vec![false; p.right.len()], &mut Vec::new(), &mut out, cap);
    out
}

/// Matchings enumerated on a support before the fallback gives up.
pub const ENUMERATION_CAP: usize = 200_000;

fn exhaustive_decomposition(p: &BudgetedMatchingProblem, z0: &[f64]) -> Option<(Vec<Vec<usize>>, Vec<f64>)> {
    let support: Vec<usize> = (0..z0.len()).filter(|&e| z0[e] > 1e-9).collect();
    let all = matchings_within(p, &support, ENUMERATION_CAP);
    let mut lp = LinearProgram::new();
    let vars: Vec<usize> = all.iter().map(|_| lp.add_var(0.0, 0.0, f64::INFINITY)).collect();
    for &e in &support {
        let row: Vec<(usize, f64)> = all.iter().zip(&vars).filter(|(m, _)| m.contains(&e)).map(|(_, &v)| (v, 1.0)).collect();
        lp.add_constraint(row, Relation::Eq, z0[e]);
    }
    lp.add_constraint(vars.iter().map(|&v| (v, 1.0)).collect(), Relation::Eq, 1.0);
    let s = solve(&lp).ok()?;
    let mut ms = Vec::new();
    let mut alpha = Vec::new();
    for (m, &v) in all.into_iter().zip(&vars) {
        if s.values[v] > 1e-12 {
            ms.push(m);
            alpha.push(s.values[v]);
        }
    }
    Some((ms, alpha))
}

/// Writes `z0` as a convex combination of integral matchings. The primary
/// route is a Birkhoff decomposition reduced by Carathéodory; when that
/// leaves more than three matchings or does not reproduce `z0`, the
/// matchings of the support are enumerated and a basic combination is
/// taken instead.
pub fn decompose_basic(p: &BudgetedMatchingProblem, z0: &[f64]) -> Option<Decomposition> {
    let n = p.edges.len();
    if let Some((mut ms, mut alpha)) = birkhoff(p, z0) {
        caratheodory(n, &mut ms, &mut alpha);
        let res = residual(n, &ms, &alpha, z0);
        if ms.len() <= 3 && res <= 1e-7 {
            return Some(Decomposition { matchings: ms, coeffs: alpha, route: Route::Primary, residual: res });
        }
    }
    let (mut ms, mut alpha) = exhaustive_decomposition(p, z0)?;
    caratheodory(n, &mut ms, &mut alpha);
    let res = residual(n, &ms, &alpha, z0);
    Some(Decomposition { matchings: ms, coeffs: alpha, route: Route::Exhaustive, residual: res })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchResult {
    pub matching: Vec<usize>,
    pub route: Route,
    /// Whether the three inequalities of the contract hold.
    pub ok: bool,
}

struct Targets {
    l1: f64,
    l2: f64,
    card: f64,
    loss1: f64,
    loss2: f64,
}

impl Targets {
    fn score(&self, p: &BudgetedMatchingProblem, m: &[usize]) -> (bool, f64) {
        let v = indicator(m, p.edges.len());
        let (l1, l2) = (p.l1(&v), p.l2(&v));
        let ok = l1 >= self.l1 - self.loss1 - 1e-9 && l2 >= self.l2 - self.loss2 - 1e-9 && (m.len() as f64) <= self.card + 1e-9;
        (ok, l1 + l2 - m.len() as f64 * 1e-6)
    }
}

fn is_matching(p: &BudgetedMatchingProblem, m: &[usize]) -> bool {
    let mut ul = vec![false; p.left.len()];
    let mut ur = vec![false; p.right.len()];
    for &e in m {
        let ed = &p.edges[e];
        if ul[ed.a] || ur[ed.b] {
            return false;
        }
        ul[ed.a] = true;
        ur[ed.b] = true;
    }
    true
}

/// Components of the symmetric difference, each as its edges in walk order
/// and whether it closes into a cycle.
fn components(p: &BudgetedMatchingProblem, diff: &[usize]) -> Vec<(Vec<usize>, bool)> {
    let n1 = p.left.len();
    let node = |e: usize| (p.edges[e].a, n1 + p.edges[e].b);
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n1 + p.right.len()];
    for &e in diff {
        let (u, v) = node(e);
        inc[u].push(e);
        inc[v].push(e);
    }
    let mut seen = vec![false; p.edges.len()];
    let mut out = Vec::new();
    let walk = |start_node: usize, first: usize, seen: &mut Vec<bool>| {
        let mut seq = Vec::new();
        let mut cur = start_node;
        let mut e = first;
        loop {
            seen[e] = true;
            seq.push(e);
            let (u, v) = node(e);
            cur = if u == cur { v } else { u };
            match inc[cur].iter().find(|&&f| !seen[f]) {
                Some(&f) => e = f,
                None => break,
            }
        }
        seq
    };
    for (v, es) in inc.iter().enumerate() {
        if es.len() == 1 && !seen[es[0]] {
            out.push((walk(v, es[0], &mut seen), false));
        }
    }
    for &e in diff {
        if !seen[e] {
            out.push((walk(node(e).0, e, &mut seen), true));
        }
    }
    out
}

/// Candidate integral choices for one component: either side entirely, or
/// one side up to a switch point and the other after it.
fn component_options(p: &BudgetedMatchingProblem, seq: &[usize], cycle: bool, in_a: &[bool]) -> Vec<Vec<usize>> {
    let l = seq.len();
    let a: Vec<usize> = seq.iter().cloned().filter(|&e| in_a[e]).collect();
    let b: Vec<usize> = seq.iter().cloned().filter(|&e| !in_a[e]).collect();
    let mut out = vec![a, b];
    let starts = if cycle { l } else { 1 };
    for s in 0..starts {
        let rot: Vec<usize> = (0..l).map(|q| seq[(s + q) % l]).collect();
        for gap in 0..l {
            for first_a in [true, false] {
                let m: Vec<usize> = rot
                    .iter()
                    .enumerate()
                    .filter(|&(q, &e)| {
                        if q == gap || (cycle && q == 0) {
                            false
                        } else if q < gap {
                            in_a[e] == first_a
                        } else {
                            in_a[e] != first_a
                        }
                    })
                    .map(|(_, &e)| e)
                    .collect();
                if is_matching(p, &m) && !out.contains(&m) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Choices enumerated over the fractional components before falling back.
pub const OPTION_CAP: usize = 100_000;

/// Integral matching inside `ma ∪ mb` that loses at most four maximal
/// budget values against the `lambda`-combination of both budgets and does
/// not exceed its cardinality.
///
/// The primary route puts one weight per symmetric-difference component,
/// takes a basic point of the three equalities (so at most three components
/// stay fractional) and resolves those by switch points. The fallback
/// enumerates every matching of the union.
pub fn patch_matchings(p: &BudgetedMatchingProblem, ma: &[usize], mb: &[usize], lambda: f64) -> PatchResult {
    let n = p.edges.len();
    let (va, vb) = (indicator(ma, n), indicator(mb, n));
    let tg = Targets {
        l1: lambda * p.l1(&va) + (1.0 - lambda) * p.l1(&vb),
        l2: lambda * p.l2(&va) + (1.0 - lambda) * p.l2(&vb),
        card: lambda * ma.len() as f64 + (1.0 - lambda) * mb.len() as f64,
        loss1: 4.0 * p.max_l1(),
        loss2: 4.0 * p.max_l2(),
    };
    let mut sa: Vec<usize> = ma.to_vec();
    let mut sb: Vec<usize> = mb.to_vec();
    sa.sort_unstable();
    sb.sort_unstable();
    if lambda >= 1.0 - 1e-12 || sa == sb {
        return PatchResult { matching: sa, route: Route::Primary, ok: true };
    }
    if lambda <= 1e-12 {
        return PatchResult { matching: sb, route: Route::Primary, ok: true };
    }
    if let Some(m) = patch_primary(p, &sa, &sb, lambda, &tg) {
        return PatchResult { matching: m, route: Route::Primary, ok: true };
    }
    let (m, ok) = patch_exhaustive(p, &sa, &sb, &tg);
    PatchResult { matching: m, route: Route::Exhaustive, ok }
}

fn patch_primary(p: &BudgetedMatchingProblem, sa: &[usize], sb: &[usize], lambda: f64, tg: &Targets) -> Option<Vec<usize>> {
    let n = p.edges.len();
    let common: Vec<usize> = sa.iter().cloned().filter(|e| sb.contains(e)).collect();
    let diff: Vec<usize> = sa.iter().chain(sb).cloned().filter(|e| !common.contains(e)).collect();
    let in_a = indicator(sa, n).iter().map(|&v| v > 0.5).collect::<Vec<bool>>();
    let comps = components(p, &diff);
    let side = |seq: &[usize], want_a: bool| -> Vec<usize> { seq.iter().cloned().filter(|&e| in_a[e] == want_a).collect() };
    let f = |m: &[usize]| {
        let v = indicator(m, n);
        (p.l1(&v), p.l2(&v), m.len() as f64)
    };
    let mut lp = LinearProgram::new();
    let th: Vec<usize> = comps.iter().map(|_| lp.add_var(0.0, 0.0, 1.0)).collect();
    let base = f(&common);
    let mut rows = [Vec::new(), Vec::new(), Vec::new()];
    let mut rhs = [tg.l1 - base.0, tg.l2 - base.1, tg.card - base.2];
    for (c, (seq, _)) in comps.iter().enumerate() {
        let (fa, fb) = (f(&side(seq, true)), f(&side(seq, false)));
        let d = [fa.0 - fb.0, fa.1 - fb.1, fa.2 - fb.2];
        let bb = [fb.0, fb.1, fb.2];
        for q in 0..3 {
            rows[q].push((th[c], d[q]));
            rhs[q] -= bb[q];
        }
    }
    let theta: Vec<f64> = if th.is_empty() {
        Vec::new()
    } else {
        for q in 0..3 {
            lp.add_constraint(rows[q].clone(), Relation::Eq, rhs[q]);
        }
        match solve(&lp) {
            Ok(s) => th.iter().map(|&v| s.values[v]).collect(),
            Err(_) => vec![lambda; th.len()],
        }
    };
    let mut fixed = common.clone();
    let mut frac = Vec::new();
    for (c, (seq, cyc)) in comps.iter().enumerate() {
        if theta[c] >= 1.0 - 1e-9 {
            fixed.extend(side(seq, true));
        } else if theta[c] <= 1e-9 {
            fixed.extend(side(seq, false));
        } else {
            frac.push(component_options(p, seq, *cyc, &in_a));
        }
    }
    let total: usize = frac.iter().map(|o| o.len()).product();
    if total > OPTION_CAP {
        return None;
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut idx = vec![0usize; frac.len()];
    loop {
        let mut m = fixed.clone();
        for (o, &i) in frac.iter().zip(&idx) {
            m.extend(o[i].iter().cloned());
        }
        let (ok, s) = tg.score(p, &m);
        if ok && best.as_ref().is_none_or(|b| s > b.0) {
            m.sort_unstable();
            best = Some((s, m));
        }
        let Some(q) = (0..idx.len()).find(|&q| idx[q] + 1 < frac[q].len()) else { break };
        idx[q] += 1;
        for r in idx[..q].iter_mut() {
            *r = 0;
        }
    }
    best.map(|b| b.1)
}

fn patch_exhaustive(p: &BudgetedMatchingProblem, sa: &[usize], sb: &[usize], tg: &Targets) -> (Vec<usize>, bool) {
    let mut union: Vec<usize> = sa.iter().chain(sb).cloned().collect();
    union.sort_unstable();
    union.dedup();
    let all = matchings_within(p, &union, ENUMERATION_CAP);
    let mut best: Option<(bool, f64, Vec<usize>)> = None;
    for m in all {
        let (ok, s) = tg.score(p, &m);
        let better = match &best {
            None => true,
            Some((bok, bs, _)) => (ok && !bok) || (ok == *bok && s > *bs),
        };
        if better {
            best = Some((ok, s, m));
        }
    }
    let (ok, _, m) = best.expect("the empty matching is always enumerated");
    (m, ok)
}

/// The exhaustive patch alone, for comparison against the primary route.
pub fn patch_matchings_exhaustive(p: &BudgetedMatchingProblem, ma: &[usize], mb: &[usize], lambda: f64) -> PatchResult {
    let n = p.edges.len();
    let (va, vb) = (indicator(ma, n), indicator(mb, n));
    let tg = Targets {
        l1: lambda * p.l1(&va) + (1.0 - lambda) * p.l1(&vb),
        l2: lambda * p.l2(&va) + (1.0 - lambda) * p.l2(&vb),
        card: lambda * ma.len() as f64 + (1.0 - lambda) * mb.len() as f64,
        loss1: 4.0 * p.max_l1(),
        loss2: 4.0 * p.max_l2(),
    };
    let (m, ok) = patch_exhaustive(p, ma, mb, &tg);
    PatchResult { matching: m, route: Route::Exhaustive, ok }
}
