//! Two-phase primal simplex on a dense tableau with Bland's rule.
//!
//! Every variable has a finite lower bound (default 0) and an optional upper
//! bound. Bounds are shifted into the standard form `x' = x - lo >= 0`, and
//! finite upper bounds become explicit `<=` rows. The optimum returned is a
//! basic feasible solution of that standard form, hence a vertex of the
//! original polyhedron.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Smallest magnitude accepted as a pivot element.
pub const PIVOT_TOL: f64 = 1e-9;
/// Reduced costs above `-OPT_TOL` count as nonnegative.
const OPT_TOL: f64 = 1e-9;
/// Phase-one objective above this means the program is infeasible.
const FEAS_TOL: f64 = 1e-7;
/// Largest constraint violation accepted in a returned solution.
pub const CHECK_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Sparse row `(variable, coefficient)`; repeated variables are summed.
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Minimize `objective . x` subject to the constraints and bounds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with cost `cost` and bounds `[lo, hi]`; `hi` may be
    /// infinite. Returns its index.
    pub fn add_var(&mut self, cost: f64, lo: f64, hi: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lo);
        self.upper.push(hi);
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any constraint or bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let viol = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if n == 0 {
            return Err(LpError::Malformed("no variables"));
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Malformed("bound vectors have the wrong length"));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Malformed("objective coefficient is not finite"));
        }
        if self.lower.iter().any(|l| !l.is_finite()) || self.upper.iter().any(|u| u.is_nan()) {
            return Err(LpError::Malformed("lower bounds must be finite"));
        }
        for c in &self.constraints {
            if !c.rhs.is_finite() || c.coeffs.iter().any(|&(j, a)| j >= n || !a.is_finite()) {
                return Err(LpError::Malformed("constraint has a bad coefficient or index"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective_value: f64,
    /// Standard-form columns in the final basis, ascending. Columns below
    /// `num_vars` are the structural variables.
    pub basis: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    NumericalFailure,
    Malformed(&'static str),
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Infeasible => write!(f, "linear program is infeasible"),
            LpError::Unbounded => write!(f, "linear program is unbounded"),
            LpError::NumericalFailure => write!(f, "simplex failed numerically or hit the iteration guard"),
            LpError::Malformed(m) => write!(f, "malformed linear program: {m}"),
        }
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows x (cols + 1)`, last column is the right-hand side.
    a: Vec<f64>,
    /// Reduced-cost row, `cols + 1` entries; the last is minus the objective.
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.a[r * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.a[pr * w + pc];
        for c in 0..w {
            self.a[pr * w + c] /= p;
        }
        self.a[pr * w + pc] = 1.0;
        let (before, rest) = self.a.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[pc];
            if f != 0.0 {
                for c in 0..w {
                    row[c] -= f * prow[c];
                }
                row[pc] = 0.0;
            }
        }
        let f = self.obj[pc];
        if f != 0.0 {
            for c in 0..w {
                self.obj[c] -= f * prow[c];
            }
            self.obj[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Runs simplex iterations until optimality. Columns with
    /// `allowed[c] == false` never enter.
    fn optimize(&mut self, allowed: &[bool], guard: &mut usize) -> Result<(), LpError> {
        loop {
            let entering = (0..self.cols).find(|&c| allowed[c] && self.obj[c] < -OPT_TOL);
            let Some(pc) = entering else { return Ok(()) };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            let tie = (ratio - bratio).abs() <= 1e-12 * bratio.abs().max(1.0);
                            if ratio < bratio && !tie || tie && self.basis[r] < self.basis[br] {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = best else { return Err(LpError::Unbounded) };
            self.pivot(pr, pc);
            if *guard == 0 {
                return Err(LpError::NumericalFailure);
            }
            *guard -= 1;
        }
    }
}

/// Solves `lp`, returning an optimal vertex.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.check()?;
    let n = lp.num_vars();

    // Standard-form rows over shifted variables, rhs made nonnegative.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for c in &lp.constraints {
        let mut dense = vec![0.0; n];
        let mut rhs = c.rhs;
        for &(j, a) in &c.coeffs {
            dense[j] += a;
        }
        for j in 0..n {
            rhs -= dense[j] * lp.lower[j];
        }
        rows.push((dense, c.relation, rhs));
    }
    for j in 0..n {
        if lp.upper[j].is_finite() {
            let span = lp.upper[j] - lp.lower[j];
            if span < -CHECK_TOL {
                return Err(LpError::Infeasible);
            }
            let mut dense = vec![0.0; n];
            dense[j] = 1.0;
            rows.push((dense, Relation::Le, span.max(0.0)));
        }
    }
    for row in rows.iter_mut() {
        if row.2 < 0.0 {
            row.0.iter_mut().for_each(|a| *a = -*a);
            row.2 = -row.2;
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let art_count = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let art_start = n + slack_count;
    let cols = art_start + art_count;
    let w = cols + 1;
    let mut t = Tableau { rows: m, cols, a: vec![0.0; m * w], obj: vec![0.0; w], basis: vec![0; m] };
    let (mut s, mut art) = (n, art_start);
    for (r, (dense, rel, rhs)) in rows.iter().enumerate() {
        t.a[r * w..r * w + n].copy_from_slice(dense);
        t.a[r * w + cols] = *rhs;
        match rel {
            Relation::Le => {
                t.a[r * w + s] = 1.0;
                t.basis[r] = s;
                s += 1;
            }
            Relation::Ge => {
                t.a[r * w + s] = -1.0;
                s += 1;
                t.a[r * w + art] = 1.0;
                t.basis[r] = art;
                art += 1;
            }
            Relation::Eq => {
                t.a[r * w + art] = 1.0;
                t.basis[r] = art;
                art += 1;
            }
        }
    }

    let mut guard = 50_000usize.max(200 * (m + cols));
    // Phase one: minimize the sum of artificials.
    if art_count > 0 {
        for c in art_start..cols {
            t.obj[c] = 1.0;
        }
        for r in 0..m {
            if t.basis[r] >= art_start {
                for c in 0..w {
                    t.obj[c] -= t.a[r * w + c];
                }
            }
        }
        let allowed = vec![true; cols];
        t.optimize(&allowed, &mut guard)?;
        if -t.obj[cols] > FEAS_TOL {
            return Err(LpError::Infeasible);
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < t.rows {
            if t.basis[r] >= art_start {
                let col = (0..art_start).find(|&c| t.at(r, c).abs() > PIVOT_TOL);
                match col {
                    Some(c) => {
                        t.a[r * w + cols] = 0.0;
                        t.pivot(r, c);
                        r += 1;
                    }
                    None => {
                        t.a.drain(r * w..(r + 1) * w);
                        t.basis.remove(r);
                        t.rows -= 1;
                    }
                }
            } else {
                r += 1;
            }
        }
    }

    // Phase two over the original objective.
    t.obj.iter_mut().for_each(|v| *v = 0.0);
    t.obj[..n].copy_from_slice(&lp.objective);
    for r in 0..t.rows {
        let b = t.basis[r];
        let f = t.obj[b];
        if f != 0.0 {
            for c in 0..w {
                t.obj[c] -= f * t.a[r * w + c];
            }
        }
    }
    let mut allowed = vec![true; cols];
    allowed[art_start..].iter_mut().for_each(|a| *a = false);
    t.optimize(&allowed, &mut guard)?;

    let mut shifted = vec![0.0; n];
    for r in 0..t.rows {
        if t.basis[r] < n {
            shifted[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let values: Vec<f64> = shifted
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let x = v + lp.lower[j];
            if lp.upper[j].is_finite() {
                x.min(lp.upper[j])
            } else {
                x
            }
        })
        .collect();
    if lp.max_violation(&values) > CHECK_TOL {
        return Err(LpError::NumericalFailure);
    }
    let mut basis = t.basis.clone();
    basis.sort_unstable();
    Ok(LpSolution { objective_value: lp.objective_value(&values), values, basis })
}

/// Rank of the active constraint system at `x`: tight rows plus variables at
/// a bound. Equals `num_vars` exactly when `x` is a vertex.
pub fn active_rank(lp: &LinearProgram, x: &[f64], tol: f64) -> usize {
    let n = lp.num_vars();
    let mut mat: Vec<Vec<f64>> = Vec::new();
    for c in &lp.constraints {
        let mut dense = vec![0.0; n];
        for &(j, a) in &c.coeffs {
            dense[j] += a;
        }
        let lhs: f64 = dense.iter().zip(x).map(|(a, v)| a * v).sum();
        if (lhs - c.rhs).abs() <= tol {
            mat.push(dense);
        }
    }
    for j in 0..n {
        if (x[j] - lp.lower[j]).abs() <= tol || (lp.upper[j].is_finite() && (x[j] - lp.upper[j]).abs() <= tol) {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            mat.push(e);
        }
    }
    rank(&mut mat, n)
}

fn rank(mat: &mut [Vec<f64>], n: usize) -> usize {
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..mat.len()).max_by(|&a, &b| crate::num::cmp_f64(mat[a][c].abs(), mat[b][c].abs())) else {
            break;
        };
        if mat[p][c].abs() <= 1e-9 {
            continue;
        }
        mat.swap(rank, p);
        for r in 0..mat.len() {
            if r != rank {
                let f = mat[r][c] / mat[rank][c];
                if f != 0.0 {
                    for q in c..n {
                        mat[r][q] -= f * mat[rank][q];
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}
