//! Dynamic k-Supplier with two time steps via a cluster/facility flow
//! network, and the three-step hardness construction from 3D matching.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cost::{evaluate_schedule, Schedule};
use crate::flow::{FlowError, LayeredFlowNetwork, NodeTag};
use crate::instance::{Instance, InstanceError, ProblemKind, TimeStep};
use crate::metric::{Metric, MetricError, PointId};

#[derive(Debug, Clone, PartialEq)]
pub enum DksError {
    Instance(InstanceError),
    NotTwoSteps(usize),
    TooManyClusters {
        found: usize,
        k: usize,
    },
    /// No radius admits a value-k flow, so the movement bound cannot be met.
    Infeasible,
    Flow(FlowError),
    ElementMissing {
        set: char,
        element: usize,
    },
    TripletOutOfRange {
        triplet: usize,
    },
    Metric(MetricError),
}

impl fmt::Display for DksError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DksError::Instance(e) => write!(f, "{e}"),
            DksError::NotTwoSteps(t) => write!(f, "the flow solver needs exactly two steps, got {t}"),
            DksError::TooManyClusters { found, k } => write!(f, "{found} clusters formed but k={k}"),
            DksError::Infeasible => write!(f, "no schedule satisfies the movement bound"),
            DksError::Flow(e) => write!(f, "{e}"),
            DksError::ElementMissing { set, element } => {
                write!(f, "element {element} of set {set} appears in no triplet")
            }
            DksError::TripletOutOfRange { triplet } => write!(f, "triplet {triplet} names an element out of range"),
            DksError::Metric(e) => write!(f, "{e}"),
        }
    }
}

impl From<FlowError> for DksError {
    fn from(e: FlowError) -> Self {
        DksError::Flow(e)
    }
}

/// Greedy clusters: `representatives[c]` is a client and `assignment[j]` the
/// cluster of the `j`-th input client.
#[derive(Debug, Clone, PartialEq)]
pub struct Clusters {
    pub representatives: Vec<PointId>,
    pub assignment: Vec<usize>,
}

// Slack for the 2R test so a cluster that is separated only by rounding
// error of a triangle inequality still merges.
fn within_2r(d: f64, r: f64) -> bool {
    d <= 2.0 * r * (1.0 + 1e-12) + 1e-12
}

/// Picks clients in input order; each pick claims every unclaimed client
/// within `2r`. Fails once more than `k` clusters form.
pub fn build_clusters(metric: &Metric, clients: &[PointId], r: f64, k: usize) -> Result<Clusters, DksError> {
    let mut assignment = vec![usize::MAX; clients.len()];
    let mut representatives = Vec::new();
    for j in 0..clients.len() {
        if assignment[j] != usize::MAX {
            continue;
        }
        let c = representatives.len();
        representatives.push(clients[j]);
        for j2 in j..clients.len() {
            if assignment[j2] == usize::MAX && within_2r(metric.dist(clients[j], clients[j2]), r) {
                assignment[j2] = c;
            }
        }
    }
    if representatives.len() > k {
        return Err(DksError::TooManyClusters { found: representatives.len(), k });
    }
    Ok(Clusters { representatives, assignment })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DksNetworkMeta {
    pub representatives: [Vec<PointId>; 2],
    pub dummies: [usize; 2],
    pub radius: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DksNetwork {
    pub net: LayeredFlowNetwork,
    pub meta: DksNetworkMeta,
    /// `(from, to, arc)` for every facility-to-facility arc.
    pub moves: Vec<(PointId, PointId, usize)>,
}

/// Layers: step-1 clusters, `F_1`, `F_2`, step-2 clusters. Real clusters
/// reach facilities within `r`, dummies reach every facility, and facilities
/// of the two steps are linked when within the movement bound.
pub fn build_dks_network(inst: &Instance, r: f64) -> Result<DksNetwork, DksError> {
    if inst.num_steps() != 2 {
        return Err(DksError::NotTwoSteps(inst.num_steps()));
    }
    let bound = inst.movement_bound.ok_or(DksError::Instance(InstanceError::MissingBound))?;
    let k = inst.k;
    let ki = k as i64;
    let cl = [build_clusters(&inst.metric, &inst.steps[0].clients, r, k)?, build_clusters(&inst.metric, &inst.steps[1].clients, r, k)?];
    let mut net = LayeredFlowNetwork::new(4);
    let (src, snk) = (net.source(), net.sink());
    let mut cluster_nodes: [Vec<(usize, Option<PointId>)>; 2] = [Vec::new(), Vec::new()];
    for (t, layer) in [(0usize, 1usize), (1, 4)] {
        for (c, &rep) in cl[t].representatives.iter().enumerate() {
            cluster_nodes[t].push((net.add_node(layer, NodeTag::Cluster { step: t, index: c }), Some(rep)));
        }
        for d in 0..k - cl[t].representatives.len() {
            cluster_nodes[t].push((net.add_node(layer, NodeTag::Dummy { step: t, index: d }), None));
        }
    }
    let fac: [Vec<usize>; 2] = [
        (0..inst.steps[0].facilities.len()).map(|u| net.add_node(2, NodeTag::Facility { step: 0, unit: u })).collect(),
        (0..inst.steps[1].facilities.len()).map(|u| net.add_node(3, NodeTag::Facility { step: 1, unit: u })).collect(),
    ];
    for t in 0..2 {
        for &(node, rep) in &cluster_nodes[t] {
            if t == 0 {
                net.add_arc(src, node, 0, 1, 0.0)?;
            } else {
                net.add_arc(node, snk, 0, 1, 0.0)?;
            }
            for (u, &i) in inst.steps[t].facilities.iter().enumerate() {
                let ok = match rep {
                    Some(j) => inst.dist(i, j) <= r,
                    None => true,
                };
                if ok {
                    if t == 0 {
                        net.add_arc(node, fac[0][u], 0, 1, 0.0)?;
                    } else {
                        net.add_arc(fac[1][u], node, 0, 1, 0.0)?;
                    }
                }
            }
        }
    }
    let mut moves = Vec::new();
    for (u, &i) in inst.steps[0].facilities.iter().enumerate() {
        for (v, &i2) in inst.steps[1].facilities.iter().enumerate() {
            if inst.dist(i, i2) <= bound {
                moves.push((i, i2, net.add_arc(fac[0][u], fac[1][v], 0, ki, 0.0)?));
            }
        }
    }
    let meta = DksNetworkMeta {
        dummies: [k - cl[0].representatives.len(), k - cl[1].representatives.len()],
        representatives: [cl[0].representatives.clone(), cl[1].representatives.clone()],
        radius: r,
        bound,
    };
    Ok(DksNetwork { net, meta, moves })
}

/// Integral value-k flow at radius `r`, or `None` when there is none.
pub fn probe_radius(inst: &Instance, r: f64) -> Result<Option<(DksNetwork, Vec<i64>)>, DksError> {
    let dn = match build_dks_network(inst, r) {
        Ok(dn) => dn,
        Err(DksError::TooManyClusters { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    match dn.net.max_flow_integral(inst.k as i64) {
        Ok(f) => Ok(Some((dn, f.values))),
        Err(FlowError::NoFeasibleFlow) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DksOutcome {
    pub schedule: Schedule,
    /// Smallest candidate radius with a value-k flow.
    pub radius_guess: f64,
    pub probes: usize,
}

/// Binary search over the candidate client-facility distances for the
/// smallest radius whose network carries k units, then reads the open
/// multisets and moves off the facility-to-facility arcs.
pub fn solve_dks(inst: &Instance) -> Result<DksOutcome, DksError> {
    inst.validate().map_err(DksError::Instance)?;
    inst.expect_kind(ProblemKind::Dks).map_err(DksError::Instance)?;
    if inst.num_steps() != 2 {
        return Err(DksError::NotTwoSteps(inst.num_steps()));
    }
    let mut cand = inst.client_facility_distances();
    if cand.is_empty() {
        cand.push(0.0);
    }
    let mut probes = 1;
    let Some(mut best) = probe_radius(inst, cand[cand.len() - 1])? else {
        return Err(DksError::Infeasible);
    };
    let mut best_r = cand[cand.len() - 1];
    let (mut lo, mut hi) = (0usize, cand.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        probes += 1;
        match probe_radius(inst, cand[mid])? {
            Some(found) => {
                best = found;
                best_r = cand[mid];
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let (dn, values) = best;
    let mut open = [Vec::new(), Vec::new()];
    let mut pairs = Vec::new();
    for &(i, i2, arc) in &dn.moves {
        for _ in 0..values[arc] {
            open[0].push(i);
            open[1].push(i2);
            pairs.push((i, i2));
        }
    }
    let schedule = evaluate_schedule(inst, &open, &[pairs]).map_err(|_| DksError::Flow(FlowError::NumericalFailure))?;
    Ok(DksOutcome { schedule, radius_guess: best_r, probes })
}

/// Graph-metric Dynamic k-Supplier instance with three steps built from a
/// 3D-matching instance on `n` elements per side. Triplet `g` contributes
/// points `3g`, `3g+1`, `3g+2` for its A, B and C elements; the A-B and B-C
/// copies are joined by edges of length `alpha`, copies of the same element
/// by unit edges. Pairs in different components get a distance larger than
/// any path.
pub fn reduce_3dm(n: usize, triplets: &[(usize, usize, usize)], alpha: f64) -> Result<Instance, DksError> {
    for (g, &(a, b, c)) in triplets.iter().enumerate() {
        if a >= n || b >= n || c >= n {
            return Err(DksError::TripletOutOfRange { triplet: g });
        }
    }
    for (set, pick) in [('A', 0usize), ('B', 1), ('C', 2)] {
        for e in 0..n {
            let hit = triplets.iter().any(|&(a, b, c)| [a, b, c][pick] == e);
            if !hit {
                return Err(DksError::ElementMissing { set, element: e });
            }
        }
    }
    let m = triplets.len();
    let nv = 3 * m;
    let mut d = vec![vec![f64::INFINITY; nv]; nv];
    let mut total = 0.0;
    let mut edge = |d: &mut Vec<Vec<f64>>, u: usize, v: usize, w: f64| {
        if w < d[u][v] {
            d[u][v] = w;
            d[v][u] = w;
        }
        total += w;
    };
    for g in 0..m {
        edge(&mut d, 3 * g, 3 * g + 1, alpha);
        edge(&mut d, 3 * g + 1, 3 * g + 2, alpha);
        for h in g + 1..m {
            let (x, y) = (triplets[g], triplets[h]);
            for (pick, e) in [(0, x.0 == y.0), (1, x.1 == y.1), (2, x.2 == y.2)] {
                if e {
                    edge(&mut d, 3 * g + pick, 3 * h + pick, 1.0);
                }
            }
        }
    }
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for w in 0..nv {
        for u in 0..nv {
            let duw = d[u][w];
            if duw.is_infinite() {
                continue;
            }
            for v in 0..nv {
                let c = duw + d[w][v];
                if c < d[u][v] {
                    d[u][v] = c;
                }
            }
        }
    }
    let far = total + 1.0;
    for row in d.iter_mut() {
        for x in row.iter_mut() {
            if x.is_infinite() {
                *x = far;
            }
        }
    }
    let metric = Metric::from_matrix(d).map_err(DksError::Metric)?;
    let side = |pick: usize| -> Vec<PointId> { (0..m).map(|g| 3 * g + pick).collect() };
    let steps = (0..3).map(|p| TimeStep::new(side(p), side(p))).collect();
    Instance::new(metric, steps, n, 1.0, Some(alpha), ProblemKind::Dks).map_err(DksError::Instance)
}
