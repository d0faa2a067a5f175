//! Facility-weighted mobile facility location: fixed weighted facilities
//! move once to serve demand-weighted clients.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::filter::filter_step;
use super::network::add_step_layers;
use super::solution::{duplicate_step, StepSolution};
use super::solve::DokmError;
use crate::cost::{evaluate_schedule, Schedule};
use crate::flow::{LayeredFlowNetwork, NodeTag};
use crate::instance::{Instance, ProblemKind};
use crate::lp::{solve, LinearProgram, Relation};
use crate::metric::PointId;
use crate::num::EPS;

#[derive(Debug, Clone, PartialEq)]
pub struct TmMflParams {
    pub samples: usize,
    pub seed: u64,
}

impl Default for TmMflParams {
    fn default() -> Self {
        TmMflParams { samples: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TmMflOutcome {
    pub schedule: Schedule,
    pub lp_value: f64,
    pub samples_drawn: usize,
}

/// Relaxation over destinations `X`: assignment `x`, openings `y <= 1` and
/// movement `z` from each start to `X`. Returns the LP optimum, the
/// destination step as a fractional solution and `z[f][i]`.
pub fn solve_tm_mfl_lp(inst: &Instance) -> Result<(f64, StepSolution, Vec<Vec<f64>>), DokmError> {
    let (start, end) = (&inst.steps[0], &inst.steps[1]);
    let nf = start.facilities.len();
    let nx = end.facilities.len();
    let mut lp = LinearProgram::new();
    let inf = f64::INFINITY;
    let y: Vec<usize> = (0..nx).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect();
    let x: Vec<Vec<usize>> = end
        .clients
        .iter()
        .zip(&end.demands)
        .map(|(&j, &dj)| end.facilities.iter().map(|&i| lp.add_var(dj * inst.dist(i, j), 0.0, inf)).collect())
        .collect();
    let z: Vec<Vec<usize>> = start
        .facilities
        .iter()
        .zip(&start.facility_weights)
        .map(|(&f, &wf)| end.facilities.iter().map(|&i| lp.add_var(wf * inst.dist(f, i), 0.0, inf)).collect())
        .collect();
    for row in &x {
        lp.add_constraint(row.iter().map(|&v| (v, 1.0)).collect(), Relation::Eq, 1.0);
    }
    for row in &z {
        lp.add_constraint(row.iter().map(|&v| (v, 1.0)).collect(), Relation::Eq, 1.0);
    }
    for i in 0..nx {
        let mut row: Vec<(usize, f64)> = (0..nf).map(|f| (z[f][i], 1.0)).collect();
        row.push((y[i], -1.0));
        lp.add_constraint(row, Relation::Eq, 0.0);
        for xr in &x {
            lp.add_constraint(vec![(xr[i], 1.0), (y[i], -1.0)], Relation::Le, 0.0);
        }
    }
    let s = solve(&lp).map_err(DokmError::Lp)?;
    let snap = |v: f64| {
        if v.abs() <= EPS {
            0.0
        } else if (v - 1.0).abs() <= EPS {
            1.0
        } else {
            v
        }
    };
    let step = StepSolution {
        clients: end.clients.clone(),
        units: end.facilities.clone(),
        origin: (0..nx).collect(),
        x: x.iter().map(|r| r.iter().map(|&v| snap(s.values[v])).collect()).collect(),
        y: y.iter().map(|&v| snap(s.values[v])).collect(),
    };
    let zv = z.iter().map(|r| r.iter().map(|&v| snap(s.values[v])).collect()).collect();
    Ok((s.objective_value, step, zv))
}

/// Cancels moves into repeated destinations until all destinations are
/// distinct. Each cancelled facility returns to its start; the mover with
/// the largest weighted distance is cancelled first, ties by facility index.
pub fn simplify_destinations(inst: &Instance, dest: &mut [PointId]) {
    let start = &inst.steps[0];
    loop {
        let repeated = (0..dest.len()).find(|&a| dest.iter().filter(|&&d| d == dest[a]).count() > 1);
        let Some(a) = repeated else { return };
        let loc = dest[a];
        let mover = (0..dest.len())
            .filter(|&f| dest[f] == loc && start.facilities[f] != loc)
            .max_by(|&f, &g| {
                let cf = start.facility_weights[f] * inst.dist(start.facilities[f], loc);
                let cg = start.facility_weights[g] * inst.dist(start.facilities[g], loc);
                crate::num::cmp_f64(cf, cg).then(g.cmp(&f))
            })
            .expect("distinct starts leave a mover at every repeated location");
        dest[mover] = start.facilities[mover];
    }
}

/// LP rounding through the start-layer network, followed by destination
/// simplification; the cheapest of `samples` roundings is returned.
pub fn solve_tm_mfl(inst: &Instance, params: &TmMflParams) -> Result<TmMflOutcome, DokmError> {
    inst.validate().map_err(DokmError::Instance)?;
    inst.expect_kind(ProblemKind::TmMfl).map_err(DokmError::Instance)?;
    if params.samples == 0 {
        return Err(DokmError::BadParameter("samples must be nonzero"));
    }
    let (lp_value, step, z) = solve_tm_mfl_lp(inst)?;
    let (dup, parent) = duplicate_step(&step);
    let filter = filter_step(&inst.metric, &dup);

    let nf = inst.steps[0].facilities.len();
    let mut net = LayeredFlowNetwork::new(7);
    let starts: Vec<usize> = (0..nf).map(|f| net.add_node(1, NodeTag::Start { unit: f })).collect();
    let sa = add_step_layers(&mut net, 1, 1, &dup, &filter)?;
    let (src, snk) = (net.source(), net.sink());
    for &s in &starts {
        net.add_arc(src, s, 1, 1, 1.0)?;
    }
    let mut moves = Vec::new();
    for f in 0..nf {
        for (c, &(u, share)) in parent.iter().enumerate() {
            let v = z[f][u] * share;
            if v > EPS {
                moves.push((f, c, net.add_arc(starts[f], sa.unit_l[c], 0, 1, v)?));
            }
        }
    }
    for c in 0..dup.units.len() {
        net.add_arc(sa.unit_r[c], snk, 0, 1, dup.y[c])?;
    }

    let origins = inst.steps[0].facilities.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<Schedule> = None;
    for _ in 0..params.samples {
        let flow = net.dependent_round(&mut rng)?;
        let mut dest = origins.clone();
        for &(f, c, arc) in &moves {
            if flow.values[arc] == 1 {
                dest[f] = dup.units[c];
            }
        }
        simplify_destinations(inst, &mut dest);
        let pairs: Vec<(PointId, PointId)> = origins.iter().cloned().zip(dest.iter().cloned()).collect();
        let s = evaluate_schedule(inst, &[origins.clone(), dest], &[pairs]).map_err(|_| DokmError::MalformedFlow)?;
        if best.as_ref().is_none_or(|b| s.costs.total < b.costs.total) {
            best = Some(s);
        }
    }
    Ok(TmMflOutcome { schedule: best.expect("samples > 0"), lp_value, samples_drawn: params.samples })
}
