//! Embedding a filtered fractional solution into a layered flow network,
//! and reading facility multisets back from an integral flow.

use alloc::vec;
use alloc::vec::Vec;

use super::filter::{FilterOutput, Pairing, StepFilter};
use super::solution::{FractionalSolution, StepSolution};
use crate::flow::{FlowError, IntegralFlow, LayeredFlowNetwork, NodeTag};
use crate::metric::PointId;
use crate::num::{ceil, floor, round, EPS};

/// Arc and node handles of one step. Unit indices follow the duplicated
/// solution, survivor indices follow [`super::filter::StepFilter::filtered`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepArcs {
    pub unit_l: Vec<usize>,
    pub unit_r: Vec<usize>,
    /// `L(u) -> R(u)` for units outside every bundle.
    pub bypass: Vec<Option<usize>>,
    /// `L(u) -> L(U)` for bundled units.
    pub into_bundle: Vec<Option<usize>>,
    /// `R(U) -> R(u)` for bundled units.
    pub out_of_bundle: Vec<Option<usize>>,
    /// `L(U) -> L(p)` per survivor.
    pub bundle_to_pair: Vec<usize>,
    /// `R(p) -> R(U)` per survivor.
    pub pair_to_bundle: Vec<usize>,
    /// `L(p) -> R(p)` per pairing part.
    pub pair: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DokmNetwork {
    pub net: LayeredFlowNetwork,
    pub steps: Vec<StepArcs>,
    /// `moves[t]` lists `(u, v, arc)` for the arcs `R(u) -> L(v)`.
    pub moves: Vec<Vec<(usize, usize, usize)>>,
}

/// Integer window `[floor v, ceil v]`, collapsed when `v` is integral.
pub fn window(v: f64) -> (i64, i64) {
    let r = round(v);
    if (v - r).abs() <= 1e-9 {
        (r as i64, r as i64)
    } else {
        (floor(v) as i64, ceil(v) as i64)
    }
}

/// Network with `6T` intermediate layers. Step `t` (0-based) uses layers
/// `6t+1 ..= 6t+6` for `L(u), L(U), L(p), R(p), R(U), R(u)`.
pub fn build_dokm_network(sol: &FractionalSolution, filter: &FilterOutput) -> Result<DokmNetwork, FlowError> {
    let t_count = sol.steps.len();
    let mut net = LayeredFlowNetwork::new(6 * t_count);
    let mut steps = Vec::with_capacity(t_count);
    for (t, (s, f)) in sol.steps.iter().zip(&filter.steps).enumerate() {
        steps.push(add_step_layers(&mut net, t, 6 * t, s, f)?);
    }
    let (src, snk) = (net.source(), net.sink());
    for u in 0..sol.steps[0].units.len() {
        net.add_arc(src, steps[0].unit_l[u], 0, 1, sol.steps[0].y[u])?;
    }
    let last = t_count - 1;
    for u in 0..sol.steps[last].units.len() {
        net.add_arc(steps[last].unit_r[u], snk, 0, 1, sol.steps[last].y[u])?;
    }
    let mut moves = Vec::new();
    for t in 0..t_count - 1 {
        let mut mv = Vec::new();
        for (u, row) in sol.z[t].iter().enumerate() {
            for (v, &z) in row.iter().enumerate() {
                if z > EPS {
                    mv.push((u, v, net.add_arc(steps[t].unit_r[u], steps[t + 1].unit_l[v], 0, 1, z)?));
                }
            }
        }
        moves.push(mv);
    }
    Ok(DokmNetwork { net, steps, moves })
}

/// Adds the six layers `base+1 ..= base+6` of one step with their arcs and
/// initial flow.
pub(crate) fn add_step_layers(
    net: &mut LayeredFlowNetwork,
    t: usize,
    base: usize,
    s: &StepSolution,
    f: &StepFilter,
) -> Result<StepArcs, FlowError> {
    let nu = s.units.len();
    let mut sa = StepArcs { bypass: vec![None; nu], into_bundle: vec![None; nu], out_of_bundle: vec![None; nu], ..Default::default() };
    for u in 0..nu {
        sa.unit_l.push(net.add_node(base + 1, NodeTag::FacilityL { step: t, unit: u }));
        sa.unit_r.push(net.add_node(base + 6, NodeTag::FacilityR { step: t, unit: u }));
    }
    let mut bl = Vec::new();
    let mut br = Vec::new();
    for fc in &f.filtered {
        let l = net.add_node(base + 2, NodeTag::BundleL { step: t, client: fc.client });
        let r = net.add_node(base + 5, NodeTag::BundleR { step: t, client: fc.client });
        bl.push(l);
        br.push(r);
        for &u in &fc.bundle {
            sa.into_bundle[u] = Some(net.add_arc(sa.unit_l[u], l, 0, 1, s.y[u])?);
            sa.out_of_bundle[u] = Some(net.add_arc(r, sa.unit_r[u], 0, 1, s.y[u])?);
        }
    }
    sa.bundle_to_pair = vec![usize::MAX; f.filtered.len()];
    sa.pair_to_bundle = vec![usize::MAX; f.filtered.len()];
    for (pi, p) in f.pairs.iter().enumerate() {
        let pl = net.add_node(base + 3, NodeTag::PairL { step: t, pair: pi });
        let pr = net.add_node(base + 4, NodeTag::PairR { step: t, pair: pi });
        let mut mass = 0.0;
        for a in p.members() {
            let m = f.filtered[a].mass;
            mass += m;
            let (lo, hi) = window(m);
            sa.bundle_to_pair[a] = net.add_arc(bl[a], pl, lo, hi, m)?;
            sa.pair_to_bundle[a] = net.add_arc(pr, br[a], lo, hi, m)?;
        }
        let (lo, hi) = window(mass);
        sa.pair.push(net.add_arc(pl, pr, lo, hi, mass)?);
    }
    for u in 0..nu {
        if f.bundle_of[u].is_none() {
            sa.bypass[u] = Some(net.add_arc(sa.unit_l[u], sa.unit_r[u], 0, 1, s.y[u])?);
        }
    }
    Ok(sa)
}

/// Facility multisets read from an integral flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Rerouted {
    pub open_sets: Vec<Vec<PointId>>,
    /// For two steps: the `(from, to)` pairs of the used movement arcs.
    pub flow_pairs: Option<Vec<(PointId, PointId)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedFlow;

/// Turns an integral flow into open multisets. With two steps the sets are
/// the endpoints of the used movement arcs; otherwise each pairing part
/// contributes per the reroute case analysis and each used bypass arc its
/// unit.
pub fn reroute(dn: &DokmNetwork, sol: &FractionalSolution, filter: &FilterOutput, flow: &IntegralFlow) -> Result<Rerouted, MalformedFlow> {
    let fv = |a: usize| flow.values[a];
    if sol.steps.len() == 2 {
        let (a, b) = (&sol.steps[0], &sol.steps[1]);
        let mut open = vec![Vec::new(), Vec::new()];
        let mut pairs = Vec::new();
        for &(u, v, arc) in &dn.moves[0] {
            if fv(arc) == 1 {
                open[0].push(a.units[u]);
                open[1].push(b.units[v]);
                pairs.push((a.units[u], b.units[v]));
            }
        }
        return Ok(Rerouted { open_sets: open, flow_pairs: Some(pairs) });
    }
    let mut open_sets = Vec::new();
    for (t, (s, f)) in sol.steps.iter().zip(&filter.steps).enumerate() {
        let sa = &dn.steps[t];
        let mut a_t = Vec::new();
        for u in 0..s.units.len() {
            if sa.bypass[u].is_some_and(|e| fv(e) == 1) {
                a_t.push(s.units[u]);
            }
        }
        // unit entering (L side) or leaving (R side) a survivor's bundle
        let l_unit = |a: usize| f.filtered[a].bundle.iter().copied().find(|&u| sa.into_bundle[u].is_some_and(|e| fv(e) == 1));
        let r_unit = |a: usize| f.filtered[a].bundle.iter().copied().find(|&u| sa.out_of_bundle[u].is_some_and(|e| fv(e) == 1));
        for (pi, p) in f.pairs.iter().enumerate() {
            let units = fv(sa.pair[pi]);
            let l_side: Vec<(usize, usize)> = p
                .members()
                .filter(|&a| fv(sa.bundle_to_pair[a]) == 1)
                .map(|a| l_unit(a).map(|u| (a, u)).ok_or(MalformedFlow))
                .collect::<Result<_, _>>()?;
            let r_side: Vec<(usize, usize)> = p
                .members()
                .filter(|&a| fv(sa.pair_to_bundle[a]) == 1)
                .map(|a| r_unit(a).map(|u| (a, u)).ok_or(MalformedFlow))
                .collect::<Result<_, _>>()?;
            if l_side.len() as i64 != units || r_side.len() as i64 != units {
                return Err(MalformedFlow);
            }
            match (units, *p) {
                (0, _) => {}
                (2, _) => a_t.extend(l_side.iter().map(|&(_, u)| s.units[u])),
                (1, Pairing::Single(_)) => a_t.push(s.units[l_side[0].1]),
                (1, Pairing::Pair(j1, j2)) => {
                    let (la, lu) = l_side[0];
                    let (ra, ru) = r_side[0];
                    let mutual = f.filtered[j2].nearest == Some(j1);
                    let pick = if mutual || la == ra || la == j2 { lu } else { ru };
                    a_t.push(s.units[pick]);
                }
                _ => return Err(MalformedFlow),
            }
        }
        open_sets.push(a_t);
    }
    Ok(Rerouted { open_sets, flow_pairs: None })
}
