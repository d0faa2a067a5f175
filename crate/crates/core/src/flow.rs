//! Layered flow networks with integer arc windows, integral max flow under
//! lower bounds, and dependent rounding of fractional flows by cycle
//! rotation.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write;

use rand::Rng;

use crate::num::{ceil, floor, round, EPS};

/// Role of a node. Indices refer to the structure the network was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeTag {
    Source,
    Sink,
    FacilityL {
        step: usize,
        unit: usize,
    },
    FacilityR {
        step: usize,
        unit: usize,
    },
    BundleL {
        step: usize,
        client: usize,
    },
    BundleR {
        step: usize,
        client: usize,
    },
    PairL {
        step: usize,
        pair: usize,
    },
    PairR {
        step: usize,
        pair: usize,
    },
    Cluster {
        step: usize,
        index: usize,
    },
    Dummy {
        step: usize,
        index: usize,
    },
    Facility {
        step: usize,
        unit: usize,
    },
    /// Fixed start position of a facility (mobile facility location).
    Start {
        unit: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub layer: usize,
    pub tag: NodeTag,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlowError {
    /// An arc would not go strictly forward through the layers.
    LayerOrder {
        from: usize,
        to: usize,
    },
    BadWindow {
        lower: i64,
        upper: i64,
    },
    NoFeasibleFlow,
    InfeasibleInput(String),
    NumericalFailure,
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowError::LayerOrder { from, to } => write!(f, "arc {from}->{to} does not go forward through the layers"),
            FlowError::BadWindow { lower, upper } => write!(f, "arc window [{lower}, {upper}] is empty or negative"),
            FlowError::NoFeasibleFlow => write!(f, "no feasible flow of the requested value"),
            FlowError::InfeasibleInput(m) => write!(f, "input flow is infeasible: {m}"),
            FlowError::NumericalFailure => write!(f, "rounding could not find a fractional cycle"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralFlow {
    pub values: Vec<i64>,
    pub value: i64,
}

/// A network with a source in layer 0, a sink in the last layer, and arcs
/// that always point to a strictly later layer. `flow` is the fractional
/// annotation.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredFlowNetwork {
    pub nodes: Vec<Node>,
    pub arcs: Vec<Arc>,
    pub flow: Vec<f64>,
    source: usize,
    sink: usize,
}

impl LayeredFlowNetwork {
    /// Network with `inner_layers` intermediate layers `1..=inner_layers`.
    pub fn new(inner_layers: usize) -> Self {
        let nodes = vec![Node { layer: 0, tag: NodeTag::Source }, Node { layer: inner_layers + 1, tag: NodeTag::Sink }];
        LayeredFlowNetwork { nodes, arcs: Vec::new(), flow: Vec::new(), source: 0, sink: 1 }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn add_node(&mut self, layer: usize, tag: NodeTag) -> usize {
        debug_assert!(layer > 0 && layer < self.nodes[self.sink].layer);
        self.nodes.push(Node { layer, tag });
        self.nodes.len() - 1
    }

    pub fn add_arc(&mut self, from: usize, to: usize, lower: i64, upper: i64, flow: f64) -> Result<usize, FlowError> {
        if self.nodes[to].layer <= self.nodes[from].layer {
            return Err(FlowError::LayerOrder { from, to });
        }
        if lower < 0 || upper < lower {
            return Err(FlowError::BadWindow { lower, upper });
        }
        self.arcs.push(Arc { from, to, lower, upper });
        self.flow.push(flow);
        Ok(self.arcs.len() - 1)
    }

    /// Net flow leaving the source.
    pub fn value_of(&self, flow: &[f64]) -> f64 {
        let mut v = 0.0;
        for (a, f) in self.arcs.iter().zip(flow) {
            if a.from == self.source {
                v += f;
            }
            if a.to == self.source {
                v -= f;
            }
        }
        v
    }

    /// Checks capacity windows and conservation of `flow` within `tol`.
    pub fn check(&self, flow: &[f64], tol: f64) -> Result<(), FlowError> {
        if flow.len() != self.arcs.len() {
            return Err(FlowError::InfeasibleInput(String::from("flow vector length differs from arc count")));
        }
        let mut balance = vec![0.0; self.nodes.len()];
        for (id, (a, &f)) in self.arcs.iter().zip(flow).enumerate() {
            if f < a.lower as f64 - tol || f > a.upper as f64 + tol {
                let mut m = String::new();
                let _ = write!(m, "arc {id} carries {f} outside [{}, {}]", a.lower, a.upper);
                return Err(FlowError::InfeasibleInput(m));
            }
            balance[a.from] -= f;
            balance[a.to] += f;
        }
        for (v, b) in balance.iter().enumerate() {
            if v != self.source && v != self.sink && b.abs() > tol {
                let mut m = String::new();
                let _ = write!(m, "node {v} has imbalance {b}");
                return Err(FlowError::InfeasibleInput(m));
            }
        }
        Ok(())
    }

    /// Text dump, one `from to lower upper flow` line per arc.
    pub fn edge_list(&self, flow: &[f64]) -> String {
        let mut s = String::new();
        for (a, f) in self.arcs.iter().zip(flow) {
            let _ = writeln!(s, "{} {} {} {} {}", a.from, a.to, a.lower, a.upper, f);
        }
        s
    }

    /// Integral flow of exactly `target` units respecting all windows, found
    /// by the excess reduction to a plain max-flow problem.
    pub fn max_flow_integral(&self, target: i64) -> Result<IntegralFlow, FlowError> {
        let n = self.nodes.len();
        let (ss, tt) = (n, n + 1);
        let mut g = Dinic::new(n + 2);
        let mut excess = vec![0i64; n];
        let mut handles = Vec::with_capacity(self.arcs.len());
        for a in &self.arcs {
            handles.push(g.add_edge(a.from, a.to, a.upper - a.lower));
            excess[a.to] += a.lower;
            excess[a.from] -= a.lower;
        }
        // sink -> source closing arc with window [target, target]
        excess[self.source] += target;
        excess[self.sink] -= target;
        let mut need = 0;
        for (v, &e) in excess.iter().enumerate() {
            if e > 0 {
                g.add_edge(ss, v, e);
                need += e;
            } else if e < 0 {
                g.add_edge(v, tt, -e);
            }
        }
        if g.max_flow(ss, tt) != need {
            return Err(FlowError::NoFeasibleFlow);
        }
        let values: Vec<i64> = self.arcs.iter().zip(&handles).map(|(a, &h)| a.lower + g.flow_on(h)).collect();
        Ok(IntegralFlow { value: target, values })
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (id, a) in self.arcs.iter().enumerate() {
            adj[a.from].push(id);
            adj[a.to].push(id);
        }
        adj
    }

    /// Cycle of fractional arcs (in the undirected sense) as
    /// `(arc, forward)` pairs, or `None` when `flow` is integral.
    ///
    /// Deterministic: starts from the lowest fractional arc id and always
    /// leaves a node by its lowest fractional arc other than the one used to
    /// arrive.
    pub fn find_fractional_cycle(&self, flow: &[f64]) -> Result<Option<Vec<(usize, bool)>>, FlowError> {
        self.find_cycle_with(&self.adjacency(), flow)
    }

    fn find_cycle_with(&self, adj: &[Vec<usize>], flow: &[f64]) -> Result<Option<Vec<(usize, bool)>>, FlowError> {
        let frac = |e: usize| (flow[e] - round(flow[e])).abs() > EPS;
        let Some(start) = (0..self.arcs.len()).find(|&e| frac(e)) else { return Ok(None) };
        let mut pos = vec![usize::MAX; self.nodes.len()];
        let mut path_nodes = vec![self.arcs[start].from, self.arcs[start].to];
        let mut path_arcs = vec![(start, true)];
        pos[self.arcs[start].from] = 0;
        pos[self.arcs[start].to] = 1;
        let mut last = start;
        loop {
            let u = *path_nodes.last().expect("path is never empty");
            let Some(&e) = adj[u].iter().find(|&&e| e != last && frac(e)) else {
                return Err(FlowError::NumericalFailure);
            };
            let a = self.arcs[e];
            let (v, forward) = if a.from == u { (a.to, true) } else { (a.from, false) };
            path_arcs.push((e, forward));
            if pos[v] != usize::MAX {
                return Ok(Some(path_arcs.split_off(pos[v])));
            }
            pos[v] = path_nodes.len();
            path_nodes.push(v);
            last = e;
        }
    }

    /// One rotation of dependent rounding applied to `flow` in place.
    /// Returns `None` when `flow` is already integral.
    pub fn rotation_step<R: Rng + ?Sized>(&self, flow: &mut [f64], rng: &mut R) -> Result<Option<Rotation>, FlowError> {
        let adj = self.adjacency();
        self.rotate_with(&adj, flow, rng)
    }

    fn rotate_with<R: Rng + ?Sized>(&self, adj: &[Vec<usize>], flow: &mut [f64], rng: &mut R) -> Result<Option<Rotation>, FlowError> {
        let Some(cycle) = self.find_cycle_with(adj, flow)? else { return Ok(None) };
        let rot = Rotation::of_cycle(cycle, flow);
        let up = rng.gen::<f64>() * (rot.eps_plus + rot.eps_minus) < rot.eps_minus;
        rot.apply(flow, up);
        Ok(Some(Rotation { took_plus: up, ..rot }))
    }

    /// Dependent rounding of the annotation `self.flow`: the result is an
    /// integral feasible flow of the same value whose expectation over the
    /// generator equals `self.flow` on every arc.
    pub fn dependent_round<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<IntegralFlow, FlowError> {
        self.check(&self.flow, 1e-7)?;
        let value = self.value_of(&self.flow);
        if (value - round(value)).abs() > 1e-7 {
            return Err(FlowError::InfeasibleInput(String::from("flow value is not integral")));
        }
        let adj = self.adjacency();
        let mut f = self.flow.clone();
        for v in f.iter_mut() {
            if (*v - round(*v)).abs() <= EPS {
                *v = round(*v);
            }
        }
        let mut guard = self.arcs.len() + 1;
        while self.rotate_with(&adj, &mut f, rng)?.is_some() {
            if guard == 0 {
                return Err(FlowError::NumericalFailure);
            }
            guard -= 1;
        }
        let values: Vec<i64> = f.iter().map(|&v| round(v) as i64).collect();
        Ok(IntegralFlow { values, value: round(value) as i64 })
    }
}

/// A fractional cycle with its two rotation amounts.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    pub cycle: Vec<(usize, bool)>,
    /// Largest shift along the cycle orientation before an arc turns integral.
    pub eps_plus: f64,
    /// Largest shift against the orientation.
    pub eps_minus: f64,
    pub took_plus: bool,
}

impl Rotation {
    pub fn of_cycle(cycle: Vec<(usize, bool)>, flow: &[f64]) -> Self {
        let (mut ep, mut em) = (f64::INFINITY, f64::INFINITY);
        for &(e, fwd) in &cycle {
            let up = ceil(flow[e]) - flow[e];
            let down = flow[e] - floor(flow[e]);
            if fwd {
                ep = ep.min(up);
                em = em.min(down);
            } else {
                ep = ep.min(down);
                em = em.min(up);
            }
        }
        Rotation { cycle, eps_plus: ep, eps_minus: em, took_plus: false }
    }

    /// Shifts `flow` by `+eps_plus` (if `plus`) or `-eps_minus` along the
    /// cycle and snaps values that land on integers.
    pub fn apply(&self, flow: &mut [f64], plus: bool) {
        let theta = if plus { self.eps_plus } else { -self.eps_minus };
        for &(e, fwd) in &self.cycle {
            flow[e] += if fwd { theta } else { -theta };
            let r = round(flow[e]);
            if (flow[e] - r).abs() <= EPS {
                flow[e] = r;
            }
        }
    }
}

struct Dinic {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    orig: Vec<i64>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new(), orig: Vec::new() }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: i64) -> usize {
        let id = self.to.len();
        self.head[u].push(id);
        self.to.push(v);
        self.cap.push(c);
        self.orig.push(c);
        self.head[v].push(id + 1);
        self.to.push(u);
        self.cap.push(0);
        self.orig.push(0);
        id
    }

    fn flow_on(&self, id: usize) -> i64 {
        self.orig[id] - self.cap[id]
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let n = self.head.len();
        let mut total = 0;
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &e in &self.head[u] {
                    let v = self.to[e];
                    if self.cap[e] > 0 && level[v] == usize::MAX {
                        level[v] = level[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            let mut it = vec![0usize; n];
            loop {
                let f = self.dfs(s, t, i64::MAX, &level, &mut it);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, limit: i64, level: &[usize], it: &mut [usize]) -> i64 {
        if u == t {
            return limit;
        }
        while it[u] < self.head[u].len() {
            let e = self.head[u][it[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && level[v] == level[u] + 1 {
                let f = self.dfs(v, t, limit.min(self.cap[e]), level, it);
                if f > 0 {
                    self.cap[e] -= f;
                    self.cap[e ^ 1] += f;
                    return f;
                }
            }
            it[u] += 1;
        }
        0
    }
}
