//! Seeded random instance generators.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::assignment::bottleneck;
use crate::instance::{Instance, InstanceError, ProblemKind, TimeStep};
use crate::metric::Metric;
use crate::num::{cos, ln, sqrt};

/// Where points are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Uniform in `[0, 100)^2`.
    Square,
    /// Uniform in `[0, 100)`.
    Line,
    /// Gaussian blobs (sd 5) around uniform centers in the square.
    Clustered { centers: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub kind: ProblemKind,
    pub layout: Layout,
    pub steps: usize,
    pub clients: usize,
    pub facilities: usize,
    pub k: usize,
    pub gamma: f64,
    pub seed: u64,
}

impl GenParams {
    pub fn new(kind: ProblemKind, steps: usize, clients: usize, facilities: usize, k: usize, seed: u64) -> Self {
        GenParams { kind, layout: Layout::Square, steps, clients, facilities, k, gamma: 1.0, seed }
    }
}

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    sqrt(-2.0 * ln(u1)) * cos(2.0 * PI * u2)
}

fn points<R: Rng>(rng: &mut R, layout: Layout, n: usize) -> Vec<Vec<f64>> {
    match layout {
        Layout::Square => (0..n).map(|_| vec![rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)]).collect(),
        Layout::Line => (0..n).map(|_| vec![rng.gen_range(0.0..100.0)]).collect(),
        Layout::Clustered { centers } => {
            let centers = centers.max(1);
            let c: Vec<[f64; 2]> = (0..centers).map(|_| [rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)]).collect();
            (0..n)
                .map(|_| {
                    let o = c[rng.gen_range(0..centers)];
                    vec![o[0] + 5.0 * gauss(rng), o[1] + 5.0 * gauss(rng)]
                })
                .collect()
        }
    }
}

/// One of a few nonincreasing weight shapes: all ones, top-1, top-m, or
/// two levels. Few distinct values keep the guess space small.
fn weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    match rng.gen_range(0..4) {
        0 => vec![1.0; n],
        1 => {
            let mut w = vec![0.0; n];
            w[0] = 1.0;
            w
        }
        2 => {
            let m = rng.gen_range(1..=n);
            (0..n).map(|i| if i < m { 1.0 } else { 0.0 }).collect()
        }
        _ => {
            let m = rng.gen_range(1..=n);
            let hi = rng.gen_range(1.0..4.0);
            (0..n).map(|i| if i < m { hi } else { 1.0 }).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenError {
    BadSize(&'static str),
    Instance(InstanceError),
}

impl core::fmt::Display for GenError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GenError::BadSize(m) => write!(f, "invalid sizes: {m}"),
            GenError::Instance(e) => write!(f, "{e}"),
        }
    }
}

/// A random instance of `p.kind`. Every step gets fresh client and facility
/// points. Supplier instances get the bound of a random pair of placements,
/// so a feasible schedule always exists; outlier targets are uniform in
/// `1..=|C_t|`. For `tm_mfl`, `facilities` start points are followed by
/// `clients` extra candidate destinations in step 1, and `k` is ignored.
pub fn generate(p: &GenParams) -> Result<Instance, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    if p.kind == ProblemKind::TmMfl {
        return generate_tm_mfl(&mut rng, p);
    }
    if p.steps == 0 || p.facilities == 0 || p.k == 0 {
        return Err(GenError::BadSize("steps, facilities and k must be positive"));
    }
    let per = p.clients + p.facilities;
    let coords = points(&mut rng, p.layout, per * p.steps);
    let mut steps = Vec::new();
    for t in 0..p.steps {
        let base = t * per;
        let mut s = TimeStep::new((base..base + p.clients).collect(), (base + p.clients..base + per).collect());
        match p.kind {
            ProblemKind::Dokm => s.weights = weights(&mut rng, p.clients),
            ProblemKind::DksOutlier => s.outlier_target = if p.clients == 0 { 0 } else { rng.gen_range(1..=p.clients) },
            _ => {}
        }
        steps.push(s);
    }
    let metric = Metric::from_points(coords).map_err(|_| GenError::BadSize("non-finite coordinates"))?;
    let bound = if p.kind.is_supplier() {
        let mut b: f64 = 0.0;
        let pick: Vec<Vec<usize>> =
            steps.iter().map(|s| (0..p.k).map(|_| s.facilities[rng.gen_range(0..p.facilities)]).collect()).collect();
        for t in 0..p.steps.saturating_sub(1) {
            let n = p.k;
            let mut c = vec![0.0; n * n];
            for r in 0..n {
                for q in 0..n {
                    c[r * n + q] = metric.dist(pick[t][r], pick[t + 1][q]);
                }
            }
            b = b.max(bottleneck(n, &c).0);
        }
        Some(b)
    } else {
        None
    };
    Instance::new(metric, steps, p.k, p.gamma, bound, p.kind).map_err(GenError::Instance)
}

fn generate_tm_mfl(rng: &mut ChaCha8Rng, p: &GenParams) -> Result<Instance, GenError> {
    if p.facilities == 0 {
        return Err(GenError::BadSize("facilities must be positive"));
    }
    let nf = p.facilities;
    let nc = p.clients;
    // starts, extra candidates, clients
    let coords = points(rng, p.layout, nf + nc + nc);
    let metric = Metric::from_points(coords).map_err(|_| GenError::BadSize("non-finite coordinates"))?;
    let mut s0 = TimeStep::new(Vec::new(), (0..nf).collect());
    s0.facility_weights = (0..nf).map(|_| rng.gen_range(0.5..3.0)).collect();
    let mut s1 = TimeStep::new((nf + nc..nf + 2 * nc).collect(), (0..nf + nc).collect());
    s1.demands = (0..nc).map(|_| rng.gen_range(0.5..3.0)).collect();
    Instance::new(metric, vec![s0, s1], nf, p.gamma, None, ProblemKind::TmMfl).map_err(GenError::Instance)
}
