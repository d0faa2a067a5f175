//! Benchmark suites: generate, solve and compare against the oracle.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, Result};
use dynclus_core::dokm::{DokmParams, TmMflParams};
use dynclus_core::gen::{generate, GenParams, Layout};
use dynclus_core::outlier::OutlierParams;
use dynclus_core::ProblemKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::run::{bound_for, coverage_radius, objective, oracle_optimum, ratio, solve, SolveParams, COST_TOL};
use crate::seeds::sub_seed;

fn default_steps() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutName {
    Square,
    Line,
    Clustered,
}

fn default_layout() -> LayoutName {
    LayoutName::Square
}

fn default_centers() -> usize {
    3
}

/// One block of generated instances. Sizes are maxima unless `fixed_sizes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub kind: String,
    pub instances: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    pub clients: usize,
    pub facilities: usize,
    pub k: usize,
    #[serde(default = "default_layout")]
    pub layout: LayoutName,
    #[serde(default = "default_centers")]
    pub centers: usize,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub fixed_sizes: bool,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub max_guesses: Option<usize>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub outlier_gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub cap: Option<u128>,
    #[serde(default)]
    pub runs: Vec<RunSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "true")]
    Pass,
    #[serde(rename = "false")]
    Fail,
    #[serde(rename = "cap-exceeded")]
    CapExceeded,
    #[serde(rename = "error")]
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub instance: String,
    pub seed: u64,
    pub objective: Option<f64>,
    pub oracle: Option<f64>,
    pub ratio: Option<f64>,
    pub bound: f64,
    pub pass: Status,
}

struct Job {
    name: String,
    seed: u64,
    gen: GenParams,
    params: SolveParams,
    delta: f64,
    epsilon: f64,
}

fn jobs(suite: &Suite) -> Result<Vec<Job>> {
    let mut out = Vec::new();
    for (b, spec) in suite.runs.iter().enumerate() {
        let kind = ProblemKind::parse(&spec.kind).ok_or_else(|| anyhow!("unknown kind {:?}", spec.kind))?;
        for i in 0..spec.instances {
            let seed = sub_seed(suite.seed, &format!("{}/{b}", kind.name()), i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (c, f, k) = if spec.fixed_sizes {
                (spec.clients, spec.facilities, spec.k)
            } else {
                let f = rng.gen_range(1..=spec.facilities.max(1));
                (rng.gen_range(1..=spec.clients.max(1)), f, rng.gen_range(1..=spec.k.min(f).max(1)))
            };
            let mut g = GenParams::new(kind, spec.steps, c, f, k, seed);
            g.layout = match spec.layout {
                LayoutName::Square => Layout::Square,
                LayoutName::Line => Layout::Line,
                LayoutName::Clustered => Layout::Clustered { centers: spec.centers },
            };
            if let Some(gm) = spec.gamma {
                g.gamma = gm;
            }
            let delta = spec.delta.unwrap_or(DokmParams::default().delta);
            let epsilon = spec.epsilon.unwrap_or(OutlierParams::default().epsilon);
            let params = match kind {
                ProblemKind::Dokm => {
                    let d = DokmParams::default();
                    SolveParams::Dokm(DokmParams {
                        delta,
                        samples: spec.samples.unwrap_or(d.samples),
                        max_guesses: spec.max_guesses.unwrap_or(d.max_guesses),
                        seed: sub_seed(seed, "rounding", 0),
                        ..d
                    })
                }
                ProblemKind::Dks => SolveParams::Dks,
                ProblemKind::DksOutlier => {
                    let d = OutlierParams::default();
                    SolveParams::DksOutlier(OutlierParams {
                        epsilon,
                        gamma: spec.outlier_gamma.unwrap_or(d.gamma),
                        max_guesses: spec.max_guesses.unwrap_or(d.max_guesses),
                    })
                }
                ProblemKind::TmMfl => SolveParams::TmMfl(TmMflParams {
                    samples: spec.samples.unwrap_or(TmMflParams::default().samples),
                    seed: sub_seed(seed, "rounding", 0),
                }),
            };
            out.push(Job { name: format!("{}-{b}-{i:04}", kind.name()), seed, gen: g, params, delta, epsilon });
        }
    }
    Ok(out)
}

fn run_job(job: &Job, cap: u128) -> Row {
    let mut row =
        Row { instance: job.name.clone(), seed: job.seed, objective: None, oracle: None, ratio: None, bound: 0.0, pass: Status::Error };
    let Ok(inst) = generate(&job.gen) else { return row };
    row.bound = bound_for(&inst, job.delta);
    let Ok(s) = solve(&inst, &job.params) else { return row };
    let fig = if inst.kind == ProblemKind::DksOutlier {
        coverage_radius(&inst, &s.schedule.open_sets, job.epsilon)
    } else {
        objective(&inst, &s.schedule)
    };
    row.objective = Some(fig);
    match oracle_optimum(&inst, cap) {
        Ok(Some(opt)) => {
            let r = ratio(fig, opt);
            row.oracle = Some(opt);
            row.ratio = Some(r);
            row.pass = if s.failures.is_empty() && r <= row.bound * (1.0 + COST_TOL) { Status::Pass } else { Status::Fail };
        }
        Ok(None) => row.pass = Status::CapExceeded,
        Err(_) => {}
    }
    row
}

/// Worker count: `DYNCLUS_THREADS` when set, the available parallelism otherwise.
pub fn thread_count() -> usize {
    std::env::var("DYNCLUS_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs every row of the suite on a pool of `threads` workers; rows come
/// back in suite order whatever the schedule.
pub fn run_suite(suite: &Suite, threads: usize) -> Result<Vec<Row>> {
    let jobs = jobs(suite)?;
    let cap = suite.cap.unwrap_or(dynclus_core::oracle::DEFAULT_CAP);
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<Row>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|sc| {
        for _ in 0..threads.max(1).min(jobs.len().max(1)) {
            sc.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let row = run_job(job, cap);
                rows.lock().expect("no worker panics while holding the lock")[i] = Some(row);
            });
        }
    });
    Ok(rows.into_inner().expect("workers joined").into_iter().map(|r| r.expect("every row ran")).collect())
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["instance", "seed", "objective", "oracle", "ratio", "bound", "pass"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
