//! JSON instance and schedule files.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use dynclus_core::{CostBreakdown, Instance, Metric, PointId, ProblemKind, Schedule, TimeStep};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFile {
    pub clients: Vec<PointId>,
    pub facilities: Vec<PointId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outlier_target: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demands: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facility_weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_matrix: Option<Vec<Vec<f64>>>,
    pub k: usize,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub movement_bound: Option<f64>,
    pub problem: String,
    pub steps: Vec<StepFile>,
}

fn nonempty(v: &[f64]) -> Option<Vec<f64>> {
    (!v.is_empty()).then(|| v.to_vec())
}

impl InstanceFile {
    /// Coordinates are written when the metric has them, the matrix otherwise.
    pub fn from_instance(inst: &Instance) -> Self {
        let (points, distance_matrix) = match inst.metric.coords() {
            Some(c) => (Some(c.to_vec()), None),
            None => (None, Some(inst.metric.rows())),
        };
        let steps = inst
            .steps
            .iter()
            .map(|s| StepFile {
                clients: s.clients.clone(),
                facilities: s.facilities.clone(),
                weights: nonempty(&s.weights),
                outlier_target: (inst.kind == ProblemKind::DksOutlier).then_some(s.outlier_target),
                demands: nonempty(&s.demands),
                facility_weights: nonempty(&s.facility_weights),
            })
            .collect();
        InstanceFile {
            points,
            distance_matrix,
            k: inst.k,
            gamma: inst.gamma,
            movement_bound: inst.movement_bound,
            problem: inst.kind.name().to_string(),
            steps,
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let kind = ProblemKind::parse(&self.problem).ok_or_else(|| anyhow!("unknown problem {:?}", self.problem))?;
        let metric = match (&self.points, &self.distance_matrix) {
            (Some(p), None) => Metric::from_points(p.clone()),
            (None, Some(m)) => Metric::from_matrix(m.clone()),
            (Some(_), Some(_)) => bail!("give either points or distance_matrix, not both"),
            (None, None) => bail!("instance needs points or distance_matrix"),
        }
        .map_err(|e| anyhow!("metric: {e}"))?;
        let steps = self
            .steps
            .iter()
            .map(|s| TimeStep {
                clients: s.clients.clone(),
                facilities: s.facilities.clone(),
                weights: s.weights.clone().unwrap_or_default(),
                outlier_target: s.outlier_target.unwrap_or(0),
                demands: s.demands.clone().unwrap_or_default(),
                facility_weights: s.facility_weights.clone().unwrap_or_default(),
            })
            .collect();
        Instance::new(metric, steps, self.k, self.gamma, self.movement_bound, kind).map_err(|e| anyhow!("instance: {e}"))
    }

    /// SHA-256 of the compact JSON encoding.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("instance files always serialize");
        hex::encode(Sha256::digest(&bytes))
    }
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance files always serialize")
}

pub fn instance_from_json(s: &str) -> Result<Instance> {
    let f: InstanceFile = serde_json::from_str(s).context("parsing instance JSON")?;
    f.to_instance()
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    instance_from_json(&s).with_context(|| format!("loading {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostsFile {
    pub service: f64,
    pub movement: f64,
    pub total: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub max_moves: Vec<f64>,
}

impl From<&CostBreakdown> for CostsFile {
    fn from(c: &CostBreakdown) -> Self {
        CostsFile { service: c.service, movement: c.movement, total: c.total, radius: c.radius, max_moves: c.max_moves.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub open_sets: Vec<Vec<PointId>>,
    #[serde(default)]
    pub transitions: Vec<Vec<(PointId, PointId)>>,
    pub costs: CostsFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<serde_json::Value>,
}

impl ScheduleFile {
    pub fn new(s: &Schedule, certificate: Option<serde_json::Value>) -> Self {
        ScheduleFile { open_sets: s.open_sets.clone(), transitions: s.transitions.clone(), costs: CostsFile::from(&s.costs), certificate }
    }
}

pub fn read_schedule(path: &Path) -> Result<ScheduleFile> {
    let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&s).with_context(|| format!("parsing schedule {}", path.display()))
}

/// Writes `contents` to `path`, or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{contents}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}

/// 3DM input: `n` elements per side and the triplets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripletsFile {
    pub n: usize,
    pub triplets: Vec<(usize, usize, usize)>,
}
