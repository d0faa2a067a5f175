//! Problem instances: a metric plus per-step client and facility sets.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::metric::{Metric, PointId};
use crate::num::EPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProblemKind {
    /// Dynamic Ordered k-Median.
    Dokm,
    /// Dynamic k-Supplier.
    Dks,
    /// Dynamic k-Supplier with outliers.
    DksOutlier,
    /// Facility-weighted total-movement mobile facility location.
    TmMfl,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Dokm => "dokm",
            ProblemKind::Dks => "dks",
            ProblemKind::DksOutlier => "dks_outlier",
            ProblemKind::TmMfl => "tm_mfl",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dokm" => Some(ProblemKind::Dokm),
            "dks" => Some(ProblemKind::Dks),
            "dks_outlier" | "dks-outlier" => Some(ProblemKind::DksOutlier),
            "tm_mfl" | "tmmfl" | "tm-mfl" => Some(ProblemKind::TmMfl),
            _ => None,
        }
    }

    /// True for the supplier variants, whose objective is a radius.
    pub fn is_supplier(self) -> bool {
        matches!(self, ProblemKind::Dks | ProblemKind::DksOutlier)
    }
}

/// One time step. Fields that do not apply to the instance's kind stay empty.
///
/// For `tm_mfl` the first step lists the facility start positions (with
/// `facility_weights`) and no clients; the second lists the clients (with
/// `demands`) and the candidate destinations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeStep {
    pub clients: Vec<PointId>,
    pub facilities: Vec<PointId>,
    pub weights: Vec<f64>,
    pub outlier_target: usize,
    pub demands: Vec<f64>,
    pub facility_weights: Vec<f64>,
}

impl TimeStep {
    pub fn new(clients: Vec<PointId>, facilities: Vec<PointId>) -> Self {
        TimeStep { clients, facilities, ..Default::default() }
    }

    pub fn with_weights(mut self, w: Vec<f64>) -> Self {
        self.weights = w;
        self
    }

    pub fn with_outlier_target(mut self, l: usize) -> Self {
        self.outlier_target = l;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceError {
    NoSteps,
    ZeroK,
    BadGamma(f64),
    PointOutOfRange { step: usize, point: PointId },
    DuplicatePoint { step: usize, point: PointId },
    NoFacilities { step: usize },
    WeightLength { step: usize, len: usize, expected: usize },
    WeightsNotSorted { step: usize },
    NegativeValue { step: usize, field: &'static str },
    MissingBound,
    OutlierTarget { step: usize, target: usize, clients: usize },
    WrongKind { expected: ProblemKind, found: ProblemKind },
    StepCount { expected: usize, found: usize },
    Layout(String),
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::NoSteps => write!(f, "instance has no time steps"),
            InstanceError::ZeroK => write!(f, "k must be positive"),
            InstanceError::BadGamma(g) => write!(f, "gamma must be finite and nonnegative, got {g}"),
            InstanceError::PointOutOfRange { step, point } => {
                write!(f, "step {step} refers to point {point}, which does not exist")
            }
            InstanceError::DuplicatePoint { step, point } => {
                write!(f, "step {step} lists point {point} twice in one set")
            }
            InstanceError::NoFacilities { step } => write!(f, "step {step} has no facilities"),
            InstanceError::WeightLength { step, len, expected } => {
                write!(f, "step {step} has {len} weights for {expected} clients")
            }
            InstanceError::WeightsNotSorted { step } => {
                write!(f, "step {step} weights are not nonincreasing")
            }
            InstanceError::NegativeValue { step, field } => {
                write!(f, "step {step} field {field} has a negative or non-finite value")
            }
            InstanceError::MissingBound => write!(f, "movement bound B is required for this problem"),
            InstanceError::OutlierTarget { step, target, clients } => {
                write!(f, "step {step} outlier target {target} exceeds {clients} clients")
            }
            InstanceError::WrongKind { expected, found } => {
                write!(f, "expected a {} instance, got {}", expected.name(), found.name())
            }
            InstanceError::StepCount { expected, found } => {
                write!(f, "expected {expected} time steps, got {found}")
            }
            InstanceError::Layout(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub metric: Metric,
    pub steps: Vec<TimeStep>,
    pub k: usize,
    pub gamma: f64,
    /// Per-transition movement bound B of the supplier variants.
    pub movement_bound: Option<f64>,
    pub kind: ProblemKind,
}

impl Instance {
    pub fn new(
        metric: Metric,
        steps: Vec<TimeStep>,
        k: usize,
        gamma: f64,
        movement_bound: Option<f64>,
        kind: ProblemKind,
    ) -> Result<Self, InstanceError> {
        let inst = Instance { metric, steps, k, gamma, movement_bound, kind };
        inst.validate()?;
        Ok(inst)
    }

    pub fn dist(&self, a: PointId, b: PointId) -> f64 {
        self.metric.dist(a, b)
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn expect_kind(&self, kind: ProblemKind) -> Result<(), InstanceError> {
        if self.kind != kind {
            return Err(InstanceError::WrongKind { expected: kind, found: self.kind });
        }
        Ok(())
    }

    /// Sorted, deduplicated distances between facilities and clients of the
    /// same step, over all steps.
    pub fn client_facility_distances(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for s in &self.steps {
            for &i in &s.facilities {
                for &j in &s.clients {
                    v.push(self.dist(i, j));
                }
            }
        }
        crate::num::distinct_sorted(&mut v);
        v
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        if self.steps.is_empty() {
            return Err(InstanceError::NoSteps);
        }
        if self.k == 0 {
            return Err(InstanceError::ZeroK);
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(InstanceError::BadGamma(self.gamma));
        }
        let n = self.metric.len();
        for (t, s) in self.steps.iter().enumerate() {
            for set in [&s.clients, &s.facilities] {
                let mut seen = alloc::vec![false; n];
                for &p in set.iter() {
                    if p >= n {
                        return Err(InstanceError::PointOutOfRange { step: t, point: p });
                    }
                    if seen[p] {
                        return Err(InstanceError::DuplicatePoint { step: t, point: p });
                    }
                    seen[p] = true;
                }
            }
            let tm_start = self.kind == ProblemKind::TmMfl && t == 0;
            if s.facilities.is_empty() && !tm_start {
                return Err(InstanceError::NoFacilities { step: t });
            }
        }
        match self.kind {
            ProblemKind::Dokm => self.validate_dokm(),
            ProblemKind::Dks => self.validate_bound(),
            ProblemKind::DksOutlier => {
                self.validate_bound()?;
                for (t, s) in self.steps.iter().enumerate() {
                    if s.outlier_target > s.clients.len() {
                        return Err(InstanceError::OutlierTarget { step: t, target: s.outlier_target, clients: s.clients.len() });
                    }
                }
                Ok(())
            }
            ProblemKind::TmMfl => self.validate_tm_mfl(),
        }
    }

    fn validate_bound(&self) -> Result<(), InstanceError> {
        match self.movement_bound {
            Some(b) if b.is_finite() && b >= 0.0 => Ok(()),
            Some(_) => Err(InstanceError::NegativeValue { step: 0, field: "B" }),
            None => Err(InstanceError::MissingBound),
        }
    }

    fn validate_dokm(&self) -> Result<(), InstanceError> {
        for (t, s) in self.steps.iter().enumerate() {
            if s.weights.len() != s.clients.len() {
                return Err(InstanceError::WeightLength { step: t, len: s.weights.len(), expected: s.clients.len() });
            }
            if s.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(InstanceError::NegativeValue { step: t, field: "weights" });
            }
            if s.weights.windows(2).any(|w| w[1] > w[0] + EPS) {
                return Err(InstanceError::WeightsNotSorted { step: t });
            }
        }
        Ok(())
    }

    fn validate_tm_mfl(&self) -> Result<(), InstanceError> {
        if self.steps.len() != 2 {
            return Err(InstanceError::StepCount { expected: 2, found: self.steps.len() });
        }
        let (start, end) = (&self.steps[0], &self.steps[1]);
        if !start.clients.is_empty() {
            return Err(InstanceError::Layout("tm_mfl step 0 must have no clients".into()));
        }
        if start.facilities.is_empty() {
            return Err(InstanceError::NoFacilities { step: 0 });
        }
        if start.facility_weights.len() != start.facilities.len() {
            return Err(InstanceError::Layout("tm_mfl step 0 needs one facility weight per start position".into()));
        }
        if start.facility_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(InstanceError::NegativeValue { step: 0, field: "facility_weights" });
        }
        if end.demands.len() != end.clients.len() {
            return Err(InstanceError::Layout("tm_mfl step 1 needs one demand per client".into()));
        }
        if end.demands.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(InstanceError::NegativeValue { step: 1, field: "demands" });
        }
        if self.k != start.facilities.len() {
            return Err(InstanceError::Layout("tm_mfl k must equal the number of facilities".into()));
        }
        if start.facilities.iter().any(|f| !end.facilities.contains(f)) {
            return Err(InstanceError::Layout("tm_mfl destinations must include every start position".into()));
        }
        Ok(())
    }
}
