//! Finite metric spaces stored as dense distance matrices.

use alloc::vec::Vec;
use core::fmt;

use crate::num::sqrt;

/// Index of a point in a [`Metric`].
pub type PointId = usize;

/// Relative slack allowed when checking metric axioms on float input.
const AXIOM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricError {
    Empty,
    NotSquare { row: usize, len: usize, expected: usize },
    NotFinite { i: usize, j: usize },
    Negative { i: usize, j: usize },
    NonZeroDiagonal { i: usize },
    Asymmetric { i: usize, j: usize },
    Triangle { i: usize, j: usize, k: usize },
    DimensionMismatch { point: usize },
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::Empty => write!(f, "metric has no points"),
            MetricError::NotSquare { row, len, expected } => {
                write!(f, "distance matrix row {row} has {len} entries, expected {expected}")
            }
            MetricError::NotFinite { i, j } => write!(f, "distance d({i},{j}) is not finite"),
            MetricError::Negative { i, j } => write!(f, "distance d({i},{j}) is negative"),
            MetricError::NonZeroDiagonal { i } => write!(f, "distance d({i},{i}) is not zero"),
            MetricError::Asymmetric { i, j } => write!(f, "d({i},{j}) differs from d({j},{i})"),
            MetricError::Triangle { i, j, k } => {
                write!(f, "triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")
            }
            MetricError::DimensionMismatch { point } => {
                write!(f, "point {point} has a different dimension than point 0")
            }
        }
    }
}

/// A validated finite metric. Optional coordinates are kept when the metric
/// was built from points.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    n: usize,
    d: Vec<f64>,
    coords: Option<Vec<Vec<f64>>>,
}

impl Metric {
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let n = rows.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        let mut d = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare { row, len: r.len(), expected: n });
            }
            d.extend_from_slice(r);
        }
        let m = Metric { n, d, coords: None };
        m.validate()?;
        Ok(m)
    }

    /// Euclidean metric over coordinate vectors.
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let n = points.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        let dim = points[0].len();
        for (p, x) in points.iter().enumerate() {
            if x.len() != dim {
                return Err(MetricError::DimensionMismatch { point: p });
            }
            if x.iter().any(|c| !c.is_finite()) {
                return Err(MetricError::NotFinite { i: p, j: p });
            }
        }
        let mut d = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let s: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                let v = sqrt(s);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        let m = Metric { n, d, coords: Some(points) };
        m.validate()?;
        Ok(m)
    }

    /// Points on the real line; distances are absolute differences.
    pub fn line(xs: &[f64]) -> Result<Self, MetricError> {
        Self::from_points(xs.iter().map(|&x| alloc::vec![x]).collect())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, a: PointId, b: PointId) -> f64 {
        self.d[a * self.n + b]
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.d.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.d.iter().cloned().fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<(), MetricError> {
        let n = self.n;
        let scale = self.d.iter().filter(|v| v.is_finite()).fold(1.0f64, |a, &b| a.max(b.abs()));
        let tol = AXIOM_TOL * scale;
        for i in 0..n {
            for j in 0..n {
                let v = self.dist(i, j);
                if !v.is_finite() {
                    return Err(MetricError::NotFinite { i, j });
                }
                if v < 0.0 {
                    return Err(MetricError::Negative { i, j });
                }
            }
            if self.dist(i, i).abs() > tol {
                return Err(MetricError::NonZeroDiagonal { i });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (self.dist(i, j) - self.dist(j, i)).abs() > tol {
                    return Err(MetricError::Asymmetric { i, j });
                }
            }
        }
        for j in 0..n {
            for i in 0..n {
                let dij = self.dist(i, j);
                for k in 0..n {
                    if self.dist(i, k) > dij + self.dist(j, k) + tol {
                        return Err(MetricError::Triangle { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }
}
