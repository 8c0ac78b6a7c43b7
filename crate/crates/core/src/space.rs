//! Finite wide-sense metric spaces, balls, sampled paths and their length.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::{ExtReal, Finite, Infinite};

/// Relative slack used when checking the triangle inequality on float
/// distances, so collinear Euclidean points are not flagged for rounding.
pub const TRIANGLE_REL_EPS: f64 = 1e-12;

/// Read access to a finite wide-sense metric on dense ids `0..len()`.
///
/// Implementors must be usable from several threads at once.
pub trait Metric: Sync {
    fn len(&self) -> usize;

    fn dist(&self, a: usize, b: usize) -> ExtReal;

    /// All distances from `a`. Implementations backed by shortest paths
    /// override this; a row is one single-source computation.
    fn row(&self, a: usize) -> Vec<ExtReal> {
        (0..self.len()).map(|b| self.dist(a, b)).collect()
    }

    /// Planar coordinates, when the space has them.
    fn coords(&self, _id: usize) -> Option<[f64; 2]> {
        None
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether a single `dist` call is O(1). Row-backed metrics say no.
    fn dist_is_cheap(&self) -> bool {
        true
    }

    fn check_id(&self, id: usize) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownPoint(id))
        }
    }
}

impl<M: Metric + ?Sized> Metric for &M {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn dist(&self, a: usize, b: usize) -> ExtReal {
        (**self).dist(a, b)
    }
    fn row(&self, a: usize) -> Vec<ExtReal> {
        (**self).row(a)
    }
    fn coords(&self, id: usize) -> Option<[f64; 2]> {
        (**self).coords(id)
    }
    fn dist_is_cheap(&self) -> bool {
        (**self).dist_is_cheap()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PointRecord {
    /// Index of the input record this point came from.
    pub source_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone)]
enum Storage {
    Matrix(Vec<ExtReal>),
    Euclidean { dim: usize },
}

/// A finite point set with a wide-sense metric, stored either as a dense
/// matrix or implicitly as Euclidean distance between coordinates.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    points: Vec<PointRecord>,
    storage: Storage,
}

impl FiniteMetricSpace {
    /// Euclidean space on the given coordinates. Exact duplicates are merged
    /// into the first occurrence.
    pub fn euclidean(coords: Vec<Vec<f64>>) -> Result<Self> {
        let dim = coords.first().map_or(0, Vec::len);
        if dim == 0 && !coords.is_empty() {
            return Err(Error::InvalidSpace("zero-dimensional coordinates".into()));
        }
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut points = Vec::with_capacity(coords.len());
        for (i, c) in coords.into_iter().enumerate() {
            if c.len() != dim {
                return Err(Error::InvalidSpace(format!(
                    "point {i} has dimension {} instead of {dim}",
                    c.len()
                )));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSpace(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
            let key: Vec<u64> = c.iter().map(|v| (v + 0.0).to_bits()).collect();
            if seen.contains_key(&key) {
                continue;
            }
            seen.insert(key, points.len());
            points.push(PointRecord {
                source_index: i,
                coords: Some(c),
                label: None,
            });
        }
        Ok(Self {
            points,
            storage: Storage::Euclidean { dim },
        })
    }

    pub fn euclidean_2d(coords: &[[f64; 2]]) -> Result<Self> {
        Self::euclidean(coords.iter().map(|c| c.to_vec()).collect())
    }

    /// Dense-matrix space. Rows must be square with nonnegative entries and
    /// a zero diagonal; points at distance 0 from an earlier point (in both
    /// directions) are merged into it. Symmetry and the triangle inequality
    /// are left to [`validate_wide_metric`].
    pub fn from_matrix(matrix: Vec<Vec<ExtReal>>) -> Result<Self> {
        let n = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidSpace(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            if row[i] != ExtReal::ZERO {
                return Err(Error::InvalidSpace(format!(
                    "d({i},{i}) = {} is not 0",
                    row[i]
                )));
            }
        }
        let mut keep: Vec<usize> = Vec::with_capacity(n);
        for i in 0..n {
            let dup = keep
                .iter()
                .any(|&k| matrix[k][i] == ExtReal::ZERO && matrix[i][k] == ExtReal::ZERO);
            if !dup {
                keep.push(i);
            }
        }
        let m = keep.len();
        let mut dense = Vec::with_capacity(m * m);
        for &i in &keep {
            for &j in &keep {
                dense.push(matrix[i][j]);
            }
        }
        let points = keep
            .iter()
            .map(|&i| PointRecord {
                source_index: i,
                coords: None,
                label: None,
            })
            .collect();
        Ok(Self {
            points,
            storage: Storage::Matrix(dense),
        })
    }

    /// Materializes any metric into a dense matrix, keeping 2-D coordinates.
    /// The upper triangle is mirrored, so row-wise computations that round
    /// differently in each direction still yield an exactly symmetric matrix.
    pub fn from_metric<M: Metric + ?Sized>(metric: &M) -> Self {
        let n = metric.len();
        let mut dense = vec![ExtReal::ZERO; n * n];
        for a in 0..n {
            let row = metric.row(a);
            for b in a + 1..n {
                dense[a * n + b] = row[b];
                dense[b * n + a] = row[b];
            }
        }
        let points = (0..n)
            .map(|i| PointRecord {
                source_index: i,
                coords: metric.coords(i).map(|c| c.to_vec()),
                label: None,
            })
            .collect();
        Self {
            points,
            storage: Storage::Matrix(dense),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        let mut labels: Vec<Option<String>> = labels.into_iter().map(Some).collect();
        for p in &mut self.points {
            p.label = labels
                .get_mut(p.source_index)
                .ok_or_else(|| Error::InvalidSpace("fewer labels than points".into()))?
                .take();
        }
        Ok(self)
    }

    pub fn points(&self) -> &[PointRecord] {
        &self.points
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.storage, Storage::Euclidean { .. })
    }

    /// The largest finite distance over all pairs. O(n²).
    pub fn finite_diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for a in 0..n {
            for b in a + 1..n {
                if let Finite(v) = self.dist(a, b) {
                    best = best.max(v);
                }
            }
        }
        best
    }
}

impl Metric for FiniteMetricSpace {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn dist(&self, a: usize, b: usize) -> ExtReal {
        match &self.storage {
            Storage::Matrix(m) => m[a * self.points.len() + b],
            Storage::Euclidean { dim } => {
                let pa = self.points[a].coords.as_deref().unwrap_or_default();
                let pb = self.points[b].coords.as_deref().unwrap_or_default();
                if *dim == 2 {
                    Finite((pa[0] - pb[0]).hypot(pa[1] - pb[1]))
                } else {
                    Finite(
                        pa.iter()
                            .zip(pb)
                            .map(|(x, y)| (x - y) * (x - y))
                            .sum::<f64>()
                            .sqrt(),
                    )
                }
            }
        }
    }

    fn row(&self, a: usize) -> Vec<ExtReal> {
        match &self.storage {
            Storage::Matrix(m) => {
                let n = self.points.len();
                m[a * n..(a + 1) * n].to_vec()
            }
            Storage::Euclidean { .. } => (0..self.len()).map(|b| self.dist(a, b)).collect(),
        }
    }

    fn coords(&self, id: usize) -> Option<[f64; 2]> {
        match self.points[id].coords.as_deref() {
            Some([x, y]) => Some([*x, *y]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Identity,
    Separation,
    Symmetry,
    Triangle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ValidationReport {
    Pass,
    Fail { axiom: Axiom, witness: [usize; 3] },
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        matches!(self, ValidationReport::Pass)
    }
}

/// Checks the wide-sense metric axioms and returns the first violation in
/// lexicographic order. Identity and separation are checked first, then
/// symmetry over pairs, then the triangle inequality `d(x,z) ≤ d(x,y) + d(y,z)`
/// over triples `(x, y, z)`, with `∞` handled by saturation.
pub fn validate_wide_metric<M: Metric + ?Sized>(space: &M) -> ValidationReport {
    let n = space.len();
    let rows: Vec<Vec<ExtReal>> = (0..n).map(|a| space.row(a)).collect();
    for x in 0..n {
        if rows[x][x] != ExtReal::ZERO {
            return ValidationReport::Fail {
                axiom: Axiom::Identity,
                witness: [x, x, x],
            };
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            if rows[x][y] == ExtReal::ZERO || rows[y][x] == ExtReal::ZERO {
                return ValidationReport::Fail {
                    axiom: Axiom::Separation,
                    witness: [x, y, y],
                };
            }
            if rows[x][y] != rows[y][x] {
                return ValidationReport::Fail {
                    axiom: Axiom::Symmetry,
                    witness: [x, y, y],
                };
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            let dxy = rows[x][y];
            for z in 0..n {
                let through = dxy + rows[y][z];
                let direct = rows[x][z];
                let violated = match (direct, through) {
                    (Finite(d), Finite(t)) => d > t * (1.0 + TRIANGLE_REL_EPS),
                    (Infinite, Finite(_)) => true,
                    _ => false,
                };
                if violated {
                    return ValidationReport::Fail {
                        axiom: Axiom::Triangle,
                        witness: [x, y, z],
                    };
                }
            }
        }
    }
    ValidationReport::Pass
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BallKind {
    Closed,
    Open,
}

/// `B(center, radius)` when closed, `U(center, radius)` when open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: usize,
    pub radius: ExtReal,
    pub kind: BallKind,
}

impl Ball {
    pub fn closed(center: usize, radius: impl Into<ExtReal>) -> Self {
        Self {
            center,
            radius: radius.into(),
            kind: BallKind::Closed,
        }
    }

    pub fn open(center: usize, radius: impl Into<ExtReal>) -> Self {
        Self {
            center,
            radius: radius.into(),
            kind: BallKind::Open,
        }
    }

    pub fn contains_distance(&self, d: ExtReal) -> bool {
        match self.kind {
            BallKind::Closed => d <= self.radius,
            BallKind::Open => d < self.radius,
        }
    }
}

/// Members of `ball` in ascending id order.
pub fn ball_members<M: Metric + ?Sized>(space: &M, ball: &Ball) -> Result<Vec<usize>> {
    space.check_id(ball.center)?;
    Ok(space
        .row(ball.center)
        .into_iter()
        .enumerate()
        .filter(|(_, d)| ball.contains_distance(*d))
        .map(|(id, _)| id)
        .collect())
}

/// A path sampled at strictly increasing parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    samples: Vec<usize>,
    params: Vec<f64>,
}

impl Path {
    /// Validates sample ids, parameter monotonicity and finiteness of every
    /// consecutive distance. A single sample is the constant path.
    pub fn new<M: Metric + ?Sized>(
        space: &M,
        samples: Vec<usize>,
        params: Vec<f64>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidPath("no samples".into()));
        }
        if samples.len() != params.len() {
            return Err(Error::InvalidPath(format!(
                "{} samples but {} parameters",
                samples.len(),
                params.len()
            )));
        }
        for &s in &samples {
            space.check_id(s)?;
        }
        if params.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidPath("non-finite parameter".into()));
        }
        if let Some(w) = params.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPath(format!(
                "parameters not increasing at {} ≥ {}",
                w[0], w[1]
            )));
        }
        if let Some(w) = samples
            .windows(2)
            .find(|w| space.dist(w[0], w[1]).is_infinite())
        {
            return Err(Error::InvalidPath(format!(
                "samples {} and {} are at distance ∞",
                w[0], w[1]
            )));
        }
        Ok(Self { samples, params })
    }

    /// Samples with parameters `0, 1, 2, …`.
    pub fn from_samples<M: Metric + ?Sized>(space: &M, samples: Vec<usize>) -> Result<Self> {
        let params = (0..samples.len()).map(|k| k as f64).collect();
        Self::new(space, samples, params)
    }

    pub fn samples(&self) -> &[usize] {
        &self.samples
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn first(&self) -> usize {
        self.samples[0]
    }

    pub fn last(&self) -> usize {
        self.samples[self.samples.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `L(γ)` of the sampled path: the sum of consecutive distances, which is the
/// supremum over sub-partitions by the triangle inequality.
pub fn path_length<M: Metric + ?Sized>(space: &M, path: &Path) -> ExtReal {
    path.samples
        .windows(2)
        .map(|w| space.dist(w[0], w[1]))
        .sum()
}

/// Inserts `(param, id)` samples strictly inside the parameter range.
pub fn refine_path<M: Metric + ?Sized>(
    space: &M,
    path: &Path,
    insertions: &[(f64, usize)],
) -> Result<Path> {
    let (lo, hi) = (path.params[0], path.params[path.params.len() - 1]);
    let mut merged: Vec<(f64, usize)> = path
        .params
        .iter()
        .copied()
        .zip(path.samples.iter().copied())
        .collect();
    for &(t, id) in insertions {
        space.check_id(id)?;
        if !(t > lo && t < hi) {
            return Err(Error::InvalidPath(format!(
                "insertion parameter {t} outside ({lo}, {hi})"
            )));
        }
        merged.push((t, id));
    }
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = merged.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::ParamCollision(w[0].0));
    }
    let (params, samples) = merged.into_iter().unzip();
    Path::new(space, samples, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::euclidean(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    fn matrix(rows: &[&[Option<f64>]]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_matrix(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|v| v.map_or(Infinite, ExtReal::from))
                        .collect()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn euclidean_line_is_a_metric() {
        assert_eq!(
            validate_wide_metric(&line(&[0.0, 1.0, 2.0])),
            ValidationReport::Pass
        );
    }

    #[test]
    fn triangle_violation_reports_first_triple() {
        let s = matrix(&[
            &[Some(0.0), Some(1.0), Some(3.0)],
            &[Some(1.0), Some(0.0), Some(1.0)],
            &[Some(3.0), Some(1.0), Some(0.0)],
        ]);
        assert_eq!(
            validate_wide_metric(&s),
            ValidationReport::Fail {
                axiom: Axiom::Triangle,
                witness: [0, 1, 2]
            }
        );
    }

    #[test]
    fn infinite_clusters_are_wide_sense_metrics() {
        let s = matrix(&[
            &[Some(0.0), Some(1.0), None, None],
            &[Some(1.0), Some(0.0), None, None],
            &[None, None, Some(0.0), Some(2.0)],
            &[None, None, Some(2.0), Some(0.0)],
        ]);
        assert!(validate_wide_metric(&s).passed());
    }

    #[test]
    fn asymmetric_matrix_is_flagged() {
        let s = matrix(&[&[Some(0.0), Some(1.0)], &[Some(2.0), Some(0.0)]]);
        assert_eq!(
            validate_wide_metric(&s),
            ValidationReport::Fail {
                axiom: Axiom::Symmetry,
                witness: [0, 1, 1]
            }
        );
    }

    #[test]
    fn duplicates_are_merged() {
        let s = FiniteMetricSpace::euclidean(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.0]])
            .unwrap();
        assert_eq!(s.len(), 2);
        let m = matrix(&[
            &[Some(0.0), Some(0.0), Some(1.0)],
            &[Some(0.0), Some(0.0), Some(1.0)],
            &[Some(1.0), Some(1.0), Some(0.0)],
        ]);
        assert_eq!(m.len(), 2);
        assert_eq!(m.points()[1].source_index, 2);
    }

    #[test]
    fn nonzero_diagonal_is_rejected() {
        let r = FiniteMetricSpace::from_matrix(vec![vec![Finite(1.0)]]);
        assert!(matches!(r, Err(Error::InvalidSpace(_))));
    }

    #[test]
    fn balls_on_a_unit_line() {
        let s = line(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(
            ball_members(&s, &Ball::closed(1, 1.0)).unwrap(),
            vec![0, 1, 2]
        );
        assert_eq!(ball_members(&s, &Ball::open(1, 1.0)).unwrap(), vec![1]);
        assert_eq!(
            ball_members(&s, &Ball::closed(1, Infinite)).unwrap(),
            vec![0, 1, 2, 3]
        );
        assert!(matches!(
            ball_members(&s, &Ball::closed(9, 1.0)),
            Err(Error::UnknownPoint(9))
        ));
    }

    #[test]
    fn path_lengths() {
        let s = FiniteMetricSpace::euclidean_2d(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.5, 0.0]])
            .unwrap();
        let p = Path::from_samples(&s, vec![0, 1]).unwrap();
        assert_eq!(path_length(&s, &p), Finite(1.0));
        let p = Path::from_samples(&s, vec![0, 1, 2]).unwrap();
        assert_eq!(path_length(&s, &p), Finite(2.0));
        let seg = Path::new(&s, vec![0, 1], vec![0.0, 1.0]).unwrap();
        let refined = refine_path(&s, &seg, &[(0.5, 3)]).unwrap();
        assert_eq!(refined.samples(), &[0, 3, 1]);
        assert_eq!(path_length(&s, &refined), Finite(1.0));
    }

    #[test]
    fn detour_strictly_increases_length() {
        let s = FiniteMetricSpace::euclidean_2d(&[[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]]).unwrap();
        let seg = Path::new(&s, vec![0, 1], vec![0.0, 1.0]).unwrap();
        let refined = refine_path(&s, &seg, &[(0.5, 2)]).unwrap();
        assert!(path_length(&s, &refined) > path_length(&s, &seg));
        assert_eq!(path_length(&s, &refined), Finite(2.0 * 2f64.sqrt()));
    }

    #[test]
    fn refine_rejects_collisions_and_out_of_range() {
        let s = line(&[0.0, 1.0, 2.0]);
        let p = Path::new(&s, vec![0, 2], vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            refine_path(&s, &p, &[(0.5, 1), (0.5, 1)]),
            Err(Error::ParamCollision(_))
        ));
        assert!(matches!(
            refine_path(&s, &p, &[(1.0, 1)]),
            Err(Error::InvalidPath(_))
        ));
    }

    #[test]
    fn path_validation() {
        let s = matrix(&[&[Some(0.0), None], &[None, Some(0.0)]]);
        assert!(Path::from_samples(&s, vec![0, 1]).is_err());
        assert!(Path::new(&s, vec![0, 0], vec![1.0, 1.0]).is_err());
        assert!(Path::from_samples(&s, vec![]).is_err());
        assert!(Path::from_samples(&s, vec![5]).is_err());
        assert_eq!(
            path_length(&s, &Path::from_samples(&s, vec![1]).unwrap()),
            ExtReal::ZERO
        );
    }
}
