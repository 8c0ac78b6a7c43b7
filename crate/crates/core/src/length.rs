//! Induced length metric at a chaining scale, approximate midpoints and the
//! dyadic bisection construction of near-geodesics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::{ExtReal, Finite, Infinite};
use crate::graph::WeightedGraph;
use crate::space::{Metric, Path};

/// Relative float slack for post-verifying bisection step bounds.
const STEP_BOUND_REL_EPS: f64 = 1e-12;

/// Pair tolerance `gap ≤ abs + rel · d(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub fn allowance(&self, d: f64) -> f64 {
        self.abs + self.rel * d
    }
}

/// The graph of all pairs at finite distance `≤ h`, weighted by the base
/// distance. Shortest paths in it are the length metric at scale `h`.
#[derive(Debug, Clone)]
pub struct StepGraph<'a, M: Metric + ?Sized> {
    base: &'a M,
    step: f64,
    graph: WeightedGraph,
}

impl<'a, M: Metric + ?Sized> StepGraph<'a, M> {
    pub fn new(base: &'a M, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step h = {h} must be positive and finite"
            )));
        }
        let n = base.len();
        let mut edges = Vec::new();
        for a in 0..n {
            for (b, d) in base.row(a).into_iter().enumerate().skip(a + 1) {
                if let Finite(w) = d {
                    if w <= h {
                        edges.push((a, b, w));
                    }
                }
            }
        }
        Ok(Self {
            base,
            step: h,
            graph: WeightedGraph::from_edges(n, edges),
        })
    }

    pub fn base(&self) -> &M {
        self.base
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn length_metric(&self, source: usize) -> Result<LengthMetricResult> {
        self.base.check_id(source)?;
        Ok(LengthMetricResult {
            source,
            dl: self.graph.shortest_paths(source).dist,
            step: self.step,
        })
    }
}

/// `d_ℓ(source, ·)` at chaining scale `step`; `∞` where no chain exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthMetricResult {
    pub source: usize,
    pub dl: Vec<ExtReal>,
    pub step: f64,
}

pub fn induced_length_metric<M: Metric + ?Sized>(
    space: &M,
    h: f64,
    source: usize,
) -> Result<LengthMetricResult> {
    space.check_id(source)?;
    StepGraph::new(space, h)?.length_metric(source)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Outcome of comparing a chained distance against the base metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthVerdict {
    pub verdict: Verdict,
    /// Largest `d_ℓ − d` over compared pairs (`null` when some finite pair
    /// has no chain).
    pub max_gap: ExtReal,
    /// The pair exceeding its allowance by the most, or the largest-gap pair
    /// when everything passes.
    pub witness: Option<[usize; 2]>,
    pub h: f64,
    pub tol: f64,
    #[serde(skip_serializing_if = "is_zero")]
    pub rel_tol: f64,
    pub pairs_checked: usize,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

/// Compares `chained` shortest-path distances against `space` from every
/// source in `sources`. Pairs at `d = ∞` are excluded when the chained
/// distance is `∞` too; any other disagreement about `∞` is a failure with
/// infinite gap.
pub fn length_verdict<M: Metric + ?Sized>(
    space: &M,
    chained: &WeightedGraph,
    sources: &[usize],
    h: f64,
    tol: Tolerance,
) -> Result<LengthVerdict> {
    let mut acc = GapAccumulator::default();
    for &x in sources {
        space.check_id(x)?;
        let d = space.row(x);
        let dl = chained.shortest_paths(x).dist;
        for y in 0..space.len() {
            if y != x {
                acc.observe(x, y, d[y], dl[y], tol);
            }
        }
    }
    Ok(acc.finish(h, tol))
}

#[derive(Debug, Default)]
pub(crate) struct GapAccumulator {
    max_gap: Option<ExtReal>,
    max_gap_pair: Option<[usize; 2]>,
    worst_excess: Option<(ExtReal, [usize; 2])>,
    failed: bool,
    pairs: usize,
}

impl GapAccumulator {
    pub(crate) fn observe(
        &mut self,
        x: usize,
        y: usize,
        d: ExtReal,
        chained: ExtReal,
        tol: Tolerance,
    ) {
        let (gap, excess) = match (d, chained) {
            (Infinite, Infinite) => return,
            (Finite(d), Finite(c)) => {
                let gap = (c - d).max(0.0);
                (Finite(gap), gap - tol.allowance(d))
            }
            _ => (Infinite, f64::INFINITY),
        };
        self.pairs += 1;
        if self.max_gap.is_none_or(|g| gap > g) {
            self.max_gap = Some(gap);
            self.max_gap_pair = Some([x, y]);
        }
        if excess > 0.0 {
            self.failed = true;
            let ex = ExtReal::new(excess).unwrap_or(Infinite);
            if self.worst_excess.is_none_or(|(e, _)| ex > e) {
                self.worst_excess = Some((ex, [x, y]));
            }
        }
    }

    pub(crate) fn failed(&self) -> bool {
        self.failed
    }

    pub(crate) fn max_gap(&self) -> ExtReal {
        self.max_gap.unwrap_or(ExtReal::ZERO)
    }

    pub(crate) fn witness(&self) -> Option<[usize; 2]> {
        self.worst_excess.map(|(_, p)| p).or(self.max_gap_pair)
    }

    pub(crate) fn finish(&self, h: f64, tol: Tolerance) -> LengthVerdict {
        LengthVerdict {
            verdict: Verdict::from_bool(!self.failed),
            max_gap: self.max_gap(),
            witness: self.witness(),
            h,
            tol: tol.abs,
            rel_tol: tol.rel,
            pairs_checked: self.pairs,
        }
    }
}

/// Default tolerance for [`is_length_space`]: one step of slack per endpoint.
pub fn default_length_tol(h: f64) -> f64 {
    2.0 * h
}

/// Whether `d = d_ℓ` at scale `h`, up to `tol`, over all pairs.
pub fn is_length_space<M: Metric + ?Sized>(space: &M, h: f64, tol: f64) -> Result<LengthVerdict> {
    let steps = StepGraph::new(space, h)?;
    let sources: Vec<usize> = (0..space.len()).collect();
    length_verdict(space, steps.graph(), &sources, h, Tolerance::absolute(tol))
}

/// The minimal-id point minimizing `max(d(x,z), d(z,y))` given both rows.
fn best_midpoint(row_x: &[ExtReal], row_y: &[ExtReal]) -> (usize, ExtReal) {
    let mut best = (0, Infinite);
    for (z, (&a, &b)) in row_x.iter().zip(row_y).enumerate() {
        let m = a.max(b);
        if m < best.1 {
            best = (z, m);
        }
    }
    best
}

fn midpoint_from_rows(row_x: &[ExtReal], row_y: &[ExtReal], dxy: f64, slack: f64) -> Option<usize> {
    let (z, m) = best_midpoint(row_x, row_y);
    match m {
        Finite(v) if v <= 0.5 * dxy + slack => Some(z),
        _ => None,
    }
}

/// A point `z` with `d(x,z), d(z,y) ≤ ½ d(x,y) + eps`, choosing the minimal id
/// among minimizers of `max(d(x,z), d(z,y))`; `None` if even that misses.
pub fn approximate_midpoint<M: Metric + ?Sized>(
    space: &M,
    x: usize,
    y: usize,
    eps: f64,
) -> Result<Option<usize>> {
    space.check_id(x)?;
    space.check_id(y)?;
    let row_x = space.row(x);
    let dxy = row_x[y].finite().ok_or(Error::InfiniteDistance(x, y))?;
    Ok(midpoint_from_rows(&row_x, &space.row(y), dxy, eps))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MidpointReport {
    pub eps: f64,
    pub pairs_checked: usize,
    /// Unordered pairs `x < y` without an `eps`-approximate midpoint.
    pub failures: Vec<[usize; 2]>,
}

impl MidpointReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Tests every finite-distance pair for an `eps`-approximate midpoint, the
/// `r₁ = r₂ = ½ d(x,y) + eps` instance of `B(x,r₁) ∩ B(y,r₂) ≠ ∅`.
pub fn check_ball_intersection<M: Metric + ?Sized>(space: &M, eps: f64) -> MidpointReport {
    let ids: Vec<usize> = (0..space.len()).collect();
    check_among(space, &ids, eps)
}

/// Like [`check_ball_intersection`] but only for pairs drawn from `ids`;
/// midpoint candidates still range over the whole space.
pub fn check_ball_intersection_among<M: Metric + ?Sized>(
    space: &M,
    ids: &[usize],
    eps: f64,
) -> Result<MidpointReport> {
    for &i in ids {
        space.check_id(i)?;
    }
    Ok(check_among(space, ids, eps))
}

fn check_among<M: Metric + ?Sized>(space: &M, ids: &[usize], eps: f64) -> MidpointReport {
    let rows: Vec<Vec<ExtReal>> = ids.iter().map(|&i| space.row(i)).collect();
    let mut failures = Vec::new();
    let mut pairs = 0;
    for (i, &x) in ids.iter().enumerate() {
        for (j, &y) in ids.iter().enumerate().skip(i + 1) {
            let Finite(dxy) = rows[i][y] else { continue };
            if x == y {
                continue;
            }
            pairs += 1;
            if midpoint_from_rows(&rows[i], &rows[j], dxy, eps).is_none() {
                failures.push([x.min(y), x.max(y)]);
            }
        }
    }
    MidpointReport {
        eps,
        pairs_checked: pairs,
        failures,
    }
}

/// Midpoint slack at recursion level `n`: `eps · δ · 4^{-(n+1)}`.
pub fn bisection_slack(eps: f64, delta: f64, level: u32) -> f64 {
    eps * delta * 0.25f64.powi(level as i32 + 1)
}

/// Builds a path from `x` to `y` on the dyadic grid `{k / 2^depth}` by
/// repeated approximate midpoints. Level-`n` consecutive samples end up at
/// distance `≤ δ(1+eps)/2ⁿ` and the total length is `≤ (1+eps) δ`.
///
/// Fails with [`Error::MidpointNotFound`] when some sub-pair has no midpoint
/// within the level's slack. Once `δ/2^depth` drops below the sampling
/// resolution of the space this is expected, so pick `depth` accordingly.
pub fn bisect_geodesic<M: Metric + ?Sized>(
    space: &M,
    x: usize,
    y: usize,
    eps: f64,
    depth: u32,
) -> Result<Path> {
    space.check_id(x)?;
    space.check_id(y)?;
    if !(eps > 0.0) || depth == 0 {
        return Err(Error::InvalidArgument(
            "eps and depth must be positive".into(),
        ));
    }
    if x == y {
        return Path::new(space, vec![x], vec![0.0]);
    }
    let delta = space
        .dist(x, y)
        .finite()
        .ok_or(Error::InfiniteDistance(x, y))?;
    let mut level = vec![x, y];
    for n in 0..depth {
        let slack = bisection_slack(eps, delta, n);
        let bound = delta * (1.0 + eps) / 2f64.powi(n as i32 + 1);
        let mut next = Vec::with_capacity(2 * level.len() - 1);
        // Rows are streamed left to right; each is computed once per level.
        let mut row_a = space.row(level[0]);
        for w in level.windows(2) {
            let (a, b) = (w[0], w[1]);
            let row_b = space.row(b);
            let dab = row_a[b].finite().ok_or(Error::InfiniteDistance(a, b))?;
            let z =
                midpoint_from_rows(&row_a, &row_b, dab, slack).ok_or(Error::MidpointNotFound {
                    a,
                    b,
                    level: n,
                    slack,
                })?;
            for (p, q, d) in [(a, z, row_a[z]), (z, b, row_b[z])] {
                let step = d.to_f64();
                if step > bound * (1.0 + STEP_BOUND_REL_EPS) {
                    return Err(Error::StepBound {
                        a: p,
                        b: q,
                        level: n + 1,
                        step,
                        bound,
                    });
                }
            }
            next.push(a);
            next.push(z);
            row_a = row_b;
        }
        next.push(*level.last().expect("nonempty level"));
        level = next;
    }
    let scale = 2f64.powi(depth as i32);
    let params = (0..level.len()).map(|k| k as f64 / scale).collect();
    Path::new(space, level, params)
}
