//! 1-Lipschitz functions, cover-local Lipschitz checks and the sheaf
//! property `Lip¹(U) = Lip¹_loc(U)`.
//!
//! The extremal cover-locally 1-Lipschitz function through a point `x` is
//! the chain distance from `x`: the shortest-path metric over pairs that
//! share a cover set. Comparing it with `d` decides the sheaf property and a
//! failing comparison hands back its own witness.

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ext::{ExtReal, Finite, Infinite};
use crate::graph::WeightedGraph;
use crate::length::{GapAccumulator, Tolerance};
use crate::space::{ball_members, Ball, Metric};

/// Relative slack on the constant 1 in Lipschitz comparisons, absorbing
/// float rounding in sums of edge weights.
pub const LIP_EPS: f64 = 1e-9;

/// A finite real value per point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField(Vec<f64>);

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("value at {i} is not finite")));
        }
        Ok(Self(values))
    }

    /// Checks the field is total on `space`.
    pub fn for_space<M: Metric + ?Sized>(space: &M, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::InvalidField(format!(
                "{} values for {} points",
                values.len(),
                space.len()
            )));
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// JSON form: an object mapping decimal ids to values, in id order.
impl Serialize for ScalarField {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (i, v) in self.0.iter().enumerate() {
            map.serialize_entry(&i.to_string(), v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ScalarField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = std::collections::BTreeMap::<String, f64>::deserialize(deserializer)?;
        let mut entries = Vec::with_capacity(raw.len());
        for (k, v) in raw {
            let id: usize = k
                .parse()
                .map_err(|_| D::Error::custom(format!("bad id {k:?}")))?;
            entries.push((id, v));
        }
        entries.sort_by_key(|e| e.0);
        if entries.iter().enumerate().any(|(i, e)| e.0 != i) {
            return Err(D::Error::custom("field ids must be exactly 0..n"));
        }
        ScalarField::new(entries.into_iter().map(|e| e.1).collect()).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverKind {
    Balls { r: f64 },
    Clearance { r0: f64 },
    Explicit,
}

/// The neighbourhoods that define locality.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    sets: Vec<Vec<usize>>,
    kind: CoverKind,
}

impl Cover {
    /// Validates that every set is nonempty, every id exists and every point
    /// is covered. Sets are sorted internally; identical sets are merged.
    pub fn new(n: usize, sets: Vec<Vec<usize>>, kind: CoverKind) -> Result<Self> {
        let mut covered = vec![false; n];
        let mut sets: Vec<Vec<usize>> = sets
            .into_iter()
            .enumerate()
            .map(|(i, mut s)| {
                if s.is_empty() {
                    return Err(Error::InvalidCover(format!("set {i} is empty")));
                }
                s.sort_unstable();
                s.dedup();
                for &p in &s {
                    *covered.get_mut(p).ok_or_else(|| {
                        Error::InvalidCover(format!("set {i} has unknown id {p}"))
                    })? = true;
                }
                Ok(s)
            })
            .collect::<Result<_>>()?;
        if let Some(p) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidCover(format!("point {p} is not covered")));
        }
        sets.sort();
        sets.dedup();
        Ok(Self { sets, kind })
    }

    /// Closed balls `B(x, r)` around every point.
    pub fn balls<M: Metric + ?Sized>(space: &M, r: f64) -> Result<Self> {
        let sets = (0..space.len())
            .map(|x| ball_members(space, &Ball::closed(x, ExtReal::from(r))))
            .collect::<Result<_>>()?;
        Self::new(space.len(), sets, CoverKind::Balls { r })
    }

    /// One set holding everything.
    pub fn whole<M: Metric + ?Sized>(space: &M) -> Result<Self> {
        Self::new(
            space.len(),
            vec![(0..space.len()).collect()],
            CoverKind::Explicit,
        )
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn kind(&self) -> CoverKind {
        self.kind
    }
}

fn pair_dist<M: Metric + ?Sized>(
    space: &M,
    rows: Option<&[Vec<ExtReal>]>,
    i: usize,
    a: usize,
    b: usize,
) -> ExtReal {
    match rows {
        Some(r) => r[i][b],
        None => space.dist(a, b),
    }
}

/// The steepest pair of `field` on `subset`: `(x, y, |f(x)−f(y)| / d(x,y))`.
/// Pairs at distance `∞` impose no constraint.
pub fn steepest_pair<M: Metric + ?Sized>(
    space: &M,
    field: &ScalarField,
    subset: &[usize],
) -> Option<(usize, usize, f64)> {
    // Row-backed metrics (graph metrics) pay a shortest-path run per `dist`;
    // for them one row per subset member is cheaper.
    let rows: Option<Vec<Vec<ExtReal>>> =
        (!space.dist_is_cheap()).then(|| subset.iter().map(|&a| space.row(a)).collect());
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, &a) in subset.iter().enumerate() {
        for &b in &subset[i + 1..] {
            let Finite(d) = pair_dist(space, rows.as_deref(), i, a, b) else {
                continue;
            };
            if d == 0.0 {
                continue;
            }
            let ratio = (field[a] - field[b]).abs() / d;
            if best.is_none_or(|(_, _, r)| ratio > r) {
                best = Some((a, b, ratio));
            }
        }
    }
    best
}

/// `max |f(x)−f(y)| / d(x,y)` over pairs of `subset`; 0 for singletons.
pub fn lipschitz_constant<M: Metric + ?Sized>(
    space: &M,
    field: &ScalarField,
    subset: &[usize],
) -> ExtReal {
    Finite(steepest_pair(space, field, subset).map_or(0.0, |p| p.2))
}

fn within_unit(ratio: f64) -> bool {
    ratio <= 1.0 + LIP_EPS
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalViolation {
    /// Index into [`Cover::sets`].
    pub set: usize,
    pub pair: [usize; 2],
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalCheck {
    pub holds: bool,
    pub violation: Option<LocalViolation>,
}

/// Whether `field` is 1-Lipschitz on every cover set.
pub fn is_lip1_loc<M: Metric + ?Sized>(
    space: &M,
    field: &ScalarField,
    cover: &Cover,
) -> LocalCheck {
    for (i, set) in cover.sets.iter().enumerate() {
        if let Some((x, y, ratio)) = steepest_pair(space, field, set) {
            if !within_unit(ratio) {
                return LocalCheck {
                    holds: false,
                    violation: Some(LocalViolation {
                        set: i,
                        pair: [x, y],
                        ratio,
                    }),
                };
            }
        }
    }
    LocalCheck {
        holds: true,
        violation: None,
    }
}

/// The largest cover-local Lipschitz constant of `field`.
pub fn local_lipschitz_constant<M: Metric + ?Sized>(
    space: &M,
    field: &ScalarField,
    cover: &Cover,
) -> f64 {
    cover
        .sets
        .iter()
        .filter_map(|s| steepest_pair(space, field, s))
        .map(|p| p.2)
        .fold(0.0, f64::max)
}

/// Graph on pairs co-resident in some cover set, weighted by `d`.
pub fn chain_graph<M: Metric + ?Sized>(space: &M, cover: &Cover) -> WeightedGraph {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for set in &cover.sets {
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let edges = pairs
        .into_iter()
        .filter_map(|(a, b)| space.dist(a, b).finite().map(|w| (a, b, w)));
    WeightedGraph::from_edges(space.len(), edges)
}

/// Chain distance from `source`; `∞` where no chain of co-resident pairs
/// reaches.
pub fn chain_metric<M: Metric + ?Sized>(
    space: &M,
    cover: &Cover,
    source: usize,
) -> Result<Vec<ExtReal>> {
    space.check_id(source)?;
    Ok(chain_graph(space, cover).shortest_paths(source).dist)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SheafVerdict {
    pub holds: bool,
    /// Largest `chain − d` over compared pairs; `null` (∞) when some finite
    /// pair has no chain.
    pub max_gap: ExtReal,
    pub witness_pair: Option<[usize; 2]>,
    /// Cover-locally 1-Lipschitz, globally violating on `witness_pair`.
    #[serde(skip)]
    pub witness_field: Option<ScalarField>,
    pub tol: f64,
    #[serde(skip_serializing_if = "is_zero")]
    pub rel_tol: f64,
    pub pairs_checked: usize,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

/// `chain(x, ·)` with `∞` replaced by a cap exceeding every finite `d(x, ·)`
/// and every finite chain value, so the field stays locally 1-Lipschitz.
pub fn capped_chain_field<M: Metric + ?Sized>(
    space: &M,
    chain_row: &[ExtReal],
    x: usize,
) -> ScalarField {
    let ecc = |row: &[ExtReal]| row.iter().filter_map(|d| d.finite()).fold(0.0, f64::max);
    let spread = ecc(&space.row(x)).max(ecc(chain_row));
    let cap = if spread > 0.0 { 2.0 * spread } else { 1.0 };
    ScalarField(
        chain_row
            .iter()
            .map(|d| d.finite().unwrap_or(cap))
            .collect(),
    )
}

/// Decides `Lip¹ = Lip¹_loc` for `cover` over all pairs.
pub fn sheaf_check<M: Metric + ?Sized>(space: &M, cover: &Cover, tol: f64) -> Result<SheafVerdict> {
    let sources: Vec<usize> = (0..space.len()).collect();
    sheaf_check_from(space, cover, &sources, Tolerance::absolute(tol))
}

/// [`sheaf_check`] restricted to pairs with first member in `sources`.
pub fn sheaf_check_from<M: Metric + ?Sized>(
    space: &M,
    cover: &Cover,
    sources: &[usize],
    tol: Tolerance,
) -> Result<SheafVerdict> {
    let chains = chain_graph(space, cover);
    sheaf_check_with(space, &chains, sources, tol)
}

/// [`sheaf_check_from`] with a prebuilt [`chain_graph`].
pub fn sheaf_check_with<M: Metric + ?Sized>(
    space: &M,
    chains: &WeightedGraph,
    sources: &[usize],
    tol: Tolerance,
) -> Result<SheafVerdict> {
    let mut acc = GapAccumulator::default();
    for &x in sources {
        space.check_id(x)?;
        let d = space.row(x);
        let c = chains.shortest_paths(x).dist;
        for y in 0..space.len() {
            if y != x {
                acc.observe(x, y, d[y], c[y], tol);
            }
        }
    }
    let holds = !acc.failed();
    let witness_pair = acc.witness();
    let witness_field = match (holds, witness_pair) {
        (false, Some([x, _])) => Some(capped_chain_field(space, &chains.shortest_paths(x).dist, x)),
        _ => None,
    };
    Ok(SheafVerdict {
        holds,
        max_gap: acc.max_gap(),
        witness_pair: if holds { None } else { witness_pair },
        witness_field,
        tol: tol.abs,
        rel_tol: tol.rel,
        pairs_checked: acc.finish(0.0, tol).pairs_checked,
    })
}

/// `f(z) = −((r₁−δ) − d(x,z))₊ + ((r₂−δ) − d(z,y))₊`: a dip at `x`, a bump at
/// `y`, zero outside `B(x, r₁−δ) ∪ B(y, r₂−δ)`.
pub fn bump_witness<M: Metric + ?Sized>(
    space: &M,
    x: usize,
    y: usize,
    r1: f64,
    r2: f64,
    delta: f64,
) -> Result<ScalarField> {
    space.check_id(x)?;
    space.check_id(y)?;
    if !(r1 > 0.0 && r2 > 0.0 && delta > 0.0) {
        return Err(Error::InvalidArgument(
            "r1, r2 and delta must be positive".into(),
        ));
    }
    let pos = |r: f64, d: ExtReal| match d {
        Finite(d) => (r - d).max(0.0),
        Infinite => 0.0,
    };
    let (rx, ry) = (space.row(x), space.row(y));
    ScalarField::new(
        (0..space.len())
            .map(|z| -pos(r1 - delta, rx[z]) + pos(r2 - delta, ry[z]))
            .collect(),
    )
}

/// `sup { f(y) − f(x) : f ∈ Lip¹ }`, attained by the distance function from
/// `x`; equals `d(x, y)` exactly.
pub fn dual_distance<M: Metric + ?Sized>(space: &M, x: usize, y: usize) -> Result<ExtReal> {
    space.check_id(x)?;
    space.check_id(y)?;
    let row = space.row(x);
    if row[y].is_infinite() {
        return Err(Error::InfiniteDistance(x, y));
    }
    let cap = row.iter().filter_map(|d| d.finite()).fold(0.0, f64::max);
    let f: Vec<f64> = row
        .iter()
        .map(|d| d.finite().unwrap_or(cap).min(cap))
        .collect();
    Ok(Finite(f[y] - f[x]))
}

/// `max f(y) − f(x)` over `family` (and the zero function). Every member is
/// checked to be globally 1-Lipschitz first, so the result never exceeds
/// `d(x, y)`.
pub fn dual_distance_over<M: Metric + ?Sized>(
    space: &M,
    x: usize,
    y: usize,
    family: &[ScalarField],
) -> Result<f64> {
    space.check_id(x)?;
    space.check_id(y)?;
    let all: Vec<usize> = (0..space.len()).collect();
    let mut best = 0.0f64;
    for (member, f) in family.iter().enumerate() {
        if f.len() != space.len() {
            return Err(Error::InvalidField(format!(
                "family member {member} has {} values",
                f.len()
            )));
        }
        if let Some((a, b, ratio)) = steepest_pair(space, f, &all) {
            if !within_unit(ratio) {
                return Err(Error::NotLipschitz {
                    member,
                    x: a,
                    y: b,
                    diff: (f[a] - f[b]).abs(),
                    dist: space.dist(a, b).to_f64(),
                });
            }
        }
        best = best.max(f[y] - f[x]);
    }
    Ok(best)
}

/// Values prescribed on a subset `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialField {
    pub entries: Vec<(usize, f64)>,
}

/// McShane extension `f̃(y) = min_{u ∈ U} f(u) + d(u, y)`, the largest
/// 1-Lipschitz extension of a 1-Lipschitz partial field.
pub fn mcshane_extend<M: Metric + ?Sized>(
    space: &M,
    partial: &PartialField,
) -> Result<ScalarField> {
    if partial.entries.is_empty() {
        return Err(Error::InvalidField("empty extension domain".into()));
    }
    let mut rows = Vec::with_capacity(partial.entries.len());
    for &(u, v) in &partial.entries {
        space.check_id(u)?;
        if !v.is_finite() {
            return Err(Error::InvalidField(format!("value at {u} is not finite")));
        }
        rows.push(space.row(u));
    }
    for (i, &(u, fu)) in partial.entries.iter().enumerate() {
        for &(w, fw) in &partial.entries[i + 1..] {
            if let Finite(d) = rows[i][w] {
                if (fu - fw).abs() > d * (1.0 + LIP_EPS) {
                    return Err(Error::NotLipschitz {
                        member: 0,
                        x: u,
                        y: w,
                        diff: (fu - fw).abs(),
                        dist: d,
                    });
                }
            }
        }
    }
    let mut out = Vec::with_capacity(space.len());
    for y in 0..space.len() {
        let v = partial
            .entries
            .iter()
            .zip(&rows)
            .filter_map(|(&(_, fu), row)| row[y].finite().map(|d| fu + d))
            .min_by(f64::total_cmp)
            .ok_or(Error::Unreachable(y))?;
        out.push(v);
    }
    // Agreement on U is exact: the min is attained by u itself up to rounding
    // of fu + 0.
    for &(u, fu) in &partial.entries {
        out[u] = out[u].min(fu);
    }
    ScalarField::new(out)
}
