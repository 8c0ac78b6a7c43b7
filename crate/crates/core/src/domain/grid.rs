//! Lattice samples of a planar domain and the stencil length metric.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::geom::Point;
use super::PlanarDomain;
use crate::error::{Error, Result};
use crate::graph::{GraphMetric, ShortestPaths, WeightedGraph};
use crate::sheaf::{Cover, CoverKind, ScalarField};
use crate::space::{FiniteMetricSpace, Metric};

/// Neighbour offsets of the grid graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stencil {
    #[serde(rename = "8")]
    Eight,
    #[serde(rename = "16")]
    Sixteen,
}

impl Stencil {
    pub fn from_neighbors(k: u32) -> Result<Self> {
        match k {
            8 => Ok(Stencil::Eight),
            16 => Ok(Stencil::Sixteen),
            _ => Err(Error::InvalidArgument(format!(
                "stencil must be 8 or 16, got {k}"
            ))),
        }
    }

    pub fn neighbors(self) -> u32 {
        match self {
            Stencil::Eight => 8,
            Stencil::Sixteen => 16,
        }
    }

    /// All offsets, counter-clockwise from `(1, 0)`.
    pub fn offsets(self) -> Vec<(i64, i64)> {
        let mut out: Vec<(i64, i64)> = match self {
            Stencil::Eight => vec![
                (1, 0),
                (1, 1),
                (0, 1),
                (-1, 1),
                (-1, 0),
                (-1, -1),
                (0, -1),
                (1, -1),
            ],
            Stencil::Sixteen => {
                let mut v = Stencil::Eight.offsets();
                v.extend([
                    (2, 1),
                    (1, 2),
                    (-1, 2),
                    (-2, 1),
                    (-2, -1),
                    (-1, -2),
                    (1, -2),
                    (2, -1),
                ]);
                v
            }
        };
        out.sort_by(|a, b| angle(*a).total_cmp(&angle(*b)));
        out
    }

    /// The largest factor by which a stencil path can overestimate a
    /// straight segment: `1 / cos(α/2)` for the widest angular gap `α`
    /// between consecutive stencil directions.
    pub fn worst_direction_ratio(self) -> f64 {
        let angles: Vec<f64> = self.offsets().into_iter().map(angle).collect();
        let mut widest = angles[0] + std::f64::consts::TAU - angles[angles.len() - 1];
        for w in angles.windows(2) {
            widest = widest.max(w[1] - w[0]);
        }
        1.0 / (widest / 2.0).cos()
    }

    /// Longest stencil edge in lattice units.
    pub fn reach(self) -> f64 {
        match self {
            Stencil::Eight => std::f64::consts::SQRT_2,
            Stencil::Sixteen => 5f64.sqrt(),
        }
    }
}

fn angle((i, j): (i64, i64)) -> f64 {
    (j as f64).atan2(i as f64).rem_euclid(std::f64::consts::TAU)
}

/// Nodes of the lattice `hℤ²` inside the domain with clearance `≥ h/2`,
/// joined by stencil edges whose straight segments stay inside.
#[derive(Debug, Clone)]
pub struct GridSample {
    domain: PlanarDomain,
    spacing: f64,
    stencil: Stencil,
    lattice: Vec<(i64, i64)>,
    index: HashMap<(i64, i64), usize>,
    clearance: Vec<f64>,
    chord: FiniteMetricSpace,
    graph: WeightedGraph,
}

/// Relative slack for float comparisons against lattice-derived radii.
const LATTICE_EPS: f64 = 1e-9;

/// Samples `domain` on `hℤ²` in row-major order (rows by increasing `y`).
pub fn sample_grid(domain: &PlanarDomain, h: f64, stencil: Stencil) -> Result<GridSample> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "spacing h = {h} must be positive"
        )));
    }
    let [x0, y0, x1, y1] = domain.bbox;
    let (i0, i1) = ((x0 / h).ceil() as i64, (x1 / h).floor() as i64);
    let (j0, j1) = ((y0 / h).ceil() as i64, (y1 / h).floor() as i64);
    let mut lattice = Vec::new();
    let mut coords = Vec::new();
    let mut clearance = Vec::new();
    for j in j0..=j1 {
        for i in i0..=i1 {
            let p = [i as f64 * h, j as f64 * h];
            let c = domain.clearance(p);
            if domain.contains(p) && c >= 0.5 * h * (1.0 - LATTICE_EPS) {
                lattice.push((i, j));
                coords.push(p);
                clearance.push(c);
            }
        }
    }
    if lattice.is_empty() {
        return Err(Error::EmptySample);
    }
    let index: HashMap<(i64, i64), usize> =
        lattice.iter().enumerate().map(|(k, &ij)| (ij, k)).collect();
    let half: Vec<(i64, i64)> = stencil
        .offsets()
        .into_iter()
        .filter(|&(i, j)| j > 0 || (j == 0 && i > 0))
        .collect();
    let mut edges = Vec::new();
    for (u, &(i, j)) in lattice.iter().enumerate() {
        for &(di, dj) in &half {
            let Some(&v) = index.get(&(i + di, j + dj)) else {
                continue;
            };
            if edge_valid(domain, coords[u], coords[v], h) {
                edges.push((
                    u,
                    v,
                    (coords[u][0] - coords[v][0]).hypot(coords[u][1] - coords[v][1]),
                ));
            }
        }
    }
    let graph = WeightedGraph::from_edges(lattice.len(), edges);
    let chord = FiniteMetricSpace::euclidean_2d(&coords)?;
    Ok(GridSample {
        domain: domain.clone(),
        spacing: h,
        stencil,
        lattice,
        index,
        clearance,
        chord,
        graph,
    })
}

/// Exact obstacle test, plus containment of sub-samples every `h/4`.
fn edge_valid(domain: &PlanarDomain, p: Point, q: Point, h: f64) -> bool {
    if !domain.segment_inside(p, q) {
        return false;
    }
    let len = (q[0] - p[0]).hypot(q[1] - p[1]);
    let steps = (len / (0.25 * h)).ceil() as usize;
    (1..steps).all(|k| {
        let t = k as f64 / steps as f64;
        domain.contains([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])])
    })
}

impl GridSample {
    pub fn domain(&self) -> &PlanarDomain {
        &self.domain
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn point(&self, id: usize) -> Point {
        self.chord.coords(id).expect("grid nodes carry coordinates")
    }

    pub fn lattice_index(&self, id: usize) -> (i64, i64) {
        self.lattice[id]
    }

    pub fn clearance(&self, id: usize) -> f64 {
        self.clearance[id]
    }

    /// The node at `p`, if `p` is (up to rounding) a retained lattice point.
    pub fn node_at(&self, p: Point) -> Option<usize> {
        let (i, j) = ((p[0] / self.spacing).round(), (p[1] / self.spacing).round());
        let tol = LATTICE_EPS * self.spacing.max(p[0].abs()).max(p[1].abs());
        if (i * self.spacing - p[0]).abs() > tol || (j * self.spacing - p[1]).abs() > tol {
            return None;
        }
        self.index.get(&(i as i64, j as i64)).copied()
    }

    /// The retained node nearest to `p` (ties to the smaller id).
    pub fn nearest_node(&self, p: Point) -> usize {
        let mut best = (0, f64::INFINITY);
        for id in 0..self.len() {
            let q = self.point(id);
            let d = (q[0] - p[0]).hypot(q[1] - p[1]);
            if d < best.1 {
                best = (id, d);
            }
        }
        best.0
    }

    /// The chord metric: Euclidean distance, blind to obstacles.
    pub fn chord(&self) -> &FiniteMetricSpace {
        &self.chord
    }

    /// Validated stencil edges weighted by Euclidean length.
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    /// The stencil length metric `ρ_ℓ^grid` as a row-backed metric.
    pub fn length_metric(&self) -> GraphMetric {
        GraphMetric::with_coords(
            self.graph.clone(),
            (0..self.len()).map(|i| self.point(i)).collect(),
        )
    }

    /// Node ids within lattice distance `radius` of `id` (Euclidean test).
    pub fn nodes_within(&self, id: usize, radius: f64) -> Vec<usize> {
        let (i, j) = self.lattice[id];
        let k = (radius / self.spacing + LATTICE_EPS).floor() as i64;
        let limit = radius + LATTICE_EPS * self.spacing;
        let p = self.point(id);
        let mut out = Vec::new();
        for dj in -k..=k {
            for di in -k..=k {
                if let Some(&v) = self.index.get(&(i + di, j + dj)) {
                    let q = self.point(v);
                    if (q[0] - p[0]).hypot(q[1] - p[1]) <= limit {
                        out.push(v);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Steepest pair of `field` among pairs within `radius`, by chord
    /// distance: `(x, y, |f(x) − f(y)| / |x − y|)`. A lower bound for the
    /// global Lipschitz constant that avoids the all-pairs sweep.
    pub fn steepest_local_pair(
        &self,
        field: &ScalarField,
        radius: f64,
    ) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for x in 0..self.len() {
            for y in self.nodes_within(x, radius) {
                if y <= x {
                    continue;
                }
                let d = self.chord.dist(x, y).to_f64();
                let r = (field[x] - field[y]).abs() / d;
                if best.is_none_or(|b| r > b.2) {
                    best = Some((x, y, r));
                }
            }
        }
        best
    }
}

/// `ρ_ℓ^grid(source, ·)`: shortest paths over validated stencil edges.
pub fn euclidean_length_metric(sample: &GridSample, source: usize) -> Result<ShortestPaths> {
    sample.chord.check_id(source)?;
    Ok(sample.graph.shortest_paths(source))
}

/// Balls of radius `min(r0, clearance(p))` around every node. Each ball lies
/// in the closure of the domain and is convex, so chords between its
/// members stay inside.
pub fn clearance_cover(sample: &GridSample, r0: f64) -> Result<Cover> {
    if !(r0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "r0 = {r0} must be positive"
        )));
    }
    let sets = (0..sample.len())
        .map(|id| sample.nodes_within(id, r0.min(sample.clearance[id])))
        .collect();
    Cover::new(sample.len(), sets, CoverKind::Clearance { r0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::geom::segments_intersect;
    use crate::domain::{convex_box, punctured_plane, slit_plane};

    /// Brute-force oracle: cheapest nonnegative combination of two stencil
    /// vectors reproducing a unit direction, maximized over a fine sweep.
    fn swept_ratio(stencil: Stencil) -> f64 {
        let vs: Vec<(f64, f64)> = stencil
            .offsets()
            .iter()
            .map(|&(i, j)| (i as f64, j as f64))
            .collect();
        let mut worst: f64 = 0.0;
        for k in 0..20_000 {
            let t = k as f64 / 20_000.0 * std::f64::consts::TAU;
            let (ux, uy) = (t.cos(), t.sin());
            let mut best = f64::INFINITY;
            for a in &vs {
                for b in &vs {
                    let det = a.0 * b.1 - a.1 * b.0;
                    if det.abs() < 1e-12 {
                        if (a.0 * uy - a.1 * ux).abs() < 1e-12 && a.0 * ux + a.1 * uy > 0.0 {
                            best = best.min(1.0);
                        }
                        continue;
                    }
                    let s = (ux * b.1 - uy * b.0) / det;
                    let r = (a.0 * uy - a.1 * ux) / det;
                    if s >= -1e-12 && r >= -1e-12 {
                        best = best.min(s * a.0.hypot(a.1) + r * b.0.hypot(b.1));
                    }
                }
            }
            worst = worst.max(best);
        }
        worst
    }

    #[test]
    fn stencil_ratio_matches_direction_sweep() {
        for s in [Stencil::Eight, Stencil::Sixteen] {
            let oracle = swept_ratio(s);
            assert!(
                (s.worst_direction_ratio() - oracle).abs() < 1e-6,
                "{s:?}: {oracle}"
            );
        }
        // frozen from the sweep above
        assert!((Stencil::Eight.worst_direction_ratio() - 1.082392200292394).abs() < 1e-12);
        assert!((Stencil::Sixteen.worst_direction_ratio() - 1.0274862967460157).abs() < 1e-12);
    }

    #[test]
    fn unit_box_half_spacing() {
        let d = convex_box([0.0, 0.0, 1.0, 1.0]).unwrap();
        let g = sample_grid(&d, 0.5, Stencil::Eight).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.point(0), [0.5, 0.5]);
        let g = sample_grid(&d, 0.25, Stencil::Eight).unwrap();
        assert_eq!(g.len(), 9);
        // every 8-neighbour pair of a 3×3 block is an edge
        assert_eq!(g.graph().edge_count(), 12 + 8);
    }

    #[test]
    fn no_edge_crosses_the_slit() {
        let d = slit_plane(1.0, [-3.0, -3.0, 3.0, 3.0]).unwrap();
        let g = sample_grid(&d, 0.05, Stencil::Sixteen).unwrap();
        let mut near_tip = 0;
        for (u, v, _) in g.graph().edges() {
            let (p, q) = (g.point(u), g.point(v));
            assert!(
                !segments_intersect(p, q, [0.0, -1.0], [0.0, 1.0]),
                "{p:?} {q:?}"
            );
            if p[0] * q[0] < 0.0 {
                near_tip += 1;
            }
        }
        assert!(near_tip > 0, "edges still cross x = 0 beyond the slit");
        assert!(g.node_at([-1.0, 0.0]).is_some());
        assert!(g.node_at([0.0, 0.5]).is_none());
    }

    #[test]
    fn puncture_keeps_neighbours_and_drops_crossings() {
        let h = 0.1;
        let d = punctured_plane([-1.0, -1.0, 1.0, 1.0], h).unwrap();
        let g = sample_grid(&d, h, Stencil::Sixteen).unwrap();
        assert!(g.node_at([0.0, 0.0]).is_none());
        let left = g.node_at([-h, 0.0]).unwrap();
        let right = g.node_at([h, 0.0]).unwrap();
        assert!(g.node_at([0.0, h]).is_some());
        assert!(!g.graph().neighbors(left).any(|(v, _)| v == right));
        for (u, v, _) in g.graph().edges() {
            assert!(!d.obstacles[0].hits_segment(g.point(u), g.point(v)));
        }
    }

    #[test]
    fn grid_metric_dominates_chord() {
        let d = slit_plane(1.0, [-2.0, -2.0, 2.0, 2.0]).unwrap();
        let g = sample_grid(&d, 0.1, Stencil::Sixteen).unwrap();
        let s = g.node_at([-1.0, 0.0]).unwrap();
        let t = g.node_at([1.0, 0.0]).unwrap();
        let sp = euclidean_length_metric(&g, s).unwrap();
        for y in 0..g.len() {
            assert!(sp.dist[y].to_f64() >= g.chord().dist(s, y).to_f64() * (1.0 - 1e-12));
        }
        let v = sp.dist[t].to_f64();
        // around the tip: diagonal runs plus one (1, 2) step each side
        assert!(
            v >= 2.0 * 2f64.sqrt() && v <= 2.0 * 2f64.sqrt() + 2.0 * 0.1,
            "{v}"
        );
        assert!(euclidean_length_metric(&g, g.len()).is_err());
    }

    #[test]
    fn clearance_cover_stays_on_one_side() {
        let d = slit_plane(1.0, [-2.0, -2.0, 2.0, 2.0]).unwrap();
        let g = sample_grid(&d, 0.1, Stencil::Sixteen).unwrap();
        let cover = clearance_cover(&g, 0.15).unwrap();
        for set in cover.sets() {
            for &a in set {
                for &b in set {
                    assert!(d.segment_inside(g.point(a), g.point(b)));
                }
            }
        }
    }

    #[test]
    fn empty_sample_is_an_error() {
        let d = convex_box([0.0, 0.0, 0.1, 0.1]).unwrap();
        assert!(matches!(
            sample_grid(&d, 1.0, Stencil::Eight),
            Err(Error::EmptySample)
        ));
    }
}
