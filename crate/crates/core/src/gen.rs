//! Seeded instance generators. Every generator draws only from the supplied
//! RNG, so a seed fixes the instance bit for bit.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ext::ExtReal::{self, Finite, Infinite};
use crate::graph::{GraphMetric, WeightedGraph};
use crate::space::{FiniteMetricSpace, Metric};

/// The generator used throughout: ChaCha8 seeded from a `u64`.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A graph on points of the unit square with Euclidean edge weights.
#[derive(Debug, Clone)]
pub struct GeometricGraph {
    pub coords: Vec<[f64; 2]>,
    pub graph: WeightedGraph,
    /// Pairs within this Euclidean distance are joined.
    pub radius: f64,
    /// Extra edges longer than `2 · radius`.
    pub long_edges: Vec<(usize, usize)>,
}

fn euclid(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// `n` uniform points in the unit square, joined when at distance
/// `≤ radius`, redrawn until connected; then `long_edges` extra edges between
/// random pairs farther apart than `2 · radius` (fewer if none exist).
pub fn random_geometric_graph(
    rng: &mut impl Rng,
    n: usize,
    radius: f64,
    long_edges: usize,
) -> GeometricGraph {
    assert!(
        n >= 2 && radius > 0.0,
        "need at least two points and a positive radius"
    );
    loop {
        let coords: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.gen::<f64>(), rng.gen::<f64>()])
            .collect();
        let mut edges = Vec::new();
        let mut far = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let d = euclid(coords[u], coords[v]);
                if d <= radius {
                    edges.push((u, v, d));
                } else if d > 2.0 * radius {
                    far.push((u, v));
                }
            }
        }
        let local = WeightedGraph::from_edges(n, edges.iter().copied());
        if local.components().iter().any(|&c| c != 0) {
            continue;
        }
        far.shuffle(rng);
        far.truncate(long_edges);
        far.sort_unstable();
        edges.extend(
            far.iter()
                .map(|&(u, v)| (u, v, euclid(coords[u], coords[v]))),
        );
        return GeometricGraph {
            coords,
            graph: WeightedGraph::from_edges(n, edges),
            radius,
            long_edges: far,
        };
    }
}

/// Splits every edge into equal straight pieces of length `≤ max_piece`.
/// Original vertices keep their ids; interior nodes follow edge by edge.
pub fn subdivide(
    graph: &WeightedGraph,
    coords: &[[f64; 2]],
    max_piece: f64,
) -> (WeightedGraph, Vec<[f64; 2]>) {
    assert!(max_piece > 0.0, "piece length must be positive");
    let mut out = coords.to_vec();
    let mut edges = Vec::new();
    for (u, v, w) in graph.edges() {
        let pieces = ((w / max_piece).ceil() as usize).max(1);
        let mut prev = u;
        for k in 1..pieces {
            let t = k as f64 / pieces as f64;
            out.push([
                coords[u][0] + t * (coords[v][0] - coords[u][0]),
                coords[u][1] + t * (coords[v][1] - coords[u][1]),
            ]);
            let id = out.len() - 1;
            edges.push((prev, id, w / pieces as f64));
            prev = id;
        }
        edges.push((prev, v, w / pieces as f64));
    }
    (WeightedGraph::from_edges(out.len(), edges), out)
}

/// `n` uniform points of `[0, 1]^dim` with the Euclidean metric.
pub fn random_euclidean_space(rng: &mut impl Rng, n: usize, dim: usize) -> FiniteMetricSpace {
    let coords = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
        .collect();
    FiniteMetricSpace::euclidean(coords).expect("random points are distinct")
}

/// Shortest-path metric of a random connected graph: a random spanning
/// tree plus extra edges, weights uniform in `[0.1, 1)`.
pub fn random_graph_space(rng: &mut impl Rng, n: usize) -> FiniteMetricSpace {
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, rng.gen_range(0.1..1.0)));
    }
    for _ in 0..n {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            edges.push((u, v, rng.gen_range(0.1..1.0)));
        }
    }
    FiniteMetricSpace::from_metric(&GraphMetric::new(WeightedGraph::from_edges(n, edges)))
}

/// Two Euclidean clusters (`n1` points in the unit square, `n2` points
/// shifted by `(10, 0)`), at distance `∞` from each other. Returns the space
/// and the smallest scale at which each cluster chains together.
pub fn two_component_space(rng: &mut impl Rng, n1: usize, n2: usize) -> (FiniteMetricSpace, f64) {
    let mut pts: Vec<([f64; 2], usize)> = Vec::with_capacity(n1 + n2);
    for (count, dx, tag) in [(n1, 0.0, 0), (n2, 10.0, 1)] {
        for _ in 0..count {
            pts.push(([dx + rng.gen::<f64>(), rng.gen::<f64>()], tag));
        }
    }
    let n = pts.len();
    let matrix: Vec<Vec<ExtReal>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if pts[i].1 == pts[j].1 {
                        Finite(euclid(pts[i].0, pts[j].0))
                    } else {
                        Infinite
                    }
                })
                .collect()
        })
        .collect();
    let space = FiniteMetricSpace::from_matrix(matrix).expect("clusters are valid");
    let scale = bottleneck(&space);
    (space, scale)
}

/// Largest edge of a minimum spanning forest over finite distances: the
/// smallest `h` whose step graph has the same components as `d < ∞`.
pub fn bottleneck<M: Metric + ?Sized>(space: &M) -> f64 {
    let n = space.len();
    let mut best = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let u = (0..n)
            .filter(|&i| !done[i])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .expect("unvisited node");
        done[u] = true;
        if best[u].is_finite() {
            worst = worst.max(best[u]);
        }
        for (v, d) in space.row(u).into_iter().enumerate() {
            if let Finite(d) = d {
                if !done[v] && d < best[v] {
                    best[v] = d;
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_graph_is_connected_and_reproducible() {
        let a = random_geometric_graph(&mut rng(7), 30, 0.3, 2);
        let b = random_geometric_graph(&mut rng(7), 30, 0.3, 2);
        assert_eq!(a.coords, b.coords);
        assert!(a.graph.components().iter().all(|&c| c == 0));
        assert_eq!(a.long_edges.len(), 2);
        for &(u, v) in &a.long_edges {
            assert!(euclid(a.coords[u], a.coords[v]) > 0.6);
        }
        for (u, v, w) in a.graph.edges() {
            assert!((w - euclid(a.coords[u], a.coords[v])).abs() < 1e-15);
        }
    }

    #[test]
    fn subdivision_preserves_base_distances() {
        let g = random_geometric_graph(&mut rng(3), 12, 0.45, 1);
        let (fine, coords) = subdivide(&g.graph, &g.coords, 0.05);
        assert!(fine.edges().all(|(_, _, w)| w <= 0.05 + 1e-15));
        assert_eq!(coords.len(), fine.node_count());
        let coarse = g.graph.shortest_paths(0).dist;
        let refined = fine.shortest_paths(0).dist;
        for v in 0..12 {
            assert!((coarse[v].to_f64() - refined[v].to_f64()).abs() < 1e-12);
        }
    }

    #[test]
    fn two_components_are_infinitely_apart() {
        let (s, h) = two_component_space(&mut rng(1), 5, 6);
        assert_eq!(s.len(), 11);
        assert!(s.dist(0, 10).is_infinite());
        assert!(s.dist(0, 4).is_finite());
        assert!(h > 0.0 && h < 2.0);
    }

    #[test]
    fn bottleneck_of_a_line() {
        let s =
            FiniteMetricSpace::euclidean(vec![vec![0.0], vec![1.0], vec![3.0], vec![3.5]]).unwrap();
        assert_eq!(bottleneck(&s), 2.0);
    }

    #[test]
    fn random_spaces_are_metrics() {
        let mut r = rng(11);
        assert!(crate::space::validate_wide_metric(&random_graph_space(&mut r, 15)).passed());
        assert!(
            crate::space::validate_wide_metric(&random_euclidean_space(&mut r, 15, 3)).passed()
        );
    }
}
