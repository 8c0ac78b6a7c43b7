//! Weighted undirected graphs and single-source shortest paths.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::ext::{ExtReal, Finite, Infinite};
use crate::space::{Metric, Path};

/// Undirected graph with nonnegative weights in compressed adjacency form.
#[derive(Debug, Clone, Default)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Builds from undirected edges `(u, v, w)`; each edge is stored in both
    /// directions. Self-loops are dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let edges: Vec<(usize, usize, f64)> = edges.into_iter().filter(|e| e.0 != e.1).collect();
        let mut degree = vec![0usize; n + 1];
        for &(u, v, _) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; offsets[n]];
        let mut weights = vec![0.0f64; offsets[n]];
        for &(u, v, w) in &edges {
            debug_assert!(w >= 0.0, "negative edge weight");
            targets[fill[u]] = v;
            weights[fill[u]] = w;
            fill[u] += 1;
            targets[fill[v]] = u;
            weights[fill[v]] = w;
            fill[v] += 1;
        }
        Self {
            offsets,
            targets,
            weights,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    pub fn shortest_paths(&self, source: usize) -> ShortestPaths {
        dijkstra(self, source)
    }

    /// Connected component label per node, numbered by smallest member.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for (v, _) in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = s;
                        stack.push(v);
                    }
                }
            }
        }
        label
    }
}

#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub source: usize,
    pub dist: Vec<ExtReal>,
    pred: Vec<Option<usize>>,
}

impl ShortestPaths {
    /// Node sequence from the source to `target`, or `None` if unreachable.
    pub fn route(&self, target: usize) -> Option<Vec<usize>> {
        if self.dist[target].is_infinite() {
            return None;
        }
        let mut nodes = vec![target];
        let mut cur = target;
        while let Some(p) = self.pred[cur] {
            nodes.push(p);
            cur = p;
        }
        nodes.reverse();
        Some(nodes)
    }

    /// The route to `target` as a [`Path`] parametrized by sample index.
    pub fn path_to<M: Metric + ?Sized>(&self, space: &M, target: usize) -> Option<Result<Path>> {
        self.route(target).map(|r| Path::from_samples(space, r))
    }
}

#[derive(Copy, Clone, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (cost, node)
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(graph: &WeightedGraph, source: usize) -> ShortestPaths {
    let n = graph.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        cost: 0.0,
        node: source,
    });
    while let Some(Entry { cost, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        for (next, w) in graph.neighbors(node) {
            let c = cost + w;
            if c < dist[next] {
                dist[next] = c;
                pred[next] = Some(node);
                heap.push(Entry {
                    cost: c,
                    node: next,
                });
            }
        }
    }
    let dist = dist
        .into_iter()
        .map(|d| if d.is_finite() { Finite(d) } else { Infinite })
        .collect();
    ShortestPaths { source, dist, pred }
}

/// The shortest-path metric of a weighted graph. Rows are computed on demand,
/// one Dijkstra run each; `dist` runs a full row, so callers that need many
/// distances should work with rows.
#[derive(Debug, Clone)]
pub struct GraphMetric {
    graph: WeightedGraph,
    coords: Option<Vec<[f64; 2]>>,
}

impl GraphMetric {
    pub fn new(graph: WeightedGraph) -> Self {
        Self {
            graph,
            coords: None,
        }
    }

    pub fn with_coords(graph: WeightedGraph, coords: Vec<[f64; 2]>) -> Self {
        assert_eq!(graph.node_count(), coords.len());
        Self {
            graph,
            coords: Some(coords),
        }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }
}

impl Metric for GraphMetric {
    fn len(&self) -> usize {
        self.graph.node_count()
    }

    fn dist(&self, a: usize, b: usize) -> ExtReal {
        if a == b {
            return ExtReal::ZERO;
        }
        self.graph.shortest_paths(a).dist[b]
    }

    fn row(&self, a: usize) -> Vec<ExtReal> {
        self.graph.shortest_paths(a).dist
    }

    fn coords(&self, id: usize) -> Option<[f64; 2]> {
        self.coords.as_ref().map(|c| c[id])
    }

    fn dist_is_cheap(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Floyd–Warshall oracle.
    fn all_pairs(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
        let mut d = vec![vec![f64::INFINITY; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        for &(u, v, w) in edges {
            d[u][v] = d[u][v].min(w);
            d[v][u] = d[v][u].min(w);
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        d
    }

    #[test]
    fn dijkstra_matches_floyd_warshall() {
        let edges = [
            (0, 1, 1.0),
            (1, 2, 2.5),
            (0, 2, 4.0),
            (2, 3, 0.5),
            (4, 5, 1.0),
            (1, 3, 3.5),
        ];
        let g = WeightedGraph::from_edges(6, edges);
        let oracle = all_pairs(6, &edges);
        for s in 0..6 {
            let sp = g.shortest_paths(s);
            for t in 0..6 {
                assert_eq!(sp.dist[t].to_f64(), oracle[s][t], "{s} -> {t}");
            }
        }
        let sp = g.shortest_paths(0);
        assert_eq!(sp.route(3), Some(vec![0, 1, 2, 3]));
        assert_eq!(sp.route(4), None);
    }

    #[test]
    fn components_are_labelled_by_smallest_member() {
        let g = WeightedGraph::from_edges(5, [(0, 2, 1.0), (3, 4, 1.0)]);
        assert_eq!(g.components(), vec![0, 1, 0, 3, 3]);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 2, 1.0), (3, 4, 1.0)]
        );
    }

    #[test]
    fn graph_metric_rows() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]);
        let m = GraphMetric::new(g);
        assert_eq!(m.row(0), vec![Finite(0.0), Finite(1.0), Finite(2.0)]);
        assert_eq!(m.dist(2, 0), Finite(2.0));
    }
}
