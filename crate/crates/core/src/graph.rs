//! Unit-distance graphs and their shortest-path (graphic) metric.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::metric::{DistanceValue, MetricKind, ScaledPoint};

/// Sentinel for "not reached" in breadth-first search rows.
const UNREACHED: u32 = u32::MAX;

/// Undirected, unweighted graph over city indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGraph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl UnitGraph {
    /// Builds a graph from an edge list. Self-loops and duplicate edges are
    /// ignored.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (a, b) in edges {
            for index in [a, b] {
                if index >= n {
                    return Err(Error::CityIndex { index, n });
                }
            }
            if a == b || adjacency[a].contains(&b) {
                continue;
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
            edge_count += 1;
        }
        for row in &mut adjacency {
            row.sort_unstable();
        }
        Ok(Self {
            adjacency,
            edge_count,
        })
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    /// Hop counts from `source` to every vertex; `None` where unreachable.
    pub fn bfs(&self, source: usize) -> Vec<Option<u32>> {
        self.bfs_raw(source)
            .into_iter()
            .map(|d| (d != UNREACHED).then_some(d))
            .collect()
    }

    fn bfs_raw(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.len()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let next = dist[v] + 1;
            for &w in &self.adjacency[v] {
                if dist[w] == UNREACHED {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// First vertex unreachable from vertex 0, if any.
    pub fn first_unreachable(&self) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        self.bfs_raw(0).iter().position(|&d| d == UNREACHED)
    }

    pub fn is_connected(&self) -> bool {
        self.first_unreachable().is_none()
    }
}

/// Connects every pair of points at euclidean distance exactly 1. Requires an
/// unscaled point set. The result may be disconnected; check
/// [`UnitGraph::is_connected`].
pub fn build_unit_graph(points: &[ScaledPoint], scale: i64) -> Result<UnitGraph> {
    if scale != 1 {
        return Err(Error::GraphicNeedsUnitScale(scale));
    }
    let index: HashMap<ScaledPoint, usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut edges = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for q in [ScaledPoint::new(p.x + 1, p.y), ScaledPoint::new(p.x, p.y + 1)] {
            if let Some(&j) = index.get(&q) {
                edges.push((i, j));
            }
        }
    }
    UnitGraph::from_edges(points.len(), edges)
}

/// Shortest-path hop count between two vertices, without caching.
pub fn graphic_distance(graph: &UnitGraph, a: usize, b: usize) -> Result<DistanceValue> {
    let n = graph.len();
    for index in [a, b] {
        if index >= n {
            return Err(Error::CityIndex { index, n });
        }
    }
    match graph.bfs(a)[b] {
        Some(hops) => Ok(DistanceValue::from_exact(MetricKind::Graphic, 1, i64::from(hops))),
        None => Err(Error::Disconnected { from: a, to: b }),
    }
}

/// The graphic metric of a connected graph. Single-source rows are computed on
/// first use and cached; the cache is safe to share between threads.
pub struct GraphicMetric {
    graph: UnitGraph,
    rows: Vec<OnceLock<Box<[u32]>>>,
}

impl GraphicMetric {
    pub fn new(graph: UnitGraph) -> Result<Self> {
        if let Some(to) = graph.first_unreachable() {
            return Err(Error::Disconnected { from: 0, to });
        }
        let rows = (0..graph.len()).map(|_| OnceLock::new()).collect();
        Ok(Self { graph, rows })
    }

    pub fn graph(&self) -> &UnitGraph {
        &self.graph
    }

    /// All hop counts from `source`.
    pub fn row(&self, source: usize) -> &[u32] {
        self.rows[source].get_or_init(|| self.graph.bfs_raw(source).into_boxed_slice())
    }

    pub fn distance(&self, a: usize, b: usize) -> DistanceValue {
        DistanceValue::from_exact(MetricKind::Graphic, 1, i64::from(self.row(a)[b]))
    }
}

impl fmt::Debug for GraphicMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphicMetric")
            .field("vertices", &self.graph.len())
            .field("edges", &self.graph.edge_count())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(cols: i64) -> Vec<ScaledPoint> {
        (0..2)
            .flat_map(|y| (0..cols).map(move |x| ScaledPoint::new(x, y)))
            .collect()
    }

    /// Floyd-Warshall over the same edge set.
    fn all_pairs_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<u64>> {
        let inf = u64::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for &(a, b) in edges {
            d[a][b] = 1;
            d[b][a] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d
    }

    #[test]
    fn g0_unit_graph_has_thirteen_edges() {
        let g = build_unit_graph(&grid(5), 1).unwrap();
        assert_eq!(g.edge_count(), 13);
        assert!(g.is_connected());
    }

    #[test]
    fn unit_square_has_four_edges() {
        assert_eq!(build_unit_graph(&grid(2), 1).unwrap().edge_count(), 4);
    }

    #[test]
    fn far_apart_cities_are_flagged_disconnected() {
        let pts = [ScaledPoint::new(0, 0), ScaledPoint::new(2, 0)];
        let g = build_unit_graph(&pts, 1).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(!g.is_connected());
        assert!(matches!(
            GraphicMetric::new(g.clone()),
            Err(Error::Disconnected { from: 0, to: 1 })
        ));
        assert!(matches!(graphic_distance(&g, 0, 1), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn scaled_points_are_rejected() {
        assert!(build_unit_graph(&grid(3), 2).is_err());
    }

    #[test]
    fn g0_distances_match_oracle() {
        let pts = grid(5);
        let g = build_unit_graph(&pts, 1).unwrap();
        let edges: Vec<_> = g.edges().collect();
        let oracle = all_pairs_oracle(pts.len(), &edges);
        let metric = GraphicMetric::new(g.clone()).unwrap();
        for (a, row) in oracle.iter().enumerate() {
            for (b, &d) in row.iter().enumerate() {
                assert_eq!(metric.distance(a, b).exact, Some(d as i64));
            }
        }
        // (0,0) is index 0, (0,1) is 5, (4,1) is 9, (2,1) is 7
        assert_eq!(metric.distance(0, 5).exact, Some(1));
        assert_eq!(metric.distance(0, 9).exact, Some(5));
        assert_eq!(metric.distance(0, 7).exact, Some(3));
        assert_eq!(graphic_distance(&g, 0, 7).unwrap().exact, Some(3));
    }

    #[test]
    fn cached_rows_match_uncached_across_threads() {
        let pts = grid(40);
        let g = build_unit_graph(&pts, 1).unwrap();
        let metric = GraphicMetric::new(g.clone()).unwrap();
        std::thread::scope(|s| {
            for t in 0..4 {
                let (metric, g, n) = (&metric, &g, pts.len());
                s.spawn(move || {
                    for a in (t..n).step_by(4) {
                        let fresh = g.bfs(a);
                        for (b, d) in fresh.iter().enumerate() {
                            assert_eq!(Some(metric.row(a)[b]), *d);
                        }
                    }
                });
            }
        });
    }
}
