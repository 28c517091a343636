//! Probabilistic roadmap construction and shortest-path queries.
//!
//! The roadmap is built in two phases. Construction samples free points on
//! the (inflated) grid and links every pair closer than the connection
//! distance whose straight segment is collision-free. The query phase runs
//! Dijkstra between the start and goal vertices.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::geom::{fmt9, Point2};
use crate::gridmap::{GridError, OccupancyGrid};

/// Rejection sampling gives up after this many draws per requested point.
pub const ATTEMPTS_PER_SAMPLE: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoadmapError {
    #[error("sampling failed: accepted {accepted} of {requested} points after {attempts} draws (acceptance rate {acceptance_rate:.6})")]
    SamplingFailed {
        requested: usize,
        accepted: usize,
        attempts: usize,
        acceptance_rate: f64,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("roadmap parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("{which} position {point} is not in free space of the inflated map")]
    Placement { which: &'static str, point: Point2 },
    #[error("no path is found ({} roadmap vertices, {} edges)", .0.vertex_count, .0.edge_count)]
    NoPath(PlanStats),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Roadmap(#[from] RoadmapError),
}

/// Draws `n` uniform points over the world bounds, keeping only free ones.
pub fn sample_free(grid: &OccupancyGrid, n: usize, seed: u64) -> Result<Vec<Point2>, RoadmapError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin = grid.origin();
    let (w, h) = grid.extent();
    let cap = ATTEMPTS_PER_SAMPLE.saturating_mul(n);
    let mut points = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while points.len() < n {
        if attempts == cap {
            return Err(RoadmapError::SamplingFailed {
                requested: n,
                accepted: points.len(),
                attempts,
                acceptance_rate: points.len() as f64 / attempts as f64,
            });
        }
        attempts += 1;
        let p = origin + Point2::new(rng.random::<f64>() * w, rng.random::<f64>() * h);
        if grid.is_free(p) {
            points.push(p);
        }
    }
    Ok(points)
}

/// Undirected roadmap with Euclidean edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Roadmap {
    vertices: Vec<Point2>,
    /// Sorted neighbor lists; every edge appears in both endpoints' lists.
    adjacency: Vec<Vec<(usize, f64)>>,
    connection_distance: f64,
}

impl Roadmap {
    /// Builds a roadmap from explicit vertices and undirected edges.
    pub fn from_edges(
        vertices: Vec<Point2>,
        edges: impl IntoIterator<Item = (usize, usize)>,
        connection_distance: f64,
    ) -> Result<Roadmap, RoadmapError> {
        let n = vertices.len();
        let mut adjacency = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(RoadmapError::InvalidArgument(format!(
                    "edge ({i}, {j}) invalid for {n} vertices"
                )));
            }
            let w = vertices[i].distance(vertices[j]);
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(j, _)| j);
            list.dedup_by_key(|&mut (j, _)| j);
        }
        Ok(Roadmap {
            vertices,
            adjacency,
            connection_distance,
        })
    }

    /// Builds a weighted graph directly; used for graph-only queries.
    pub fn from_weighted_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Roadmap, RoadmapError> {
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (i, j, w) in edges {
            if i >= vertex_count || j >= vertex_count || !(w >= 0.0) {
                return Err(RoadmapError::InvalidArgument(format!(
                    "edge ({i}, {j}, {w}) invalid for {vertex_count} vertices"
                )));
            }
            adjacency[i].push((j, w));
            if i != j {
                adjacency[j].push((i, w));
            }
        }
        Ok(Roadmap {
            vertices: vec![Point2::ORIGIN; vertex_count],
            adjacency,
            connection_distance: f64::INFINITY,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn connection_distance(&self) -> f64 {
        self.connection_distance
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Undirected edges as `(i, j, weight)` with `i < j`, in index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .filter(move |&&(j, _)| j > i)
                .map(move |&(j, w)| (i, j, w))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .is_ok()
    }

    /// Line-oriented dump: `v x y` per vertex, then `e i j` per undirected edge.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {} {}", fmt9(v.x), fmt9(v.y));
        }
        for (i, j, _) in self.edges() {
            let _ = writeln!(out, "e {i} {j}");
        }
        out
    }

    /// Parses [`Roadmap::to_text`] output. Weights are recomputed from coordinates.
    pub fn from_text(text: &str) -> Result<Roadmap, RoadmapError> {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let err = |message: String| RoadmapError::Parse {
                line: idx + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [] => {}
                [c, ..] if c.starts_with('#') => {}
                ["v", x, y] => {
                    let x: f64 = x.parse().map_err(|_| err(format!("bad x {x:?}")))?;
                    let y: f64 = y.parse().map_err(|_| err(format!("bad y {y:?}")))?;
                    vertices.push(Point2::new(x, y));
                }
                ["e", i, j] => {
                    let i: usize = i.parse().map_err(|_| err(format!("bad index {i:?}")))?;
                    let j: usize = j.parse().map_err(|_| err(format!("bad index {j:?}")))?;
                    edges.push((i, j));
                }
                _ => return Err(err(format!("unrecognized line {line:?}"))),
            }
        }
        Roadmap::from_edges(vertices, edges, f64::INFINITY)
    }
}

/// Links every vertex pair within `connection_distance` whose segment is collision-free.
///
/// Candidate edges are checked in parallel; the merged edge set is identical
/// to a sequential sweep.
pub fn build_roadmap(
    grid: &OccupancyGrid,
    samples: &[Point2],
    connection_distance: f64,
) -> Result<Roadmap, RoadmapError> {
    if !(connection_distance > 0.0) {
        return Err(RoadmapError::InvalidArgument(format!(
            "connection distance must be positive, got {connection_distance}"
        )));
    }
    let n = samples.len();
    let per_vertex: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let v = samples[i];
            ((i + 1)..n)
                .filter_map(|j| {
                    let u = samples[j];
                    let d = v.distance(u);
                    (d <= connection_distance && !grid.segment_collides(v, u)).then_some((j, d))
                })
                .collect()
        })
        .collect();

    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, list) in per_vertex.into_iter().enumerate() {
        for (j, d) in list {
            adjacency[i].push((j, d));
            adjacency[j].push((i, d));
        }
    }
    Ok(Roadmap {
        vertices: samples.to_vec(),
        adjacency,
        connection_distance,
    })
}

/// Vertex sequence and total weight of a shortest route.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPath {
    pub vertices: Vec<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct QueueEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap; equal distances pop the smaller index first
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest path from `source` to `goal`, or `Ok(None)` when unreachable.
pub fn dijkstra(
    roadmap: &Roadmap,
    source: usize,
    goal: usize,
) -> Result<Option<GraphPath>, RoadmapError> {
    let n = roadmap.vertex_count();
    if source >= n || goal >= n {
        return Err(RoadmapError::InvalidArgument(format!(
            "vertex index out of range: source {source}, goal {goal}, {n} vertices"
        )));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut prev: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(QueueEntry {
        dist: 0.0,
        vertex: source,
    });

    while let Some(QueueEntry { dist: d, vertex: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == goal {
            break;
        }
        for &(v, w) in roadmap.neighbors(u) {
            let candidate = d + w;
            if candidate < dist[v] {
                dist[v] = candidate;
                prev[v] = Some(u);
                heap.push(QueueEntry {
                    dist: candidate,
                    vertex: v,
                });
            }
        }
    }

    if !done[goal] {
        return Ok(None);
    }
    let mut vertices = vec![goal];
    let mut cur = goal;
    while let Some(p) = prev[cur] {
        vertices.push(p);
        cur = p;
    }
    vertices.reverse();
    Ok(Some(GraphPath {
        vertices,
        cost: dist[goal],
    }))
}

/// Ordered waypoints from start to goal joined by straight segments.
#[derive(Debug, Clone, PartialEq)]
pub struct PolylinePath {
    nodes: Vec<Point2>,
}

impl PolylinePath {
    /// Needs at least two finite nodes. Use [`PolylinePath::validate`] for the full checks.
    pub fn new(nodes: Vec<Point2>) -> Result<PolylinePath, RoadmapError> {
        if nodes.len() < 2 {
            return Err(RoadmapError::InvalidArgument(format!(
                "a path needs at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        if let Some(p) = nodes.iter().find(|p| !p.is_finite()) {
            return Err(RoadmapError::InvalidArgument(format!(
                "non-finite node {p}"
            )));
        }
        Ok(PolylinePath { nodes })
    }

    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn start(&self) -> Point2 {
        self.nodes[0]
    }

    pub fn goal(&self) -> Point2 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Sum of the segment lengths.
    pub fn length(&self) -> f64 {
        crate::fillet::path_length(self)
    }

    /// Checks distinct consecutive nodes and collision-free segments on `grid`.
    pub fn validate(&self, grid: &OccupancyGrid) -> Result<(), String> {
        for (i, pair) in self.nodes.windows(2).enumerate() {
            if pair[0] == pair[1] {
                return Err(format!("nodes {i} and {} coincide", i + 1));
            }
            if grid.segment_collides(pair[0], pair[1]) {
                return Err(format!("segment {i} ({} -> {}) collides", pair[0], pair[1]));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanParams {
    pub nodes: usize,
    pub connection_distance: f64,
    pub seed: u64,
    pub inflation_radius: f64,
}

impl Default for PlanParams {
    fn default() -> Self {
        PlanParams {
            nodes: 3000,
            connection_distance: 5.0,
            seed: 0,
            inflation_radius: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanStats {
    /// Inflation, sampling and roadmap construction.
    pub build_time: Duration,
    pub query_time: Duration,
    pub vertex_count: usize,
    pub edge_count: usize,
}

#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub path: PolylinePath,
    pub roadmap: Roadmap,
    pub inflated: OccupancyGrid,
    pub stats: PlanStats,
}

/// Inflate, sample, connect and query. Start and goal join the roadmap as
/// its last two vertices under the same connection rule as the samples.
pub fn plan(
    grid: &OccupancyGrid,
    start: Point2,
    goal: Point2,
    params: &PlanParams,
) -> Result<PlanOutcome, PlanError> {
    if start == goal {
        return Err(RoadmapError::InvalidArgument("start and goal coincide".into()).into());
    }
    let t0 = Instant::now();
    let inflated = grid.inflate(params.inflation_radius)?;
    if !inflated.is_free(start) {
        return Err(PlanError::Placement {
            which: "start",
            point: start,
        });
    }
    if !inflated.is_free(goal) {
        return Err(PlanError::Placement {
            which: "goal",
            point: goal,
        });
    }
    let mut vertices = sample_free(&inflated, params.nodes, params.seed)?;
    vertices.push(start);
    vertices.push(goal);
    let roadmap = build_roadmap(&inflated, &vertices, params.connection_distance)?;
    let build_time = t0.elapsed();

    let t1 = Instant::now();
    let (source, target) = (vertices.len() - 2, vertices.len() - 1);
    let found = dijkstra(&roadmap, source, target)?;
    let stats = PlanStats {
        build_time,
        query_time: t1.elapsed(),
        vertex_count: roadmap.vertex_count(),
        edge_count: roadmap.edge_count(),
    };
    let Some(found) = found else {
        return Err(PlanError::NoPath(stats));
    };
    let nodes = found.vertices.iter().map(|&i| vertices[i]).collect();
    let path = PolylinePath::new(nodes)?;
    Ok(PlanOutcome {
        path,
        roadmap,
        inflated,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{load_map, MapFormat};

    #[test]
    fn sample_zero_points() {
        let g = OccupancyGrid::new(2, 2, 1.0).unwrap();
        assert!(sample_free(&g, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn sampling_is_deterministic_and_free() {
        let g = OccupancyGrid::new(10, 10, 1.0).unwrap();
        let a = sample_free(&g, 50, 42).unwrap();
        let b = sample_free(&g, 50, 42).unwrap();
        assert_eq!(a.len(), 50);
        assert_eq!(a, b);
        assert!(a.iter().all(|&p| g.is_free(p)));
        assert_ne!(a, sample_free(&g, 50, 43).unwrap());
    }

    #[test]
    fn sampling_half_occupied_map() {
        let mut cells = vec![false; 100];
        for (i, c) in cells.iter_mut().enumerate() {
            *c = (i / 10 + i % 10) % 2 == 0;
        }
        let g = OccupancyGrid::from_cells(10, 10, 1.0, cells).unwrap();
        let pts = sample_free(&g, 100, 3).unwrap();
        assert_eq!(pts.len(), 100);
        for p in pts {
            let (ix, iy) = g.cell_of(p).unwrap();
            assert!(!g.is_occupied(ix, iy));
        }
    }

    #[test]
    fn sampling_reports_failure() {
        let g = OccupancyGrid::from_cells(2, 1, 1.0, vec![true, true]).unwrap();
        match sample_free(&g, 3, 0) {
            Err(RoadmapError::SamplingFailed {
                attempts,
                accepted,
                acceptance_rate,
                ..
            }) => {
                assert_eq!(attempts, 3000);
                assert_eq!(accepted, 0);
                assert_eq!(acceptance_rate, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_points_distance_gate() {
        let g = OccupancyGrid::new(10, 10, 1.0).unwrap();
        let pts = [Point2::new(1.0, 1.0), Point2::new(4.0, 1.0)];
        let rm = build_roadmap(&g, &pts, 5.0).unwrap();
        assert_eq!(rm.edges().collect::<Vec<_>>(), vec![(0, 1, 3.0)]);
        assert!(rm.has_edge(1, 0));
        let rm = build_roadmap(&g, &pts, 2.0).unwrap();
        assert_eq!(rm.edge_count(), 0);
        assert!(build_roadmap(&g, &pts, 0.0).is_err());
    }

    #[test]
    fn triangle_prefers_two_hops() {
        let rm = Roadmap::from_weighted_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]).unwrap();
        let p = dijkstra(&rm, 0, 2).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2]);
        assert_eq!(p.cost, 2.0);
    }

    #[test]
    fn dijkstra_degenerate_and_errors() {
        let rm = Roadmap::from_weighted_edges(2, []).unwrap();
        let p = dijkstra(&rm, 1, 1).unwrap().unwrap();
        assert_eq!(p.vertices, vec![1]);
        assert_eq!(p.cost, 0.0);
        assert_eq!(dijkstra(&rm, 0, 1).unwrap(), None);
        assert!(matches!(
            dijkstra(&rm, 0, 2),
            Err(RoadmapError::InvalidArgument(_))
        ));
    }

    #[test]
    fn dijkstra_tie_breaks_deterministically() {
        // two equal routes 0-1-3 and 0-2-3
        let rm =
            Roadmap::from_weighted_edges(4, [(0, 2, 1.0), (0, 1, 1.0), (1, 3, 1.0), (2, 3, 1.0)])
                .unwrap();
        let p = dijkstra(&rm, 0, 3).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 1, 3]);
    }

    #[test]
    fn roadmap_text_round_trip() {
        let g = OccupancyGrid::new(10, 10, 1.0).unwrap();
        let pts = sample_free(&g, 12, 9).unwrap();
        let rm = build_roadmap(&g, &pts, 4.0).unwrap();
        let text = rm.to_text();
        let back = Roadmap::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.edge_count(), rm.edge_count());
        assert!(Roadmap::from_text("v 1 2\nq\n").is_err());
    }

    #[test]
    fn plan_empty_map_straight_line() {
        let g = OccupancyGrid::new(10, 10, 1.0).unwrap();
        let params = PlanParams {
            nodes: 20,
            connection_distance: 5.0,
            seed: 1,
            inflation_radius: 0.0,
        };
        let out = plan(&g, Point2::new(2.0, 2.0), Point2::new(4.0, 4.0), &params).unwrap();
        assert_eq!(
            out.path.nodes(),
            &[Point2::new(2.0, 2.0), Point2::new(4.0, 4.0)]
        );
        assert_eq!(out.stats.vertex_count, 22);
    }

    #[test]
    fn plan_no_samples_far_goal() {
        let g = OccupancyGrid::new(20, 5, 1.0).unwrap();
        let params = PlanParams {
            nodes: 0,
            connection_distance: 5.0,
            seed: 1,
            inflation_radius: 0.0,
        };
        let err = plan(&g, Point2::new(1.0, 1.0), Point2::new(18.0, 1.0), &params).unwrap_err();
        assert!(matches!(
            err,
            PlanError::NoPath(PlanStats {
                vertex_count: 2,
                edge_count: 0,
                ..
            })
        ));
    }

    #[test]
    fn plan_rejects_blocked_endpoints() {
        let g = load_map(
            b"5 5 1\n.....\n.....\n..#..\n.....\n.....\n",
            MapFormat::AsciiGrid,
        )
        .unwrap();
        let params = PlanParams {
            nodes: 10,
            inflation_radius: 1.0,
            ..PlanParams::default()
        };
        // (2.5, 1.5) is free on the raw map but inside the inflated halo
        let err = plan(&g, Point2::new(2.5, 1.5), Point2::new(0.5, 0.5), &params).unwrap_err();
        assert!(matches!(err, PlanError::Placement { which: "start", .. }));
        let err = plan(&g, Point2::new(0.5, 0.5), Point2::new(2.5, 2.5), &params).unwrap_err();
        assert!(matches!(err, PlanError::Placement { which: "goal", .. }));
    }

    #[test]
    fn plan_through_wall_gap() {
        let g = load_map(
            b"9 7 1\n.........\n.........\n....#....\n....#....\n.........\n....#....\n....#....\n",
            MapFormat::AsciiGrid,
        )
        .unwrap();
        let params = PlanParams {
            nodes: 200,
            connection_distance: 3.0,
            seed: 5,
            inflation_radius: 0.0,
        };
        let out = plan(&g, Point2::new(1.5, 1.5), Point2::new(7.5, 1.5), &params).unwrap();
        out.path.validate(&out.inflated).unwrap();
        out.path.validate(&g).unwrap();
    }
}
