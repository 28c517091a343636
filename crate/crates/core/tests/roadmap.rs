mod common;

use arcfillet::geom::Point2;
use arcfillet::gridmap::OccupancyGrid;
use arcfillet::roadmap::{
    build_roadmap, dijkstra, plan, sample_free, PlanError, PlanParams, Roadmap, RoadmapError,
};
use common::{brute_segment_collides, enumerate_min_path, random_grid, rng};
use proptest::prelude::*;
use rand::Rng;

fn random_points(r: &mut impl Rng, grid: &OccupancyGrid, n: usize) -> Vec<Point2> {
    let (w, h) = grid.extent();
    (0..n)
        .map(|_| grid.origin() + Point2::new(r.random::<f64>() * w, r.random::<f64>() * h))
        .collect()
}

#[test]
fn edges_match_distance_and_collision_filter() {
    let mut r = rng(5);
    for _ in 0..100 {
        let grid = random_grid(&mut r, 10, 8, 0.2, 1.0);
        let pts = random_points(&mut r, &grid, 12);
        let conn = r.random_range(1.0..8.0);
        let rm = build_roadmap(&grid, &pts, conn).unwrap();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let want = pts[i].distance(pts[j]) <= conn
                    && !brute_segment_collides(&grid, pts[i], pts[j]);
                assert_eq!(rm.has_edge(i, j), want, "edge {i}-{j}");
                assert_eq!(rm.has_edge(j, i), want);
            }
        }
    }
}

#[test]
fn sampling_is_seeded_and_free() {
    let mut r = rng(8);
    let grid = random_grid(&mut r, 20, 15, 0.3, 2.0);
    let a = sample_free(&grid, 300, 42).unwrap();
    let b = sample_free(&grid, 300, 42).unwrap();
    let c = sample_free(&grid, 300, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.iter().all(|&p| grid.is_free(p)));
}

#[test]
fn sampling_fails_on_full_grid() {
    let grid = OccupancyGrid::from_cells(2, 2, 1.0, vec![true; 4]).unwrap();
    assert!(matches!(
        sample_free(&grid, 3, 0),
        Err(RoadmapError::SamplingFailed { accepted: 0, .. })
    ));
}

#[test]
fn dijkstra_matches_enumeration() {
    let mut r = rng(17);
    for _ in 0..300 {
        let n = r.random_range(2..=8);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if r.random::<f64>() < 0.4 {
                    // small integer weights make ties common
                    edges.push((i, j, r.random_range(1..5) as f64));
                }
            }
        }
        let rm = Roadmap::from_weighted_edges(n, edges.clone()).unwrap();
        let (s, g) = (0, n - 1);
        let got = dijkstra(&rm, s, g).unwrap();
        let want = enumerate_min_path(n, &edges, s, g);
        match (got, want) {
            (None, None) => {}
            (Some(p), Some(w)) => {
                assert!((p.cost - w).abs() < 1e-12);
                assert_eq!(p.vertices.first(), Some(&s));
                assert_eq!(p.vertices.last(), Some(&g));
                let walked: f64 = p
                    .vertices
                    .windows(2)
                    .map(|e| {
                        rm.neighbors(e[0])
                            .iter()
                            .find(|&&(u, _)| u == e[1])
                            .expect("path uses an existing edge")
                            .1
                    })
                    .sum();
                assert!((walked - w).abs() < 1e-12);
            }
            (got, want) => panic!("dijkstra {got:?} vs enumeration {want:?}"),
        }
    }
}

#[test]
fn roadmap_text_round_trip() {
    let mut r = rng(3);
    let grid = random_grid(&mut r, 12, 12, 0.1, 1.0);
    let pts = sample_free(&grid, 40, 1).unwrap();
    let rm = build_roadmap(&grid, &pts, 4.0).unwrap();
    let back = Roadmap::from_text(&rm.to_text()).unwrap();
    assert_eq!(
        back.edges().map(|(i, j, _)| (i, j)).collect::<Vec<_>>(),
        rm.edges().map(|(i, j, _)| (i, j)).collect::<Vec<_>>()
    );
    assert_eq!(back.vertex_count(), rm.vertex_count());
}

#[test]
fn planned_paths_are_collision_free() {
    let grid = arcfillet::maps::complex_map();
    let params = PlanParams {
        nodes: 800,
        ..PlanParams::default()
    };
    for seed in 0..3 {
        let params = PlanParams { seed, ..params };
        let out = plan(
            &grid,
            arcfillet::maps::COMPLEX_START,
            arcfillet::maps::COMPLEX_GOAL,
            &params,
        )
        .unwrap();
        out.path.validate(&out.inflated).unwrap();
        for w in out.path.nodes().windows(2) {
            assert!(!brute_segment_collides(&out.inflated, w[0], w[1]));
        }
        let n = out.roadmap.vertex_count();
        assert_eq!(
            out.roadmap.vertices()[n - 2],
            arcfillet::maps::COMPLEX_START
        );
        assert_eq!(out.roadmap.vertices()[n - 1], arcfillet::maps::COMPLEX_GOAL);
    }
}

#[test]
fn placement_errors() {
    let grid = arcfillet::maps::complex_map();
    let err = plan(
        &grid,
        Point2::new(0.5, 0.5),
        arcfillet::maps::COMPLEX_GOAL,
        &PlanParams::default(),
    )
    .unwrap_err();
    assert!(matches!(err, PlanError::Placement { which: "start", .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roadmap_edges_are_symmetric_and_bounded(seed in any::<u64>(), conn in 0.5f64..10.0) {
        let mut r = rng(seed);
        let grid = random_grid(&mut r, 8, 8, 0.15, 1.0);
        let pts = random_points(&mut r, &grid, 15);
        let rm = build_roadmap(&grid, &pts, conn).unwrap();
        for (i, j, w) in rm.edges() {
            prop_assert!(i < j);
            prop_assert!(w <= conn);
            prop_assert!((w - pts[i].distance(pts[j])).abs() < 1e-12);
            prop_assert!(rm.has_edge(j, i));
        }
    }
}
