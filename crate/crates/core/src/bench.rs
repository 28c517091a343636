//! The full plan → smooth → replay pipeline and the benchmark matrix built on it.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::fillet::{self, FilletError, SmoothOptions, SmoothedPath};
use crate::geom::{fmt9, Point2};
use crate::gridmap::OccupancyGrid;
use crate::roadmap::{plan, PlanError, PlanOutcome, PlanParams, PolylinePath};
use crate::sim::{replay, ControllerParams, PathRef, RobotParams, SimError, Trajectory};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("smoothing failed: {0}")]
    Fillet(#[from] FilletError),
    #[error("simulation failed: {0}")]
    Sim(#[from] SimError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("invalid benchmark configuration: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub plan: PlanParams,
    pub straight_tolerance: f64,
    pub robot: RobotParams,
    pub controller: ControllerParams,
    /// Also replay the unsmoothed polyline for comparison.
    pub replay_pure: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            plan: PlanParams::default(),
            straight_tolerance: fillet::DEFAULT_STRAIGHT_TOLERANCE,
            robot: RobotParams::default(),
            controller: ControllerParams::default(),
            replay_pure: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub plan: PlanOutcome,
    pub smoothed: SmoothedPath,
    pub smooth_time: Duration,
    pub trajectory: Trajectory,
    pub pure_trajectory: Option<Trajectory>,
}

impl PipelineRun {
    pub fn pure(&self) -> &PolylinePath {
        &self.plan.path
    }

    /// One-line `key=value` report.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "pure_length={} smoothed_length={} path_nodes={} arcs={} prm_time={:.3} smooth_time={:.6} walking_time={} reached_goal={}",
            fmt9(self.plan.path.length()),
            fmt9(self.smoothed.length()),
            self.plan.path.len(),
            self.smoothed.arc_count(),
            self.plan.stats.build_time.as_secs_f64() + self.plan.stats.query_time.as_secs_f64(),
            self.smooth_time.as_secs_f64(),
            fmt9(self.trajectory.total_time),
            self.trajectory.reached_goal,
        );
        if let Some(pure) = &self.pure_trajectory {
            let _ = write!(s, " pure_walking_time={}", fmt9(pure.total_time));
        }
        let _ = write!(
            s,
            " clearance_violations={}",
            self.smoothed.violations().len()
        );
        s
    }
}

/// Plans on the inflated map, smooths the result and replays it.
///
/// Smoothed arcs are checked against the original, uninflated map; any
/// violations are reported on the smoothed path rather than treated as errors.
pub fn run_pipeline(
    map: &OccupancyGrid,
    start: Point2,
    goal: Point2,
    cfg: &PipelineConfig,
) -> Result<PipelineRun, PipelineError> {
    let outcome = plan(map, start, goal, &cfg.plan)?;
    let t0 = Instant::now();
    let smoothed = fillet::smooth_path(
        &outcome.path,
        &SmoothOptions {
            straight_tolerance: cfg.straight_tolerance,
            grid: Some(map),
            ..SmoothOptions::default()
        },
    )?;
    let smooth_time = t0.elapsed();
    let trajectory = replay(PathRef::Smoothed(&smoothed), &cfg.robot, &cfg.controller)?;
    let pure_trajectory = if cfg.replay_pure {
        Some(replay(
            PathRef::Polyline(&outcome.path),
            &cfg.robot,
            &cfg.controller,
        )?)
    } else {
        None
    };
    Ok(PipelineRun {
        plan: outcome,
        smoothed,
        smooth_time,
        trajectory,
        pure_trajectory,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub start: Point2,
    pub goal: Point2,
    pub node_counts: Vec<usize>,
    pub connection_distances: Vec<f64>,
    /// Seeds per cell; run `k` uses `seed_base + k`.
    pub seeds: usize,
    pub seed_base: u64,
    pub inflation_radius: f64,
    pub straight_tolerance: f64,
    pub robot: RobotParams,
    pub controller: ControllerParams,
}

impl BenchConfig {
    /// The 2×2 matrix of node counts and connection distances, 20 seeds each.
    pub fn standard_matrix(start: Point2, goal: Point2) -> BenchConfig {
        BenchConfig {
            start,
            goal,
            node_counts: vec![3000, 1000],
            connection_distances: vec![5.0, 100.0],
            seeds: 20,
            seed_base: 0,
            inflation_radius: 0.5,
            straight_tolerance: fillet::DEFAULT_STRAIGHT_TOLERANCE,
            robot: RobotParams::default(),
            controller: ControllerParams::default(),
        }
    }
}

/// Measurements from one successful pipeline run.
#[derive(Debug, Clone)]
pub struct RunMetrics {
    pub pure_length: f64,
    pub path_nodes: usize,
    pub smoothed_length: f64,
    pub arc_count: usize,
    pub walking_time: f64,
    pub reached_goal: bool,
    pub pure_walking_time: f64,
    pub pure_reached_goal: bool,
    pub prm_time: f64,
    pub smooth_time: f64,
    pub clearance_violations: usize,
    /// Largest commanded speeds and per-step travel over both replays.
    pub max_linear_command: f64,
    pub max_angular_command: f64,
    pub max_step_displacement: f64,
    pub pure: PolylinePath,
    pub smoothed: SmoothedPath,
}

impl RunMetrics {
    fn from_run(run: &PipelineRun) -> RunMetrics {
        let pure_traj = run.pure_trajectory.as_ref();
        let trajectories = std::iter::once(&run.trajectory).chain(pure_traj);
        let (mut max_v, mut max_w, mut max_step) = (0.0f64, 0.0f64, 0.0f64);
        for traj in trajectories {
            for c in &traj.commands {
                max_v = max_v.max(c.linear.abs());
                max_w = max_w.max(c.angular.abs());
            }
            max_step = max_step.max(traj.max_step_displacement());
        }
        RunMetrics {
            pure_length: run.plan.path.length(),
            path_nodes: run.plan.path.len(),
            smoothed_length: run.smoothed.length(),
            arc_count: run.smoothed.arc_count(),
            walking_time: run.trajectory.total_time,
            reached_goal: run.trajectory.reached_goal,
            pure_walking_time: pure_traj.map_or(f64::NAN, |t| t.total_time),
            pure_reached_goal: pure_traj.is_some_and(|t| t.reached_goal),
            prm_time: run.plan.stats.build_time.as_secs_f64()
                + run.plan.stats.query_time.as_secs_f64(),
            smooth_time: run.smooth_time.as_secs_f64(),
            clearance_violations: run.smoothed.violations().len(),
            max_linear_command: max_v,
            max_angular_command: max_w,
            max_step_displacement: max_step,
            pure: run.plan.path.clone(),
            smoothed: run.smoothed.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub nodes: usize,
    pub connection_distance: f64,
    pub seed: u64,
    pub result: Result<RunMetrics, PipelineError>,
}

/// Means over the successful seeds of one (nodes, distance) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub nodes: usize,
    pub connection_distance: f64,
    pub seeds: usize,
    pub failures: usize,
    /// Successful runs whose smoothed replay timed out.
    pub unreached: usize,
    pub mean_pure_length: Option<f64>,
    pub mean_path_nodes: Option<f64>,
    pub mean_smoothed_length: Option<f64>,
    pub mean_walking_time: Option<f64>,
    pub mean_pure_walking_time: Option<f64>,
    pub mean_prm_time: Option<f64>,
    pub mean_smooth_time: Option<f64>,
    pub mean_total_time: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub cells: Vec<CellSummary>,
    /// Every run in (cell, seed) order.
    pub runs: Vec<RunRecord>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn opt9(value: Option<f64>) -> String {
    value.map(fmt9).unwrap_or_default()
}

/// Column names of the benchmark CSV, schema version 1.
pub const BENCH_CSV_COLUMNS: &[&str] = &[
    "prm_nodes",
    "conn_dist",
    "seeds",
    "failures",
    "unreached",
    "path_length",
    "path_nodes",
    "smooth_path_length",
    "walking_time",
    "pure_walking_time",
];

/// Wall-clock columns appended when timings are requested.
pub const BENCH_TIMING_COLUMNS: &[&str] = &["prm_time", "smooth_time", "total_time"];

impl BenchReport {
    /// One row per cell. Wall-clock columns are opt-in so that the default
    /// output is reproducible byte for byte.
    pub fn to_csv(&self, timings: bool) -> String {
        let mut header: Vec<&str> = BENCH_CSV_COLUMNS.to_vec();
        if timings {
            header.extend_from_slice(BENCH_TIMING_COLUMNS);
        }
        let mut out = header.join(",");
        out.push('\n');
        for c in &self.cells {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                c.nodes,
                fmt9(c.connection_distance),
                c.seeds,
                c.failures,
                c.unreached,
                opt9(c.mean_pure_length),
                opt9(c.mean_path_nodes),
                opt9(c.mean_smoothed_length),
                opt9(c.mean_walking_time),
                opt9(c.mean_pure_walking_time),
            );
            if timings {
                let _ = write!(
                    out,
                    ",{},{},{}",
                    opt9(c.mean_prm_time),
                    opt9(c.mean_smooth_time),
                    opt9(c.mean_total_time)
                );
            }
            out.push('\n');
        }
        out
    }

    /// One row per run; failed runs carry the error text in the last column.
    pub fn runs_to_csv(&self) -> String {
        let mut out = String::from(
            "prm_nodes,conn_dist,seed,path_length,path_nodes,smooth_path_length,arcs,walking_time,reached_goal,pure_walking_time,pure_reached_goal,max_linear_cmd,max_angular_cmd,error\n",
        );
        for r in &self.runs {
            let _ = write!(
                out,
                "{},{},{},",
                r.nodes,
                fmt9(r.connection_distance),
                r.seed
            );
            match &r.result {
                Ok(m) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{},",
                        fmt9(m.pure_length),
                        m.path_nodes,
                        fmt9(m.smoothed_length),
                        m.arc_count,
                        fmt9(m.walking_time),
                        m.reached_goal,
                        fmt9(m.pure_walking_time),
                        m.pure_reached_goal,
                        fmt9(m.max_linear_command),
                        fmt9(m.max_angular_command)
                    );
                }
                Err(e) => {
                    let _ = writeln!(out, ",,,,,,,,,,\"{}\"", e.to_string().replace('"', "'"));
                }
            }
        }
        out
    }

    /// The successful run with the shortest smoothed path; earliest wins ties.
    pub fn best_run(&self) -> Option<&RunRecord> {
        self.runs
            .iter()
            .filter(|r| r.result.is_ok())
            .min_by(|a, b| {
                let la = a
                    .result
                    .as_ref()
                    .map(|m| m.smoothed_length)
                    .unwrap_or(f64::INFINITY);
                let lb = b
                    .result
                    .as_ref()
                    .map(|m| m.smoothed_length)
                    .unwrap_or(f64::INFINITY);
                la.total_cmp(&lb)
            })
    }

    /// Runs belonging to one cell, in seed order.
    pub fn cell_runs(
        &self,
        nodes: usize,
        connection_distance: f64,
    ) -> impl Iterator<Item = &RunRecord> {
        self.runs
            .iter()
            .filter(move |r| r.nodes == nodes && r.connection_distance == connection_distance)
    }
}

fn summarize(nodes: usize, connection_distance: f64, runs: &[RunRecord]) -> CellSummary {
    let ok: Vec<&RunMetrics> = runs.iter().filter_map(|r| r.result.as_ref().ok()).collect();
    CellSummary {
        nodes,
        connection_distance,
        seeds: runs.len(),
        failures: runs.len() - ok.len(),
        unreached: ok.iter().filter(|m| !m.reached_goal).count(),
        mean_pure_length: mean(ok.iter().map(|m| m.pure_length)),
        mean_path_nodes: mean(ok.iter().map(|m| m.path_nodes as f64)),
        mean_smoothed_length: mean(ok.iter().map(|m| m.smoothed_length)),
        mean_walking_time: mean(ok.iter().map(|m| m.walking_time)),
        mean_pure_walking_time: mean(ok.iter().map(|m| m.pure_walking_time)),
        mean_prm_time: mean(ok.iter().map(|m| m.prm_time)),
        mean_smooth_time: mean(ok.iter().map(|m| m.smooth_time)),
        mean_total_time: mean(
            ok.iter()
                .map(|m| m.prm_time + m.smooth_time + m.walking_time),
        ),
    }
}

/// Runs the pipeline for every (nodes, distance, seed) combination.
///
/// Runs execute in parallel; results are assembled in (cell, seed) order so
/// the report does not depend on scheduling.
pub fn run_bench(map: &OccupancyGrid, cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    if cfg.seeds == 0 {
        return Err(BenchError::InvalidArgument(
            "at least one seed is required".into(),
        ));
    }
    if cfg.node_counts.is_empty() || cfg.connection_distances.is_empty() {
        return Err(BenchError::InvalidArgument(
            "node counts and connection distances must not be empty".into(),
        ));
    }
    if let Some(d) = cfg.connection_distances.iter().find(|d| !(**d > 0.0)) {
        return Err(BenchError::InvalidArgument(format!(
            "connection distance must be positive, got {d}"
        )));
    }

    let mut jobs = Vec::new();
    for &nodes in &cfg.node_counts {
        for &conn in &cfg.connection_distances {
            for k in 0..cfg.seeds {
                jobs.push((nodes, conn, cfg.seed_base + k as u64));
            }
        }
    }
    let runs: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(nodes, connection_distance, seed)| {
            let pipeline = PipelineConfig {
                plan: PlanParams {
                    nodes,
                    connection_distance,
                    seed,
                    inflation_radius: cfg.inflation_radius,
                },
                straight_tolerance: cfg.straight_tolerance,
                robot: cfg.robot,
                controller: cfg.controller,
                replay_pure: true,
            };
            let result = run_pipeline(map, cfg.start, cfg.goal, &pipeline)
                .map(|run| RunMetrics::from_run(&run));
            RunRecord {
                nodes,
                connection_distance,
                seed,
                result,
            }
        })
        .collect();

    let cells = runs
        .chunks(cfg.seeds)
        .map(|chunk| summarize(chunk[0].nodes, chunk[0].connection_distance, chunk))
        .collect();
    Ok(BenchReport { cells, runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open_map() -> OccupancyGrid {
        OccupancyGrid::new(20, 20, 1.0).unwrap()
    }

    fn small_cfg() -> BenchConfig {
        BenchConfig {
            node_counts: vec![60],
            connection_distances: vec![6.0],
            seeds: 1,
            seed_base: 3,
            inflation_radius: 0.0,
            ..BenchConfig::standard_matrix(Point2::new(1.5, 1.5), Point2::new(18.5, 17.5))
        }
    }

    #[test]
    fn zero_seeds_rejected() {
        let cfg = BenchConfig {
            seeds: 0,
            ..small_cfg()
        };
        assert!(matches!(
            run_bench(&open_map(), &cfg),
            Err(BenchError::InvalidArgument(_))
        ));
    }

    #[test]
    fn single_cell_matches_single_run() {
        let map = open_map();
        let cfg = small_cfg();
        let report = run_bench(&map, &cfg).unwrap();
        assert_eq!(report.cells.len(), 1);
        let run = run_pipeline(
            &map,
            cfg.start,
            cfg.goal,
            &PipelineConfig {
                plan: PlanParams {
                    nodes: 60,
                    connection_distance: 6.0,
                    seed: 3,
                    inflation_radius: 0.0,
                },
                ..PipelineConfig::default()
            },
        )
        .unwrap();
        let cell = &report.cells[0];
        assert_eq!(cell.failures, 0);
        assert_eq!(cell.mean_pure_length, Some(run.plan.path.length()));
        assert_eq!(cell.mean_smoothed_length, Some(run.smoothed.length()));
        assert_eq!(cell.mean_path_nodes, Some(run.plan.path.len() as f64));
        assert_eq!(cell.mean_walking_time, Some(run.trajectory.total_time));
    }

    #[test]
    fn failed_cell_has_empty_means() {
        let cfg = BenchConfig {
            node_counts: vec![0],
            connection_distances: vec![2.0],
            seeds: 2,
            ..small_cfg()
        };
        let report = run_bench(&open_map(), &cfg).unwrap();
        let cell = &report.cells[0];
        assert_eq!(cell.failures, 2);
        assert_eq!(cell.mean_pure_length, None);
        let csv = report.to_csv(false);
        assert_eq!(csv.lines().nth(1).unwrap(), "0,2.000000000,2,2,0,,,,,");
        assert!(report.runs_to_csv().contains("no path is found"));
    }

    #[test]
    fn csv_header_is_stable() {
        let report = run_bench(&open_map(), &small_cfg()).unwrap();
        let csv = report.to_csv(false);
        assert_eq!(csv.lines().next().unwrap(), BENCH_CSV_COLUMNS.join(","));
        let timed = report.to_csv(true);
        assert!(timed
            .lines()
            .next()
            .unwrap()
            .ends_with("prm_time,smooth_time,total_time"));
    }
}
