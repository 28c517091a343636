//! Command-line front end: `plan`, `bench`, `render` and `simulate`.
//!
//! Settings come from flags and, optionally, a TOML config file given with
//! `--config`. Flags take precedence over the file.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use thiserror::Error;

use crate::bench::{run_bench, run_pipeline, BenchConfig, PipelineConfig, PipelineError};
use crate::fillet::{FilletError, DEFAULT_STRAIGHT_TOLERANCE};
use crate::geom::Point2;
use crate::gridmap::{GridError, OccupancyGrid};
use crate::maps;
use crate::pathfile;
use crate::roadmap::{PlanError, PlanParams, Roadmap};
use crate::sim::{replay, ControllerParams, PathRef, RobotParams};
use crate::svg::{render_svg, Layers};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const PLACEMENT: i32 = 4;
    pub const NO_PATH: i32 = 5;
    pub const SMOOTHING: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Placement(String),
    #[error("{0}")]
    NoPath(String),
    #[error("{0}")]
    Smoothing(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Parse(_) => exit::PARSE,
            CliError::Placement(_) => exit::PLACEMENT,
            CliError::NoPath(_) => exit::NO_PATH,
            CliError::Smoothing(_) => exit::SMOOTHING,
            CliError::Io(_) => exit::FAILURE,
        }
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        match e {
            GridError::Io { .. } => CliError::Io(e.to_string()),
            GridError::InvalidArgument(_) => CliError::Usage(e.to_string()),
            GridError::Parse { .. } | GridError::Binary { .. } => CliError::Parse(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let msg = e.to_string();
        match e {
            PipelineError::Plan(PlanError::Placement { .. }) => CliError::Placement(msg),
            PipelineError::Plan(PlanError::NoPath(_)) => CliError::NoPath(msg),
            PipelineError::Plan(PlanError::Grid(g)) => g.into(),
            PipelineError::Plan(PlanError::Roadmap(_)) => CliError::Usage(msg),
            PipelineError::Fillet(_) | PipelineError::Sim(_) => CliError::Smoothing(msg),
        }
    }
}

fn parse_point(s: &str) -> Result<Point2, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let x: f64 = x
        .trim()
        .parse()
        .map_err(|_| format!("bad x coordinate {x:?}"))?;
    let y: f64 = y
        .trim()
        .parse()
        .map_err(|_| format!("bad y coordinate {y:?}"))?;
    if !x.is_finite() || !y.is_finite() {
        return Err(format!("coordinates must be finite, got {s:?}"));
    }
    Ok(Point2::new(x, y))
}

#[derive(Debug, Parser)]
#[command(
    name = "arcfillet",
    version,
    about = "PRM planning with circular-arc corner smoothing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan, smooth and replay one path.
    Plan(PlanArgs),
    /// Run the node-count × connection-distance matrix over several seeds.
    Bench(BenchArgs),
    /// Draw a map and path files as SVG.
    Render(RenderArgs),
    /// Replay a path file with the pure-pursuit controller.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML file with default settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Map file (ascii-grid or PGM) or `builtin:complex`.
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long, value_parser = parse_point, value_name = "X,Y")]
    pub start: Option<Point2>,
    #[arg(long, value_parser = parse_point, value_name = "X,Y")]
    pub goal: Option<Point2>,
    /// Obstacle inflation radius in meters.
    #[arg(long)]
    pub inflate: Option<f64>,
    /// RNG seed (bench: seed of the first run).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Corners this close to straight (radians) are not filleted.
    #[arg(long)]
    pub straight_tol: Option<f64>,
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of roadmap samples.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Maximum edge length in meters.
    #[arg(long)]
    pub conn_dist: Option<f64>,
    /// Write the unsmoothed polyline here.
    #[arg(long)]
    pub out_pure: Option<PathBuf>,
    /// Write the smoothed path here.
    #[arg(long)]
    pub out_smooth: Option<PathBuf>,
    /// Write the roadmap here.
    #[arg(long)]
    pub out_roadmap: Option<PathBuf>,
    /// Include roadmap edges in the SVG.
    #[arg(long)]
    pub svg_roadmap: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',')]
    pub nodes: Option<Vec<usize>>,
    /// Comma-separated connection distances.
    #[arg(long, value_delimiter = ',')]
    pub conn_dist: Option<Vec<f64>>,
    /// Seeds per cell.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Append wall-clock timing columns (not reproducible).
    #[arg(long)]
    pub timings: bool,
    /// Per-run CSV.
    #[arg(long)]
    pub out_runs: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// Map file or `builtin:complex`.
    #[arg(long)]
    pub map: String,
    /// Polyline path file.
    #[arg(long)]
    pub pure: Option<PathBuf>,
    /// Smoothed path file.
    #[arg(long)]
    pub smooth: Option<PathBuf>,
    #[arg(long)]
    pub roadmap: Option<PathBuf>,
    /// Shade the halo an inflation of this radius would add.
    #[arg(long)]
    pub inflate: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Path file with `L` and `A` elements.
    #[arg(long)]
    pub path: PathBuf,
    #[arg(long)]
    pub lookahead: Option<f64>,
    #[arg(long)]
    pub velocity: Option<f64>,
    #[arg(long)]
    pub max_angular: Option<f64>,
    #[arg(long)]
    pub goal_radius: Option<f64>,
    #[arg(long)]
    pub sample_time: Option<f64>,
    /// Trajectory CSV; stdout when omitted.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }

    fn single(&self, key: &str) -> Result<T, CliError> {
        match self {
            OneOrMany::One(v) => Ok(v.clone()),
            OneOrMany::Many(v) if v.len() == 1 => Ok(v[0].clone()),
            OneOrMany::Many(_) => Err(CliError::Usage(format!(
                "config key `{key}` must be a single value"
            ))),
        }
    }
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    map: Option<String>,
    start: Option<[f64; 2]>,
    goal: Option<[f64; 2]>,
    nodes: Option<OneOrMany<usize>>,
    conn_dist: Option<OneOrMany<f64>>,
    inflate: Option<f64>,
    seed: Option<u64>,
    seeds: Option<usize>,
    straight_tolerance: Option<f64>,
    out_svg: Option<PathBuf>,
    out_csv: Option<PathBuf>,
    out_pure: Option<PathBuf>,
    out_smooth: Option<PathBuf>,
    out_roadmap: Option<PathBuf>,
    out_runs: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Parse(format!("config {}: {e}", path.display())))
    }
}

/// Fully resolved settings for one `plan` invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub map: String,
    pub start: Point2,
    pub goal: Point2,
    pub nodes: usize,
    pub connection_distance: f64,
    pub inflation_radius: f64,
    pub seed: u64,
    pub straight_tolerance: f64,
    pub out_svg: Option<PathBuf>,
    pub out_csv: Option<PathBuf>,
    pub out_pure: Option<PathBuf>,
    pub out_smooth: Option<PathBuf>,
    pub out_roadmap: Option<PathBuf>,
    pub svg_roadmap: bool,
}

struct Resolved {
    map: String,
    start: Point2,
    goal: Point2,
    inflate: f64,
    seed: u64,
    straight_tolerance: f64,
    out_svg: Option<PathBuf>,
    out_csv: Option<PathBuf>,
}

fn resolve_common(common: &CommonArgs, file: &FileConfig) -> Result<Resolved, CliError> {
    let map = common
        .map
        .clone()
        .or_else(|| file.map.clone())
        .ok_or_else(|| CliError::Usage("--map is required".into()))?;
    let builtin = map == maps::COMPLEX_NAME;
    let point = |flag: Option<Point2>, key: Option<[f64; 2]>, fallback: Point2, name: &str| {
        flag.or(key.map(|[x, y]| Point2::new(x, y)))
            .or(builtin.then_some(fallback))
            .ok_or_else(|| CliError::Usage(format!("--{name} is required")))
    };
    let start = point(common.start, file.start, maps::COMPLEX_START, "start")?;
    let goal = point(common.goal, file.goal, maps::COMPLEX_GOAL, "goal")?;
    if start == goal {
        return Err(CliError::Usage("start and goal must differ".into()));
    }
    let inflate = common.inflate.or(file.inflate).unwrap_or(0.5);
    if !(inflate >= 0.0) {
        return Err(CliError::Usage(format!(
            "--inflate must be non-negative, got {inflate}"
        )));
    }
    let straight_tolerance = common
        .straight_tol
        .or(file.straight_tolerance)
        .unwrap_or(DEFAULT_STRAIGHT_TOLERANCE);
    if !(straight_tolerance > 0.0) {
        return Err(CliError::Usage("--straight-tol must be positive".into()));
    }
    Ok(Resolved {
        map,
        start,
        goal,
        inflate,
        seed: common.seed.or(file.seed).unwrap_or(0),
        straight_tolerance,
        out_svg: common.out_svg.clone().or_else(|| file.out_svg.clone()),
        out_csv: common.out_csv.clone().or_else(|| file.out_csv.clone()),
    })
}

fn load_file_config(path: Option<&PathBuf>) -> Result<FileConfig, CliError> {
    path.map_or(Ok(FileConfig::default()), |p| FileConfig::load(p))
}

impl RunConfig {
    pub fn resolve(args: &PlanArgs) -> Result<RunConfig, CliError> {
        let file = load_file_config(args.common.config.as_ref())?;
        let common = resolve_common(&args.common, &file)?;
        let nodes = match (args.nodes, &file.nodes) {
            (Some(n), _) => n,
            (None, Some(v)) => v.single("nodes")?,
            (None, None) => 3000,
        };
        let connection_distance = match (args.conn_dist, &file.conn_dist) {
            (Some(d), _) => d,
            (None, Some(v)) => v.single("conn_dist")?,
            (None, None) => 5.0,
        };
        if !(connection_distance > 0.0) {
            return Err(CliError::Usage("--conn-dist must be positive".into()));
        }
        Ok(RunConfig {
            map: common.map,
            start: common.start,
            goal: common.goal,
            nodes,
            connection_distance,
            inflation_radius: common.inflate,
            seed: common.seed,
            straight_tolerance: common.straight_tolerance,
            out_svg: common.out_svg,
            out_csv: common.out_csv,
            out_pure: args.out_pure.clone().or_else(|| file.out_pure.clone()),
            out_smooth: args.out_smooth.clone().or_else(|| file.out_smooth.clone()),
            out_roadmap: args
                .out_roadmap
                .clone()
                .or_else(|| file.out_roadmap.clone()),
            svg_roadmap: args.svg_roadmap,
        })
    }
}

pub fn load_map_arg(name: &str) -> Result<OccupancyGrid, CliError> {
    if name.starts_with("builtin:") {
        return maps::builtin(name)
            .ok_or_else(|| CliError::Usage(format!("unknown builtin map {name:?}")));
    }
    Ok(OccupancyGrid::from_path(name)?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(e.to_string()))
}

/// Runs the whole pipeline and writes the requested artifacts.
///
/// Nothing is written unless every stage succeeds.
pub fn cmd_plan(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let map = load_map_arg(&cfg.map)?;
    let pipeline = PipelineConfig {
        plan: PlanParams {
            nodes: cfg.nodes,
            connection_distance: cfg.connection_distance,
            seed: cfg.seed,
            inflation_radius: cfg.inflation_radius,
        },
        straight_tolerance: cfg.straight_tolerance,
        ..PipelineConfig::default()
    };
    let run = run_pipeline(&map, cfg.start, cfg.goal, &pipeline)?;

    if let Some(path) = &cfg.out_pure {
        write_file(path, &pathfile::polyline_to_text(run.pure()))?;
    }
    if let Some(path) = &cfg.out_smooth {
        write_file(path, &pathfile::smoothed_to_text(&run.smoothed))?;
    }
    if let Some(path) = &cfg.out_roadmap {
        write_file(path, &run.plan.roadmap.to_text())?;
    }
    if let Some(path) = &cfg.out_csv {
        write_file(path, &run.trajectory.to_csv())?;
    }
    if let Some(path) = &cfg.out_svg {
        let layers = Layers {
            inflated: Some(&run.plan.inflated),
            roadmap: cfg.svg_roadmap.then_some(&run.plan.roadmap),
            pure: Some(run.pure()),
            smoothed: Some(&run.smoothed),
        };
        write_file(path, &render_svg(&map, &layers))?;
    }
    emit(out, &format!("{}\n", run.summary()))
}

pub fn resolve_bench(args: &BenchArgs) -> Result<(String, BenchConfig, FileConfig), CliError> {
    let file = load_file_config(args.common.config.as_ref())?;
    let common = resolve_common(&args.common, &file)?;
    let mut cfg = BenchConfig::standard_matrix(common.start, common.goal);
    if let Some(n) = args
        .nodes
        .clone()
        .or_else(|| file.nodes.as_ref().map(OneOrMany::to_vec))
    {
        cfg.node_counts = n;
    }
    if let Some(d) = args
        .conn_dist
        .clone()
        .or_else(|| file.conn_dist.as_ref().map(OneOrMany::to_vec))
    {
        cfg.connection_distances = d;
    }
    if let Some(s) = args.seeds.or(file.seeds) {
        cfg.seeds = s;
    }
    cfg.seed_base = common.seed;
    cfg.inflation_radius = common.inflate;
    cfg.straight_tolerance = common.straight_tolerance;
    Ok((common.map, cfg, file))
}

/// Runs the benchmark matrix. The CSV goes to `--out-csv` or stdout; the
/// SVG shows the run with the shortest smoothed path.
pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (map_name, cfg, file) = resolve_bench(args)?;
    let map = load_map_arg(&map_name)?;
    let report = run_bench(&map, &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    let csv = report.to_csv(args.timings);

    let out_runs = args.out_runs.clone().or(file.out_runs);
    if let Some(path) = &out_runs {
        write_file(path, &report.runs_to_csv())?;
    }
    let out_svg = args.common.out_svg.clone().or(file.out_svg);
    if let Some(path) = &out_svg {
        let best = report.best_run().and_then(|r| r.result.as_ref().ok());
        let inflated = map.inflate(cfg.inflation_radius)?;
        let layers = Layers {
            inflated: Some(&inflated),
            roadmap: None,
            pure: best.map(|m| &m.pure),
            smoothed: best.map(|m| &m.smoothed),
        };
        write_file(path, &render_svg(&map, &layers))?;
    }
    match args.common.out_csv.clone().or(file.out_csv) {
        Some(path) => write_file(&path, &csv),
        None => emit(out, &csv),
    }
}

pub fn cmd_render(args: &RenderArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let map = load_map_arg(&args.map)?;
    let parse_err = |e: pathfile::PathFileError| CliError::Parse(e.to_string());
    let pure = args
        .pure
        .as_deref()
        .map(|p| read_file(p).and_then(|t| pathfile::parse_polyline(&t).map_err(parse_err)))
        .transpose()?;
    let smoothed = args
        .smooth
        .as_deref()
        .map(|p| read_file(p).and_then(|t| pathfile::parse_smoothed(&t).map_err(parse_err)))
        .transpose()?;
    let roadmap = args
        .roadmap
        .as_deref()
        .map(|p| {
            read_file(p)
                .and_then(|t| Roadmap::from_text(&t).map_err(|e| CliError::Parse(e.to_string())))
        })
        .transpose()?;
    let inflated = args.inflate.map(|r| map.inflate(r)).transpose()?;
    let svg = render_svg(
        &map,
        &Layers {
            inflated: inflated.as_ref(),
            roadmap: roadmap.as_ref(),
            pure: pure.as_ref(),
            smoothed: smoothed.as_ref(),
        },
    );
    match &args.out_svg {
        Some(path) => write_file(path, &svg),
        None => emit(out, &svg),
    }
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = read_file(&args.path)?;
    let smoothed = pathfile::parse_smoothed(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    let defaults = ControllerParams::default();
    let ctrl = ControllerParams {
        lookahead: args.lookahead.unwrap_or(defaults.lookahead),
        desired_linear_velocity: args.velocity.unwrap_or(defaults.desired_linear_velocity),
        max_angular_velocity: args.max_angular.unwrap_or(defaults.max_angular_velocity),
        goal_radius: args
            .goal_radius
            .or(args.lookahead)
            .unwrap_or(defaults.goal_radius),
    };
    let robot = RobotParams {
        sample_time: args
            .sample_time
            .unwrap_or(RobotParams::default().sample_time),
        ..RobotParams::default()
    };
    let traj = replay(PathRef::Smoothed(&smoothed), &robot, &ctrl)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    match &args.out_csv {
        Some(path) => {
            write_file(path, &traj.to_csv())?;
            emit(
                out,
                &format!(
                    "walking_time={} reached_goal={} path_length={}\n",
                    crate::geom::fmt9(traj.total_time),
                    traj.reached_goal,
                    crate::geom::fmt9(smoothed.length())
                ),
            )
        }
        None => emit(out, &traj.to_csv()),
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Plan(args) => cmd_plan(&RunConfig::resolve(args)?, out),
        Command::Bench(args) => cmd_bench(args, out),
        Command::Render(args) => cmd_render(args, out),
        Command::Simulate(args) => cmd_simulate(args, out),
    }
}

/// Maps a fillet failure raised outside the pipeline to its exit code.
impl From<FilletError> for CliError {
    fn from(e: FilletError) -> Self {
        CliError::Smoothing(e.to_string())
    }
}
