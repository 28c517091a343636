//! Pure-pursuit replay of planned paths on a differential-drive robot.
//!
//! The robot is integrated as a unicycle: each control period it drives at
//! the commanded linear velocity along a circular arc of curvature `ω / v`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::fillet::{Segment, SmoothedPath};
use crate::geom::{fmt9, wrap_pi, Point2};
use crate::roadmap::PolylinePath;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("path has no points")]
    EmptyPath,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotParams {
    /// Distance between the drive wheels, meters.
    pub track_width: f64,
    /// Control and integration period, seconds.
    pub sample_time: f64,
    /// Robot footprint edge, meters. Used for rendering only.
    pub frame_size: f64,
}

impl Default for RobotParams {
    fn default() -> Self {
        RobotParams {
            track_width: 1.0,
            sample_time: 0.1,
            frame_size: 1.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerParams {
    pub lookahead: f64,
    pub desired_linear_velocity: f64,
    pub max_angular_velocity: f64,
    pub goal_radius: f64,
}

impl Default for ControllerParams {
    fn default() -> Self {
        ControllerParams {
            lookahead: 0.3,
            desired_linear_velocity: 0.6,
            max_angular_velocity: 2.0,
            goal_radius: 0.3,
        }
    }
}

impl ControllerParams {
    /// Waypoint spacing used when densifying paths for this controller.
    pub fn waypoint_spacing(&self) -> f64 {
        self.lookahead / 3.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose { x, y, theta }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Body-frame velocity command applied for one sample period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Command {
    pub linear: f64,
    pub angular: f64,
}

impl Command {
    /// Left and right wheel ground speeds for a given track width.
    pub fn wheel_speeds(&self, track_width: f64) -> (f64, f64) {
        let half = self.angular * track_width / 2.0;
        (self.linear - half, self.linear + half)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `(t, pose)` with `t = k · sample_time`.
    pub samples: Vec<(f64, Pose)>,
    /// `commands[k]` moves the robot from sample `k` to `k + 1`.
    pub commands: Vec<Command>,
    pub total_time: f64,
    pub reached_goal: bool,
}

impl Trajectory {
    /// `t,x,y,theta` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y,theta\n");
        for (t, pose) in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt9(*t),
                fmt9(pose.x),
                fmt9(pose.y),
                fmt9(pose.theta)
            );
        }
        out
    }

    /// Largest distance covered in one period.
    pub fn max_step_displacement(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[0].1.position().distance(w[1].1.position()))
            .fold(0.0, f64::max)
    }
}

fn push_line(points: &mut Vec<Point2>, a: Point2, b: Point2, spacing: f64) {
    let len = a.distance(b);
    if len == 0.0 {
        return;
    }
    let steps = (len / spacing).ceil().max(1.0) as usize;
    for k in 1..steps {
        points.push(a.lerp(b, k as f64 / steps as f64));
    }
    points.push(b);
}

/// Waypoints along a polyline, at most `spacing` apart, endpoints included.
pub fn densify_polyline(nodes: &[Point2], spacing: f64) -> Vec<Point2> {
    let mut points = Vec::new();
    if let Some(&first) = nodes.first() {
        points.push(first);
        for w in nodes.windows(2) {
            push_line(&mut points, w[0], w[1], spacing);
        }
    }
    points
}

/// Waypoints along lines and arcs; arc points lie exactly on their circle.
pub fn densify_smoothed(path: &SmoothedPath, spacing: f64) -> Vec<Point2> {
    let mut points = vec![path.start()];
    for seg in path.segments() {
        let last = points[points.len() - 1];
        match seg {
            Segment::Line { end, .. } => push_line(&mut points, last, *end, spacing),
            Segment::Arc(arc) => {
                if arc.length() == 0.0 {
                    continue;
                }
                let steps = (arc.length() / spacing).ceil().max(1.0) as usize;
                for k in 1..=steps {
                    points.push(arc.point_at(k as f64 / steps as f64));
                }
            }
        }
    }
    points
}

/// Either kind of planned path.
#[derive(Debug, Clone, Copy)]
pub enum PathRef<'a> {
    Polyline(&'a PolylinePath),
    Smoothed(&'a SmoothedPath),
}

impl PathRef<'_> {
    pub fn densify(&self, spacing: f64) -> Vec<Point2> {
        match self {
            PathRef::Polyline(p) => densify_polyline(p.nodes(), spacing),
            PathRef::Smoothed(s) => densify_smoothed(s, spacing),
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            PathRef::Polyline(p) => p.length(),
            PathRef::Smoothed(s) => s.length(),
        }
    }
}

pub fn densify(path: PathRef<'_>, spacing: f64) -> Vec<Point2> {
    path.densify(spacing)
}

fn check_positive(name: &str, value: f64) -> Result<(), SimError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(SimError::InvalidParameter(format!(
            "{name} must be positive, got {value}"
        )))
    }
}

/// Tracks `points` with pure pursuit until the goal radius or `timeout` is reached.
///
/// Each period the lookahead point is the first waypoint at or beyond the
/// current progress index that is at least `lookahead` away from the robot.
/// The turn rate follows the curvature law `κ = 2 sin(e) / L`, clamped to the
/// maximum angular velocity.
pub fn pure_pursuit_follow(
    points: &[Point2],
    start: Pose,
    robot: &RobotParams,
    ctrl: &ControllerParams,
    timeout: f64,
) -> Result<Trajectory, SimError> {
    if points.is_empty() {
        return Err(SimError::EmptyPath);
    }
    check_positive("sample_time", robot.sample_time)?;
    check_positive("track_width", robot.track_width)?;
    check_positive("lookahead", ctrl.lookahead)?;
    check_positive("desired_linear_velocity", ctrl.desired_linear_velocity)?;
    check_positive("max_angular_velocity", ctrl.max_angular_velocity)?;
    check_positive("goal_radius", ctrl.goal_radius)?;
    if !(timeout >= 0.0) {
        return Err(SimError::InvalidParameter(format!(
            "timeout must be non-negative, got {timeout}"
        )));
    }

    let goal = points[points.len() - 1];
    let dt = robot.sample_time;
    let v = ctrl.desired_linear_velocity;
    let mut arclen = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            acc += points[i - 1].distance(*p);
        }
        arclen.push(acc);
    }
    // nearest-point search stays within this much path ahead of the progress index
    let window = ctrl.lookahead + 2.0 * v * dt;

    let mut pose = start;
    let mut samples = vec![(0.0, pose)];
    let mut commands = Vec::new();
    let mut progress = 0usize;
    let mut step = 0usize;
    loop {
        let t = step as f64 * dt;
        let here = pose.position();
        if here.distance(goal) <= ctrl.goal_radius {
            return Ok(Trajectory {
                samples,
                commands,
                total_time: t,
                reached_goal: true,
            });
        }
        if t >= timeout {
            return Ok(Trajectory {
                samples,
                commands,
                total_time: t,
                reached_goal: false,
            });
        }

        let limit = arclen[progress] + window;
        let mut best = (here.distance(points[progress]), progress);
        let mut j = progress + 1;
        while j < points.len() && arclen[j] <= limit {
            let d = here.distance(points[j]);
            if d < best.0 {
                best = (d, j);
            }
            j += 1;
        }
        progress = best.1;

        let target = points[progress..]
            .iter()
            .copied()
            .find(|p| here.distance(*p) >= ctrl.lookahead)
            .unwrap_or(goal);
        let heading_error = wrap_pi((target - here).angle() - pose.theta);
        let angular = (2.0 * v * heading_error.sin() / ctrl.lookahead)
            .clamp(-ctrl.max_angular_velocity, ctrl.max_angular_velocity);
        let cmd = Command { linear: v, angular };
        pose = integrate(pose, cmd, dt);
        commands.push(cmd);
        step += 1;
        samples.push((step as f64 * dt, pose));
    }
}

/// Exact unicycle motion under a constant command.
pub fn integrate(pose: Pose, cmd: Command, dt: f64) -> Pose {
    let dtheta = cmd.angular * dt;
    let (x, y) = if dtheta.abs() < 1e-12 {
        (
            pose.x + cmd.linear * dt * pose.theta.cos(),
            pose.y + cmd.linear * dt * pose.theta.sin(),
        )
    } else {
        let r = cmd.linear / cmd.angular;
        (
            pose.x + r * ((pose.theta + dtheta).sin() - pose.theta.sin()),
            pose.y - r * ((pose.theta + dtheta).cos() - pose.theta.cos()),
        )
    };
    Pose::new(x, y, wrap_pi(pose.theta + dtheta))
}

/// Replays a path with the default waypoint spacing and timeout.
///
/// The robot starts on the first waypoint facing along the first segment.
/// The timeout is ten times the nominal traversal time.
pub fn replay(
    path: PathRef<'_>,
    robot: &RobotParams,
    ctrl: &ControllerParams,
) -> Result<Trajectory, SimError> {
    let points = path.densify(ctrl.waypoint_spacing());
    let start = points.first().copied().ok_or(SimError::EmptyPath)?;
    let heading = points
        .iter()
        .find(|p| **p != start)
        .map_or(0.0, |p| (*p - start).angle());
    let timeout = 10.0 * path.length() / ctrl.desired_linear_velocity;
    pure_pursuit_follow(
        &points,
        Pose::new(start.x, start.y, heading),
        robot,
        ctrl,
        timeout,
    )
}
