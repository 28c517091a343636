//! Corner smoothing with tangent circular arcs.
//!
//! Each interior node of a polyline is replaced by an arc of the circle that
//! touches both incident edges at distance `h` from the corner, where `h` is
//! half the shorter edge. With interior angle `α` the radius is
//! `r = tan(α/2) · h` and the arc spans `π − α`. Because every corner
//! consumes at most half of each incident edge, neighbouring fillets never
//! overlap; on an edge shared by two equally short neighbours the arcs meet
//! head to tail with a zero-length line between them.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geom::{wrap_pi, wrap_two_pi, Point2};
use crate::gridmap::OccupancyGrid;
use crate::roadmap::PolylinePath;

/// Corners within this angle of a straight line are kept as plain vertices.
pub const DEFAULT_STRAIGHT_TOLERANCE: f64 = 1e-6;
/// Corners sharper than this are rejected as path reversals.
pub const DEFAULT_REVERSAL_TOLERANCE: f64 = 1e-6;
/// Arc clearance samples are at most this many cells apart.
pub const CLEARANCE_SAMPLE_CELLS: f64 = 0.1;

const RADIUS_MATCH_TOLERANCE: f64 = 1e-9;
const CENTER_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilletError {
    #[error("degenerate corner: {0}")]
    DegenerateCorner(String),
    #[error("corner angle {alpha} is within the straight tolerance of π")]
    StraightCorner { alpha: f64 },
    #[error("corner angle {alpha} is a path reversal")]
    Reversal { alpha: f64 },
    #[error("path reverses direction at corner {corner_index} (angle {alpha})")]
    ReversalAt { corner_index: usize, alpha: f64 },
    #[error("no circle of radius {radius} passes through points {distance} apart")]
    NoSolution { distance: f64, radius: f64 },
    #[error("tangent points coincide; circle center is ambiguous")]
    AmbiguousCenter,
    #[error("zero radius arc")]
    ZeroRadius,
    #[error("path has fewer than two distinct nodes")]
    DegeneratePath,
}

/// Euclidean distance between two nodes.
#[inline]
pub fn edge_length(p: Point2, q: Point2) -> f64 {
    p.distance(q)
}

/// Total length of the polyline.
pub fn path_length(path: &PolylinePath) -> f64 {
    path.nodes()
        .windows(2)
        .map(|w| edge_length(w[0], w[1]))
        .sum()
}

/// Interior angle at `p1` between rays `p1→p0` and `p1→p2`, in (0, π].
pub fn corner_angle(p0: Point2, p1: Point2, p2: Point2) -> Result<f64, FilletError> {
    if p0 == p1 || p1 == p2 {
        return Err(FilletError::DegenerateCorner(format!(
            "coincident nodes around corner {p1}"
        )));
    }
    let incoming = (p0 - p1).angle();
    let outgoing = (p2 - p1).angle();
    let alpha = wrap_pi(incoming - outgoing).abs();
    if alpha == 0.0 {
        // exact reversal; report the smallest positive angle instead of zero
        return Ok(f64::MIN_POSITIVE);
    }
    Ok(alpha)
}

/// Where the fillet meets the two edges of a corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentPoints {
    /// On the incoming edge.
    pub start: Point2,
    /// On the outgoing edge.
    pub end: Point2,
    /// Distance from the corner to either point: half the shorter edge.
    pub tangent_length: f64,
}

/// Tangent points at distance `h = min(|p0p1|, |p1p2|) / 2` from the corner `p1`.
///
/// The point on the shorter edge is that edge's midpoint. On the longer edge
/// the point is interpolated from the corner by the ratio `h / length`, which
/// gives equal tangent lengths on both sides.
pub fn tangent_points(p0: Point2, p1: Point2, p2: Point2) -> Result<TangentPoints, FilletError> {
    let incoming = edge_length(p0, p1);
    let outgoing = edge_length(p1, p2);
    if incoming == 0.0 || outgoing == 0.0 {
        return Err(FilletError::DegenerateCorner(format!(
            "zero-length edge at corner {p1}"
        )));
    }
    if incoming < outgoing {
        let h = incoming / 2.0;
        Ok(TangentPoints {
            start: p0.midpoint(p1),
            end: p1.lerp(p2, h / outgoing),
            tangent_length: h,
        })
    } else {
        let h = outgoing / 2.0;
        Ok(TangentPoints {
            start: p1.lerp(p0, h / incoming),
            end: p1.midpoint(p2),
            tangent_length: h,
        })
    }
}

/// `r = tan(α/2) · h`, rejecting near-straight and reversed corners.
pub fn fillet_radius(alpha: f64, tangent_length: f64) -> Result<f64, FilletError> {
    fillet_radius_with(
        alpha,
        tangent_length,
        DEFAULT_STRAIGHT_TOLERANCE,
        DEFAULT_REVERSAL_TOLERANCE,
    )
}

pub fn fillet_radius_with(
    alpha: f64,
    tangent_length: f64,
    straight_tolerance: f64,
    reversal_tolerance: f64,
) -> Result<f64, FilletError> {
    if !(tangent_length > 0.0) {
        return Err(FilletError::DegenerateCorner(format!(
            "tangent length must be positive, got {tangent_length}"
        )));
    }
    if alpha >= PI - straight_tolerance {
        return Err(FilletError::StraightCorner { alpha });
    }
    if alpha <= reversal_tolerance {
        return Err(FilletError::Reversal { alpha });
    }
    Ok((alpha / 2.0).tan() * tangent_length)
}

/// Both intersections of the radius-`r` circles around `a` and `b`.
pub fn circle_centers(a: Point2, b: Point2, r: f64) -> Result<(Point2, Point2), FilletError> {
    let chord = b - a;
    let d = chord.norm();
    if d == 0.0 {
        return Err(FilletError::AmbiguousCenter);
    }
    if d > 2.0 * r + RADIUS_MATCH_TOLERANCE {
        return Err(FilletError::NoSolution {
            distance: d,
            radius: r,
        });
    }
    let half = d / 2.0;
    let offset = (r * r - half * half).max(0.0).sqrt();
    let mid = a.midpoint(b);
    let normal = chord.perp() * (1.0 / d);
    Ok((mid + normal * offset, mid - normal * offset))
}

/// The chosen fillet center and whether the choice was a tie.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterChoice {
    pub center: Point2,
    pub degenerate: bool,
}

/// Picks the candidate farther from the corner; the nearer one bulges the wrong way.
pub fn select_center(corner: Point2, c1: Point2, c2: Point2) -> CenterChoice {
    let d1 = corner.distance(c1);
    let d2 = corner.distance(c2);
    if c1 != c2 && (d1 - d2).abs() <= CENTER_TIE_TOLERANCE * d1.max(d2).max(1.0) {
        return CenterChoice {
            center: c1,
            degenerate: true,
        };
    }
    CenterChoice {
        center: if d2 > d1 { c2 } else { c1 },
        degenerate: false,
    }
}

/// Start angle in [0, 2π) and signed sweep of the minor arc from `a` to `b`.
///
/// The magnitude comes from the angle between the radial vectors, the sign
/// from their cross product (positive is counter-clockwise).
pub fn arc_params(center: Point2, a: Point2, b: Point2) -> Result<(f64, f64), FilletError> {
    let ra = a - center;
    let rb = b - center;
    let (na, nb) = (ra.norm(), rb.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(FilletError::ZeroRadius);
    }
    if (na - nb).abs() > RADIUS_MATCH_TOLERANCE * na.max(1.0) {
        return Err(FilletError::DegenerateCorner(format!(
            "points are {na} and {nb} from the center"
        )));
    }
    let start = wrap_two_pi(ra.angle());
    let cross = ra.cross(rb);
    let magnitude = cross.abs().atan2(ra.dot(rb));
    let sweep = if cross < 0.0 { -magnitude } else { magnitude };
    Ok((start, sweep))
}

/// One corner's fillet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilletArc {
    pub center: Point2,
    pub radius: f64,
    /// Where the arc leaves the incoming edge.
    pub tangent_start: Point2,
    /// Where the arc joins the outgoing edge.
    pub tangent_end: Point2,
    /// Angle of `tangent_start` seen from the center, in [0, 2π).
    pub start_angle: f64,
    /// Signed angular extent; positive is counter-clockwise.
    pub sweep: f64,
    /// The polyline node this arc replaces.
    pub corner: Point2,
    pub half_angle: f64,
    pub corner_angle: f64,
    pub tangent_length: f64,
    /// Set when the two candidate centers were equidistant from the corner.
    pub degenerate: bool,
}

impl FilletArc {
    pub fn length(&self) -> f64 {
        self.radius * self.sweep.abs()
    }

    /// Point at angular offset `t · sweep` from the start, `t ∈ [0, 1]`.
    pub fn point_at(&self, t: f64) -> Point2 {
        self.center + Point2::from_polar(self.radius, self.start_angle + t * self.sweep)
    }

    /// Unit direction of travel at angular fraction `t`.
    pub fn tangent_at(&self, t: f64) -> Point2 {
        let radial = Point2::from_polar(1.0, self.start_angle + t * self.sweep);
        if self.sweep >= 0.0 {
            radial.perp()
        } else {
            -radial.perp()
        }
    }

    /// Direction of travel at the start, derived from the stored tangent point.
    pub fn start_direction(&self) -> Point2 {
        self.travel_direction(self.tangent_start)
    }

    pub fn end_direction(&self) -> Point2 {
        self.travel_direction(self.tangent_end)
    }

    fn travel_direction(&self, on_circle: Point2) -> Point2 {
        let radial = on_circle - self.center;
        let unit = radial * (1.0 / radial.norm());
        if self.sweep >= 0.0 {
            unit.perp()
        } else {
            -unit.perp()
        }
    }

    /// Rebuilds an arc from its center, radius, start angle and sweep.
    ///
    /// The corner is recovered as the intersection of the end tangents.
    pub fn from_center_sweep(
        center: Point2,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    ) -> FilletArc {
        let tangent_start = center + Point2::from_polar(radius, start_angle);
        let tangent_end = center + Point2::from_polar(radius, start_angle + sweep);
        let corner_angle = PI - sweep.abs();
        let half_angle = corner_angle / 2.0;
        let bisector = start_angle + sweep / 2.0;
        let corner = center + Point2::from_polar(radius / (sweep / 2.0).cos(), bisector);
        FilletArc {
            center,
            radius,
            tangent_start,
            tangent_end,
            start_angle: wrap_two_pi(start_angle),
            sweep,
            corner,
            half_angle,
            corner_angle,
            tangent_length: radius / half_angle.tan(),
            degenerate: false,
        }
    }
}

/// Builds the fillet for corner `p1` using the default tolerances.
pub fn fillet_corner(p0: Point2, p1: Point2, p2: Point2) -> Result<FilletArc, FilletError> {
    fillet_corner_with(p0, p1, p2, &SmoothOptions::default())
}

pub fn fillet_corner_with(
    p0: Point2,
    p1: Point2,
    p2: Point2,
    opts: &SmoothOptions<'_>,
) -> Result<FilletArc, FilletError> {
    let alpha = corner_angle(p0, p1, p2)?;
    let tangents = tangent_points(p0, p1, p2)?;
    let radius = fillet_radius_with(
        alpha,
        tangents.tangent_length,
        opts.straight_tolerance,
        opts.reversal_tolerance,
    )?;
    let (c1, c2) = circle_centers(tangents.start, tangents.end, radius)?;
    let choice = select_center(p1, c1, c2);
    let (start_angle, sweep) = arc_params(choice.center, tangents.start, tangents.end)?;
    let arc = FilletArc {
        center: choice.center,
        radius,
        tangent_start: tangents.start,
        tangent_end: tangents.end,
        start_angle,
        sweep,
        corner: p1,
        half_angle: alpha / 2.0,
        corner_angle: alpha,
        tangent_length: tangents.tangent_length,
        degenerate: choice.degenerate,
    };
    debug_assert!(
        arc_bulges_toward_corner(&arc),
        "cross-product sweep disagrees with the corner-side test at {p1}"
    );
    Ok(arc)
}

/// The fillet must lie between its chord and the corner.
fn arc_bulges_toward_corner(arc: &FilletArc) -> bool {
    let chord = arc.tangent_end - arc.tangent_start;
    if chord.norm() <= 1e-12 * arc.radius.max(1.0) {
        return true;
    }
    let mid = arc.point_at(0.5);
    let side_mid = chord.cross(mid - arc.tangent_start);
    let side_corner = chord.cross(arc.corner - arc.tangent_start);
    side_mid * side_corner >= 0.0
}

#[derive(Debug, Clone, Copy)]
pub struct SmoothOptions<'a> {
    pub straight_tolerance: f64,
    pub reversal_tolerance: f64,
    /// When set, arcs are sampled and checked against this grid.
    pub grid: Option<&'a OccupancyGrid>,
}

impl Default for SmoothOptions<'_> {
    fn default() -> Self {
        SmoothOptions {
            straight_tolerance: DEFAULT_STRAIGHT_TOLERANCE,
            reversal_tolerance: DEFAULT_REVERSAL_TOLERANCE,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { start: Point2, end: Point2 },
    Arc(FilletArc),
}

impl Segment {
    pub fn start(&self) -> Point2 {
        match self {
            Segment::Line { start, .. } => *start,
            Segment::Arc(arc) => arc.tangent_start,
        }
    }

    pub fn end(&self) -> Point2 {
        match self {
            Segment::Line { end, .. } => *end,
            Segment::Arc(arc) => arc.tangent_end,
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            Segment::Line { start, end } => edge_length(*start, *end),
            Segment::Arc(arc) => arc.length(),
        }
    }
}

/// An arc that touches an occupied or out-of-bounds cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearanceViolation {
    /// Index of the replaced node in the source polyline.
    pub corner_index: usize,
    /// First offending sample along the arc.
    pub point: Point2,
    pub blocked_samples: usize,
}

/// Lines and arcs from start to goal.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedPath {
    segments: Vec<Segment>,
    /// Source-polyline index of each arc's corner, parallel to the arcs.
    arc_corners: Vec<usize>,
    violations: Vec<ClearanceViolation>,
}

impl SmoothedPath {
    /// Wraps segments that already share endpoints.
    pub fn from_segments(segments: Vec<Segment>) -> Result<SmoothedPath, FilletError> {
        if segments.is_empty() {
            return Err(FilletError::DegeneratePath);
        }
        for (i, pair) in segments.windows(2).enumerate() {
            let gap = pair[0].end().distance(pair[1].start());
            if gap > 1e-6 {
                return Err(FilletError::DegenerateCorner(format!(
                    "segments {i} and {} are {gap} apart",
                    i + 1
                )));
            }
        }
        let arcs = segments
            .iter()
            .filter(|s| matches!(s, Segment::Arc(_)))
            .count();
        Ok(SmoothedPath {
            segments,
            arc_corners: (0..arcs).collect(),
            violations: Vec::new(),
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn arcs(&self) -> impl Iterator<Item = &FilletArc> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Arc(a) => Some(a),
            Segment::Line { .. } => None,
        })
    }

    pub fn arc_count(&self) -> usize {
        self.arcs().count()
    }

    pub fn arc_corner_indices(&self) -> &[usize] {
        &self.arc_corners
    }

    pub fn start(&self) -> Point2 {
        self.segments[0].start()
    }

    pub fn goal(&self) -> Point2 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn length(&self) -> f64 {
        smoothed_length(self)
    }

    /// Arcs that failed the optional grid check.
    pub fn violations(&self) -> &[ClearanceViolation] {
        &self.violations
    }
}

/// Lines plus `r · |sweep|` for every arc.
pub fn smoothed_length(path: &SmoothedPath) -> f64 {
    path.segments.iter().map(Segment::length).sum()
}

/// Replaces every interior corner of `path` with its fillet.
///
/// Consecutive duplicate nodes are dropped first. Near-straight corners stay
/// as plain vertices. A near-reversal aborts with the offending corner index.
pub fn smooth_path(
    path: &PolylinePath,
    opts: &SmoothOptions<'_>,
) -> Result<SmoothedPath, FilletError> {
    let mut nodes: Vec<(usize, Point2)> = Vec::with_capacity(path.len());
    for (i, &p) in path.nodes().iter().enumerate() {
        if nodes.last().is_none_or(|&(_, q)| q != p) {
            nodes.push((i, p));
        }
    }
    if nodes.len() < 2 {
        return Err(FilletError::DegeneratePath);
    }

    let mut segments = Vec::with_capacity(2 * nodes.len());
    let mut arc_corners = Vec::new();
    let mut cursor = nodes[0].1;
    for w in nodes.windows(3) {
        let (p0, (index, p1), p2) = (w[0].1, w[1], w[2].1);
        let alpha = corner_angle(p0, p1, p2)?;
        if (alpha - PI).abs() < opts.straight_tolerance {
            segments.push(Segment::Line {
                start: cursor,
                end: p1,
            });
            cursor = p1;
            continue;
        }
        if alpha <= opts.reversal_tolerance {
            return Err(FilletError::ReversalAt {
                corner_index: index,
                alpha,
            });
        }
        let arc = fillet_corner_with(p0, p1, p2, opts)?;
        segments.push(Segment::Line {
            start: cursor,
            end: arc.tangent_start,
        });
        segments.push(Segment::Arc(arc));
        arc_corners.push(index);
        cursor = arc.tangent_end;
    }
    segments.push(Segment::Line {
        start: cursor,
        end: nodes[nodes.len() - 1].1,
    });

    let mut smoothed = SmoothedPath {
        segments,
        arc_corners,
        violations: Vec::new(),
    };
    if let Some(grid) = opts.grid {
        smoothed.violations = check_clearance(&smoothed, grid);
    }
    Ok(smoothed)
}

/// Samples every arc at most [`CLEARANCE_SAMPLE_CELLS`] apart and reports blocked ones.
pub fn check_clearance(path: &SmoothedPath, grid: &OccupancyGrid) -> Vec<ClearanceViolation> {
    let spacing = CLEARANCE_SAMPLE_CELLS / grid.resolution();
    path.arcs()
        .zip(path.arc_corners.iter())
        .filter_map(|(arc, &corner_index)| {
            let steps = (arc.length() / spacing).ceil().max(1.0) as usize;
            let mut first = None;
            let mut blocked = 0;
            for k in 0..=steps {
                let p = arc.point_at(k as f64 / steps as f64);
                if !grid.is_free(p) {
                    blocked += 1;
                    first.get_or_insert(p);
                }
            }
            first.map(|point| ClearanceViolation {
                corner_index,
                point,
                blocked_samples: blocked,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn edge_lengths() {
        assert_eq!(edge_length(p(0.0, 0.0), p(3.0, 4.0)), 5.0);
        assert_eq!(edge_length(p(2.0, 2.0), p(2.0, 2.0)), 0.0);
        assert_eq!(edge_length(p(1.0, 1.0), p(-2.0, 5.0)), 5.0);
    }

    #[test]
    fn corner_angles() {
        assert!(
            (corner_angle(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)).unwrap() - FRAC_PI_2).abs()
                < 1e-15
        );
        assert_eq!(
            corner_angle(p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)).unwrap(),
            PI
        );
        let below = corner_angle(p(0.0, 0.0), p(1.0, 0.0), p(2.0, -1e-6)).unwrap();
        let above = corner_angle(p(0.0, 0.0), p(1.0, 0.0), p(2.0, 1e-6)).unwrap();
        assert_eq!(below, above);
        assert!(matches!(
            corner_angle(p(0.0, 0.0), p(0.0, 0.0), p(1.0, 0.0)),
            Err(FilletError::DegenerateCorner(_))
        ));
    }

    #[test]
    fn tangent_points_equal_edges() {
        let t = tangent_points(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)).unwrap();
        assert_eq!(t.start, p(0.5, 0.0));
        assert_eq!(t.end, p(1.0, 0.5));
        assert_eq!(t.tangent_length, 0.5);
    }

    #[test]
    fn tangent_points_unequal_edges() {
        let t = tangent_points(p(0.0, 0.0), p(2.0, 0.0), p(2.0, 1.0)).unwrap();
        assert_eq!(t.tangent_length, 0.5);
        assert_eq!(t.start, p(1.5, 0.0));
        assert_eq!(t.end, p(2.0, 0.5));
        let t = tangent_points(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 3.0)).unwrap();
        assert_eq!(t.start, p(0.5, 0.0));
        assert_eq!(t.end, p(1.0, 0.5));
    }

    #[test]
    fn tangent_points_collinear_passthrough() {
        let t = tangent_points(p(0.0, 0.0), p(1.0, 0.0), p(3.0, 0.0)).unwrap();
        assert_eq!(t.start, p(0.5, 0.0));
        assert_eq!(t.end, p(1.5, 0.0));
        assert_eq!(t.tangent_length, 0.5);
        assert!(tangent_points(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 0.0)).is_err());
    }

    #[test]
    fn radius_formula_and_signals() {
        assert!((fillet_radius(FRAC_PI_2, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((fillet_radius(FRAC_PI_3, 1.0).unwrap() - 0.577_350_269_189_625_8).abs() < 1e-15);
        assert!(matches!(
            fillet_radius(PI - 1e-7, 1.0),
            Err(FilletError::StraightCorner { .. })
        ));
        assert!(matches!(
            fillet_radius(1e-7, 1.0),
            Err(FilletError::Reversal { .. })
        ));
    }

    #[test]
    fn two_circle_centers() {
        let (c1, c2) = circle_centers(p(0.5, 0.0), p(1.0, 0.5), 0.5).unwrap();
        let mut got = [c1, c2];
        got.sort_by(|a, b| a.x.total_cmp(&b.x));
        assert!(got[0].distance(p(0.5, 0.5)) < 1e-15);
        assert!(got[1].distance(p(1.0, 0.0)) < 1e-15);

        let (c1, c2) = circle_centers(p(-1.0, 0.0), p(1.0, 0.0), 1.0).unwrap();
        assert_eq!(c1, p(0.0, 0.0));
        assert_eq!(c2, p(0.0, 0.0));

        assert_eq!(
            circle_centers(p(1.0, 1.0), p(1.0, 1.0), 2.0),
            Err(FilletError::AmbiguousCenter)
        );
        assert!(matches!(
            circle_centers(p(0.0, 0.0), p(3.0, 0.0), 1.0),
            Err(FilletError::NoSolution { .. })
        ));
    }

    #[test]
    fn center_selection() {
        let choice = select_center(p(1.0, 0.0), p(0.5, 0.5), p(1.0, 0.0));
        assert_eq!(choice.center, p(0.5, 0.5));
        assert!(!choice.degenerate);
        let choice = select_center(p(1.0, 0.0), p(1.0, 0.0), p(0.5, 0.5));
        assert_eq!(choice.center, p(0.5, 0.5));
        let same = select_center(p(0.0, 0.0), p(2.0, 2.0), p(2.0, 2.0));
        assert_eq!(same.center, p(2.0, 2.0));
        assert!(!same.degenerate);
        let tie = select_center(p(0.0, 0.0), p(1.0, 0.0), p(-1.0, 0.0));
        assert_eq!(tie.center, p(1.0, 0.0));
        assert!(tie.degenerate);
    }

    #[test]
    fn arc_params_l_corner() {
        let (s, sweep) = arc_params(p(0.5, 0.5), p(0.5, 0.0), p(1.0, 0.5)).unwrap();
        assert!((s - 3.0 * FRAC_PI_2).abs() < 1e-15);
        // counter-clockwise from 3π/2 to 2π passes (0.85, 0.15), between chord and corner
        assert!((sweep - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn arc_params_edge_cases() {
        let (_, sweep) = arc_params(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 0.0)).unwrap();
        assert_eq!(sweep, 0.0);
        let (_, sweep) = arc_params(p(0.0, 0.0), p(1.0, 0.0), p(-1.0, 0.0)).unwrap();
        assert_eq!(sweep.abs(), PI);
        assert_eq!(
            arc_params(p(0.0, 0.0), p(0.0, 0.0), p(1.0, 0.0)),
            Err(FilletError::ZeroRadius)
        );
    }

    #[test]
    fn l_path_smoothing() {
        let path = PolylinePath::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)]).unwrap();
        let s = smooth_path(&path, &SmoothOptions::default()).unwrap();
        assert_eq!(s.segments().len(), 3);
        assert_eq!(
            s.segments()[0],
            Segment::Line {
                start: p(0.0, 0.0),
                end: p(0.5, 0.0)
            }
        );
        let arc = s.arcs().next().unwrap();
        assert!(arc.center.distance(p(0.5, 0.5)) < 1e-15);
        assert!((arc.radius - 0.5).abs() < 1e-15);
        assert_eq!(
            s.segments()[2],
            Segment::Line {
                start: p(1.0, 0.5),
                end: p(1.0, 1.0)
            }
        );
        assert!((smoothed_length(&s) - (1.0 + FRAC_PI_4)).abs() < 1e-12);
        assert_eq!(path_length(&path), 2.0);
        assert_eq!(s.arc_corner_indices(), &[1]);
    }

    #[test]
    fn two_node_path_has_no_arcs() {
        let path = PolylinePath::new(vec![p(0.0, 0.0), p(3.0, 4.0)]).unwrap();
        let s = smooth_path(&path, &SmoothOptions::default()).unwrap();
        assert_eq!(s.arc_count(), 0);
        assert_eq!(s.segments().len(), 1);
        assert_eq!(smoothed_length(&s), 5.0);
        assert_eq!(path_length(&path), 5.0);
    }

    #[test]
    fn collinear_interior_nodes_are_kept() {
        let path =
            PolylinePath::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(2.5, 0.0), p(4.0, 0.0)]).unwrap();
        let s = smooth_path(&path, &SmoothOptions::default()).unwrap();
        assert_eq!(s.arc_count(), 0);
        assert_eq!(smoothed_length(&s), path_length(&path));
        assert_eq!(s.goal(), p(4.0, 0.0));
    }

    #[test]
    fn staircase_arcs_meet_at_midpoints() {
        let path =
            PolylinePath::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(2.0, 1.0)]).unwrap();
        let s = smooth_path(&path, &SmoothOptions::default()).unwrap();
        let arcs: Vec<_> = s.arcs().collect();
        assert_eq!(arcs.len(), 2);
        assert_eq!(arcs[0].tangent_end, p(1.0, 0.5));
        assert_eq!(arcs[1].tangent_start, p(1.0, 0.5));
        assert_eq!(arcs[0].sweep.signum(), -arcs[1].sweep.signum());
        // zero-length joining line between the two arcs
        assert_eq!(s.segments()[2].length(), 0.0);
    }

    #[test]
    fn duplicates_are_removed() {
        let path = PolylinePath::new(vec![
            p(0.0, 0.0),
            p(0.0, 0.0),
            p(1.0, 0.0),
            p(1.0, 1.0),
            p(1.0, 1.0),
        ])
        .unwrap();
        let s = smooth_path(&path, &SmoothOptions::default()).unwrap();
        assert_eq!(s.arc_count(), 1);
        assert_eq!(s.arc_corner_indices(), &[2]);
        assert_eq!(s.start(), p(0.0, 0.0));
        assert_eq!(s.goal(), p(1.0, 1.0));
        let all_same = PolylinePath::new(vec![p(1.0, 1.0), p(1.0, 1.0)]).unwrap();
        assert_eq!(
            smooth_path(&all_same, &SmoothOptions::default()),
            Err(FilletError::DegeneratePath)
        );
    }

    #[test]
    fn reversal_is_an_error() {
        let path =
            PolylinePath::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(0.5, 0.0)]).unwrap();
        assert!(matches!(
            smooth_path(&path, &SmoothOptions::default()),
            Err(FilletError::ReversalAt {
                corner_index: 2,
                ..
            })
        ));
    }

    #[test]
    fn clearance_check_reports_blocked_arcs() {
        let grid = OccupancyGrid::from_cells(4, 4, 1.0, {
            let mut c = vec![false; 16];
            c[5] = true; // cell (1, 1)
            c
        })
        .unwrap();
        // corner at (2.5, 0.5) -> arc stays in row 0 and column 2
        let clear = PolylinePath::new(vec![p(0.5, 0.5), p(2.5, 0.5), p(2.5, 2.5)]).unwrap();
        let opts = SmoothOptions {
            grid: Some(&grid),
            ..SmoothOptions::default()
        };
        assert!(smooth_path(&clear, &opts).unwrap().violations().is_empty());
        // the fillet starts inside the blocked cell (1, 1)
        let blocked = PolylinePath::new(vec![p(1.5, 3.5), p(1.5, 0.5), p(3.5, 0.5)]).unwrap();
        let s = smooth_path(&blocked, &opts).unwrap();
        assert_eq!(s.violations().len(), 1);
        assert_eq!(s.violations()[0].corner_index, 1);
    }

    #[test]
    fn rebuild_arc_from_center_and_sweep() {
        let arc = fillet_corner(p(0.0, 0.0), p(2.0, 0.0), p(3.0, 1.5)).unwrap();
        let back = FilletArc::from_center_sweep(arc.center, arc.radius, arc.start_angle, arc.sweep);
        assert!(back.corner.distance(arc.corner) < 1e-12);
        assert!(back.tangent_start.distance(arc.tangent_start) < 1e-12);
        assert!(back.tangent_end.distance(arc.tangent_end) < 1e-12);
        assert!((back.tangent_length - arc.tangent_length).abs() < 1e-12);
    }
}
