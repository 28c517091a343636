//! Text and SVG encodings of planned paths.
//!
//! The text format has one element per line, every number printed with nine
//! fractional digits:
//!
//! ```text
//! L x1 y1 x2 y2          straight segment
//! A cx cy r s sweep      arc: center, radius, start angle, signed sweep
//! ```
//!
//! A pure polyline is written as consecutive `L` lines. Blank lines and lines
//! starting with `#` are ignored when parsing.

use std::fmt::Write as _;

use thiserror::Error;

use crate::fillet::{FilletArc, Segment, SmoothedPath};
use crate::geom::{fmt9, Point2};
use crate::roadmap::PolylinePath;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathFileError {
    #[error("path file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("path file is empty")]
    Empty,
    #[error("path file segments are not connected: {0}")]
    Disconnected(String),
}

pub fn segments_to_text(segments: &[Segment]) -> String {
    let mut out = String::new();
    for seg in segments {
        match seg {
            Segment::Line { start, end } => {
                let _ = writeln!(
                    out,
                    "L {} {} {} {}",
                    fmt9(start.x),
                    fmt9(start.y),
                    fmt9(end.x),
                    fmt9(end.y)
                );
            }
            Segment::Arc(arc) => {
                let _ = writeln!(
                    out,
                    "A {} {} {} {} {}",
                    fmt9(arc.center.x),
                    fmt9(arc.center.y),
                    fmt9(arc.radius),
                    fmt9(arc.start_angle),
                    fmt9(arc.sweep)
                );
            }
        }
    }
    out
}

pub fn smoothed_to_text(path: &SmoothedPath) -> String {
    segments_to_text(path.segments())
}

pub fn polyline_segments(path: &PolylinePath) -> Vec<Segment> {
    path.nodes()
        .windows(2)
        .map(|w| Segment::Line {
            start: w[0],
            end: w[1],
        })
        .collect()
}

pub fn polyline_to_text(path: &PolylinePath) -> String {
    segments_to_text(&polyline_segments(path))
}

pub fn parse_segments(text: &str) -> Result<Vec<Segment>, PathFileError> {
    let mut segments = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let tag = fields.next().unwrap_or_default();
        let numbers = fields
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| PathFileError::Parse {
                        line,
                        message: format!("invalid number {f:?}"),
                    })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let seg = match (tag, numbers.as_slice()) {
            ("L", &[x1, y1, x2, y2]) => Segment::Line {
                start: Point2::new(x1, y1),
                end: Point2::new(x2, y2),
            },
            ("A", &[cx, cy, r, s, sweep]) => {
                if !(r > 0.0) {
                    return Err(PathFileError::Parse {
                        line,
                        message: format!("arc radius must be positive, got {r}"),
                    });
                }
                Segment::Arc(FilletArc::from_center_sweep(
                    Point2::new(cx, cy),
                    r,
                    s,
                    sweep,
                ))
            }
            ("L", _) | ("A", _) => {
                return Err(PathFileError::Parse {
                    line,
                    message: format!("wrong number of fields for {tag}"),
                })
            }
            _ => {
                return Err(PathFileError::Parse {
                    line,
                    message: format!("unknown element {tag:?}"),
                })
            }
        };
        segments.push(seg);
    }
    if segments.is_empty() {
        return Err(PathFileError::Empty);
    }
    Ok(segments)
}

/// Parses a file of `L` lines back into a polyline.
pub fn parse_polyline(text: &str) -> Result<PolylinePath, PathFileError> {
    let segments = parse_segments(text)?;
    let mut nodes = vec![segments[0].start()];
    for seg in &segments {
        match seg {
            Segment::Line { start, end } => {
                if *start != nodes[nodes.len() - 1] {
                    return Err(PathFileError::Disconnected(format!(
                        "line starts at {start}, previous ended at {}",
                        nodes[nodes.len() - 1]
                    )));
                }
                nodes.push(*end);
            }
            Segment::Arc(_) => {
                return Err(PathFileError::Disconnected(
                    "a polyline file cannot contain arcs".into(),
                ))
            }
        }
    }
    PolylinePath::new(nodes).map_err(|e| PathFileError::Disconnected(e.to_string()))
}

pub fn parse_smoothed(text: &str) -> Result<SmoothedPath, PathFileError> {
    SmoothedPath::from_segments(parse_segments(text)?)
        .map_err(|e| PathFileError::Disconnected(e.to_string()))
}

/// SVG path data with `L` for lines and `A` for arcs, world coordinates.
///
/// Positive sweeps map to sweep-flag 1; this matches a y-up user space.
pub fn svg_path_data(segments: &[Segment]) -> String {
    let mut d = String::new();
    let Some(first) = segments.first() else {
        return d;
    };
    let _ = write!(d, "M {} {}", fmt9(first.start().x), fmt9(first.start().y));
    for seg in segments {
        match seg {
            Segment::Line { end, .. } => {
                let _ = write!(d, " L {} {}", fmt9(end.x), fmt9(end.y));
            }
            Segment::Arc(arc) => {
                let large = u8::from(arc.sweep.abs() > std::f64::consts::PI);
                let sweep_flag = u8::from(arc.sweep > 0.0);
                let r = fmt9(arc.radius);
                let _ = write!(
                    d,
                    " A {r} {r} 0 {large} {sweep_flag} {} {}",
                    fmt9(arc.tangent_end.x),
                    fmt9(arc.tangent_end.y)
                );
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fillet::{smooth_path, SmoothOptions};

    fn l_path() -> PolylinePath {
        PolylinePath::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn l_path_text_is_bit_exact() {
        let s = smooth_path(&l_path(), &SmoothOptions::default()).unwrap();
        let text = smoothed_to_text(&s);
        assert_eq!(
            text,
            "L 0.000000000 0.000000000 0.500000000 0.000000000\n\
             A 0.500000000 0.500000000 0.500000000 4.712388980 1.570796327\n\
             L 1.000000000 0.500000000 1.000000000 1.000000000\n"
        );
        let back = parse_smoothed(&text).unwrap();
        assert_eq!(back.arc_count(), 1);
        assert!((back.length() - s.length()).abs() < 1e-8);
        assert_eq!(smoothed_to_text(&back), text);
    }

    #[test]
    fn polyline_round_trip() {
        let text = polyline_to_text(&l_path());
        assert_eq!(parse_polyline(&text).unwrap(), l_path());
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_segments("# nothing\n"), Err(PathFileError::Empty));
        assert!(matches!(
            parse_segments("L 1 2 3\n"),
            Err(PathFileError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_segments("\nQ 1\n"),
            Err(PathFileError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_segments("A 0 0 -1 0 1\n"),
            Err(PathFileError::Parse { .. })
        ));
        assert!(matches!(
            parse_segments("L 0 0 nan 1\n"),
            Err(PathFileError::Parse { .. })
        ));
        assert!(matches!(
            parse_polyline("L 0 0 1 0\nL 2 0 3 0\n"),
            Err(PathFileError::Disconnected(_))
        ));
    }

    #[test]
    fn svg_data_uses_one_arc_for_l_path() {
        let s = smooth_path(&l_path(), &SmoothOptions::default()).unwrap();
        let d = svg_path_data(s.segments());
        assert_eq!(
            d,
            "M 0.000000000 0.000000000 L 0.500000000 0.000000000 \
             A 0.500000000 0.500000000 0 0 1 1.000000000 0.500000000 L 1.000000000 1.000000000"
        );
    }
}
