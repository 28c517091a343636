//! Deterministic SVG rendering of maps, roadmaps and paths.
//!
//! The document's viewBox is the world rectangle in meters. A flip transform
//! keeps the drawing y-up, so path data is written in world coordinates.

use std::fmt::Write as _;

use crate::fillet::SmoothedPath;
use crate::geom::fmt9;
use crate::gridmap::OccupancyGrid;
use crate::pathfile::{polyline_segments, svg_path_data};
use crate::roadmap::{PolylinePath, Roadmap};

/// What to draw on top of the map.
#[derive(Debug, Clone, Copy, Default)]
pub struct Layers<'a> {
    /// Cells occupied here but free on the base map are shaded as the halo.
    pub inflated: Option<&'a OccupancyGrid>,
    pub roadmap: Option<&'a Roadmap>,
    pub pure: Option<&'a PolylinePath>,
    pub smoothed: Option<&'a SmoothedPath>,
}

/// Horizontal runs of cells satisfying `pred`, as `(row, first_col, len)`.
fn runs(grid: &OccupancyGrid, pred: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for iy in 0..grid.height() {
        let mut ix = 0;
        while ix < grid.width() {
            if pred(ix, iy) {
                let start = ix;
                while ix < grid.width() && pred(ix, iy) {
                    ix += 1;
                }
                out.push((iy, start, ix - start));
            } else {
                ix += 1;
            }
        }
    }
    out
}

fn write_runs(out: &mut String, grid: &OccupancyGrid, cells: &[(usize, usize, usize)], fill: &str) {
    let cell = 1.0 / grid.resolution();
    let _ = writeln!(out, "<g fill=\"{fill}\" stroke=\"none\">");
    for &(iy, ix, len) in cells {
        let corner = grid.cell_center(ix, iy);
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
            fmt9(corner.x - cell / 2.0),
            fmt9(corner.y - cell / 2.0),
            fmt9(len as f64 * cell),
            fmt9(cell)
        );
    }
    out.push_str("</g>\n");
}

pub fn render_svg(map: &OccupancyGrid, layers: &Layers<'_>) -> String {
    let origin = map.origin();
    let (w, h) = map.extent();
    let stroke = (w.max(h) / 400.0).max(0.01);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"{}\" height=\"{}\">",
        fmt9(origin.x),
        fmt9(origin.y),
        fmt9(w),
        fmt9(h),
        (w * 20.0).round(),
        (h * 20.0).round()
    );
    let _ = writeln!(
        out,
        "<g transform=\"matrix(1 0 0 -1 0 {})\">",
        fmt9(2.0 * origin.y + h)
    );
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
        fmt9(origin.x),
        fmt9(origin.y),
        fmt9(w),
        fmt9(h)
    );

    if let Some(inflated) = layers.inflated {
        if inflated.width() == map.width() && inflated.height() == map.height() {
            let halo = runs(map, |ix, iy| {
                inflated.is_occupied(ix, iy) && !map.is_occupied(ix, iy)
            });
            write_runs(&mut out, map, &halo, "#b8b8b8");
        }
    }
    let obstacles = runs(map, |ix, iy| map.is_occupied(ix, iy));
    write_runs(&mut out, map, &obstacles, "#202020");

    if let Some(roadmap) = layers.roadmap {
        let _ = writeln!(
            out,
            "<g stroke=\"#7fa7d9\" stroke-width=\"{}\" fill=\"none\">",
            fmt9(stroke * 0.5)
        );
        let v = roadmap.vertices();
        for (i, j, _) in roadmap.edges() {
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                fmt9(v[i].x),
                fmt9(v[i].y),
                fmt9(v[j].x),
                fmt9(v[j].y)
            );
        }
        out.push_str("</g>\n");
    }

    if let Some(pure) = layers.pure {
        let _ = writeln!(
            out,
            "<path class=\"pure\" d=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"{}\" stroke-dasharray=\"{} {}\"/>",
            svg_path_data(&polyline_segments(pure)),
            fmt9(stroke * 2.0),
            fmt9(stroke * 6.0),
            fmt9(stroke * 4.0)
        );
    }
    if let Some(smoothed) = layers.smoothed {
        let _ = writeln!(
            out,
            "<path class=\"smoothed\" d=\"{}\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"{}\"/>",
            svg_path_data(smoothed.segments()),
            fmt9(stroke * 2.0)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
