//! Maps shipped with the crate.

use crate::geom::Point2;
use crate::gridmap::{load_map, MapFormat, OccupancyGrid};

/// 52 m × 41 m office-like map at one cell per meter: walls with doorways,
/// shelves and pillars. Start and goal sit in opposite corners.
pub const COMPLEX_52X41: &str = include_str!("../maps/complex_52x41.txt");

pub const COMPLEX_START: Point2 = Point2::new(3.5, 3.5);
pub const COMPLEX_GOAL: Point2 = Point2::new(47.5, 36.5);

/// Name accepted by `--map` in place of a file path.
pub const COMPLEX_NAME: &str = "builtin:complex";

pub fn complex_map() -> OccupancyGrid {
    load_map(COMPLEX_52X41.as_bytes(), MapFormat::AsciiGrid).expect("bundled map parses")
}

/// Looks up a `builtin:` map name.
pub fn builtin(name: &str) -> Option<OccupancyGrid> {
    (name == COMPLEX_NAME).then(complex_map)
}
