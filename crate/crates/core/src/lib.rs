//! Probabilistic-roadmap path planning on occupancy grids, with every corner
//! of the planned polyline replaced by a tangent circular arc.
//!
//! The pipeline is: load a map, inflate obstacles, sample and connect a
//! roadmap, query it with Dijkstra, fillet the corners, then replay the
//! result with a pure-pursuit controller.

// `!(x > 0.0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod fillet;
pub mod geom;
pub mod gridmap;
pub mod maps;
pub mod pathfile;
pub mod roadmap;
pub mod sim;
pub mod svg;

pub use fillet::{smooth_path, FilletArc, Segment, SmoothOptions, SmoothedPath};
pub use geom::Point2;
pub use gridmap::{load_map, MapFormat, OccupancyGrid};
pub use roadmap::{plan, PlanParams, PolylinePath, Roadmap};
