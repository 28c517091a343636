//! C ABI over the arcfillet library.
//!
//! Objects cross the boundary as opaque handles created by `af_*` functions
//! and released with the matching `*_free`. Every fallible call returns an
//! [`AfStatus`]; on failure `af_last_error` describes the problem for the
//! calling thread. Results are written through out-pointers only on success.

#![allow(clippy::missing_safety_doc)]
// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use arcfillet::fillet::{smooth_path, FilletError, SmoothOptions, SmoothedPath};
use arcfillet::geom::Point2;
use arcfillet::gridmap::{load_map, GridError, MapFormat, OccupancyGrid};
use arcfillet::maps;
use arcfillet::pathfile;
use arcfillet::roadmap::{plan, PlanError, PlanParams, PolylinePath};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Placement = 4,
    NoPath = 5,
    Smoothing = 6,
    Io = 7,
    Panic = 8,
}

/// Occupancy grid handle.
pub struct AfGrid {
    inner: OccupancyGrid,
}

/// Polyline path handle.
pub struct AfPath {
    inner: PolylinePath,
}

/// Smoothed path handle.
pub struct AfSmoothed {
    inner: SmoothedPath,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (AfStatus, String);

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            AfStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            AfStatus::Panic
        }
    }
}

fn grid_failure(e: GridError) -> Failure {
    let status = match e {
        GridError::Parse { .. } | GridError::Binary { .. } => AfStatus::Parse,
        GridError::InvalidArgument(_) => AfStatus::InvalidArgument,
        GridError::Io { .. } => AfStatus::Io,
    };
    (status, e.to_string())
}

fn plan_failure(e: PlanError) -> Failure {
    let msg = e.to_string();
    match e {
        PlanError::Placement { .. } => (AfStatus::Placement, msg),
        PlanError::NoPath(_) => (AfStatus::NoPath, msg),
        PlanError::Grid(g) => grid_failure(g),
        PlanError::Roadmap(_) => (AfStatus::InvalidArgument, msg),
    }
}

fn fillet_failure(e: FilletError) -> Failure {
    (AfStatus::Smoothing, e.to_string())
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| (AfStatus::NullPointer, format!("{name} is null")))
}

unsafe fn store<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err((AfStatus::NullPointer, format!("{name} is null")));
    }
    out.write(value);
    Ok(())
}

fn check_out<T>(out: *mut T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        Err((AfStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next `af_*` call on the same thread.
#[no_mangle]
pub extern "C" fn af_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn af_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads an ascii-grid or PGM file. PGM maps get one cell per meter.
#[no_mangle]
pub unsafe extern "C" fn af_grid_load(path: *const c_char, out: *mut *mut AfGrid) -> AfStatus {
    guard(|| {
        check_out(out, "out")?;
        let path = deref(path, "path")?;
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| (AfStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        let grid = OccupancyGrid::from_path(path).map_err(grid_failure)?;
        store(out, Box::into_raw(Box::new(AfGrid { inner: grid })), "out")
    })
}

/// Parses a map from memory; the format is detected from the content.
#[no_mangle]
pub unsafe extern "C" fn af_grid_load_bytes(
    data: *const u8,
    len: usize,
    out: *mut *mut AfGrid,
) -> AfStatus {
    guard(|| {
        check_out(out, "out")?;
        if data.is_null() && len > 0 {
            return Err((AfStatus::NullPointer, "data is null".into()));
        }
        let bytes = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(data, len)
        };
        let grid = load_map(bytes, MapFormat::detect(bytes)).map_err(grid_failure)?;
        store(out, Box::into_raw(Box::new(AfGrid { inner: grid })), "out")
    })
}

/// The bundled 52 × 41 m evaluation map.
#[no_mangle]
pub unsafe extern "C" fn af_grid_builtin_complex(out: *mut *mut AfGrid) -> AfStatus {
    guard(|| {
        store(
            out,
            Box::into_raw(Box::new(AfGrid {
                inner: maps::complex_map(),
            })),
            "out",
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn af_grid_free(grid: *mut AfGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

#[no_mangle]
pub unsafe extern "C" fn af_grid_dimensions(
    grid: *const AfGrid,
    width: *mut usize,
    height: *mut usize,
    resolution: *mut f64,
) -> AfStatus {
    guard(|| {
        let g = &deref(grid, "grid")?.inner;
        store(width, g.width(), "width")?;
        store(height, g.height(), "height")?;
        store(resolution, g.resolution(), "resolution")
    })
}

/// New grid with obstacles grown by `radius` meters.
#[no_mangle]
pub unsafe extern "C" fn af_grid_inflate(
    grid: *const AfGrid,
    radius: f64,
    out: *mut *mut AfGrid,
) -> AfStatus {
    guard(|| {
        check_out(out, "out")?;
        let g = deref(grid, "grid")?
            .inner
            .inflate(radius)
            .map_err(grid_failure)?;
        store(out, Box::into_raw(Box::new(AfGrid { inner: g })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn af_grid_is_free(
    grid: *const AfGrid,
    x: f64,
    y: f64,
    out: *mut bool,
) -> AfStatus {
    guard(|| {
        let g = &deref(grid, "grid")?.inner;
        store(out, g.is_free(Point2::new(x, y)), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn af_grid_segment_collides(
    grid: *const AfGrid,
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
    out: *mut bool,
) -> AfStatus {
    guard(|| {
        let g = &deref(grid, "grid")?.inner;
        if ![x1, y1, x2, y2].iter().all(|v| v.is_finite()) {
            return Err((
                AfStatus::InvalidArgument,
                "coordinates must be finite".into(),
            ));
        }
        store(
            out,
            g.segment_collides(Point2::new(x1, y1), Point2::new(x2, y2)),
            "out",
        )
    })
}

/// Roadmap planning on `grid` (inflated internally by `inflation_radius`).
#[no_mangle]
pub unsafe extern "C" fn af_plan(
    grid: *const AfGrid,
    start_x: f64,
    start_y: f64,
    goal_x: f64,
    goal_y: f64,
    nodes: usize,
    connection_distance: f64,
    seed: u64,
    inflation_radius: f64,
    out: *mut *mut AfPath,
) -> AfStatus {
    guard(|| {
        check_out(out, "out")?;
        let g = &deref(grid, "grid")?.inner;
        let params = PlanParams {
            nodes,
            connection_distance,
            seed,
            inflation_radius,
        };
        let outcome = plan(
            g,
            Point2::new(start_x, start_y),
            Point2::new(goal_x, goal_y),
            &params,
        )
        .map_err(plan_failure)?;
        store(
            out,
            Box::into_raw(Box::new(AfPath {
                inner: outcome.path,
            })),
            "out",
        )
    })
}

/// Builds a polyline from `count` interleaved x, y pairs.
#[no_mangle]
pub unsafe extern "C" fn af_path_from_points(
    xy: *const f64,
    count: usize,
    out: *mut *mut AfPath,
) -> AfStatus {
    guard(|| {
        check_out(out, "out")?;
        if xy.is_null() {
            return Err((AfStatus::NullPointer, "xy is null".into()));
        }
        let flat = std::slice::from_raw_parts(xy, count.saturating_mul(2));
        let nodes = flat
            .chunks_exact(2)
            .map(|c| Point2::new(c[0], c[1]))
            .collect();
        let path =
            PolylinePath::new(nodes).map_err(|e| (AfStatus::InvalidArgument, e.to_string()))?;
        store(out, Box::into_raw(Box::new(AfPath { inner: path })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn af_path_free(path: *mut AfPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

#[no_mangle]
pub unsafe extern "C" fn af_path_node_count(path: *const AfPath, out: *mut usize) -> AfStatus {
    guard(|| store(out, deref(path, "path")?.inner.len(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn af_path_node(
    path: *const AfPath,
    index: usize,
    x: *mut f64,
    y: *mut f64,
) -> AfStatus {
    guard(|| {
        let nodes = deref(path, "path")?.inner.nodes();
        let p = nodes.get(index).ok_or_else(|| {
            (
                AfStatus::InvalidArgument,
                format!("index {index} out of range"),
            )
        })?;
        store(x, p.x, "x")?;
        store(y, p.y, "y")
    })
}

#[no_mangle]
pub unsafe extern "C" fn af_path_length(path: *const AfPath, out: *mut f64) -> AfStatus {
    guard(|| store(out, deref(path, "path")?.inner.length(), "out"))
}

/// Path as `L` lines; release with `af_string_free`.
#[no_mangle]
pub unsafe extern "C" fn af_path_to_text(path: *const AfPath, out: *mut *mut c_char) -> AfStatus {
    guard(|| {
        let text = pathfile::polyline_to_text(&deref(path, "path")?.inner);
        store(out, to_c_string(text), "out")
    })
}

/// Fillets every corner. `grid` may be NULL; when given, arcs are checked
/// against it and violations are counted by `af_smoothed_violation_count`.
#[no_mangle]
pub unsafe extern "C" fn af_smooth(
    path: *const AfPath,
    grid: *const AfGrid,
    straight_tolerance: f64,
    out: *mut *mut AfSmoothed,
) -> AfStatus {
    guard(|| {
        check_out(out, "out")?;
        let p = &deref(path, "path")?.inner;
        if !(straight_tolerance > 0.0) {
            return Err((
                AfStatus::InvalidArgument,
                "straight_tolerance must be positive".into(),
            ));
        }
        let opts = SmoothOptions {
            straight_tolerance,
            grid: grid.as_ref().map(|g| &g.inner),
            ..SmoothOptions::default()
        };
        let s = smooth_path(p, &opts).map_err(fillet_failure)?;
        store(out, Box::into_raw(Box::new(AfSmoothed { inner: s })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn af_smoothed_free(s: *mut AfSmoothed) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn af_smoothed_length(s: *const AfSmoothed, out: *mut f64) -> AfStatus {
    guard(|| store(out, deref(s, "smoothed")?.inner.length(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn af_smoothed_arc_count(s: *const AfSmoothed, out: *mut usize) -> AfStatus {
    guard(|| store(out, deref(s, "smoothed")?.inner.arc_count(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn af_smoothed_violation_count(
    s: *const AfSmoothed,
    out: *mut usize,
) -> AfStatus {
    guard(|| store(out, deref(s, "smoothed")?.inner.violations().len(), "out"))
}

/// Path as `L` and `A` lines; release with `af_string_free`.
#[no_mangle]
pub unsafe extern "C" fn af_smoothed_to_text(
    s: *const AfSmoothed,
    out: *mut *mut c_char,
) -> AfStatus {
    guard(|| {
        let text = pathfile::smoothed_to_text(&deref(s, "smoothed")?.inner);
        store(out, to_c_string(text), "out")
    })
}
