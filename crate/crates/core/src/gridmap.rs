//! Boolean occupancy grids: loading, obstacle inflation and collision queries.
//!
//! Cell `(ix, iy)` covers the world square
//! `[ox + ix/res, ox + (ix+1)/res) × [oy + iy/res, oy + (iy+1)/res)` where
//! `(ox, oy)` is the grid origin and `res` the resolution in cells per meter.
//! `iy = 0` is the bottom row. Text and image formats list the top row first,
//! so loaders flip rows on the way in.

use std::path::Path;

use thiserror::Error;

use crate::geom::Point2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("parse error at byte offset {offset}: {message}")]
    Binary { offset: usize, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot read map {path}: {message}")]
    Io { path: String, message: String },
}

/// On-disk map encodings understood by [`load_map`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    /// `W H RES` header followed by `H` rows of `W` characters (`#` occupied, `.` free).
    AsciiGrid,
    /// Netpbm graymap, plain (P2) or raw (P5). Pixel value 0 is occupied.
    Pgm,
}

impl MapFormat {
    /// Guesses the format from the leading magic bytes.
    pub fn detect(bytes: &[u8]) -> MapFormat {
        let trimmed = bytes
            .iter()
            .position(|b| !b.is_ascii_whitespace())
            .map_or(&bytes[..0], |i| &bytes[i..]);
        if trimmed.starts_with(b"P2") || trimmed.starts_with(b"P5") {
            MapFormat::Pgm
        } else {
            MapFormat::AsciiGrid
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    origin: Point2,
    occupied: Vec<bool>,
}

impl OccupancyGrid {
    /// Creates an all-free grid with its origin at (0, 0).
    pub fn new(width: usize, height: usize, resolution: f64) -> Result<Self, GridError> {
        Self::from_cells(width, height, resolution, vec![false; width * height])
    }

    /// Builds a grid from row-major cells, bottom row first.
    pub fn from_cells(
        width: usize,
        height: usize,
        resolution: f64,
        occupied: Vec<bool>,
    ) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::InvalidArgument(format!(
                "grid dimensions must be positive, got {width}x{height}"
            )));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(GridError::InvalidArgument(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if occupied.len() != width * height {
            return Err(GridError::InvalidArgument(format!(
                "expected {} cells, got {}",
                width * height,
                occupied.len()
            )));
        }
        Ok(OccupancyGrid {
            width,
            height,
            resolution,
            origin: Point2::ORIGIN,
            occupied,
        })
    }

    pub fn with_origin(mut self, origin: Point2) -> Self {
        self.origin = origin;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Cells per meter.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    /// World extent in meters.
    pub fn extent(&self) -> (f64, f64) {
        (
            self.width as f64 / self.resolution,
            self.height as f64 / self.resolution,
        )
    }

    /// Upper-right world corner.
    pub fn max_corner(&self) -> Point2 {
        let (w, h) = self.extent();
        self.origin + Point2::new(w, h)
    }

    pub fn cells(&self) -> &[bool] {
        &self.occupied
    }

    #[inline]
    pub fn is_occupied(&self, ix: usize, iy: usize) -> bool {
        self.occupied[iy * self.width + ix]
    }

    pub fn set_occupied(&mut self, ix: usize, iy: usize, value: bool) {
        self.occupied[iy * self.width + ix] = value;
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&c| c).count()
    }

    /// World-space center of a cell.
    pub fn cell_center(&self, ix: usize, iy: usize) -> Point2 {
        self.origin
            + Point2::new(
                (ix as f64 + 0.5) / self.resolution,
                (iy as f64 + 0.5) / self.resolution,
            )
    }

    /// Cell containing `p`, or `None` outside the world bounds.
    pub fn cell_of(&self, p: Point2) -> Option<(usize, usize)> {
        if !p.is_finite() {
            return None;
        }
        let u = ((p.x - self.origin.x) * self.resolution).floor();
        let v = ((p.y - self.origin.y) * self.resolution).floor();
        if u < 0.0 || v < 0.0 || u >= self.width as f64 || v >= self.height as f64 {
            return None;
        }
        Some((u as usize, v as usize))
    }

    /// True when `p` is inside the world and its cell is free.
    pub fn is_free(&self, p: Point2) -> bool {
        match self.cell_of(p) {
            Some((ix, iy)) => !self.is_occupied(ix, iy),
            None => false,
        }
    }

    /// Dilates every occupied cell by a Euclidean disc of `ceil(radius * resolution)` cells.
    pub fn inflate(&self, radius: f64) -> Result<OccupancyGrid, GridError> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(GridError::InvalidArgument(format!(
                "inflation radius must be a non-negative number, got {radius}"
            )));
        }
        let cells = inflation_cells(radius, self.resolution);
        if cells == 0 {
            return Ok(self.clone());
        }
        let r = cells as i64;
        let offsets: Vec<(i64, i64)> = (-r..=r)
            .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
            .filter(|&(dx, dy)| dx * dx + dy * dy <= r * r)
            .collect();

        let (w, h) = (self.width as i64, self.height as i64);
        let mut out = self.occupied.clone();
        for iy in 0..h {
            for ix in 0..w {
                if !self.occupied[(iy * w + ix) as usize] {
                    continue;
                }
                for &(dx, dy) in &offsets {
                    let (nx, ny) = (ix + dx, iy + dy);
                    if nx >= 0 && ny >= 0 && nx < w && ny < h {
                        out[(ny * w + nx) as usize] = true;
                    }
                }
            }
        }
        Ok(OccupancyGrid {
            occupied: out,
            ..self.clone()
        })
    }

    /// True iff the closed segment `ab` leaves the world rectangle or touches
    /// an occupied cell.
    ///
    /// Cells are treated as closed squares, so a segment grazing an occupied
    /// cell's edge or corner collides. The traversal walks the grid column by
    /// column and visits exactly the cells the segment meets.
    pub fn segment_collides(&self, a: Point2, b: Point2) -> bool {
        if !a.is_finite() || !b.is_finite() {
            return true;
        }
        let to_cell = |p: Point2| {
            (
                (p.x - self.origin.x) * self.resolution,
                (p.y - self.origin.y) * self.resolution,
            )
        };
        // canonical order keeps the result symmetric bit for bit
        let (pa, pb) = (to_cell(a), to_cell(b));
        let ((u0, v0), (u1, v1)) = if pa <= pb { (pa, pb) } else { (pb, pa) };

        let (w, h) = (self.width as f64, self.height as f64);
        let inside = |u: f64, v: f64| (0.0..=w).contains(&u) && (0.0..=h).contains(&v);
        if !inside(u0, v0) || !inside(u1, v1) {
            return true;
        }

        let first_col = (u0.ceil() - 1.0).max(0.0) as usize;
        let last_col = (u1.floor() as usize).min(self.width - 1);
        let du = u1 - u0;
        let dv = v1 - v0;
        let v_at = |u: f64| {
            if du == 0.0 {
                v0
            } else {
                v0 + (u - u0) * dv / du
            }
        };

        for col in first_col..=last_col {
            let (va, vb) = if du == 0.0 {
                (v0, v1)
            } else {
                let lo = u0.max(col as f64);
                let hi = u1.min(col as f64 + 1.0);
                // endpoints are exact; only interior crossings are interpolated
                let va = if lo == u0 { v0 } else { v_at(lo) };
                let vb = if hi == u1 { v1 } else { v_at(hi) };
                (va, vb)
            };
            let (vmin, vmax) = if va <= vb { (va, vb) } else { (vb, va) };
            let first_row = (vmin.ceil() - 1.0).max(0.0) as usize;
            let last_row = (vmax.floor() as usize).min(self.height - 1);
            for row in first_row..=last_row {
                if self.occupied[row * self.width + col] {
                    return true;
                }
            }
        }
        false
    }

    /// Reads a map file, choosing the format from its contents.
    pub fn from_path(path: impl AsRef<Path>) -> Result<OccupancyGrid, GridError> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| GridError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        load_map(&bytes, MapFormat::detect(&bytes))
    }

    /// Serializes to the ascii-grid format, top row first.
    pub fn to_ascii(&self) -> String {
        let mut out = format!("{} {} {}\n", self.width, self.height, self.resolution);
        for iy in (0..self.height).rev() {
            for ix in 0..self.width {
                out.push(if self.is_occupied(ix, iy) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

/// Inflation radius in whole cells, rounded up.
pub fn inflation_cells(radius: f64, resolution: f64) -> usize {
    let scaled = radius * resolution;
    // absorb representation error such as 0.3 * 10 = 3.0000000000000004
    (scaled - 1e-9 * scaled.max(1.0)).ceil().max(0.0) as usize
}

/// Parses a map from bytes. PGM maps get a resolution of one cell per meter.
pub fn load_map(source: &[u8], format: MapFormat) -> Result<OccupancyGrid, GridError> {
    match format {
        MapFormat::AsciiGrid => parse_ascii(source),
        MapFormat::Pgm => parse_pgm(source, 1.0),
    }
}

fn parse_ascii(source: &[u8]) -> Result<OccupancyGrid, GridError> {
    let text = std::str::from_utf8(source).map_err(|e| GridError::Binary {
        offset: e.valid_up_to(),
        message: "map is not valid UTF-8".into(),
    })?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| GridError::Parse {
        line: 1,
        message: "empty input, expected header `W H RES`".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(GridError::Parse {
            line: 1,
            message: format!("expected header `W H RES`, got {:?}", header.trim()),
        });
    }
    let header_err = |what: &str, raw: &str| GridError::Parse {
        line: 1,
        message: format!("invalid {what} {raw:?}"),
    };
    let width: usize = fields[0]
        .parse()
        .map_err(|_| header_err("width", fields[0]))?;
    let height: usize = fields[1]
        .parse()
        .map_err(|_| header_err("height", fields[1]))?;
    let resolution: f64 = fields[2]
        .parse()
        .map_err(|_| header_err("resolution", fields[2]))?;
    if width == 0 || height == 0 || !(resolution > 0.0) || !resolution.is_finite() {
        return Err(GridError::Parse {
            line: 1,
            message: "width, height and resolution must be positive".into(),
        });
    }

    let mut occupied = vec![false; width * height];
    let mut rows = 0usize;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let row = raw.trim_end_matches('\r');
        if rows == height {
            if row.trim().is_empty() {
                continue;
            }
            return Err(GridError::Parse {
                line: line_no,
                message: format!("dimension mismatch: more than {height} rows"),
            });
        }
        let chars: Vec<char> = row.chars().collect();
        if chars.len() != width {
            return Err(GridError::Parse {
                line: line_no,
                message: format!(
                    "dimension mismatch: expected {width} columns, got {}",
                    chars.len()
                ),
            });
        }
        let iy = height - 1 - rows;
        for (ix, c) in chars.into_iter().enumerate() {
            occupied[iy * width + ix] = match c {
                '#' => true,
                '.' => false,
                other => {
                    return Err(GridError::Parse {
                        line: line_no,
                        message: format!("illegal character {other:?} at column {}", ix + 1),
                    })
                }
            };
        }
        rows += 1;
    }
    if rows != height {
        return Err(GridError::Parse {
            line: rows + 2,
            message: format!("dimension mismatch: expected {height} rows, got {rows}"),
        });
    }
    OccupancyGrid::from_cells(width, height, resolution, occupied)
}

/// Netpbm token reader that tracks line numbers and skips `#` comments.
struct PgmReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> PgmReader<'a> {
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b'\n' => {
                    self.line += 1;
                    self.pos += 1;
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self, what: &str) -> Result<&'a str, GridError> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(GridError::Parse {
                line: self.line,
                message: format!("unexpected end of input, expected {what}"),
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| GridError::Parse {
            line: self.line,
            message: format!("non-text bytes where {what} was expected"),
        })
    }

    fn number(&mut self, what: &str) -> Result<u32, GridError> {
        self.skip_space();
        let line = self.line;
        let tok = self.token(what)?;
        tok.parse().map_err(|_| GridError::Parse {
            line,
            message: format!("invalid {what} {tok:?}"),
        })
    }
}

/// Parses a P2 or P5 graymap; pixel value 0 marks an obstacle.
pub fn parse_pgm(source: &[u8], resolution: f64) -> Result<OccupancyGrid, GridError> {
    let mut rd = PgmReader {
        bytes: source,
        pos: 0,
        line: 1,
    };
    let magic = rd.token("magic number")?;
    let raw = match magic {
        "P2" => false,
        "P5" => true,
        other => {
            return Err(GridError::Parse {
                line: rd.line,
                message: format!("unsupported magic {other:?}, expected P2 or P5"),
            })
        }
    };
    let width = rd.number("width")? as usize;
    let height = rd.number("height")? as usize;
    let maxval = rd.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(GridError::Parse {
            line: rd.line,
            message: "width and height must be positive".into(),
        });
    }
    if maxval == 0 || maxval > 65535 {
        return Err(GridError::Parse {
            line: rd.line,
            message: format!("maxval {maxval} out of range 1..=65535"),
        });
    }

    let mut pixels = Vec::with_capacity(width * height);
    if raw {
        // exactly one whitespace byte separates the header from the raster
        let start = rd.pos + 1;
        let depth = if maxval > 255 { 2 } else { 1 };
        let needed = width * height * depth;
        let body = source.get(start..).unwrap_or(&[]);
        if body.len() < needed {
            return Err(GridError::Binary {
                offset: source.len(),
                message: format!(
                    "dimension mismatch: raster needs {needed} bytes, found {}",
                    body.len()
                ),
            });
        }
        for i in 0..width * height {
            let value = if depth == 1 {
                u32::from(body[i])
            } else {
                u32::from(body[2 * i]) << 8 | u32::from(body[2 * i + 1])
            };
            if value > maxval {
                return Err(GridError::Binary {
                    offset: start + i * depth,
                    message: format!("pixel value {value} exceeds maxval {maxval}"),
                });
            }
            pixels.push(value);
        }
    } else {
        for i in 0..width * height {
            rd.skip_space();
            let line = rd.line;
            let value = rd.number("pixel value").map_err(|e| match e {
                GridError::Parse { message, .. } if message.starts_with("unexpected end") => {
                    GridError::Parse {
                        line,
                        message: format!(
                            "dimension mismatch: expected {} pixels, got {i}",
                            width * height
                        ),
                    }
                }
                other => other,
            })?;
            if value > maxval {
                return Err(GridError::Parse {
                    line,
                    message: format!("pixel value {value} exceeds maxval {maxval}"),
                });
            }
            pixels.push(value);
        }
        rd.skip_space();
        if rd.pos < source.len() {
            return Err(GridError::Parse {
                line: rd.line,
                message: "dimension mismatch: trailing data after raster".into(),
            });
        }
    }

    let mut occupied = vec![false; width * height];
    for (i, &value) in pixels.iter().enumerate() {
        let (row, ix) = (i / width, i % width);
        let iy = height - 1 - row;
        occupied[iy * width + ix] = value == 0;
    }
    OccupancyGrid::from_cells(width, height, resolution, occupied)
}
