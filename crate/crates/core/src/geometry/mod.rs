//! Phantom rasterization and parallel-beam ray tracing.
//!
//! World coordinates are millimetres with the origin at the image centre, `+x`
//! to the right and `+y` up. Raster row 1 is the top of the image.

mod phantom;
mod ray;
mod scan;

pub use phantom::{Ellipse, PhantomSpec};
pub use ray::trace_ray;
pub use scan::{build_system, ScanGeometry};

use crate::error::{Error, Result};

pub(crate) const GRID_KEYS: &[&str] = &["rows", "cols", "pixel_size"];

/// Pixel grid placement: `rows x cols` square pixels of side `pixel_size`
/// centred on the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub pixel_size: f64,
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize, pixel_size: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("grid must have at least one pixel".into()));
        }
        if !(pixel_size > 0.0 && pixel_size.is_finite()) {
            return Err(Error::InvalidParameter("pixel_size must be positive".into()));
        }
        Ok(Self {
            rows,
            cols,
            pixel_size,
        })
    }

    pub fn num_pixels(&self) -> usize {
        self.rows * self.cols
    }

    pub fn width_mm(&self) -> f64 {
        self.cols as f64 * self.pixel_size
    }

    pub fn height_mm(&self) -> f64 {
        self.rows as f64 * self.pixel_size
    }

    pub fn diagonal_mm(&self) -> f64 {
        self.width_mm().hypot(self.height_mm())
    }

    /// Centre of the pixel at zero-based `(row, col)`.
    pub fn pixel_center(&self, row: usize, col: usize) -> (f64, f64) {
        let x = -0.5 * self.width_mm() + (col as f64 + 0.5) * self.pixel_size;
        let y = 0.5 * self.height_mm() - (row as f64 + 0.5) * self.pixel_size;
        (x, y)
    }

    pub fn from_document(doc: &crate::config::ConfigDocument) -> Result<Self> {
        let require = |key: &str| -> Result<usize> {
            doc.usize(key)?.ok_or_else(|| Error::Config {
                line: 0,
                message: format!("missing required key {key}"),
            })
        };
        let rows = require("rows")?;
        let cols = require("cols")?;
        let pixel_size = doc.f64("pixel_size")?.unwrap_or(1.0);
        Self::new(rows, cols, pixel_size).map_err(|e| Error::Config {
            line: doc.line_of("pixel_size").max(doc.line_of("rows")),
            message: e.to_string(),
        })
    }
}

pub(crate) fn scan_keys() -> &'static [&'static str] {
    scan::SCAN_KEYS
}
