use crate::config::{ConfigDocument, RunConfig, RUN_KEYS};
use crate::error::{Error, Result};
use crate::geometry::{build_system, GridSpec, PhantomSpec, ScanGeometry, GRID_KEYS};
use crate::image::ImageVector;
use crate::system::SparseLinearSystem;

/// Everything one config file describes: phantom, acquisition and solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub phantom: PhantomSpec,
    pub scan: ScanGeometry,
    pub run: RunConfig,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let doc = ConfigDocument::parse(text)?;
        doc.check_known(&[GRID_KEYS, crate::geometry::scan_keys(), RUN_KEYS])?;
        let phantom = PhantomSpec::from_document(&doc)?;
        let scan = ScanGeometry::from_document(&doc, &phantom.grid)?;
        let run = RunConfig::from_document(&doc)?;
        Ok(Self { phantom, scan, run })
    }

    pub fn grid(&self) -> GridSpec {
        self.phantom.grid
    }

    pub fn rasterize(&self) -> Result<ImageVector> {
        self.phantom.rasterize()
    }

    pub fn build_system(&self, phantom: &ImageVector) -> Result<SparseLinearSystem> {
        build_system(phantom, &self.phantom.grid, &self.scan)
    }
}

/// Solver settings plus the image shape a system's columns are rasterized into.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSetup {
    pub run: RunConfig,
    pub rows: usize,
    pub cols: usize,
}

impl SolverSetup {
    /// Reads run keys from `text`; the shape comes from `rows`/`cols` when
    /// present and otherwise must be a square of `num_cols` pixels.
    pub fn parse(text: &str, num_cols: usize) -> Result<Self> {
        let doc = ConfigDocument::parse(text)?;
        doc.check_known(&[GRID_KEYS, crate::geometry::scan_keys(), RUN_KEYS])?;
        let run = RunConfig::from_document(&doc)?;
        let (rows, cols) = match (doc.usize("rows")?, doc.usize("cols")?) {
            (Some(r), Some(c)) => (r, c),
            (None, None) => {
                let side = (num_cols as f64).sqrt().round() as usize;
                if side * side != num_cols {
                    return Err(Error::Config {
                        line: 0,
                        message: format!("rows and cols are required: {num_cols} pixels is not a square"),
                    });
                }
                (side, side)
            }
            _ => {
                return Err(Error::Config {
                    line: doc.line_of("rows").max(doc.line_of("cols")),
                    message: "rows and cols must be given together".into(),
                })
            }
        };
        if rows * cols != num_cols {
            return Err(Error::DimensionMismatch {
                expected: num_cols,
                found: rows * cols,
            });
        }
        Ok(Self { run, rows, cols })
    }
}
