use crate::config::ConfigDocument;
use crate::error::{Error, Result};
use crate::image::ImageVector;

use super::GridSpec;

/// An additive ellipse in world millimetres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub center_x: f64,
    pub center_y: f64,
    pub semi_axis_a: f64,
    pub semi_axis_b: f64,
    /// Counterclockwise rotation of the `a` axis from `+x`, radians.
    pub rotation: f64,
    pub additive_value: f64,
}

impl Ellipse {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (s, c) = self.rotation.sin_cos();
        let dx = x - self.center_x;
        let dy = y - self.center_y;
        let u = (dx * c + dy * s) / self.semi_axis_a;
        let v = (-dx * s + dy * c) / self.semi_axis_b;
        u * u + v * v <= 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub grid: GridSpec,
    pub ellipses: Vec<Ellipse>,
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.ellipses.iter().enumerate() {
            if !(e.semi_axis_a > 0.0 && e.semi_axis_b > 0.0) {
                return Err(Error::InvalidParameter(format!("ellipse {i} needs positive semi-axes")));
            }
        }
        Ok(())
    }

    /// Each pixel takes the summed value of the ellipses containing its
    /// centre, clamped to `[0, 1]`.
    pub fn rasterize(&self) -> Result<ImageVector> {
        self.validate()?;
        let grid = self.grid;
        Ok(ImageVector::from_fn(grid.rows, grid.cols, |r, c| {
            let (x, y) = grid.pixel_center(r, c);
            self.ellipses
                .iter()
                .filter(|e| e.contains(x, y))
                .map(|e| e.additive_value)
                .sum::<f64>()
                .clamp(0.0, 1.0)
        }))
    }

    /// Reads `rows`, `cols`, `pixel_size` and the `[ellipses]` table. Ellipse
    /// rotations in the file are in degrees.
    pub fn from_document(doc: &ConfigDocument) -> Result<Self> {
        let grid = GridSpec::from_document(doc)?;
        let mut ellipses = Vec::with_capacity(doc.ellipse_rows().len());
        for &(line, [cx, cy, a, b, rot_deg, value]) in doc.ellipse_rows() {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::Config {
                    line,
                    message: "semi-axes must be positive".into(),
                });
            }
            ellipses.push(Ellipse {
                center_x: cx,
                center_y: cy,
                semi_axis_a: a,
                semi_axis_b: b,
                rotation: rot_deg.to_radians(),
                additive_value: value,
            });
        }
        Ok(Self { grid, ellipses })
    }
}
