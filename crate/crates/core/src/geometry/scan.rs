use std::f64::consts::PI;

use rayon::prelude::*;

use crate::config::ConfigDocument;
use crate::error::{Error, Result};
use crate::image::ImageVector;
use crate::system::{SparseLinearSystem, SparseRow};

use super::{trace_ray, GridSpec};

pub(crate) const SCAN_KEYS: &[&str] = &[
    "num_views",
    "angle_increment_deg",
    "detector_spacing",
    "num_rays_per_view",
];

/// Parallel-beam acquisition.
///
/// View `v` has angle `v * angle_increment`, measured counterclockwise from
/// `+x`; its lines run along `(cos t, sin t)`. Within a view the
/// `num_rays_per_view` lines are spaced `detector_spacing` apart along the
/// normal `(-sin t, cos t)`, centred on the image centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGeometry {
    pub num_views: usize,
    pub angle_increment: f64,
    pub detector_spacing: f64,
    pub num_rays_per_view: usize,
}

impl ScanGeometry {
    pub fn new(
        num_views: usize,
        angle_increment: f64,
        detector_spacing: f64,
        num_rays_per_view: usize,
    ) -> Result<Self> {
        let geom = Self {
            num_views,
            angle_increment,
            detector_spacing,
            num_rays_per_view,
        };
        geom.validate()?;
        Ok(geom)
    }

    /// Enough lines per view to span the grid diagonal at every angle.
    pub fn covering(
        grid: &GridSpec,
        num_views: usize,
        angle_increment: f64,
        detector_spacing: f64,
    ) -> Result<Self> {
        if !(detector_spacing > 0.0) {
            return Err(Error::InvalidParameter("detector_spacing must be positive".into()));
        }
        let rays = (grid.diagonal_mm() / detector_spacing).ceil() as usize + 1;
        Self::new(num_views, angle_increment, detector_spacing, rays)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_views == 0 || self.num_rays_per_view == 0 {
            return Err(Error::InvalidParameter("need at least one view and one ray".into()));
        }
        if !(self.detector_spacing > 0.0 && self.detector_spacing.is_finite()) {
            return Err(Error::InvalidParameter("detector_spacing must be positive".into()));
        }
        if !(self.angle_increment > 0.0) {
            return Err(Error::InvalidParameter("angle_increment must be positive".into()));
        }
        let coverage = self.num_views as f64 * self.angle_increment;
        if coverage > PI + self.angle_increment + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "{} views at {:.4} rad exceed a half turn",
                self.num_views, self.angle_increment
            )));
        }
        Ok(())
    }

    pub fn num_rays(&self) -> usize {
        self.num_views * self.num_rays_per_view
    }

    /// Origin and unit direction of ray `index` in view `view`.
    pub fn ray(&self, view: usize, index: usize) -> ((f64, f64), (f64, f64)) {
        let theta = view as f64 * self.angle_increment;
        let (s, c) = theta.sin_cos();
        let offset = (index as f64 - 0.5 * (self.num_rays_per_view as f64 - 1.0)) * self.detector_spacing;
        ((-s * offset, c * offset), (c, s))
    }

    /// Reads `num_views`, `angle_increment_deg`, `detector_spacing` and the
    /// optional `num_rays_per_view` (defaults to diagonal coverage).
    pub fn from_document(doc: &ConfigDocument, grid: &GridSpec) -> Result<Self> {
        let missing = |key: &str| Error::Config {
            line: 0,
            message: format!("missing required key {key}"),
        };
        let views = doc.usize("num_views")?.ok_or_else(|| missing("num_views"))?;
        let inc = doc
            .f64("angle_increment_deg")?
            .ok_or_else(|| missing("angle_increment_deg"))?
            .to_radians();
        let spacing = doc.f64("detector_spacing")?.ok_or_else(|| missing("detector_spacing"))?;
        let at = |key: &str| {
            let line = doc.line_of(key);
            move |e: Error| Error::Config {
                line,
                message: e.to_string(),
            }
        };
        match doc.usize("num_rays_per_view")? {
            Some(rays) => Self::new(views, inc, spacing, rays).map_err(at("num_rays_per_view")),
            None => Self::covering(grid, views, inc, spacing).map_err(at("num_views")),
        }
    }
}

/// One row per line that crosses the grid, ordered view-major then by
/// detector index. Right-hand sides are the exact ray sums of `phantom`.
pub fn build_system(phantom: &ImageVector, grid: &GridSpec, geom: &ScanGeometry) -> Result<SparseLinearSystem> {
    if phantom.rows() != grid.rows || phantom.cols() != grid.cols {
        return Err(Error::InvalidParameter(format!(
            "phantom is {}x{} but grid is {}x{}",
            phantom.rows(),
            phantom.cols(),
            grid.rows,
            grid.cols
        )));
    }
    geom.validate()?;
    let x = phantom.as_slice();
    let rows: Vec<Option<SparseRow>> = (0..geom.num_rays())
        .into_par_iter()
        .map(|ray| {
            let (origin, direction) = geom.ray(ray / geom.num_rays_per_view, ray % geom.num_rays_per_view);
            let mut hits = trace_ray(origin, direction, grid);
            if hits.is_empty() {
                return None;
            }
            hits.sort_unstable_by_key(|h| h.0);
            let mut indices: Vec<u32> = Vec::with_capacity(hits.len());
            let mut weights: Vec<f64> = Vec::with_capacity(hits.len());
            for (j, w) in hits {
                if indices.last() == Some(&(j as u32)) {
                    *weights.last_mut().unwrap() += w;
                } else {
                    indices.push(j as u32);
                    weights.push(w);
                }
            }
            let rhs = indices.iter().zip(&weights).map(|(&j, w)| w * x[j as usize]).sum();
            Some(SparseRow::new(indices, weights, rhs).expect("traced rows are well formed"))
        })
        .collect();
    SparseLinearSystem::new(rows.into_iter().flatten().collect(), grid.num_pixels())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_horizontal_ray_through_top_row() {
        let grid = GridSpec::new(2, 2, 1.0).unwrap();
        let phantom = ImageVector::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        // one detector line at offset +0.5 in view 0: y = 0.5, the top row
        let geom = ScanGeometry {
            num_views: 1,
            angle_increment: 1.0,
            detector_spacing: 1.0,
            num_rays_per_view: 2,
        };
        assert_eq!(geom.ray(0, 1).0, (-0.0, 0.5));
        let sys = build_system(&phantom, &grid, &geom).unwrap();
        assert_eq!(sys.num_rows(), 2);
        let top = &sys.rows()[1];
        assert_eq!(top.indices(), &[0, 1]);
        assert_eq!(top.weights(), &[1.0, 1.0]);
        assert!((top.rhs() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn zero_phantom_gives_zero_rhs() {
        let grid = GridSpec::new(8, 8, 1.0).unwrap();
        let geom = ScanGeometry::covering(&grid, 6, PI / 6.0, 1.0).unwrap();
        let sys = build_system(&ImageVector::zeros(8, 8), &grid, &geom).unwrap();
        assert!(sys.rows().iter().all(|r| r.rhs() == 0.0));
    }

    #[test]
    fn generating_phantom_is_feasible() {
        let grid = GridSpec::new(32, 32, 1.0).unwrap();
        let phantom = ImageVector::from_fn(32, 32, |r, c| ((r * 7 + c * 3) % 11) as f64 / 11.0);
        let geom = ScanGeometry::covering(&grid, 12, PI / 12.0, 2.0).unwrap();
        let sys = build_system(&phantom, &grid, &geom).unwrap();
        assert!(sys.proximity(&phantom).unwrap() <= 1e-9 * sys.rhs_norm().max(1.0));
        assert!(sys.num_rows() < geom.num_rays());
    }

    #[test]
    fn row_order_is_deterministic() {
        let grid = GridSpec::new(16, 16, 1.0).unwrap();
        let phantom = ImageVector::constant(16, 16, 0.5);
        let geom = ScanGeometry::covering(&grid, 10, PI / 10.0, 1.5).unwrap();
        let a = build_system(&phantom, &grid, &geom).unwrap();
        let b = build_system(&phantom, &grid, &geom).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coverage_limit() {
        assert!(ScanGeometry::new(60, 3f64.to_radians(), 0.752, 10).is_ok());
        assert!(ScanGeometry::new(62, 3f64.to_radians(), 0.752, 10).is_err());
    }
}
