//! Pixel images stored as flat attenuation vectors.
//!
//! Pixels are numbered row-major from the top-left corner. Raster access
//! uses one-based `(g, h)` with `g` the row in `1..=G` and `h` the column in
//! `1..=H`, so `X[g, h]` is the flat entry `(g - 1) * H + (h - 1)`.

use std::io::{Read, Write};

use crate::error::{Error, Result};

const SCTV_MAGIC: &[u8; 4] = b"SCTV";

/// A `G x H` image held as a flat vector of `J = G * H` values.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageVector {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl ImageVector {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "image shape must be positive, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        Ok(Self { values, rows, cols })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::constant(rows, cols, 0.0)
    }

    pub fn constant(rows: usize, cols: usize, value: f64) -> Self {
        assert!(rows > 0 && cols > 0, "image shape must be positive");
        Self {
            values: vec![value; rows * cols],
            rows,
            cols,
        }
    }

    /// Builds an image from a function of zero-based `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "image shape must be positive");
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                values.push(f(r, c));
            }
        }
        Self { values, rows, cols }
    }

    /// Number of raster rows, `G`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of raster columns, `H`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of pixels, `J`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Same shape, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.rows, self.cols, values)
    }

    /// One-based flat index `(g - 1) * H + h` for raster position `(g, h)`.
    pub fn flat_index(&self, g: usize, h: usize) -> Result<usize> {
        if g == 0 || h == 0 || g > self.rows || h > self.cols {
            return Err(Error::RasterOutOfRange {
                g,
                h,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((g - 1) * self.cols + h)
    }

    /// Inverse of [`flat_index`](Self::flat_index): one-based flat index to `(g, h)`.
    pub fn raster_position(&self, index: usize) -> Result<(usize, usize)> {
        if index == 0 || index > self.len() {
            return Err(Error::InvalidParameter(format!(
                "flat index {index} outside 1..={}",
                self.len()
            )));
        }
        let zero = index - 1;
        Ok((zero / self.cols + 1, zero % self.cols + 1))
    }

    /// `X[g, h]` with one-based indices.
    pub fn raster_get(&self, g: usize, h: usize) -> Result<f64> {
        let index = self.flat_index(g, h)?;
        Ok(self.values[index - 1])
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.values)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Writes the flat little-endian `f64` format: `"SCTV"`, `u32` G, `u32` H,
    /// `u32` reserved (zero), then `J` values in raster order.
    pub fn write_sctv<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(SCTV_MAGIC)?;
        out.write_all(&(self.rows as u32).to_le_bytes())?;
        out.write_all(&(self.cols as u32).to_le_bytes())?;
        out.write_all(&0u32.to_le_bytes())?;
        for v in &self.values {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_sctv<R: Read>(mut input: R) -> Result<Self> {
        let mut header = [0u8; 16];
        input.read_exact(&mut header)?;
        if &header[0..4] != SCTV_MAGIC {
            return Err(Error::Format("missing SCTV magic".into()));
        }
        let rows = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let mut body = Vec::new();
        input.read_to_end(&mut body)?;
        if body.len() != rows * cols * 8 {
            return Err(Error::Format(format!(
                "expected {} bytes of pixel data for {rows}x{cols}, found {}",
                rows * cols * 8,
                body.len()
            )));
        }
        let values = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::new(rows, cols, values)
    }

    /// Writes a 16-bit binary PGM (P5). Values are mapped linearly from
    /// `window` onto `0..=65535`; anything below the window is black and
    /// anything above is white.
    pub fn write_pgm<W: Write>(&self, mut out: W, window: (f64, f64)) -> Result<()> {
        let (lo, hi) = window;
        if !(hi > lo) {
            return Err(Error::InvalidParameter(format!(
                "display window must satisfy lo < hi, got ({lo}, {hi})"
            )));
        }
        write!(out, "P5\n{} {}\n65535\n", self.cols, self.rows)?;
        let mut buf = Vec::with_capacity(self.values.len() * 2);
        for &v in &self.values {
            let level = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
            let level = (level * 65535.0).round() as u16;
            // PGM samples wider than a byte are big-endian.
            buf.extend_from_slice(&level.to_be_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raster_get_first_and_third_pixel() {
        let x = ImageVector::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(x.raster_get(1, 1).unwrap(), 1.0);
        assert_eq!(x.raster_get(2, 1).unwrap(), 3.0);
    }

    #[test]
    fn raster_get_matches_enumeration() {
        let x = ImageVector::new(3, 4, (1..=12).map(f64::from).collect()).unwrap();
        // enumerate g, h in raster order and count
        let mut counter = 0.0;
        let mut found = None;
        for g in 1..=3 {
            for h in 1..=4 {
                counter += 1.0;
                if (g, h) == (2, 3) {
                    found = Some(counter);
                }
                assert_eq!(x.raster_get(g, h).unwrap(), counter);
            }
        }
        assert_eq!(found, Some(7.0));
        assert_eq!(x.raster_get(2, 3).unwrap(), 7.0);
    }

    #[test]
    fn raster_out_of_range() {
        let x = ImageVector::zeros(3, 4);
        assert!(matches!(x.raster_get(0, 1), Err(Error::RasterOutOfRange { .. })));
        assert!(matches!(x.raster_get(4, 1), Err(Error::RasterOutOfRange { .. })));
        assert!(matches!(x.raster_get(1, 5), Err(Error::RasterOutOfRange { .. })));
    }

    #[test]
    fn shape_must_match_length() {
        assert!(matches!(
            ImageVector::new(2, 3, vec![0.0; 5]),
            Err(Error::DimensionMismatch { expected: 6, found: 5 })
        ));
        assert!(ImageVector::new(0, 3, vec![]).is_err());
    }

    #[test]
    fn sctv_header_layout() {
        let x = ImageVector::new(2, 3, vec![0.5; 6]).unwrap();
        let mut buf = Vec::new();
        x.write_sctv(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 6 * 8);
        assert_eq!(&buf[..4], b"SCTV");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 3);
        assert_eq!(ImageVector::read_sctv(&buf[..]).unwrap(), x);
    }

    #[test]
    fn sctv_rejects_truncated_body() {
        let x = ImageVector::zeros(2, 2);
        let mut buf = Vec::new();
        x.write_sctv(&mut buf).unwrap();
        buf.pop();
        assert!(matches!(ImageVector::read_sctv(&buf[..]), Err(Error::Format(_))));
    }

    #[test]
    fn pgm_window_mapping() {
        let x = ImageVector::new(1, 3, vec![0.0, 0.5, 1.0]).unwrap();
        let mut buf = Vec::new();
        x.write_pgm(&mut buf, (0.25, 0.75)).unwrap();
        let header = b"P5\n3 1\n65535\n";
        assert_eq!(&buf[..header.len()], header);
        let px: Vec<u16> = buf[header.len()..]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect();
        assert_eq!(px, vec![0, 32768, 65535]);
    }

    proptest::proptest! {
        #[test]
        fn raster_round_trip(rows in 1usize..20, cols in 1usize..20) {
            let x = ImageVector::zeros(rows, cols);
            for j in 1..=x.len() {
                let (g, h) = x.raster_position(j).unwrap();
                proptest::prop_assert_eq!(x.flat_index(g, h).unwrap(), j);
            }
        }
    }
}
