//! Sparse linear systems `Ax = b` from ray sums.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::image::ImageVector;

const SCTS_MAGIC: &[u8; 4] = b"SCTS";

/// One equation `<a^i, x> = b_i` with the nonzeros of `a^i` stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    indices: Vec<u32>,
    weights: Vec<f64>,
    rhs: f64,
    squared_norm: f64,
}

impl SparseRow {
    /// `indices` are zero-based columns and must be strictly increasing;
    /// weights are the matching coefficients (intersection lengths for ray sums).
    pub fn new(indices: Vec<u32>, weights: Vec<f64>, rhs: f64) -> Result<Self> {
        if indices.len() != weights.len() {
            return Err(Error::InvalidRow(format!(
                "{} indices but {} weights",
                indices.len(),
                weights.len()
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRow("indices must be strictly increasing".into()));
        }
        if weights.iter().any(|w| *w == 0.0 || !w.is_finite()) {
            return Err(Error::InvalidRow("weights must be nonzero and finite".into()));
        }
        if !rhs.is_finite() {
            return Err(Error::InvalidRow("rhs must be finite".into()));
        }
        let squared_norm = weights.iter().map(|w| w * w).sum();
        Ok(Self {
            indices,
            weights,
            rhs,
            squared_norm,
        })
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rhs(&self) -> f64 {
        self.rhs
    }

    pub fn squared_norm(&self) -> f64 {
        self.squared_norm
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// Same pattern, different measurement.
    pub fn with_rhs(&self, rhs: f64) -> Self {
        Self {
            rhs,
            ..self.clone()
        }
    }

    #[inline]
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(&self.weights)
            .map(|(&j, &w)| w * x[j as usize])
            .sum()
    }

    /// `x += scale * a^i`
    #[inline]
    pub fn axpy(&self, scale: f64, x: &mut [f64]) {
        for (&j, &w) in self.indices.iter().zip(&self.weights) {
            x[j as usize] += scale * w;
        }
    }
}

/// `I` sparse rows over `J` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLinearSystem {
    rows: Vec<SparseRow>,
    num_cols: usize,
}

impl SparseLinearSystem {
    /// Rows with no nonzeros are dropped; at least one row must remain.
    pub fn new(rows: Vec<SparseRow>, num_cols: usize) -> Result<Self> {
        let rows: Vec<SparseRow> = rows.into_iter().filter(|r| r.nnz() > 0).collect();
        if rows.is_empty() {
            return Err(Error::InvalidParameter("system has no nonzero rows".into()));
        }
        for row in &rows {
            if let Some(&last) = row.indices.last() {
                if last as usize >= num_cols {
                    return Err(Error::InvalidRow(format!(
                        "column {last} out of range for {num_cols} columns"
                    )));
                }
            }
        }
        Ok(Self { rows, num_cols })
    }

    /// Builds a system from dense rows; zero entries are skipped and
    /// rows that are entirely zero are dropped.
    pub fn from_dense(matrix: &[Vec<f64>], rhs: &[f64]) -> Result<Self> {
        if matrix.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.len(),
                found: rhs.len(),
            });
        }
        let num_cols = matrix.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(matrix.len());
        for (dense, &b) in matrix.iter().zip(rhs) {
            if dense.len() != num_cols {
                return Err(Error::DimensionMismatch {
                    expected: num_cols,
                    found: dense.len(),
                });
            }
            let (indices, weights) = dense
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0.0)
                .map(|(j, &w)| (j as u32, w))
                .unzip();
            rows.push(SparseRow::new(indices, weights, b)?);
        }
        Self::new(rows, num_cols)
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(SparseRow::nnz).sum()
    }

    pub fn rhs(&self) -> Vec<f64> {
        self.rows.iter().map(SparseRow::rhs).collect()
    }

    pub fn rhs_norm(&self) -> f64 {
        self.rows.iter().map(|r| r.rhs * r.rhs).sum::<f64>().sqrt()
    }

    /// Frobenius norm of `A`.
    pub fn frobenius_norm(&self) -> f64 {
        self.rows.iter().map(SparseRow::squared_norm).sum::<f64>().sqrt()
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.num_cols {
            return Err(Error::DimensionMismatch {
                expected: self.num_cols,
                found: len,
            });
        }
        Ok(())
    }

    /// `Prox_C(x) = ||b - Ax||_2`.
    pub fn proximity(&self, x: &ImageVector) -> Result<f64> {
        self.proximity_slice(x.as_slice())
    }

    pub fn proximity_slice(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(self.residual_norm_unchecked(x))
    }

    pub(crate) fn residual_norm_unchecked(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                let d = r.rhs - r.dot(x);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `out = A x`
    pub(crate) fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.dot(x);
        }
    }

    /// `out = A^T y`
    pub(crate) fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (row, &yi) in self.rows.iter().zip(y) {
            if yi != 0.0 {
                row.axpy(yi, out);
            }
        }
    }

    /// Binary layout, little-endian: `"SCTS"`, `u32` I, `u32` J, then per row
    /// `u32` nnz, `u32` indices, `f64` weights, `f64` rhs.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(SCTS_MAGIC)?;
        out.write_all(&(self.rows.len() as u32).to_le_bytes())?;
        out.write_all(&(self.num_cols as u32).to_le_bytes())?;
        for row in &self.rows {
            let mut buf = Vec::with_capacity(4 + row.nnz() * 12 + 8);
            buf.extend_from_slice(&(row.nnz() as u32).to_le_bytes());
            for j in &row.indices {
                buf.extend_from_slice(&j.to_le_bytes());
            }
            for w in &row.weights {
                buf.extend_from_slice(&w.to_le_bytes());
            }
            buf.extend_from_slice(&row.rhs.to_le_bytes());
            out.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut data = Vec::new();
        input.read_to_end(&mut data)?;
        let mut cursor = ByteCursor { data: &data, pos: 0 };
        if cursor.take(4)? != SCTS_MAGIC {
            return Err(Error::Format("missing SCTS magic".into()));
        }
        let num_rows = cursor.u32()? as usize;
        let num_cols = cursor.u32()? as usize;
        let mut rows = Vec::with_capacity(num_rows);
        for _ in 0..num_rows {
            let nnz = cursor.u32()? as usize;
            let indices = (0..nnz).map(|_| cursor.u32()).collect::<Result<Vec<_>>>()?;
            let weights = (0..nnz).map(|_| cursor.f64()).collect::<Result<Vec<_>>>()?;
            let rhs = cursor.f64()?;
            rows.push(SparseRow::new(indices, weights, rhs)?);
        }
        if cursor.pos != data.len() {
            return Err(Error::Format("trailing bytes after last row".into()));
        }
        let system = Self::new(rows, num_cols)?;
        if system.num_rows() != num_rows {
            return Err(Error::Format("file contains empty rows".into()));
        }
        Ok(system)
    }
}

struct ByteCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> ByteCursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.data.len() {
            return Err(Error::Format("unexpected end of file".into()));
        }
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
