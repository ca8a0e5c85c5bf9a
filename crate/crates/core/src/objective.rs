//! Total variation of an image and its derivatives.
//!
//! `TV(X) = sum_{g<G, h<H} sqrt((X[g+1,h] - X[g,h])^2 + (X[g,h+1] - X[g,h])^2)`.
//! Each pixel's partial derivative collects at most three fractions: its own
//! term, the term above it and the term to its left.

use crate::image::{norm2, ImageVector};

/// Partial derivatives of TV with guarded components set to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TVGradient {
    pub components: Vec<f64>,
    /// Pixels whose component was zeroed because a contributing fraction had
    /// a denominator below the guard.
    pub guarded: Vec<bool>,
}

impl TVGradient {
    pub fn norm(&self) -> f64 {
        norm2(&self.components)
    }
}

/// Unit steepest-descent direction, or zero when the gradient vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct NonascendingDirection {
    pub direction: Vec<f64>,
}

impl NonascendingDirection {
    pub fn norm(&self) -> f64 {
        norm2(&self.direction)
    }

    pub fn is_zero(&self) -> bool {
        self.direction.iter().all(|&v| v == 0.0)
    }
}

pub fn tv_value(x: &ImageVector) -> f64 {
    tv_value_slice(x.as_slice(), x.rows(), x.cols())
}

pub(crate) fn tv_value_slice(x: &[f64], rows: usize, cols: usize) -> f64 {
    let mut total = 0.0;
    for r in 0..rows.saturating_sub(1) {
        let here = &x[r * cols..(r + 1) * cols];
        let below = &x[(r + 1) * cols..(r + 2) * cols];
        for c in 0..cols - 1 {
            let d1 = below[c] - here[c];
            let d2 = here[c + 1] - here[c];
            total += (d1 * d1 + d2 * d2).sqrt();
        }
    }
    total
}

pub fn tv_gradient(x: &ImageVector, guard: f64) -> TVGradient {
    let mut components = vec![0.0; x.len()];
    let mut guarded = vec![false; x.len()];
    tv_gradient_slice(x.as_slice(), x.rows(), x.cols(), guard, &mut components, &mut guarded);
    TVGradient { components, guarded }
}

/// Writes the guarded gradient into `out`; `guarded` is scratch of length `J`.
pub(crate) fn tv_gradient_slice(
    x: &[f64],
    rows: usize,
    cols: usize,
    guard: f64,
    out: &mut [f64],
    guarded: &mut [bool],
) {
    out.fill(0.0);
    guarded.fill(false);
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols - 1 {
            let j = r * cols + c;
            let d1 = x[j + cols] - x[j];
            let d2 = x[j + 1] - x[j];
            let n = (d1 * d1 + d2 * d2).sqrt();
            if n < guard {
                guarded[j] = true;
                guarded[j + cols] = true;
                guarded[j + 1] = true;
            } else {
                out[j] -= (d1 + d2) / n;
                out[j + cols] += d1 / n;
                out[j + 1] += d2 / n;
            }
        }
    }
    for (o, &g) in out.iter_mut().zip(guarded.iter()) {
        if g {
            *o = 0.0;
        }
    }
}

/// `v = -w / ||w||` for the guarded gradient `w`, or zero if `w = 0`.
pub fn nonascending_direction(x: &ImageVector, guard: f64) -> NonascendingDirection {
    let mut direction = vec![0.0; x.len()];
    let mut scratch = vec![false; x.len()];
    nonascending_direction_slice(x.as_slice(), x.rows(), x.cols(), guard, &mut direction, &mut scratch);
    NonascendingDirection { direction }
}

/// Returns the norm of the resulting direction (0 or 1).
pub(crate) fn nonascending_direction_slice(
    x: &[f64],
    rows: usize,
    cols: usize,
    guard: f64,
    out: &mut [f64],
    scratch: &mut [bool],
) -> f64 {
    tv_gradient_slice(x, rows, cols, guard, out, scratch);
    let n = norm2(out);
    if n == 0.0 {
        return 0.0;
    }
    for v in out.iter_mut() {
        *v = -*v / n;
    }
    norm2(out)
}

/// An element of the subdifferential of TV: each nondegenerate term adds its
/// gradient, each term with zero norm adds nothing.
pub fn tv_subgradient(x: &ImageVector) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    tv_subgradient_slice(x.as_slice(), x.rows(), x.cols(), &mut out);
    out
}

pub(crate) fn tv_subgradient_slice(x: &[f64], rows: usize, cols: usize, out: &mut [f64]) {
    out.fill(0.0);
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols - 1 {
            let j = r * cols + c;
            let d1 = x[j + cols] - x[j];
            let d2 = x[j + 1] - x[j];
            let n = (d1 * d1 + d2 * d2).sqrt();
            if n > 0.0 {
                out[j] -= (d1 + d2) / n;
                out[j + cols] += d1 / n;
                out[j + 1] += d2 / n;
            }
        }
    }
}
