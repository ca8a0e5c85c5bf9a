use crate::error::{Error, Result};

/// The box `[lo, hi]^J`; the unit box by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxBounds {
    lo: f64,
    hi: f64,
}

impl BoxBounds {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "box bounds must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn clamp(&self, v: f64) -> f64 {
        if v < self.lo {
            self.lo
        } else if v > self.hi {
            self.hi
        } else {
            v
        }
    }

    pub fn contains(&self, values: &[f64]) -> bool {
        values.iter().all(|&v| v >= self.lo && v <= self.hi)
    }

    pub fn project_in_place(&self, values: &mut [f64]) {
        for v in values {
            *v = self.clamp(*v);
        }
    }
}

impl Default for BoxBounds {
    fn default() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }
}
