//! Per-iteration records and run summaries.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub k: usize,
    pub prox: f64,
    pub phi: f64,
    pub elapsed_seconds: f64,
}

/// Iteration history of a solver run. `k` is strictly increasing and
/// `elapsed_seconds` nondecreasing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    records: Vec<TraceRecord>,
}

impl IterationTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, k: usize, prox: f64, phi: f64, elapsed_seconds: f64) {
        if let Some(last) = self.records.last() {
            assert!(k > last.k, "trace indices must increase ({} after {})", k, last.k);
        }
        let elapsed_seconds = self
            .records
            .last()
            .map_or(elapsed_seconds, |last| elapsed_seconds.max(last.elapsed_seconds));
        self.records.push(TraceRecord {
            k,
            prox,
            phi,
            elapsed_seconds,
        });
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// First record whose proximity is at most `epsilon`.
    pub fn first_at_or_below(&self, epsilon: f64) -> Option<&TraceRecord> {
        self.records.iter().find(|r| r.prox <= epsilon)
    }

    /// CSV with header `k,prox,phi,seconds`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,prox,phi,seconds")?;
        for r in &self.records {
            writeln!(out, "{},{},{},{}", r.k, r.prox, r.phi, r.elapsed_seconds)?;
        }
        Ok(())
    }

    /// CSV without the timing column, for comparing runs byte for byte.
    pub fn to_csv_untimed(&self) -> String {
        let mut s = String::from("k,prox,phi\n");
        for r in &self.records {
            s.push_str(&format!("{},{},{}\n", r.k, r.prox, r.phi));
        }
        s
    }
}

/// JSON summary written next to every run. Field order is the key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub solver: String,
    pub epsilon: Option<f64>,
    pub iterations: usize,
    pub final_prox: f64,
    pub final_tv: f64,
    pub seconds: f64,
    pub total_beta_consumed: Option<f64>,
    pub ell_final: Option<i64>,
    pub achieved_epsilon: Option<f64>,
    pub converged: bool,
    pub failure: Option<String>,
    pub row_order: String,
    pub seed: Option<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = IterationTrace::new();
        t.push(0, 5.0, 0.0, 0.0);
        t.push(1, 0.25, 1.5, 0.01);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "k,prox,phi,seconds\n0,5,0,0\n1,0.25,1.5,0.01\n"
        );
        assert_eq!(t.to_csv_untimed(), "k,prox,phi\n0,5,0\n1,0.25,1.5\n");
        assert_eq!(t.first_at_or_below(1.0).unwrap().k, 1);
    }

    #[test]
    fn elapsed_is_kept_monotone() {
        let mut t = IterationTrace::new();
        t.push(0, 1.0, 0.0, 0.5);
        t.push(1, 1.0, 0.0, 0.4);
        assert_eq!(t.records()[1].elapsed_seconds, 0.5);
    }

    #[test]
    #[should_panic]
    fn indices_must_increase() {
        let mut t = IterationTrace::new();
        t.push(3, 1.0, 0.0, 0.0);
        t.push(3, 1.0, 0.0, 0.0);
    }
}
