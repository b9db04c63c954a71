//! Per-round run records and their CSV form.

use std::io::Write;
use std::time::Duration;

use crate::error::{OfwError, Result};

pub const CSV_HEADER: &str = "t,loss,cum_regret,delta_t,support_size,elapsed_ns";

/// Rows between explicit flushes of a trace file.
pub const FLUSH_EVERY: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: usize,
    pub loss: f64,
    /// Unknown when the run has no comparator.
    pub cum_regret: Option<f64>,
    /// Gap of the averaged objective, when its minimizer has a closed form.
    pub delta_t: Option<f64>,
    pub support_size: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Default)]
pub struct RegretTrace {
    pub records: Vec<RoundRecord>,
    /// Rounds whose linear oracle returned an unconverged power iterate.
    pub lmo_warnings: usize,
}

impl RegretTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn losses(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.loss).collect()
    }

    pub fn total_elapsed(&self) -> Duration {
        self.records.iter().map(|r| r.elapsed).sum()
    }

    pub fn mean_round_time(&self) -> Duration {
        if self.records.is_empty() {
            return Duration::ZERO;
        }
        self.total_elapsed() / self.records.len() as u32
    }

    /// Overwrites the `cum_regret` column.
    pub fn set_regret(&mut self, cumulative: &[f64]) -> Result<()> {
        if cumulative.len() != self.records.len() {
            return Err(OfwError::Input(format!(
                "{} regret values for {} records",
                cumulative.len(),
                self.records.len()
            )));
        }
        for (r, &c) in self.records.iter_mut().zip(cumulative) {
            r.cum_regret = Some(c);
        }
        Ok(())
    }

    pub fn final_regret(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.cum_regret)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = TraceWriter::new(out)?;
        for r in &self.records {
            w.push(r)?;
        }
        w.finish()?;
        Ok(())
    }
}

/// Streams records to CSV, flushing every [`FLUSH_EVERY`] rows.
pub struct TraceWriter<W: Write> {
    out: W,
    rows: usize,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W) -> Result<Self> {
        writeln!(out, "{CSV_HEADER}")?;
        Ok(Self { out, rows: 0 })
    }

    pub fn push(&mut self, r: &RoundRecord) -> Result<()> {
        let opt = |v: Option<f64>| v.map(|d| format!("{d:e}")).unwrap_or_default();
        writeln!(
            self.out,
            "{},{:e},{},{},{},{}",
            r.t,
            r.loss,
            opt(r.cum_regret),
            opt(r.delta_t),
            r.support_size,
            r.elapsed.as_nanos()
        )?;
        self.rows += 1;
        if self.rows.is_multiple_of(FLUSH_EVERY) {
            self.out.flush()?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}
