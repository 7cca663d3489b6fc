use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TRACE_HEADER: [&str; 6] = ["t", "f_R", "f_GS", "grad_norm", "feas_gap", "signal_error"];

/// One recorded iteration. Optional cells are written as empty CSV fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: usize,
    #[serde(rename = "f_R")]
    pub f_r: f64,
    #[serde(rename = "f_GS")]
    pub f_gs: f64,
    pub grad_norm: Option<f64>,
    pub feas_gap: f64,
    pub signal_error: Option<f64>,
}

impl TraceRow {
    fn values(&self) -> impl Iterator<Item = f64> {
        [Some(self.f_r), Some(self.f_gs), self.grad_norm, Some(self.feas_gap), self.signal_error]
            .into_iter()
            .flatten()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterTrace {
    rows: Vec<TraceRow>,
}

impl IterTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a row; `t` must exceed the last recorded `t` and every value must be finite.
    pub fn push(&mut self, row: TraceRow) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if row.t <= last.t {
                return Err(Error::invalid("t", format!("{} does not follow {}", row.t, last.t)));
            }
        }
        if row.values().any(|v| !v.is_finite()) {
            return Err(Error::invalid("row", format!("non-finite value recorded at t = {}", row.t)));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of sign changes of `f_R` along the trace, skipping values with
    /// `|f_R| <= floor`.
    pub fn f_r_sign_changes(&self, floor: f64) -> usize {
        let mut last = 0.0f64;
        let mut changes = 0;
        for r in &self.rows {
            if r.f_r.abs() <= floor {
                continue;
            }
            let s = r.f_r.signum();
            if last != 0.0 && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.rows.is_empty() {
            w.write_record(TRACE_HEADER)?;
        }
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let header = rdr.headers()?.clone();
        if header.iter().ne(TRACE_HEADER) {
            return Err(Error::invalid("header", format!("unexpected trace header {header:?}")));
        }
        let mut trace = IterTrace::new();
        for row in rdr.deserialize() {
            trace.push(row?)?;
        }
        Ok(trace)
    }
}
