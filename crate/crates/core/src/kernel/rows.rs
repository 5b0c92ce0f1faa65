use std::io::Write;

use serde::Serialize;

use crate::Result;

/// One line of `norms.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRow {
    pub label: String,
    pub t: f64,
    pub value: f64,
    pub pipeline: String,
    pub truncation_quality: f64,
}

pub const NORM_HEADER: &str = "label,t,value,pipeline,truncation_quality";

/// Writes the header and rows. Floats use the shortest round-trip form so
/// identical runs give identical bytes.
pub fn write_norm_rows<W: Write>(mut w: W, rows: &[NormRow]) -> Result<()> {
    writeln!(w, "{NORM_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.label, r.t, r.value, r.pipeline, r.truncation_quality)?;
    }
    Ok(())
}
