//! CSV encoding of sweep records.
//!
//! Floats are written with 12 significant digits in the shortest decimal form
//! that reproduces the rounded value, so writing, reading and writing again is
//! byte-identical.

use std::io::{Read, Write};

use thiserror::Error;

use crate::npa::NpaLevel;
use crate::optimize::{SweepRecord, SweepStatus};

pub const HEADER: [&str; 6] = ["eps", "local_bound", "quantum_lower", "quantum_upper", "level", "status"];

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("row {row}: bad {column} value {value:?}")]
    Field { row: usize, column: &'static str, value: String },
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn format_sig(x: f64) -> String {
    let r = round_sig(x);
    // Avoid "-0" for values that round to zero from below.
    if r == 0.0 {
        "0".to_string()
    } else {
        r.to_string()
    }
}

pub fn write_records<W: Write>(records: &[SweepRecord], out: W) -> Result<(), TableError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([
            format_sig(r.eps),
            format_sig(r.local_bound),
            format_sig(r.quantum_lower),
            format_sig(r.quantum_upper),
            r.level.to_string(),
            r.status.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<SweepRecord>, TableError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?;
    if header.iter().ne(HEADER) {
        return Err(TableError::Header(header.iter().map(str::to_string).collect()));
    }
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or_default();
        let bad = |i: usize| TableError::Field { row, column: HEADER[i], value: field(i).to_string() };
        let num = |i: usize| field(i).parse::<f64>().map_err(|_| bad(i));
        out.push(SweepRecord {
            eps: num(0)?,
            local_bound: num(1)?,
            quantum_lower: num(2)?,
            quantum_upper: num(3)?,
            level: field(4).parse::<NpaLevel>().map_err(|_| bad(4))?,
            status: field(5).parse::<SweepStatus>().map_err(|_| bad(5))?,
        });
    }
    Ok(out)
}
