use std::io::{Read, Write};

use super::HarnessError;
use crate::optim::TraceRow;

pub const CSV_HEADER: [&str; 10] = [
    "t", "lambda", "f", "w11", "w22", "sum_diag", "diff_diag", "grad_fro", "favg", "bound",
];

/// One parsed CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRecord {
    pub row: TraceRow,
    pub sum_diag: f64,
    pub diff_diag: f64,
    pub bound: Option<f64>,
}

fn float(x: f64) -> String {
    // 17 significant digits round-trip every f64.
    format!("{x:.16e}")
}

fn csv_err(e: ::csv::Error) -> HarnessError {
    match e.kind() {
        ::csv::ErrorKind::Io(_) => HarnessError::Io(e.to_string()),
        _ => HarnessError::Config(format!("malformed trace csv: {e}")),
    }
}

/// Header plus one line per row, LF terminated. `bound` must be empty or as
/// long as `rows`; missing entries are written as empty fields.
pub fn write_csv<W: Write>(out: W, rows: &[TraceRow], bound: &[Option<f64>]) -> Result<(), HarnessError> {
    if !bound.is_empty() && bound.len() != rows.len() {
        return Err(HarnessError::Config(format!(
            "bound column has {} entries for {} rows",
            bound.len(),
            rows.len()
        )));
    }
    let mut w = ::csv::WriterBuilder::new()
        .terminator(::csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for (i, r) in rows.iter().enumerate() {
        let b = bound.get(i).copied().flatten().map(float).unwrap_or_default();
        w.write_record([
            r.t.to_string(),
            float(r.lambda),
            float(r.f),
            float(r.w11),
            float(r.w22),
            float(r.sum_diag()),
            float(r.diff_diag()),
            float(r.grad_fro),
            float(r.favg),
            b,
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRecord>, HarnessError> {
    let mut reader = ::csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(HarnessError::Config(format!("unexpected csv header: {header:?}")));
    }
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let bad = |what: &str| HarnessError::Config(format!("row {}: bad {what}", line + 1));
        let num = |i: usize| -> Result<f64, HarnessError> { record[i].parse().map_err(|_| bad(CSV_HEADER[i])) };
        let t = record[0].parse().map_err(|_| bad("t"))?;
        let bound = match &record[9] {
            "" => None,
            _ => Some(num(9)?),
        };
        out.push(CsvRecord {
            row: TraceRow {
                t,
                lambda: num(1)?,
                f: num(2)?,
                w11: num(3)?,
                w22: num(4)?,
                grad_fro: num(7)?,
                favg: num(8)?,
            },
            sum_diag: num(5)?,
            diff_diag: num(6)?,
            bound,
        });
    }
    Ok(out)
}
