//! Result table as CSV.

use std::path::Path;

use super::{fixed6, mark_equivalences, sort_rows, HarnessError, Method, ResultRow, Vary};
use crate::kernels::Measure;

pub const CSV_HEADER: &str =
    "measure,method,vary,value,best_alpha,ari_mean,ari_std,replicates_used,skipped,avg_clusters";

/// Rows sorted by (value, method, measure), reals with six decimals.
pub fn emit_csv(rows: &[ResultRow]) -> String {
    let mut rows = rows.to_vec();
    sort_rows(&mut rows);
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(','))
        .expect("writing to memory");
    for r in &rows {
        w.write_record([
            r.measure.to_string(),
            r.method.to_string(),
            r.vary.to_string(),
            r.value.to_string(),
            fixed6(r.best_alpha),
            fixed6(r.ari_mean),
            fixed6(r.ari_std),
            r.replicates_used.to_string(),
            r.skipped.to_string(),
            fixed6(r.avg_clusters),
        ])
        .expect("writing to memory");
    }
    let bytes = w.into_inner().expect("flushing to memory");
    String::from_utf8(bytes).expect("ascii output")
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, emit_csv(rows))?;
    Ok(())
}

/// Reads a table written by [`emit_csv`]. Equivalence markers are
/// restored with [`mark_equivalences`].
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>, HarnessError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| HarnessError::Csv {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(HarnessError::Csv {
            line: 1,
            message: "missing or unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| HarnessError::Csv {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let err = |message: String| HarnessError::Csv { line, message };
        let f: Vec<&str> = record.iter().collect();
        let real = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| err(format!("'{s}' is not a number")))
        };
        let count = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(format!("'{s}' is not a count")))
        };
        let measure: Measure = f[0].parse().map_err(err)?;
        let method: Method = f[1].parse().map_err(err)?;
        let vary: Vary = f[2].parse().map_err(err)?;
        let value = vary.parse_value(f[3]).map_err(err)?;
        rows.push(ResultRow {
            measure,
            method,
            vary,
            value,
            best_alpha: real(f[4])?,
            ari_mean: real(f[5])?,
            ari_std: real(f[6])?,
            replicates_used: count(f[7])?,
            skipped: count(f[8])?,
            avg_clusters: real(f[9])?,
            equivalent_to: None,
        });
    }
    mark_equivalences(&mut rows);
    Ok(rows)
}
