//! `user,item,rating` files with 1-based indices and an optional header.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::engine::CostEvent;
use crate::error::{OfwError, Result};

/// One revealed rating. Indices are 0-based in memory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatingRecord {
    pub user: usize,
    pub item: usize,
    pub rating: f64,
}

impl RatingRecord {
    pub fn to_event(self) -> CostEvent {
        CostEvent::MatrixEntry { i: self.user, j: self.item, rating: self.rating }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatingSet {
    /// Largest user index seen (or the override).
    pub rows: usize,
    pub cols: usize,
    pub records: Vec<RatingRecord>,
}

pub fn load_ratings(path: &Path) -> Result<RatingSet> {
    parse_ratings(File::open(path)?)
}

fn parse_index(field: &str, what: &str, line: usize) -> Result<usize> {
    match field.parse::<i64>() {
        Ok(v) if v >= 1 => Ok(v as usize - 1),
        Ok(v) => Err(OfwError::Parse { line, msg: format!("{what} index {v} must be >= 1") }),
        Err(_) => Err(OfwError::Parse { line, msg: format!("{what} index '{field}' is not an integer") }),
    }
}

/// Parses ratings in file order. A first line whose fields are not all
/// numeric is taken as a header.
pub fn parse_ratings<R: Read>(input: R) -> Result<RatingSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut records = Vec::new();
    let (mut rows, mut cols) = (0, 0);
    for (k, row) in reader.records().enumerate() {
        let row = row.map_err(|e| OfwError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = row.position().map_or(k + 1, |p| p.line() as usize);
        if k == 0 && row.iter().any(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if row.len() != 3 {
            return Err(OfwError::Parse { line, msg: format!("expected 3 fields, found {}", row.len()) });
        }
        let user = parse_index(&row[0], "user", line)?;
        let item = parse_index(&row[1], "item", line)?;
        let rating: f64 = row[2]
            .parse()
            .map_err(|_| OfwError::Parse { line, msg: format!("rating '{}' is not a number", &row[2]) })?;
        if !rating.is_finite() {
            return Err(OfwError::Parse { line, msg: "rating is not finite".into() });
        }
        rows = rows.max(user + 1);
        cols = cols.max(item + 1);
        records.push(RatingRecord { user, item, rating });
    }
    Ok(RatingSet { rows, cols, records })
}

/// Writes records with a header, 1-based indices and round-trip precision.
pub fn write_ratings<W: Write>(out: W, records: &[RatingRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| OfwError::Io(std::io::Error::other(e));
    w.write_record(["user", "item", "rating"]).map_err(io)?;
    for r in records {
        w.write_record([(r.user + 1).to_string(), (r.item + 1).to_string(), format!("{:?}", r.rating)]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
