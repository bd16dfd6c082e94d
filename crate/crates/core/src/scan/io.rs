// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON output. Floats are written with `{:e}`, which round-trips.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::table::{ScanRow, ScanTable};
use crate::error::{OttoError, Result};

fn csv_err(e: csv::Error) -> OttoError {
    OttoError::Io(std::io::Error::other(e))
}

/// Writes a header plus string rows.
pub fn write_csv<W: Write, S: AsRef<str>>(out: W, header: &[S], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header.iter().map(|s| s.as_ref())).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table<W: Write>(table: &ScanTable, out: W) -> Result<()> {
    write_csv(out, &ScanRow::HEADER, table.rows.iter().map(|r| r.csv_fields()))
}

pub fn write_table_file(table: &ScanTable, path: &Path) -> Result<()> {
    write_table(table, BufWriter::new(File::create(path)?))
}

/// Writes numeric rows with `{:e}` formatting.
pub fn write_numeric_csv<S: AsRef<str>>(path: &Path, header: &[S], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().map(|x| format!("{x:e}")).collect());
    write_csv(BufWriter::new(File::create(path)?), header, rows)
}

/// Pretty JSON with a trailing newline. NaN and infinities become `null`.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}
