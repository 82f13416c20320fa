use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoadOptions {
    pub column: usize,
    /// Keep only the first `n` values (e.g. 130 for Earthrot, 150 for CO2).
    pub take_first: Option<usize>,
}

pub fn load_csv(path: impl AsRef<Path>, column: usize) -> Result<TimeSeries> {
    load_csv_with(
        path,
        &LoadOptions {
            column,
            take_first: None,
        },
    )
}

/// Reads one numeric column. Non-numeric lines are accepted only as a
/// leading header block; blank lines are ignored.
pub fn load_csv_with(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = record.get(opts.column).unwrap_or("");
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            _ if values.is_empty() => continue,
            _ => {
                return Err(Error::NonNumeric {
                    line,
                    column: opts.column,
                    value: field.to_string(),
                })
            }
        }
        if opts.take_first.is_some_and(|n| values.len() >= n) {
            break;
        }
    }
    if values.is_empty() {
        return Err(Error::EmptySeries(path.to_path_buf()));
    }
    let name = path
        .file_stem()
        .map_or_else(|| "series".to_string(), |s| s.to_string_lossy().into_owned());
    TimeSeries::new(name, values)
}

/// One value per line at full round-trip precision.
pub fn write_column(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    for v in values {
        writeln!(out, "{v}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
