use std::fs::File;
use std::io::{BufRead, BufReader, Read, Seek};
use std::path::Path;

use log::warn;

use super::{LabeledExample, TaskSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TabularLoad {
    pub examples: Vec<LabeledExample>,
    /// Rows whose field count differs from the header's.
    pub malformed_rows: usize,
}

/// Reads a comma- or tab-separated file with a header row.
///
/// Tabs are used for `.tsv`/`.tab` files, or when the header line contains a
/// tab. Example ids are 0-based data row indices, counting malformed rows, so
/// an id always points at the same row of the file. A `context` column is read
/// when present.
pub fn load_tabular(path: &Path, task: &TaskSpec) -> Result<TabularLoad> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let delimiter = detect_delimiter(path, &mut file)?;
    file.rewind().map_err(|e| Error::io(path, e))?;

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| Error::Tabular(format!("{}: {e}", path.display())))?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let text_col = column(&task.text_column)
        .ok_or_else(|| Error::MissingColumn(task.text_column.clone()))?;
    let label_col = column(&task.label_column)
        .ok_or_else(|| Error::MissingColumn(task.label_column.clone()))?;
    let context_col = column("context");

    let mut out = TabularLoad::default();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Tabular(format!("{}: {e}", path.display())))?;
        if record.len() != headers.len() {
            let line = record.position().map_or(0, |p| p.line());
            warn!(
                "{}:{line}: expected {} fields, found {}; row dropped",
                path.display(),
                headers.len(),
                record.len()
            );
            out.malformed_rows += 1;
            continue;
        }
        out.examples.push(LabeledExample {
            id: row.to_string(),
            text: record[text_col].to_string(),
            label: record[label_col].to_string(),
            context: context_col
                .map(|c| record[c].to_string())
                .filter(|c| !c.trim().is_empty()),
        });
    }
    Ok(out)
}

fn detect_delimiter(path: &Path, file: &mut File) -> Result<u8> {
    let by_extension = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("tsv") || e.eq_ignore_ascii_case("tab"));
    if by_extension {
        return Ok(b'\t');
    }
    let mut header = Vec::new();
    BufReader::new(file.by_ref())
        .read_until(b'\n', &mut header)
        .map_err(|e| Error::io(path, e))?;
    Ok(if header.contains(&b'\t') { b'\t' } else { b',' })
}
