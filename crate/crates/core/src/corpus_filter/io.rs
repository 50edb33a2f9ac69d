//! Reading and writing line corpora.
//!
//! Plain-text inputs hold one sentence per line. JSON-lines inputs (`.jsonl`,
//! `.ndjson`) hold one object per line with a string `text` field; a `text`
//! value spanning several lines yields one [`RawLine`] per non-blank line, each
//! carrying the record's other fields. Invalid UTF-8 is decoded lossily so the
//! classifier can reject it as malformed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use super::RawLine;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    PlainText,
    JsonLines,
}

impl CorpusFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "ndjson") => CorpusFormat::JsonLines,
            _ => CorpusFormat::PlainText,
        }
    }
}

/// A corpus line plus, for JSON-lines input, the record's remaining fields.
#[derive(Debug, Clone)]
pub struct CorpusRecord {
    pub line: RawLine,
    pub fields: Option<Map<String, Value>>,
}

/// Streams every input file in argument order.
pub struct CorpusReader {
    paths: std::vec::IntoIter<PathBuf>,
    current: Option<FileLines>,
    pending: std::vec::IntoIter<CorpusRecord>,
}

struct FileLines {
    path: PathBuf,
    source_id: String,
    format: CorpusFormat,
    reader: BufReader<File>,
    line_number: u64,
    buf: Vec<u8>,
}

impl CorpusReader {
    pub fn open<P: AsRef<Path>>(paths: &[P]) -> Result<Self> {
        // Fail early on missing inputs rather than halfway through the stream.
        for p in paths {
            let p = p.as_ref();
            if !p.is_file() {
                return Err(Error::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "input not found"),
                ));
            }
        }
        Ok(Self {
            paths: paths
                .iter()
                .map(|p| p.as_ref().to_path_buf())
                .collect::<Vec<_>>()
                .into_iter(),
            current: None,
            pending: Vec::new().into_iter(),
        })
    }

    /// Adapts the reader into the `Result<RawLine>` stream the filters take.
    pub fn lines(self) -> impl Iterator<Item = Result<RawLine>> {
        self.map(|r| r.map(|rec| rec.line))
    }

    fn next_file(&mut self) -> Option<Result<()>> {
        let path = self.paths.next()?;
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) => return Some(Err(Error::io(&path, e))),
        };
        let source_id = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.current = Some(FileLines {
            format: CorpusFormat::from_path(&path),
            path,
            source_id,
            reader: BufReader::new(file),
            line_number: 0,
            buf: Vec::new(),
        });
        Some(Ok(()))
    }
}

impl Iterator for CorpusReader {
    type Item = Result<CorpusRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(rec) = self.pending.next() {
                return Some(Ok(rec));
            }
            let Some(file) = self.current.as_mut() else {
                match self.next_file()? {
                    Ok(()) => continue,
                    Err(e) => return Some(Err(e)),
                }
            };
            file.buf.clear();
            let n = match file.reader.read_until(b'\n', &mut file.buf) {
                Ok(n) => n,
                Err(source) => {
                    return Some(Err(Error::CorpusRead {
                        source_id: file.source_id.clone(),
                        line_number: file.line_number + 1,
                        source,
                    }))
                }
            };
            if n == 0 {
                self.current = None;
                continue;
            }
            file.line_number += 1;
            while matches!(file.buf.last(), Some(b'\n' | b'\r')) {
                file.buf.pop();
            }
            let text = String::from_utf8_lossy(&file.buf).into_owned();
            match file.format {
                CorpusFormat::PlainText => {
                    return Some(Ok(CorpusRecord {
                        line: RawLine::new(text, file.source_id.clone(), file.line_number),
                        fields: None,
                    }))
                }
                CorpusFormat::JsonLines => {
                    if text.trim().is_empty() {
                        continue;
                    }
                    match split_json_record(&text, &file.source_id, file.line_number) {
                        Ok(records) => self.pending = records.into_iter(),
                        Err(message) => {
                            return Some(Err(Error::Record {
                                path: file.path.clone(),
                                line: file.line_number,
                                message,
                            }))
                        }
                    }
                }
            }
        }
    }
}

fn split_json_record(
    text: &str,
    source_id: &str,
    line_number: u64,
) -> std::result::Result<Vec<CorpusRecord>, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let Value::Object(mut fields) = value else {
        return Err("expected a JSON object".into());
    };
    let body = match fields.remove("text") {
        Some(Value::String(s)) => s,
        Some(_) => return Err("`text` is not a string".into()),
        None => return Err("missing `text` field".into()),
    };
    let parts: Vec<&str> = body.lines().filter(|l| !l.trim().is_empty()).collect();
    if parts.is_empty() {
        // Keep the empty record so it is counted (and rejected as malformed).
        return Ok(vec![CorpusRecord {
            line: RawLine::new(body.as_str(), source_id, line_number),
            fields: Some(fields),
        }]);
    }
    Ok(parts
        .into_iter()
        .map(|part| CorpusRecord {
            line: RawLine::new(part, source_id, line_number),
            fields: Some(fields.clone()),
        })
        .collect())
}

/// Writes kept lines in the given format.
pub struct CorpusWriter {
    path: PathBuf,
    format: CorpusFormat,
    out: BufWriter<File>,
}

impl CorpusWriter {
    pub fn create(path: &Path, format: CorpusFormat) -> Result<Self> {
        Ok(Self {
            out: crate::jsonl::create(path)?,
            path: path.to_path_buf(),
            format,
        })
    }

    /// Writes `text`, reusing `fields` for JSON-lines output.
    pub fn write(&mut self, text: &str, fields: Option<&Map<String, Value>>) -> Result<()> {
        match self.format {
            CorpusFormat::PlainText => {
                self.out
                    .write_all(text.as_bytes())
                    .and_then(|_| self.out.write_all(b"\n"))
                    .map_err(|e| Error::io(&self.path, e))?;
            }
            CorpusFormat::JsonLines => {
                let mut obj = Map::new();
                obj.insert("text".into(), Value::String(text.to_string()));
                if let Some(fields) = fields {
                    for (k, v) in fields {
                        obj.insert(k.clone(), v.clone());
                    }
                }
                serde_json::to_writer(&mut self.out, &obj)?;
                self.out
                    .write_all(b"\n")
                    .map_err(|e| Error::io(&self.path, e))?;
            }
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}
