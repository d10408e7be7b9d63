use std::io::{Read, Write};
use std::path::Path;

use anyhow::{Context as _, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

use dyadic_riesz::io::{from_json, to_json};

use crate::failure::{lib, usage};

pub fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

pub fn read_doc<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&read_text(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn json<T: Serialize>(body: &T) -> Result<String> {
    Ok(to_json(body).map_err(lib)? + "\n")
}

/// Writes to `path` through a temporary file in the same directory, or to
/// stdout.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("creating temporary file in {}", dir.display()))?;
            tmp.write_all(text.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path)
                .with_context(|| format!("replacing {}", path.display()))?;
        }
    }
    Ok(())
}

/// CSV with a `# schema: 1` line, optional `# key: value` lines and a header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub notes: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            notes: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.into(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> Result<String> {
        let mut out = String::from("# schema: 1\n");
        for (k, v) in &self.notes {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        out.push_str(std::str::from_utf8(&w.into_inner()?)?);
        Ok(out)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut notes = Vec::new();
        let mut schema = None;
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            if let Some((k, v)) = line[1..].split_once(':') {
                let (k, v) = (k.trim(), v.trim());
                if k == "schema" {
                    schema = Some(v.to_string());
                } else {
                    notes.push((k.to_string(), v.to_string()));
                }
            }
        }
        if schema.as_deref() != Some("1") {
            return Err(usage(format!("{origin}: missing or unsupported `# schema: 1` line")));
        }
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = r
            .headers()
            .map_err(|e| usage(format!("{origin}: {e}")))?
            .iter()
            .map(String::from)
            .collect();
        let rows = r
            .records()
            .map(|rec| {
                rec.map(|rec| rec.iter().map(String::from).collect())
                    .map_err(|e| usage(format!("{origin}: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { notes, header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Rows of real numbers, one per cell; blank lines and `#` lines are skipped.
pub fn parse_samples(text: &str, origin: &str) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| usage(format!("{origin}: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = rec
            .iter()
            .enumerate()
            .map(|(f, s)| {
                s.parse::<f64>().map_err(|_| {
                    usage(format!("{origin}: line {line}, field {}: `{s}` is not a number", f + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(usage(format!(
                    "{origin}: line {line} has {} fields, expected {}",
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn fmt_f64(x: f64) -> String {
    // shortest representation that round-trips
    format!("{x:?}")
}
