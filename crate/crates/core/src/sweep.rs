//! Tabular sweep output and its CSV/JSON encodings.
//!
//! CSV layout: one `#`-prefixed JSON line carrying the metadata, a header
//! row `axis,series…,note`, then one row per axis value. Numbers use the
//! shortest representation that parses back to the same `f64`; missing
//! values are empty fields (JSON `null`).

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis_name: String,
    pub axis_values: Vec<f64>,
    pub series: Vec<Series>,
    /// Per-row diagnostics, e.g. points skipped outside a domain guard.
    pub notes: Vec<Option<String>>,
    pub metadata: Value,
}

const NOTE_COLUMN: &str = "note";

fn fmt_f64(x: f64) -> String {
    ryu::Buffer::new().format_finite(x).to_owned()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

impl SweepResult {
    pub fn new(axis_name: impl Into<String>, axis_values: Vec<f64>, metadata: Value) -> Self {
        let n = axis_values.len();
        SweepResult {
            axis_name: axis_name.into(),
            axis_values,
            series: Vec::new(),
            notes: vec![None; n],
            metadata,
        }
    }

    pub fn len(&self) -> usize {
        self.axis_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis_values.is_empty()
    }

    /// Append a column; non-finite values are stored as missing.
    pub fn push_series(&mut self, name: impl Into<String>, values: Vec<Option<f64>>) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch(values.len(), self.len()));
        }
        let values = values
            .into_iter()
            .map(|v| v.filter(|x| x.is_finite()))
            .collect();
        self.series.push(Series {
            name: name.into(),
            values,
        });
        Ok(())
    }

    pub fn add_note(&mut self, row: usize, note: &str) {
        match &mut self.notes[row] {
            Some(existing) => {
                existing.push_str("; ");
                existing.push_str(note);
            }
            slot @ None => *slot = Some(note.to_owned()),
        }
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    /// Structural checks shared by both decoders.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if self.notes.len() != n {
            return Err(Error::Parse(format!(
                "{} notes for {n} rows",
                self.notes.len()
            )));
        }
        if self.axis_values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite axis value".into()));
        }
        for s in &self.series {
            if s.values.len() != n {
                return Err(Error::Parse(format!(
                    "series `{}` has {} values for {n} rows",
                    s.name,
                    s.values.len()
                )));
            }
            if s.values.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!(
                    "series `{}` holds a non-finite value",
                    s.name
                )));
            }
        }
        if !self.metadata.is_object() {
            return Err(Error::Parse("metadata must be a JSON object".into()));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("#");
        out.push_str(
            &serde_json::to_string(&self.metadata).map_err(|e| Error::Parse(e.to_string()))?,
        );
        out.push('\n');
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut header = vec![self.axis_name.as_str()];
        header.extend(self.series.iter().map(|s| s.name.as_str()));
        header.push(NOTE_COLUMN);
        w.write_record(&header).map_err(csv_err)?;
        for (i, x) in self.axis_values.iter().enumerate() {
            let mut row = vec![fmt_f64(*x)];
            row.extend(
                self.series
                    .iter()
                    .map(|s| s.values[i].map(fmt_f64).unwrap_or_default()),
            );
            row.push(self.notes[i].clone().unwrap_or_default());
            w.write_record(&row).map_err(csv_err)?;
        }
        let body = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| Error::Parse(e.to_string()))?);
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<SweepResult> {
        let (first, rest) = text
            .split_once('\n')
            .ok_or_else(|| Error::Parse("missing header".into()))?;
        let meta = first
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("missing metadata line".into()))?;
        let metadata: Value =
            serde_json::from_str(meta).map_err(|e| Error::Parse(format!("metadata: {e}")))?;
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(rest.as_bytes());
        let header = r.headers().map_err(csv_err)?.clone();
        if header.len() < 2 || &header[header.len() - 1] != NOTE_COLUMN {
            return Err(Error::Parse("header must be axis,series…,note".into()));
        }
        let names: Vec<String> = header
            .iter()
            .skip(1)
            .take(header.len() - 2)
            .map(str::to_owned)
            .collect();
        let mut out = SweepResult::new(&header[0], Vec::new(), metadata);
        out.series = names
            .into_iter()
            .map(|name| Series {
                name,
                values: Vec::new(),
            })
            .collect();
        let parse = |s: &str| -> Result<f64> {
            let x: f64 = s
                .parse()
                .map_err(|_| Error::Parse(format!("`{s}` is not a number")))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::Parse(format!("`{s}` is not finite")))
            }
        };
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() != header.len() {
                return Err(Error::Parse(format!(
                    "row has {} fields, header {}",
                    rec.len(),
                    header.len()
                )));
            }
            out.axis_values.push(parse(&rec[0])?);
            for (j, s) in out.series.iter_mut().enumerate() {
                let f = &rec[j + 1];
                s.values
                    .push(if f.is_empty() { None } else { Some(parse(f)?) });
            }
            let note = &rec[rec.len() - 1];
            out.notes.push((!note.is_empty()).then(|| note.to_owned()));
        }
        out.validate()?;
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<SweepResult> {
        let out: SweepResult =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("json: {e}")))?;
        out.validate()?;
        Ok(out)
    }
}
