//! Header-keyed tables read from CSV or from their JSON mirror.
//!
//! A CSV file becomes one [`Row`] per record. The JSON mirror is an array of
//! objects whose keys are the CSV headers; entry `n` is reported as line `n`.

use std::fmt::Write as _;

use catsd_core::{IssueCode, ValidationReport};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn from_path(path: &str) -> Option<Format> {
        let lower = path.to_ascii_lowercase();
        if lower.ends_with(".csv") {
            Some(Format::Csv)
        } else if lower.ends_with(".json") {
            Some(Format::Json)
        } else {
            None
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub line: usize,
    pub cells: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// File name used in diagnostics.
    pub file: String,
    pub headers: Vec<String>,
    pub rows: Vec<Row>,
}

/// One row with its table context, for typed lookups that record issues.
pub struct Record<'a> {
    table: &'a Table,
    row: &'a Row,
}

impl Table {
    pub fn parse(file: &str, format: Format, bytes: &[u8]) -> Result<Table, ValidationReport> {
        match format {
            Format::Csv => parse_csv(file, bytes),
            Format::Json => parse_json(file, bytes),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h.eq_ignore_ascii_case(name))
    }

    /// Reports every missing column; true when all are present.
    pub fn require(&self, names: &[&str], report: &mut ValidationReport) -> bool {
        let mut ok = true;
        for name in names {
            if self.column(name).is_none() {
                ok = false;
                report.push(
                    IssueCode::MissingColumn,
                    format!("{}:1", self.file),
                    format!("missing column `{name}`"),
                );
            }
        }
        ok
    }

    pub fn records(&self) -> impl Iterator<Item = Record<'_>> {
        self.rows.iter().map(move |row| Record { table: self, row })
    }

    /// Headers other than `known`, in file order.
    pub fn extra_columns<'a>(&'a self, known: &'a [&str]) -> impl Iterator<Item = (usize, &'a str)> + 'a {
        self.headers
            .iter()
            .enumerate()
            .filter(move |(_, h)| !known.iter().any(|k| h.eq_ignore_ascii_case(k)))
            .map(|(i, h)| (i, h.as_str()))
    }
}

impl<'a> Record<'a> {
    pub fn location(&self) -> String {
        format!("{}:{}", self.table.file, self.row.line)
    }

    pub fn line(&self) -> usize {
        self.row.line
    }

    pub fn cell(&self, index: usize) -> &'a str {
        self.row.cells.get(index).map(String::as_str).unwrap_or("")
    }

    /// Trimmed text of a named column, `None` when absent or blank.
    pub fn opt(&self, name: &str) -> Option<&'a str> {
        let i = self.table.column(name)?;
        let text = self.cell(i).trim();
        (!text.is_empty()).then_some(text)
    }

    pub fn text(&self, name: &str, report: &mut ValidationReport) -> Option<&'a str> {
        let v = self.opt(name);
        if v.is_none() {
            report.push(IssueCode::BadValue, self.location(), format!("`{name}` is empty"));
        }
        v
    }

    pub fn number_at(&self, index: usize, report: &mut ValidationReport) -> Option<f64> {
        let header = &self.table.headers[index];
        parse_number(self.cell(index).trim(), header, &self.location(), report)
    }

    pub fn number(&self, name: &str, report: &mut ValidationReport) -> Option<f64> {
        let text = self.text(name, report)?;
        parse_number(text, name, &self.location(), report)
    }

    pub fn opt_number(&self, name: &str, report: &mut ValidationReport) -> Option<f64> {
        let text = self.opt(name)?;
        parse_number(text, name, &self.location(), report)
    }
}

fn parse_number(text: &str, name: &str, location: &str, report: &mut ValidationReport) -> Option<f64> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        _ => {
            report.push(
                IssueCode::BadValue,
                location,
                format!("`{name}` must be a number, got `{text}`"),
            );
            None
        }
    }
}

fn single(code: IssueCode, location: String, message: String) -> ValidationReport {
    let mut r = ValidationReport::default();
    r.push(code, location, message);
    r
}

fn parse_csv(file: &str, bytes: &[u8]) -> Result<Table, ValidationReport> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    // Reported positions can sit on the previous terminator, so resolve lines from bytes.
    let line_at = |byte: u64| {
        let mut at = (byte as usize).min(bytes.len());
        while at < bytes.len() && matches!(bytes[at], b'\r' | b'\n') {
            at += 1;
        }
        1 + bytes[..at].iter().filter(|&&b| b == b'\n').count()
    };
    let bad = |e: csv::Error| {
        let line = e.position().map_or(1, |p| line_at(p.byte()));
        single(IssueCode::BadValue, format!("{file}:{line}"), e.to_string())
    };
    let headers: Vec<String> = reader.headers().map_err(bad)?.iter().map(str::to_owned).collect();
    if headers.iter().all(String::is_empty) {
        return Err(single(
            IssueCode::MissingColumn,
            format!("{file}:1"),
            "the file has no header row".into(),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(bad)?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let line = record.position().map_or(0, |p| line_at(p.byte()));
        rows.push(Row {
            line,
            cells: record.iter().map(str::to_owned).collect(),
        });
    }
    Ok(Table {
        file: file.to_owned(),
        headers,
        rows,
    })
}

fn parse_json(file: &str, bytes: &[u8]) -> Result<Table, ValidationReport> {
    let value: Value = serde_json::from_slice(bytes)
        .map_err(|e| single(IssueCode::BadValue, format!("{file}:{}", e.line()), e.to_string()))?;
    let Value::Array(entries) = value else {
        return Err(single(
            IssueCode::BadValue,
            format!("{file}:1"),
            "expected an array of objects".into(),
        ));
    };
    let mut headers: Vec<String> = Vec::new();
    let mut objects = Vec::with_capacity(entries.len());
    for (i, entry) in entries.into_iter().enumerate() {
        let Value::Object(map) = entry else {
            return Err(single(
                IssueCode::BadValue,
                format!("{file}:{}", i + 1),
                "expected an object".into(),
            ));
        };
        for key in map.keys() {
            if !headers.contains(key) {
                headers.push(key.clone());
            }
        }
        objects.push(map);
    }
    let rows = objects
        .iter()
        .enumerate()
        .map(|(i, map)| Row {
            line: i + 1,
            cells: headers
                .iter()
                .map(|h| map.get(h).map(cell_text).unwrap_or_default())
                .collect(),
        })
        .collect();
    Ok(Table {
        file: file.to_owned(),
        headers,
        rows,
    })
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// A typed cell for writing; numbers stay numbers in the JSON mirror.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Empty,
    Text(String),
    Number(f64),
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Number(v)
    }
}

impl From<Option<String>> for Cell {
    fn from(v: Option<String>) -> Self {
        v.map_or(Cell::Empty, Cell::Text)
    }
}

/// Rows to be written in either format.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sheet {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Sheet {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Sheet {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Empty => String::new(),
                    Cell::Text(s) => s.clone(),
                    Cell::Number(v) => format_number(*v),
                })
                .collect();
            w.write_record(&cells).expect("in-memory write");
        }
        w.into_inner().expect("in-memory write")
    }

    pub fn to_json(&self) -> Vec<u8> {
        let entries: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut map = Map::new();
                for (h, c) in self.headers.iter().zip(row) {
                    let v = match c {
                        Cell::Empty => continue,
                        Cell::Text(s) => Value::String(s.clone()),
                        Cell::Number(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
                    };
                    map.insert(h.clone(), v);
                }
                Value::Object(map)
            })
            .collect();
        let mut out = serde_json::to_vec_pretty(&Value::Array(entries)).expect("in-memory write");
        out.push(b'\n');
        out
    }

    /// The sheet as a parsed table, without a round trip through bytes.
    pub fn as_json_value(&self) -> Value {
        serde_json::from_slice(&self.to_json()).expect("own output")
    }
}

/// Shortest text that reads back to the same `f64`.
pub fn format_number(v: f64) -> String {
    let mut s = String::new();
    let _ = write!(s, "{v}");
    if s == "-0" {
        s = "0".into();
    }
    s
}
