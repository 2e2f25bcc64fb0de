use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}, expected csv or json")),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Rows under a fixed header.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn records(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> =
                        self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.clone())).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Non-finite floats become JSON null and empty CSV cells.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// What a command produced: a table for CSV, and optionally a richer JSON body.
pub struct Output {
    pub table: Table,
    pub json: Option<Value>,
}

impl From<Table> for Output {
    fn from(table: Table) -> Self {
        Output { table, json: None }
    }
}

pub fn write_csv<W: Write>(table: &Table, w: W) -> Result<(), CliError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(&table.columns)?;
    for row in &table.rows {
        wr.write_record(row.iter().map(cell))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_output(
    command: &str,
    config: BTreeMap<String, String>,
    out: Output,
    format: Format,
    path: Option<&Path>,
) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Csv => write_csv(&out.table, sink),
        Format::Json => {
            let results = out.json.unwrap_or_else(|| out.table.records());
            let doc = json!({
                "command": command,
                "version": env!("CARGO_PKG_VERSION"),
                "config": config,
                "columns": out.table.columns,
                "results": results,
            });
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, &doc)?;
            writeln!(sink)?;
            sink.flush()?;
            Ok(())
        }
    }
}
