//! Tabular reports and their JSON, JSON-lines and CSV renderings.

use std::io::Write;

use ffda::text::{format_elem, format_field, format_poly};
use ffda::{Field, Laurent, NormExp, Poly};
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Jsonl,
    Csv,
}

/// One command's output: a summary object plus a table of rows.
pub struct Report {
    pub command: String,
    pub summary: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// A property that must hold failed; reported after emission.
    pub defect: Option<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, columns: &[&'static str]) -> Self {
        Report { command: command.into(), summary: Map::new(), columns: columns.to_vec(), rows: Vec::new(), defect: None }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.to_string(), v.into());
    }

    pub fn row(&mut self, values: Vec<Value>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
    }

    /// Records a failed guarantee; the first message is kept.
    pub fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.defect.is_none() {
            self.defect = Some(what());
        }
    }

    fn row_object(&self, r: &[Value]) -> Value {
        Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect())
    }

    fn header(&self, f: &Field) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert("field".into(), json!(format_field(f)));
        m.insert("summary".into(), Value::Object(self.summary.clone()));
        m
    }

    pub fn write(&self, fmt: Format, f: &Field, out: &mut dyn Write) -> std::io::Result<()> {
        match fmt {
            Format::Json => {
                let mut m = self.header(f);
                m.insert("rows".into(), Value::Array(self.rows.iter().map(|r| self.row_object(r)).collect()));
                serde_json::to_writer_pretty(&mut *out, &Value::Object(m))?;
                writeln!(out)
            }
            Format::Jsonl => {
                serde_json::to_writer(&mut *out, &Value::Object(self.header(f)))?;
                writeln!(out)?;
                for r in &self.rows {
                    serde_json::to_writer(&mut *out, &self.row_object(r))?;
                    writeln!(out)?;
                }
                Ok(())
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(cell))?;
                }
                w.flush()
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// The canonical coefficient list, low degree first.
pub fn poly(p: &Poly, f: &Field) -> Value {
    serde_json::from_str(&format_poly(p, f)).expect("coefficient lists are JSON")
}

pub fn poly_vec(v: &[Poly], f: &Field) -> Value {
    Value::Array(v.iter().map(|p| poly(p, f)).collect())
}

pub fn laurent(x: &Laurent, f: &Field) -> Value {
    let coeffs: Vec<Value> = x.coeff_run().iter().map(|&c| serde_json::from_str(&format_elem(c, f)).expect("elements are JSON")).collect();
    let top = match x.top() {
        Some(t) => json!(t),
        None => json!("-inf"),
    };
    let mut m = Map::new();
    m.insert("top".into(), top);
    m.insert("coeffs".into(), Value::Array(coeffs));
    m.insert("prec".into(), json!(x.stored_prec()));
    if x.is_exact() {
        m.insert("exact".into(), json!(true));
    }
    Value::Object(m)
}

pub fn norm(e: NormExp) -> Value {
    match e {
        NormExp::NegInf => json!("-inf"),
        NormExp::Fin(v) => json!(v),
    }
}

/// A distance that may only be known to be below the working precision.
pub fn dist(d: Option<NormExp>) -> Value {
    d.map_or(json!("undetermined"), norm)
}

pub fn ratio(r: impl std::fmt::Display) -> Value {
    json!(r.to_string())
}
