//! Output records and their table, CSV and JSON renderings.
//!
//! Floating-point fields are written with 17 significant digits in CSV and
//! JSON, so every value survives a round trip exactly.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Null,
}

impl Field {
    pub fn opt_num(v: Option<f64>) -> Self {
        v.map_or(Field::Null, Field::Num)
    }

    pub fn opt_int(v: Option<usize>) -> Self {
        v.map_or(Field::Null, |k| Field::Int(k as i64))
    }

    /// Exact text used by CSV and JSON.
    fn exact(&self) -> String {
        match self {
            Field::Num(x) if x.is_finite() => format!("{x:.16e}"),
            Field::Num(x) => x.to_string(),
            Field::Int(k) => k.to_string(),
            Field::Text(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
            Field::Null => String::new(),
        }
    }

    /// Short text for the human-readable table.
    fn display(&self) -> String {
        match self {
            Field::Num(x) if *x == 0.0 || !x.is_finite() || (1e-4..1e9).contains(&x.abs()) => format!("{x}"),
            Field::Num(x) => format!("{x:e}"),
            Field::Null => "-".into(),
            other => other.exact(),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Field::Num(x) if x.is_finite() => {
                let raw = RawValue::from_string(self.exact()).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
            Field::Num(_) | Field::Null => s.serialize_none(),
            Field::Int(k) => s.serialize_i64(*k),
            Field::Text(t) => s.serialize_str(t),
            Field::Bool(b) => s.serialize_bool(*b),
        }
    }
}

pub type Fields = Vec<(&'static str, Field)>;

/// Key order is preserved, which keeps the output byte-stable.
struct Ordered<'a>(&'a [(&'static str, Field)]);

impl Serialize for Ordered<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone)]
pub struct Record {
    pub inputs: Fields,
    pub value: Field,
    pub method: String,
    pub diagnostics: Fields,
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("inputs", &Ordered(&self.inputs))?;
        map.serialize_entry("value", &self.value)?;
        map.serialize_entry("method", &self.method)?;
        map.serialize_entry("diagnostics", &Ordered(&self.diagnostics))?;
        map.end()
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub params: Fields,
    pub results: Vec<Record>,
    pub failures: Vec<String>,
}

impl Serialize for Report {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("command", self.command)?;
        map.serialize_entry("params", &Ordered(&self.params))?;
        map.serialize_entry("results", &self.results)?;
        map.serialize_entry("failures", &self.failures)?;
        map.end()
    }
}

/// Union of keys in first-seen order.
fn columns<'a>(keys: impl Iterator<Item = &'a Fields>) -> Vec<&'static str> {
    let mut out: Vec<&'static str> = Vec::new();
    for fields in keys {
        for (k, _) in fields {
            if !out.contains(k) {
                out.push(k);
            }
        }
    }
    out
}

fn lookup<'a>(fields: &'a Fields, key: &str) -> Option<&'a Field> {
    fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
}

impl Report {
    fn grid(&self, cell: impl Fn(&Field) -> String) -> (Vec<String>, Vec<Vec<String>>) {
        let inputs = columns(self.results.iter().map(|r| &r.inputs));
        let diags = columns(self.results.iter().map(|r| &r.diagnostics));
        let mut header: Vec<String> = inputs.iter().map(|s| s.to_string()).collect();
        header.push("value".into());
        header.push("method".into());
        header.extend(diags.iter().map(|s| s.to_string()));
        let rows = self
            .results
            .iter()
            .map(|r| {
                let mut row: Vec<String> = inputs
                    .iter()
                    .map(|k| lookup(&r.inputs, k).map_or(String::new(), &cell))
                    .collect();
                row.push(cell(&r.value));
                row.push(r.method.clone());
                row.extend(diags.iter().map(|k| lookup(&r.diagnostics, k).map_or(String::new(), &cell)));
                row
            })
            .collect();
        (header, rows)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut out = serde_json::to_string_pretty(self)?;
        out.push('\n');
        Ok(out)
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let (header, rows) = self.grid(Field::exact);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }

    pub fn to_table(&self) -> String {
        let (header, rows) = self.grid(Field::display);
        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for row in &rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}", w = *w))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        out.push_str(&line(&header));
        out.push('\n');
        out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
        out.push('\n');
        for row in &rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        for f in &self.failures {
            out.push_str("failure: ");
            out.push_str(f);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            command: "constant",
            params: vec![("n", Field::Int(3))],
            results: vec![Record {
                inputs: vec![("alpha", Field::Num(0.1)), ("label", Field::Text("a, \"b\"".into()))],
                value: Field::Num(1.0 / 3.0),
                method: "Series".into(),
                diagnostics: vec![("terms", Field::Int(12)), ("error_estimate", Field::Null)],
            }],
            failures: vec![],
        }
    }

    #[test]
    fn json_numbers_round_trip() {
        let text = sample().to_json().unwrap();
        assert!(text.contains("3.3333333333333331e-1"));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["results"][0]["value"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(v["results"][0]["diagnostics"]["error_estimate"], serde_json::Value::Null);
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 4);
    }

    #[test]
    fn csv_quotes_and_round_trips() {
        let text = sample().to_csv().unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let header = rd.headers().unwrap().clone();
        assert_eq!(&header[0], "alpha");
        let row = rd.records().next().unwrap().unwrap();
        assert_eq!(&row[1], "a, \"b\"");
        assert_eq!(row[2].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(row[0].parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn table_has_aligned_columns() {
        let t = sample().to_table();
        let lines: Vec<&str> = t.lines().collect();
        assert!(lines[0].starts_with("alpha"));
        assert!(lines[1].starts_with("-----"));
        assert_eq!(lines.len(), 3);
    }
}
