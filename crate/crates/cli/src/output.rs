//! Report envelope and the JSON/CSV writers.

use serde::Serialize;
use serde_json::{Map, Value};
use theta_lab::experiments::SCHEMA_VERSION;

use crate::config::Format;

pub struct Output {
    pub command: &'static str,
    pub body: Value,
    /// Native CSV rendering; the flattened body is used when absent.
    pub csv: Option<String>,
}

impl Output {
    pub fn new(command: &'static str, body: impl Serialize) -> Self {
        Self {
            command,
            body: serde_json::to_value(body).expect("report serializes"),
            csv: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn render(self, format: Format, runtime_ms: Option<f64>) -> String {
        let mut obj = Map::new();
        obj.insert("schema_version".into(), SCHEMA_VERSION.into());
        obj.insert("command".into(), self.command.into());
        match self.body {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("result".into(), other);
            }
        }
        if let Some(ms) = runtime_ms {
            obj.insert("runtime_ms".into(), ms.into());
        }
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("json");
                s.push('\n');
                s
            }
            Format::Csv => match self.csv {
                Some(s) => s,
                None => flat_csv(&Value::Object(obj)),
            },
        }
    }
}

/// Two columns, `key,value`, one line per leaf with dotted paths.
pub fn flat_csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("csv");
    for (k, v) in rows {
        w.write_record([k, v]).expect("csv");
    }
    String::from_utf8(w.into_inner().expect("csv")).expect("utf8")
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Rows of a CSV table with a header.
pub fn table_csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("csv");
    for r in rows {
        w.write_record(r).expect("csv");
    }
    String::from_utf8(w.into_inner().expect("csv")).expect("utf8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattening_quotes_commas() {
        let s = flat_csv(&json!({"group": "G(1,1,2)", "a": [1, {"b": true}], "z": null}));
        assert_eq!(s, "key,value\na.0,1\na.1.b,true\ngroup,\"G(1,1,2)\"\nz,\n");
    }

    #[test]
    fn envelope_fields() {
        let out = Output::new("x", json!({"verdict": "ok"})).render(Format::Json, None);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["command"], "x");
        assert_eq!(v["verdict"], "ok");
        assert!(v.get("runtime_ms").is_none());
    }
}
