//! Rendering of command results as JSON, CSV or plain text.

use anyhow::Result;
use clap::ValueEnum;
use hausdorff_core::Sequence;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

/// A command result. `violation` selects exit code 1.
#[derive(Debug)]
pub struct Output {
    pub json: Value,
    /// Preferred CSV rendering; otherwise derived from `json`.
    pub csv: Option<String>,
    pub violation: bool,
}

impl Output {
    pub fn of<T: Serialize + ?Sized>(value: &T) -> Result<Output> {
        Ok(Output {
            json: serde_json::to_value(value)?,
            csv: None,
            violation: false,
        })
    }

    pub fn sequence(s: &Sequence) -> Result<Output> {
        Output::of(s)
    }

    pub fn with_csv(mut self, csv: String) -> Output {
        self.csv = Some(csv);
        self
    }

    pub fn violated_if(mut self, flag: bool) -> Output {
        self.violation = flag;
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json.to_string(),
            Format::Csv => match &self.csv {
                Some(csv) => csv.trim_end().to_string(),
                None => csv_from(&self.json),
            },
            Format::Plain => plain_from(&self.json),
        }
    }
}

fn atom(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_field(s: String) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

/// Arrays of atoms become one value per line; arrays of flat objects a
/// table with a header; objects `key,value` rows.
fn csv_from(v: &Value) -> String {
    match v {
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            items.iter().map(atom).collect::<Vec<_>>().join("\n")
        }
        Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
            let header: Vec<String> = items[0].as_object().unwrap().keys().cloned().collect();
            let mut rows = vec![header.join(",")];
            for item in items {
                let obj = item.as_object().unwrap();
                rows.push(
                    header
                        .iter()
                        .map(|k| csv_field(obj.get(k).map(flat).unwrap_or_default()))
                        .collect::<Vec<_>>()
                        .join(","),
                );
            }
            rows.join("\n")
        }
        Value::Object(map) => {
            let mut rows = vec!["key,value".to_string()];
            rows.extend(
                map.iter()
                    .map(|(k, v)| format!("{k},{}", csv_field(flat(v)))),
            );
            rows.join("\n")
        }
        other => atom(other),
    }
}

fn flat(v: &Value) -> String {
    match v {
        Value::Array(_) | Value::Object(_) => v.to_string(),
        other => atom(other),
    }
}

fn plain_from(v: &Value) -> String {
    match v {
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            items.iter().map(atom).collect::<Vec<_>>().join("\n")
        }
        Value::Object(map) if map.values().all(|i| !i.is_object() && !i.is_array()) => map
            .iter()
            .map(|(k, v)| format!("{k}: {}", atom(v)))
            .collect::<Vec<_>>()
            .join("\n"),
        Value::Array(_) | Value::Object(_) => {
            serde_json::to_string_pretty(v).unwrap_or_else(|_| v.to_string())
        }
        other => atom(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn out(v: Value) -> Output {
        Output {
            json: v,
            csv: None,
            violation: false,
        }
    }

    #[test]
    fn renders_sequences() {
        let o = out(json!(["1", "1/2", 0.25]));
        assert_eq!(o.render(Format::Json), r#"["1","1/2",0.25]"#);
        assert_eq!(o.render(Format::Csv), "1\n1/2\n0.25");
        assert_eq!(o.render(Format::Plain), "1\n1/2\n0.25");
    }

    #[test]
    fn renders_records() {
        let o = out(json!([{"n": 1, "mean": 1.0}, {"n": 2, "mean": 2.0}]));
        assert_eq!(o.render(Format::Csv), "mean,n\n1.0,1\n2.0,2");
        let o = out(json!({"verdict": "violated", "witness": {"j": 1}}));
        assert_eq!(
            o.render(Format::Csv),
            "key,value\nverdict,violated\nwitness,\"{\"\"j\"\":1}\""
        );
    }

    #[test]
    fn plain_scalars() {
        assert_eq!(out(json!(0.25)).render(Format::Plain), "0.25");
        assert_eq!(
            out(json!({"re": 1.5, "im": 0.0})).render(Format::Plain),
            "im: 0.0\nre: 1.5"
        );
    }
}
