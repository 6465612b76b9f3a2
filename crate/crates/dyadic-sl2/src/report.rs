//! Rendering of command results as JSON, CSV or a markdown table.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Md,
}

/// A result with a versioned schema name, a JSON body and a flat table view.
#[derive(Clone, Debug)]
pub struct Report {
    pub schema: String,
    pub body: Value,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Replaces the generated markdown table when the layout is not flat.
    pub markdown: Option<String>,
}

impl Report {
    /// `body` must serialize to a JSON object; "schema" is inserted into it.
    pub fn new(schema: &str, body: impl Serialize) -> Self {
        let body = serde_json::to_value(body).expect("report bodies serialize");
        Report {
            schema: schema.to_string(),
            body,
            headers: Vec::new(),
            rows: Vec::new(),
            markdown: None,
        }
    }

    pub fn with_markdown(mut self, md: String) -> Self {
        self.markdown = Some(md);
        self
    }

    pub fn table(mut self, headers: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.headers = headers.iter().map(|h| h.to_string()).collect();
        self.rows = rows;
        self
    }

    pub fn to_json(&self) -> String {
        let mut obj = match &self.body {
            Value::Object(m) => m.clone(),
            other => {
                let mut m = Map::new();
                m.insert("result".into(), other.clone());
                m
            }
        };
        obj.insert("schema".into(), Value::String(self.schema.clone()));
        serde_json::to_string_pretty(&Value::Object(obj)).expect("json") + "\n"
    }

    fn table_or_kv(&self) -> (Vec<String>, Vec<Vec<String>>) {
        if !self.headers.is_empty() {
            return (self.headers.clone(), self.rows.clone());
        }
        let rows = match &self.body {
            Value::Object(m) => m.iter().map(|(k, v)| vec![k.clone(), scalar(v)]).collect(),
            v => vec![vec!["result".into(), scalar(v)]],
        };
        (vec!["key".into(), "value".into()], rows)
    }

    pub fn to_csv(&self) -> String {
        let (h, rows) = self.table_or_kv();
        let mut out = String::new();
        out.push_str(&h.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
        for r in rows {
            out.push_str(&r.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_md(&self) -> String {
        if let Some(md) = &self.markdown {
            return md.clone();
        }
        let (h, rows) = self.table_or_kv();
        let mut out = format!("| {} |\n|{}|\n", h.join(" | "), vec!["---"; h.len()].join("|"));
        for r in rows {
            out.push_str(&format!("| {} |\n", r.join(" | ")));
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Md => self.to_md(),
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_is_inserted_and_formats_render() {
        let r = Report::new("x/1", serde_json::json!({"b": 2, "a": "p,q"}));
        let j: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(j["schema"], "x/1");
        assert_eq!(r.to_csv(), "key,value\na,\"p,q\"\nb,2\n");
        assert!(r.to_md().starts_with("| key | value |\n|---|---|\n"));
    }
}
