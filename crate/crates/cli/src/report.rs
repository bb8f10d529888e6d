use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// What every subcommand returns: a verdict, the parameters it ran
/// with, the library report, and a short human summary.
#[derive(Serialize)]
pub struct Report {
    pub command: &'static str,
    pub input: String,
    pub verdict: bool,
    pub parameters: BTreeMap<&'static str, Value>,
    pub result: Value,
    #[serde(skip)]
    pub summary: Vec<String>,
    /// `abscissa,value,running_sum` rows for grid commands.
    #[serde(skip)]
    pub grid_csv: Option<String>,
}

impl Report {
    pub fn new<R: Serialize>(
        command: &'static str,
        input: &str,
        verdict: bool,
        result: &R,
    ) -> Result<Self> {
        Ok(Self {
            command,
            input: input.to_string(),
            verdict,
            parameters: BTreeMap::new(),
            result: serde_json::to_value(result)?,
            summary: Vec::new(),
            grid_csv: None,
        })
    }

    pub fn param<V: Serialize>(mut self, key: &'static str, value: V) -> Result<Self> {
        self.parameters.insert(key, serde_json::to_value(value)?);
        Ok(self)
    }

    pub fn line(mut self, line: impl Into<String>) -> Self {
        self.summary.push(line.into());
        self
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(self)? + "\n",
            Format::Text => self.text(),
            Format::Csv => self.csv(),
        })
    }

    fn text(&self) -> String {
        let mut out = format!(
            "{}: {}\ninput: {}\nparameters: {}\n",
            self.command,
            if self.verdict { "PASS" } else { "FAIL" },
            self.input,
            self.parameters
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ")
        );
        for line in &self.summary {
            let _ = writeln!(out, "{line}");
        }
        out
    }

    /// Grid commands emit their samples under `#`-prefixed parameter
    /// lines; the others emit a flattened `field,value` table.
    fn csv(&self) -> String {
        let mut out = String::new();
        match &self.grid_csv {
            Some(rows) => {
                let _ = writeln!(out, "# command={} verdict={}", self.command, self.verdict);
                for (k, v) in &self.parameters {
                    let _ = writeln!(out, "# {k}={v}");
                }
                out.push_str(rows);
            }
            None => {
                out.push_str("field,value\n");
                let _ = writeln!(out, "command,{}", self.command);
                let _ = writeln!(out, "verdict,{}", self.verdict);
                for (k, v) in &self.parameters {
                    flatten(&format!("parameters.{k}"), v, &mut out);
                }
                flatten("result", &self.result, &mut out);
            }
        }
        out
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{prefix}.{k}"), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, out);
            }
        }
        Value::String(s) => {
            let _ = writeln!(out, "{prefix},{s}");
        }
        other => {
            let _ = writeln!(out, "{prefix},{other}");
        }
    }
}
