use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Wall-clock time per named stage, in the order the stages ran.
#[derive(Debug, Default)]
pub struct Timings {
    stages: Vec<(String, u128)>,
}

impl Timings {
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.stages.push((name.to_string(), start.elapsed().as_millis()));
        out
    }
}

/// A finished command: the deterministic part (`config`, `result`) plus the
/// `run` block holding the timestamp and timings, the only fields that may
/// differ between two runs of the same configuration.
pub struct Report {
    pub command: String,
    pub seed: Option<u64>,
    pub config: Value,
    pub result: Value,
    /// Short human-readable summary for `--format text`.
    pub summary: String,
    /// Flat rows for `--format csv`; a key/value projection of `result` when empty.
    pub csv: Option<String>,
    /// Whether every check the command ran came out as expected.
    pub ok: bool,
}

impl Report {
    pub fn new(command: &str, seed: Option<u64>, config: impl Serialize, result: impl Serialize) -> Result<Self> {
        Ok(Report {
            command: command.to_string(),
            seed,
            config: serde_json::to_value(config)?,
            result: serde_json::to_value(result)?,
            summary: String::new(),
            csv: None,
            ok: true,
        })
    }

    pub fn summary(mut self, s: impl Into<String>) -> Self {
        self.summary = s.into();
        self
    }

    pub fn ok(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }

    pub fn csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn to_json(&self, timings: &Timings) -> Value {
        let stages: Vec<Value> = timings
            .stages
            .iter()
            .map(|(name, ms)| json!({ "stage": name, "ms": ms }))
            .collect();
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "version": ts_groups_version(),
            "seed": self.seed,
            "config": self.config,
            "result": self.result,
            "ok": self.ok,
            "run": { "timestamp": timestamp, "timings": stages },
        })
    }

    pub fn render(&self, format: Format, timings: &Timings) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(&self.to_json(timings))? + "\n",
            Format::Csv => match &self.csv {
                Some(c) => c.clone(),
                None => flatten_csv(&self.result),
            },
            Format::Text => {
                let mut s = self.summary.clone();
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                s
            }
        })
    }
}

pub fn ts_groups_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// `path,value` rows for every scalar leaf.
pub fn flatten_csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten(v, String::new(), &mut rows);
    let mut out = String::from("path,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&v)));
    }
    out
}

fn flatten(v: &Value, prefix: String, rows: &mut Vec<(String, String)>) {
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
                flatten(x, join(k), rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(x, join(&i.to_string()), rows);
            }
        }
        Value::String(s) => rows.push((prefix, s.clone())),
        Value::Null => rows.push((prefix, String::new())),
        other => rows.push((prefix, other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_or_print(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub struct Loaded {
    pub command: Option<String>,
    pub config: Value,
    pub result: Value,
}

/// A saved report; a document that is not an envelope is taken as a bare result.
pub fn load(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(match v {
        Value::Object(mut m) if m.contains_key("schema") => Loaded {
            command: m.get("command").and_then(Value::as_str).map(String::from),
            config: m.remove("config").unwrap_or(Value::Null),
            result: m.remove("result").unwrap_or(Value::Null),
        },
        other => Loaded {
            command: None,
            config: Value::Null,
            result: other,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flattening_quotes_commas() {
        let v = json!({ "a": [1, { "b": "x,y" }], "c": null });
        assert_eq!(flatten_csv(&v), "path,value\na.0,1\na.1.b,\"x,y\"\nc,\n");
    }
}
