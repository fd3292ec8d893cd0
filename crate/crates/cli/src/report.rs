use std::fmt::Write as _;

use serde_json::{json, Map, Value};

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub dims: Vec<usize>,
}

/// Everything one invocation reports. Keys are kept in insertion order for
/// text and sorted for JSON, so both are deterministic.
pub struct Report {
    pub verb: &'static str,
    pub support: Vec<u64>,
    pub values: Vec<(String, Value)>,
    pub checks: Vec<Check>,
    pub conventions: Vec<(String, String)>,
    pub witnesses: Map<String, Value>,
}

impl Report {
    pub fn new(verb: &'static str, support: &[u64]) -> Self {
        Report {
            verb,
            support: support.to_vec(),
            values: Vec::new(),
            checks: Vec::new(),
            conventions: Vec::new(),
            witnesses: Map::new(),
        }
    }

    pub fn value(&mut self, key: impl Into<String>, v: impl Into<Value>) {
        self.values.push((key.into(), v.into()));
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, dims: Vec<usize>) {
        self.checks.push(Check { name: name.into(), pass, dims });
    }

    pub fn convention(&mut self, key: &str, text: &str) {
        self.conventions.push((key.into(), text.into()));
    }

    pub fn witness(&mut self, key: impl Into<String>, v: Value) {
        self.witnesses.insert(key.into(), v);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let dims: Map<String, Value> = self.values.iter().cloned().collect();
        let checks: Vec<Value> =
            self.checks.iter().map(|c| json!({ "name": c.name, "pass": c.pass, "dims": c.dims })).collect();
        let conventions: Map<String, Value> =
            self.conventions.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        json!({
            "verb": self.verb,
            "support": self.support,
            "dims": dims,
            "checks": checks,
            "conventions": conventions,
            "witnesses": self.witnesses,
            "pass": self.pass(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let support: Vec<String> = self.support.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "{} over {{{}}}", self.verb, support.join(","));
        for (k, v) in &self.values {
            let _ = writeln!(out, "  {k}: {}", compact(v));
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "checks");
            let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            for c in &self.checks {
                let status = if c.pass { "PASS" } else { "FAIL" };
                let dims = if c.dims.is_empty() { String::new() } else { format!("{:?}", c.dims) };
                let _ = writeln!(out, "  {status}  {:width$}  {dims}", c.name);
            }
        }
        if !self.conventions.is_empty() {
            let _ = writeln!(out, "conventions");
            for (k, v) in &self.conventions {
                let _ = writeln!(out, "  {k}: {v}");
            }
        }
        if !self.witnesses.is_empty() {
            let _ = writeln!(out, "witnesses (counts; --format json lists coefficients)");
            for (k, v) in &self.witnesses {
                match v.as_array() {
                    Some(items) if items.iter().all(Value::is_string) => {
                        for item in items {
                            let _ = writeln!(out, "  {k}: {}", compact(item));
                        }
                    }
                    Some(items) => {
                        let _ = writeln!(out, "  {k}: {}", items.len());
                    }
                    None => {
                        let _ = writeln!(out, "  {k}: 1");
                    }
                }
            }
        }
        let _ = writeln!(out, "result: {}", if self.pass() { "all checks pass" } else { "some checks FAIL" });
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
