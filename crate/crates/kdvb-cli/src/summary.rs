//! One-line summaries, printable as `key=value` pairs or mirrored as JSON.

use std::fmt::Write as _;

#[derive(Debug, Clone)]
enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

/// Ordered key/value summary of a command.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    entries: Vec<(String, Value)>,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(mut self, key: &str, v: f64) -> Self {
        self.entries.push((key.into(), Value::Num(v)));
        self
    }

    pub fn int(mut self, key: &str, v: i64) -> Self {
        self.entries.push((key.into(), Value::Int(v)));
        self
    }

    pub fn text(mut self, key: &str, v: impl Into<String>) -> Self {
        self.entries.push((key.into(), Value::Text(v.into())));
        self
    }

    pub fn bool(mut self, key: &str, v: bool) -> Self {
        self.entries.push((key.into(), Value::Bool(v)));
        self
    }

    /// `key=value` pairs separated by single spaces.
    pub fn line(&self) -> String {
        let mut out = String::new();
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            match v {
                Value::Num(x) => {
                    let _ = write!(out, "{k}={x}");
                }
                Value::Int(x) => {
                    let _ = write!(out, "{k}={x}");
                }
                Value::Text(s) => {
                    let _ = write!(out, "{k}={s}");
                }
                Value::Bool(b) => {
                    let _ = write!(out, "{k}={b}");
                }
            }
        }
        out
    }

    /// The same content as a single-line JSON object, keys in insertion
    /// order.
    pub fn json(&self) -> String {
        let mut out = String::from("{");
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}:", serde_json::to_string(k).unwrap());
            match v {
                Value::Num(x) if x.is_finite() => {
                    let _ = write!(out, "{x}");
                }
                Value::Num(x) => {
                    let _ = write!(out, "{}", serde_json::to_string(&x.to_string()).unwrap());
                }
                Value::Int(x) => {
                    let _ = write!(out, "{x}");
                }
                Value::Text(s) => {
                    let _ = write!(out, "{}", serde_json::to_string(s).unwrap());
                }
                Value::Bool(b) => {
                    let _ = write!(out, "{b}");
                }
            }
        }
        out.push('}');
        out
    }
}
