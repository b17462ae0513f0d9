//! Command reports: one verdict, an exit class and ordered witness fields,
//! rendered either as `key: value` lines or as one JSON document.

use std::fmt::Write as _;

use serde_json::{Map, Value};

/// How a command ended. Input errors never produce a report and exit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Every requested verdict is affirmative.
    Affirmative,
    /// Something was refuted: a failing axiom, a rejected proof, a
    /// separating model.
    Refuted,
    /// A bounded search ran out of budget without a verdict.
    Exhausted,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Affirmative => 0,
            Outcome::Refuted => 2,
            Outcome::Exhausted => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Human,
    Machine,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub verdict: String,
    pub outcome: Outcome,
    fields: Vec<(String, Value)>,
}

impl Report {
    pub fn new(command: impl Into<String>, verdict: impl Into<String>, outcome: Outcome) -> Self {
        Self {
            command: command.into(),
            verdict: verdict.into(),
            outcome,
            fields: Vec::new(),
        }
    }

    /// Appends a field; a repeated key replaces the earlier value in place.
    pub fn field(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        let value = value.into();
        match self.fields.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.fields.push((key.to_string(), value)),
        }
        self
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.field(key, value);
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("command".into(), self.command.clone().into());
        map.insert("verdict".into(), self.verdict.clone().into());
        map.insert("exit_code".into(), self.exit_code().into());
        for (k, v) in &self.fields {
            map.insert(k.clone(), v.clone());
        }
        Value::Object(map)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Machine => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Human => {
                let mut out = format!("command: {}\nverdict: {}\n", self.command, self.verdict);
                for (k, v) in &self.fields {
                    human_field(&mut out, k, v);
                }
                out
            }
        }
    }
}

fn human_field(out: &mut String, key: &str, value: &Value) {
    match value {
        Value::String(s) if s.contains('\n') => {
            let _ = writeln!(out, "{key}:");
            for line in s.lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
        Value::String(s) => {
            let _ = writeln!(out, "{key}: {s}");
        }
        Value::Array(items)
            if items
                .iter()
                .any(|v| v.is_object() || v.is_string() || v.is_array()) =>
        {
            let _ = writeln!(out, "{key}:");
            for item in items {
                match item {
                    Value::String(s) => {
                        let _ = writeln!(out, "  - {s}");
                    }
                    other => {
                        let _ = writeln!(out, "  - {}", inline(other));
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{key}: {}", inline(other));
        }
    }
}

/// Objects print as `k=v` pairs, everything else as compact JSON.
fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| format!("{k}={}", inline(v)))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn machine_keys_keep_their_order() {
        let r = Report::new("prove", "Found", Outcome::Affirmative)
            .with("zeta", 1)
            .with("alpha", "x");
        let text = r.render(Format::Machine);
        let positions: Vec<usize> = [
            "\"command\"",
            "\"verdict\"",
            "\"exit_code\"",
            "\"zeta\"",
            "\"alpha\"",
        ]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(r.to_json()["exit_code"], json!(0));
    }

    #[test]
    fn human_and_machine_agree_on_verdicts() {
        let r = Report::new("check-model", "Fail", Outcome::Refuted)
            .with("axioms", json!([{"index": 0, "holds": false}]))
            .with("script", "(ax 0)\n(ax 1)");
        let human = r.render(Format::Human);
        assert!(human.contains("verdict: Fail\n"));
        assert!(human.contains("  - index=0 holds=false\n"));
        assert!(human.contains("script:\n  (ax 0)\n  (ax 1)\n"));
        let machine: Value = serde_json::from_str(&r.render(Format::Machine)).unwrap();
        assert_eq!(machine["verdict"], "Fail");
        assert_eq!(machine["exit_code"], 2);
    }

    #[test]
    fn repeated_fields_replace() {
        let mut r = Report::new("x", "y", Outcome::Exhausted);
        r.field("a", 1).field("b", 2).field("a", 3);
        assert_eq!(
            r.to_json(),
            json!({"command": "x", "verdict": "y", "exit_code": 3, "a": 3, "b": 2})
        );
    }
}
