use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One checked property and, when it fails, what shows it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictLine {
    pub name: String,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub verdicts: Vec<VerdictLine>,
    #[serde(default)]
    pub payload: Value,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report {
            command,
            verdicts: Vec::new(),
            payload: Value::Null,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, holds: bool, witness: Option<Value>) {
        self.verdicts.push(VerdictLine {
            name: name.into(),
            holds,
            witness: if holds { None } else { witness },
        });
    }

    /// 0 when every verdict holds, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.verdicts.iter().all(|v| v.holds) {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "$ sspace {}", self.command.join(" "));
        for v in &self.verdicts {
            let mark = if v.holds { '✓' } else { '✗' };
            match &v.witness {
                Some(w) => {
                    let _ = writeln!(out, "{mark} {}: {w}", v.name);
                }
                None => {
                    let _ = writeln!(out, "{mark} {}", v.name);
                }
            }
        }
        if !self.payload.is_null() {
            out.push('\n');
            out.push_str(&serde_json::to_string_pretty(&self.payload).expect("values serialize"));
            out.push('\n');
        }
        out
    }
}
