use std::fmt::Write as _;
use std::time::Duration;

use polydist::{format_rational, Rational, TreeKind};
use serde::Serialize;
use serde_json::Value;

/// How far a reported number can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Exact,
    #[serde(rename = "2-approx")]
    TwoApprox,
    Bound,
    Sampled,
    /// A floating-point evaluation of a closed form.
    Float,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Exact => "exact",
            Status::TwoApprox => "2-approx",
            Status::Bound => "bound",
            Status::Sampled => "sampled",
            Status::Float => "float",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub name: String,
    pub value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Inputs {
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trees: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Inputs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: Vec<Entry>,
    /// Wall time; shown in text mode only so JSON output stays reproducible.
    #[serde(skip)]
    pub elapsed: Option<Duration>,
}

impl Report {
    pub fn new(command: &str, files: &[String], kind: TreeKind) -> Self {
        Report {
            command: command.to_string(),
            inputs: Inputs { files: files.to_vec(), n: None, kind: kind.to_string(), trees: None },
            p: None,
            seed: None,
            results: Vec::new(),
            elapsed: None,
        }
    }

    pub fn with_p(mut self, p: &Rational) -> Self {
        self.p = Some(format_rational(p));
        self
    }

    pub fn push(&mut self, name: &str, value: impl Into<Value>, status: Option<Status>) -> &mut Entry {
        self.results.push(Entry { name: name.to_string(), value: value.into(), status, note: None });
        self.results.last_mut().expect("just pushed")
    }

    pub fn rational(&mut self, name: &str, value: &Rational, status: Status) -> &mut Entry {
        self.push(name, format_rational(value), Some(status))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{} ({}", self.command, self.inputs.kind);
        if let Some(n) = self.inputs.n {
            let _ = write!(out, ", n = {n}");
        }
        if let Some(t) = self.inputs.trees {
            let _ = write!(out, ", {t} trees");
        }
        if let Some(p) = &self.p {
            let _ = write!(out, ", p = {p}");
        }
        if let Some(seed) = self.seed {
            let _ = write!(out, ", seed = {seed}");
        }
        out.push_str(")\n");
        for e in &self.results {
            let value = match &e.value {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = write!(out, "  {}: {value}", e.name);
            if let Some(s) = e.status {
                let _ = write!(out, " [{}]", s.label());
            }
            if let Some(note) = &e.note {
                let _ = write!(out, " ({note})");
            }
            out.push('\n');
        }
        if let Some(t) = self.elapsed {
            let _ = writeln!(out, "  time: {:.3} ms", t.as_secs_f64() * 1e3);
        }
        out
    }
}
