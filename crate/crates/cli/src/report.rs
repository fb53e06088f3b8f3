//! Report structures shared by the commands, with text and JSON renderings.

use std::fmt::Write as _;

use orc_core::constraint::ConstraintResult;
use orc_core::io::instance_to_json;
use orc_core::rule::{RuleOutcome, Witness};
use orc_core::validate::AxiomViolation;
use orc_core::{Frequency, InstanceValue};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct TimeValue {
    pub time: i64,
    pub value: Value,
    #[serde(skip)]
    text: String,
}

impl TimeValue {
    fn new(time: i64, v: &Frequency) -> Self {
        TimeValue {
            time,
            value: v.to_json(),
            text: v.to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct WitnessReport {
    pub time: i64,
    pub pairs: Vec<(Value, Value)>,
    pub truncated: bool,
    #[serde(skip)]
    text: Vec<String>,
}

impl From<&Witness> for WitnessReport {
    fn from(w: &Witness) -> Self {
        WitnessReport {
            time: w.time,
            pairs: w.pairs.iter().map(|(h, t)| (instance_to_json(h), instance_to_json(t))).collect(),
            truncated: w.truncated,
            text: w.pairs.iter().map(|(h, t)| format!("({h}, {t})")).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    pub text: String,
    pub passed: bool,
    pub values: Vec<TimeValue>,
    pub witnesses: Vec<WitnessReport>,
}

impl Verdict {
    pub fn from_rule(name: &str, line: usize, text: &str, out: &RuleOutcome) -> Self {
        Verdict {
            name: name.to_string(),
            line: Some(line),
            text: text.to_string(),
            passed: out.passed,
            values: out.values.iter().map(|(t, v)| TimeValue::new(*t, v)).collect(),
            witnesses: out.witnesses.iter().map(WitnessReport::from).collect(),
        }
    }

    pub fn from_constraint(index: usize, r: &ConstraintResult) -> Self {
        Verdict {
            name: index.to_string(),
            line: None,
            text: r.label.clone(),
            passed: r.passed,
            values: r.values.iter().map(|(t, v)| TimeValue::new(*t, v)).collect(),
            witnesses: r.witnesses.iter().map(WitnessReport::from).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub domain: String,
    pub axioms: Vec<String>,
    pub rules: Vec<Verdict>,
    pub constraints: Vec<Verdict>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

impl CheckReport {
    pub fn new(domain: String, axioms: &[AxiomViolation]) -> Self {
        CheckReport {
            domain,
            axioms: axioms.iter().map(ToString::to_string).collect(),
            rules: Vec::new(),
            constraints: Vec::new(),
            warnings: Vec::new(),
            passed: axioms.is_empty(),
        }
    }

    pub fn finish(mut self) -> Self {
        self.passed = self.axioms.is_empty()
            && self.rules.iter().all(|r| r.passed)
            && self.constraints.iter().all(|r| r.passed);
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.axioms.is_empty() {
            out.push_str("axioms: ok\n");
        } else {
            let _ = writeln!(out, "axioms: {} violation(s)", self.axioms.len());
            for a in &self.axioms {
                let _ = writeln!(out, "  {a}");
            }
        }
        for (kind, list) in [("rule", &self.rules), ("constraint", &self.constraints)] {
            for v in list {
                let verdict = if v.passed { "PASS" } else { "FAIL" };
                match v.line {
                    Some(line) => {
                        let _ = writeln!(out, "{kind} {} (line {line}): {verdict}  {}", v.name, v.text);
                    }
                    None => {
                        let _ = writeln!(out, "{kind} {}: {verdict}  {}", v.name, v.text);
                    }
                }
                let values: Vec<String> = v.values.iter().map(|tv| format!("t={}: {}", tv.time, tv.text)).collect();
                let _ = writeln!(out, "  values: {}", values.join(", "));
                for w in &v.witnesses {
                    let more = if w.truncated { ", ..." } else { "" };
                    let _ = writeln!(out, "  t={}: violated by {}{more}", w.time, w.text.join(", "));
                }
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let _ = writeln!(out, "result: {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

#[derive(Debug, Serialize)]
pub struct Row {
    pub head: Value,
    pub tail: Value,
    pub value: Value,
}

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub domain: String,
    pub time: i64,
    pub path: String,
    pub rows: Vec<Row>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    text_rows: Vec<[String; 3]>,
}

impl EvalReport {
    pub fn new(
        domain: String,
        time: i64,
        path: String,
        rows: Vec<(&InstanceValue, &InstanceValue, &Frequency)>,
        warnings: Vec<String>,
    ) -> Self {
        EvalReport {
            domain,
            time,
            path,
            text_rows: rows.iter().map(|(h, t, v)| [h.to_string(), t.to_string(), v.to_string()]).collect(),
            rows: rows
                .into_iter()
                .map(|(h, t, v)| Row {
                    head: instance_to_json(h),
                    tail: instance_to_json(t),
                    value: v.to_json(),
                })
                .collect(),
            warnings,
        }
    }

    /// A three-column table padded to the widest entry per column.
    pub fn to_text(&self) -> String {
        let header = ["head", "tail", "frequency"].map(String::from);
        let mut widths = header.clone().map(|h| h.chars().count());
        for row in &self.text_rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String; 3]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            format!("{}\n", padded.join(" | ").trim_end())
        };
        let mut out = format!("{}  (t={}, {})\n", self.path, self.time, self.domain);
        out.push_str(&line(&header));
        for row in &self.text_rows {
            out.push_str(&line(row));
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct ValidateReport {
    pub violations: Vec<String>,
    pub passed: bool,
}

impl ValidateReport {
    pub fn new(violations: &[AxiomViolation]) -> Self {
        ValidateReport {
            violations: violations.iter().map(ToString::to_string).collect(),
            passed: violations.is_empty(),
        }
    }

    pub fn to_text(&self) -> String {
        if self.passed {
            return "axioms: ok\n".to_string();
        }
        let mut out = format!("axioms: {} violation(s)\n", self.violations.len());
        for v in &self.violations {
            let _ = writeln!(out, "  {v}");
        }
        out
    }
}
