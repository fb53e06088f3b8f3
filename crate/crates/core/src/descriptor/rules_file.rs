//! Rules files: one rule per line, `#` comments, an optional `name:` prefix
//! and leading `VAR` declarations.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::rule::CompiledRule;

use super::{DescriptorError, Frontend, NameTables};

#[derive(Debug, Clone, PartialEq)]
pub struct RuleEntry {
    pub name: String,
    /// 1-based.
    pub line: usize,
    pub text: String,
    pub rule: CompiledRule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RulesFile {
    pub vars: BTreeSet<String>,
    pub rules: Vec<RuleEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {error}")]
pub struct RulesFileError {
    pub line: usize,
    pub error: DescriptorError,
}

/// Drops a `#` comment that is not inside a quoted constant.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '\'' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn split_name(line: &str) -> (Option<&str>, &str) {
    if let Some((head, rest)) = line.split_once(':') {
        let head = head.trim();
        let valid = !head.is_empty() && head.chars().all(|c| c.is_alphanumeric() || matches!(c, '-' | '_' | '.'));
        if valid {
            return (Some(head), rest);
        }
    }
    (None, line)
}

pub fn parse_rules_file(text: &str, names: &NameTables) -> Result<RulesFile, RulesFileError> {
    let at = |line: usize| move |error: DescriptorError| RulesFileError { line, error };
    let mut frontend = Frontend::new(names).map_err(at(0))?;
    let mut rules: Vec<RuleEntry> = Vec::new();
    let mut seen = BTreeSet::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        if let Some(decl) = content.strip_prefix("VAR").filter(|r| r.is_empty() || r.starts_with([' ', '\t', ','])) {
            if !rules.is_empty() {
                return Err(at(line)(DescriptorError::LateDeclaration));
            }
            for v in decl.split(|c: char| c.is_whitespace() || c == ',').filter(|v| !v.is_empty()) {
                frontend.declare(v).map_err(at(line))?;
            }
            continue;
        }
        let (name, body) = split_name(content);
        let name = name.map(str::to_string).unwrap_or_else(|| format!("line {line}"));
        if !seen.insert(name.clone()) {
            return Err(at(line)(DescriptorError::DuplicateRuleName(name)));
        }
        let body = body.trim();
        let rule = frontend.rule(body).map_err(at(line))?;
        rules.push(RuleEntry {
            name,
            line,
            text: body.to_string(),
            rule,
        });
    }
    Ok(RulesFile {
        vars: frontend.vars().clone(),
        rules,
    })
}
