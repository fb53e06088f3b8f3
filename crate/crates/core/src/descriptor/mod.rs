//! The information-descriptor layer: controlled-language descriptors and
//! rules, tokenized against the model's name tables and compiled to path
//! expressions and rules.

pub mod compile;
pub mod lexer;
pub mod names;
pub mod parser;
pub mod rules_file;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::path::PathExpr;
use crate::rule::CompiledRule;

pub use compile::{dsem, rsem, Lexicon};
pub use lexer::{tokenize, Keyword, LexError, Token, TokenKind};
pub use names::{LexEntry, NameError, NameTables};
pub use parser::{parse_descriptor, parse_rule, DescOp, Descriptor, Quantifier, Rule, RuleOp, SyntaxError, TemporalOp};
pub use rules_file::{parse_rules_file, RuleEntry, RulesFile, RulesFileError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescriptorError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Names(#[from] NameError),
    #[error("`{0}` names no model element")]
    UnresolvableName(String),
    #[error("invalid variable `{name}`: {reason}")]
    BadVariable { name: String, reason: String },
    #[error("VAR declarations must precede the rules")]
    LateDeclaration,
    #[error("rule name `{0}` is used twice")]
    DuplicateRuleName(String),
}

/// A lexicon and declared variables, ready to compile text.
#[derive(Debug, Clone)]
pub struct Frontend {
    lexicon: Lexicon,
    vars: BTreeSet<String>,
}

impl Frontend {
    pub fn new(names: &NameTables) -> Result<Self, DescriptorError> {
        Ok(Frontend {
            lexicon: names.lexicon()?,
            vars: BTreeSet::new(),
        })
    }

    /// Declares `name` as an ω-variable.
    pub fn declare(&mut self, name: &str) -> Result<(), DescriptorError> {
        let bad = |reason: &str| DescriptorError::BadVariable {
            name: name.to_string(),
            reason: reason.to_string(),
        };
        let mut chars = name.chars();
        if !chars.next().is_some_and(|c| c.is_lowercase()) {
            return Err(bad("must start with a lowercase letter"));
        }
        if !chars.all(|c| c.is_alphanumeric()) {
            return Err(bad("must be a single alphanumeric word"));
        }
        if self.lexicon.contains_key(name) {
            return Err(bad("is already a model name"));
        }
        self.vars.insert(name.to_string());
        Ok(())
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn vars(&self) -> &BTreeSet<String> {
        &self.vars
    }

    pub fn tokenize(&self, text: &str) -> Result<Vec<Token>, DescriptorError> {
        Ok(tokenize(text, &self.lexicon, &self.vars)?)
    }

    pub fn parse_descriptor(&self, text: &str) -> Result<Descriptor, DescriptorError> {
        Ok(parse_descriptor(&self.tokenize(text)?, text.len())?)
    }

    pub fn parse_rule(&self, text: &str) -> Result<Rule, DescriptorError> {
        Ok(parse_rule(&self.tokenize(text)?, text.len())?)
    }

    /// `DSem` of a descriptor text.
    pub fn descriptor(&self, text: &str) -> Result<PathExpr, DescriptorError> {
        dsem(&self.parse_descriptor(text)?, &self.lexicon)
    }

    /// `RSem` of a rule text.
    pub fn rule(&self, text: &str) -> Result<CompiledRule, DescriptorError> {
        Ok(CompiledRule::new(rsem(&self.parse_rule(text)?, &self.lexicon)?))
    }
}
