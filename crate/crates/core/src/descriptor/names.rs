//! Verbalization tables: object-type names, role names, reverse role names and
//! names for role pairs.

use std::collections::BTreeMap;

use thiserror::Error;

use super::lexer::is_reserved_word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("name `{name}` is used for both {first} and {second}")]
    Ambiguous { name: String, first: String, second: String },
    #[error("name `{name}` contains the reserved word or symbol `{word}`")]
    Reserved { name: String, word: String },
    #[error("name for {0} is empty")]
    Empty(String),
}

/// What a name in the lexicon denotes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LexEntry {
    Object(String),
    Role(String),
    ReverseRole(String),
    /// `p ∘ ~q`
    Pair(String, String),
}

impl std::fmt::Display for LexEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LexEntry::Object(id) => write!(f, "object type {id}"),
            LexEntry::Role(id) => write!(f, "role {id}"),
            LexEntry::ReverseRole(id) => write!(f, "reverse of role {id}"),
            LexEntry::Pair(p, q) => write!(f, "role pair ({p}, {q})"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameTables {
    pub obj_names: BTreeMap<String, String>,
    pub role_names: BTreeMap<String, String>,
    pub reverse_role_names: BTreeMap<String, String>,
    pub pair_names: BTreeMap<(String, String), String>,
}

/// Collapses whitespace and underscores so `working_for` and `working  for` agree.
pub fn normalize(name: &str) -> String {
    name.split(|c: char| c.is_whitespace() || c == '_')
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

impl NameTables {
    pub fn entries(&self) -> impl Iterator<Item = (LexEntry, &str)> + '_ {
        let objects = self.obj_names.iter().map(|(id, n)| (LexEntry::Object(id.clone()), n.as_str()));
        let roles = self.role_names.iter().map(|(id, n)| (LexEntry::Role(id.clone()), n.as_str()));
        let reverse = self
            .reverse_role_names
            .iter()
            .map(|(id, n)| (LexEntry::ReverseRole(id.clone()), n.as_str()));
        let pairs = self
            .pair_names
            .iter()
            .map(|((p, q), n)| (LexEntry::Pair(p.clone(), q.clone()), n.as_str()));
        objects.chain(roles).chain(reverse).chain(pairs)
    }

    /// Normalized name → entry. Fails when one phrase names two elements.
    pub fn lexicon(&self) -> Result<BTreeMap<String, LexEntry>, NameError> {
        let mut lexicon: BTreeMap<String, LexEntry> = BTreeMap::new();
        for (entry, raw) in self.entries() {
            let name = normalize(raw);
            if name.is_empty() {
                return Err(NameError::Empty(entry.to_string()));
            }
            if let Some(word) = name.split(' ').find(|w| is_reserved_word(w)).map(str::to_string) {
                return Err(NameError::Reserved { name, word });
            }
            if let Some(c) = name.chars().find(|c| matches!(c, '(' | ')' | ',' | '\'' | '#')) {
                return Err(NameError::Reserved { name, word: c.to_string() });
            }
            if let Some(previous) = lexicon.get(&name) {
                return Err(NameError::Ambiguous {
                    name,
                    first: previous.to_string(),
                    second: entry.to_string(),
                });
            }
            lexicon.insert(name, entry);
        }
        Ok(lexicon)
    }

    pub fn object_name(&self, id: &str) -> Option<&str> {
        self.obj_names.get(id).map(String::as_str)
    }
}
