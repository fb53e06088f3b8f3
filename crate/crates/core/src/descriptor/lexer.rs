//! Longest-match tokenizer for descriptor and rule text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::names::{normalize, LexEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Keyword {
    AndAlso,
    MustAlsoBe,
    If,
    ThenAlso,
    IfAndOnlyIf,
    OrIs,
    CombinedWith,
    ButNot,
    Always,
    Sometime,
    Precedes,
    TheCombinationOf,
    Any,
    Some,
    All,
    No,
    And,
    Or,
    Implies,
    Iff,
    Not,
}

const KEYWORDS: &[(&str, Keyword)] = &[
    ("IF AND ONLY IF", Keyword::IfAndOnlyIf),
    ("THE COMBINATION OF", Keyword::TheCombinationOf),
    ("MUST ALSO BE", Keyword::MustAlsoBe),
    ("AND ALSO", Keyword::AndAlso),
    ("THEN ALSO", Keyword::ThenAlso),
    ("OR IS", Keyword::OrIs),
    ("COMBINED WITH", Keyword::CombinedWith),
    ("BUT NOT", Keyword::ButNot),
    ("ALWAYS", Keyword::Always),
    ("SOMETIME", Keyword::Sometime),
    ("PRECEDES", Keyword::Precedes),
    ("ANY", Keyword::Any),
    ("SOME", Keyword::Some),
    ("ALL", Keyword::All),
    ("NO", Keyword::No),
    ("AND", Keyword::And),
    ("OR", Keyword::Or),
    ("IMPLIES", Keyword::Implies),
    ("IFF", Keyword::Iff),
    ("NOT", Keyword::Not),
    ("IF", Keyword::If),
];

impl Keyword {
    pub fn text(self) -> &'static str {
        KEYWORDS.iter().find(|(_, k)| *k == self).map(|(t, _)| *t).expect("every keyword is listed")
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.text())
    }
}

/// True for any word that occurs in a keyword phrase, and for `VAR`.
pub fn is_reserved_word(word: &str) -> bool {
    word == "VAR" || KEYWORDS.iter().any(|(phrase, _)| phrase.split(' ').any(|w| w == word))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    /// A lexicon phrase (normalized) and what it names.
    Name(String, LexEntry),
    Var(String),
    Const(String),
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offset of the token in the input.
    pub position: usize,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "{k}"),
            TokenKind::Name(n, _) => write!(f, "`{n}`"),
            TokenKind::Var(v) => write!(f, "variable {v}"),
            TokenKind::Const(c) => write!(f, "'{c}'"),
            TokenKind::LParen => f.write_str("("),
            TokenKind::RParen => f.write_str(")"),
            TokenKind::Comma => f.write_str(","),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("unknown phrase `{text}` at offset {position}")]
    UnknownPhrase { position: usize, text: String },
    #[error("unterminated constant starting at offset {0}")]
    UnterminatedConstant(usize),
}

enum Piece<'a> {
    Word(&'a str, usize),
    Punct(TokenKind, usize),
}

fn pieces(input: &str) -> Result<Vec<Piece<'_>>, LexError> {
    let mut out = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() || c == '_' => {
                chars.next();
            }
            '(' | ')' | ',' => {
                chars.next();
                let kind = match c {
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    _ => TokenKind::Comma,
                };
                out.push(Piece::Punct(kind, start));
            }
            '\'' => {
                chars.next();
                let body_start = start + 1;
                let end = input[body_start..].find('\'').ok_or(LexError::UnterminatedConstant(start))? + body_start;
                out.push(Piece::Punct(TokenKind::Const(input[body_start..end].to_string()), start));
                while chars.peek().is_some_and(|&(i, _)| i <= end) {
                    chars.next();
                }
            }
            _ => {
                let mut end = input.len();
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '_' | '(' | ')' | ',' | '\'') {
                        end = i;
                        break;
                    }
                    chars.next();
                }
                out.push(Piece::Word(&input[start..end], start));
            }
        }
    }
    Ok(out)
}

/// Splits `input` into keywords, lexicon names, declared variables, quoted
/// constants and punctuation. Keywords win over names, names over variables;
/// within each class the longest phrase wins.
pub fn tokenize(
    input: &str,
    lexicon: &BTreeMap<String, LexEntry>,
    vars: &BTreeSet<String>,
) -> Result<Vec<Token>, LexError> {
    let longest_name = lexicon.keys().map(|k| k.split(' ').count()).max().unwrap_or(0);
    let pieces = pieces(input)?;
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < pieces.len() {
        let (word, position) = match &pieces[i] {
            Piece::Punct(kind, position) => {
                tokens.push(Token { kind: kind.clone(), position: *position });
                i += 1;
                continue;
            }
            Piece::Word(w, p) => (*w, *p),
        };
        let run: Vec<&str> = pieces[i..]
            .iter()
            .map_while(|p| match p {
                Piece::Word(w, _) => Some(*w),
                Piece::Punct(..) => None,
            })
            .collect();

        let keyword = KEYWORDS
            .iter()
            .filter_map(|(phrase, kw)| {
                let n = phrase.split(' ').count();
                (n <= run.len() && run[..n].join(" ") == *phrase).then_some((n, *kw))
            })
            .max_by_key(|(n, _)| *n);
        if let Some((n, kw)) = keyword {
            tokens.push(Token { kind: TokenKind::Keyword(kw), position });
            i += n;
            continue;
        }

        let name = (1..=longest_name.min(run.len())).rev().find_map(|n| {
            let phrase = normalize(&run[..n].join(" "));
            lexicon.get(&phrase).map(|entry| (n, phrase, entry.clone()))
        });
        if let Some((n, phrase, entry)) = name {
            tokens.push(Token { kind: TokenKind::Name(phrase, entry), position });
            i += n;
            continue;
        }

        if vars.contains(word) {
            tokens.push(Token { kind: TokenKind::Var(word.to_string()), position });
            i += 1;
            continue;
        }
        return Err(LexError::UnknownPhrase { position, text: word.to_string() });
    }
    Ok(tokens)
}
