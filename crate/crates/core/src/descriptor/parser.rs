//! Recursive-descent parser for information descriptors and domain rules.
//!
//! Rule level, loosest first: `IFF`, `IMPLIES`, `OR`, `AND`, then the
//! prefixes `NOT`, `ALWAYS`, `SOMETIME`, then `PRECEDES` between quantified
//! rules. A quantifier takes the longest descriptor that follows it.
//!
//! Descriptor level: an optional `ALWAYS`/`SOMETIME` prefix, then operands
//! joined left to right by the keyworded connectives, each operand a
//! juxtaposition of primaries or `IF X THEN ALSO Y`.

use std::fmt;

use thiserror::Error;

use super::lexer::{Keyword, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DescOp {
    AndAlso,
    MustAlsoBe,
    IfThenAlso,
    IfAndOnlyIf,
    OrIs,
    CombinedWith,
    ButNot,
    Always,
    Sometime,
    Precedes,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Descriptor {
    /// A lexicon phrase, normalized.
    Name(String),
    Var(String),
    Const(String),
    Seq(Box<Descriptor>, Box<Descriptor>),
    Combination(Vec<Descriptor>),
    Keyworded(DescOp, Vec<Descriptor>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Any,
    Some,
    All,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleOp {
    And,
    Or,
    Implies,
    Iff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemporalOp {
    Always,
    Sometime,
    Precedes,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    Quant(Quantifier, Descriptor),
    Conn(RuleOp, Box<Rule>, Box<Rule>),
    Not(Box<Rule>),
    Temporal(TemporalOp, Vec<Rule>),
}

impl Rule {
    /// Rewrites `NO X` as `NOT SOME X` throughout.
    pub fn desugar(self) -> Rule {
        match self {
            Rule::Quant(Quantifier::No, d) => Rule::Not(Box::new(Rule::Quant(Quantifier::Some, d))),
            Rule::Quant(q, d) => Rule::Quant(q, d),
            Rule::Conn(op, a, b) => Rule::Conn(op, Box::new(a.desugar()), Box::new(b.desugar())),
            Rule::Not(a) => Rule::Not(Box::new(a.desugar())),
            Rule::Temporal(op, rs) => Rule::Temporal(op, rs.into_iter().map(Rule::desugar).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {position}: expected {}, found {found}", expected.join(" or "))]
pub struct SyntaxError {
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    end: usize,
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantifier::Any => "ANY",
            Quantifier::Some => "SOME",
            Quantifier::All => "ALL",
            Quantifier::No => "NO",
        })
    }
}

fn binary_desc_op(k: Keyword) -> Option<DescOp> {
    Some(match k {
        Keyword::AndAlso => DescOp::AndAlso,
        Keyword::MustAlsoBe => DescOp::MustAlsoBe,
        Keyword::IfAndOnlyIf => DescOp::IfAndOnlyIf,
        Keyword::OrIs => DescOp::OrIs,
        Keyword::CombinedWith => DescOp::CombinedWith,
        Keyword::ButNot => DescOp::ButNot,
        Keyword::Precedes => DescOp::Precedes,
        _ => return None,
    })
}

fn quantifier(k: Keyword) -> Option<Quantifier> {
    Some(match k {
        Keyword::Any => Quantifier::Any,
        Keyword::Some => Quantifier::Some,
        Keyword::All => Quantifier::All,
        Keyword::No => Quantifier::No,
        _ => return None,
    })
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, offset: usize) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos + offset).map(|t| &t.kind)
    }

    fn keyword(&self) -> Option<Keyword> {
        match self.peek() {
            Some(TokenKind::Keyword(k)) => Some(*k),
            _ => None,
        }
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let (position, found) = match self.tokens.get(self.pos) {
            Some(t) => (t.position, t.kind.to_string()),
            None => (self.end, "end of input".to_string()),
        };
        SyntaxError {
            position,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn expect(&mut self, kind: &TokenKind, label: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(kind) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[label]))
        }
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    fn starts_primary(kind: Option<&TokenKind>) -> bool {
        matches!(
            kind,
            Some(
                TokenKind::Name(..)
                    | TokenKind::Var(_)
                    | TokenKind::Const(_)
                    | TokenKind::LParen
                    | TokenKind::Keyword(Keyword::TheCombinationOf)
            )
        )
    }

    fn starts_operand(kind: Option<&TokenKind>) -> bool {
        Self::starts_primary(kind) || kind == Some(&TokenKind::Keyword(Keyword::If))
    }

    fn descriptor(&mut self) -> Result<Descriptor, SyntaxError> {
        let op = match self.keyword() {
            Some(Keyword::Always) => DescOp::Always,
            Some(Keyword::Sometime) => DescOp::Sometime,
            _ => return self.connected(),
        };
        self.pos += 1;
        Ok(Descriptor::Keyworded(op, vec![self.descriptor()?]))
    }

    fn connected(&mut self) -> Result<Descriptor, SyntaxError> {
        let mut left = self.operand()?;
        while let Some(op) = self.keyword().and_then(binary_desc_op) {
            // `X PRECEDES ANY …` belongs to the rule level.
            if op == DescOp::Precedes && !Self::starts_operand(self.peek_at(1)) {
                break;
            }
            self.pos += 1;
            let right = self.operand()?;
            left = Descriptor::Keyworded(op, vec![left, right]);
        }
        Ok(left)
    }

    fn operand(&mut self) -> Result<Descriptor, SyntaxError> {
        if self.keyword() == Some(Keyword::If) {
            self.pos += 1;
            let condition = self.connected()?;
            self.expect(&TokenKind::Keyword(Keyword::ThenAlso), "THEN ALSO")?;
            let consequence = self.operand()?;
            return Ok(Descriptor::Keyworded(DescOp::IfThenAlso, vec![condition, consequence]));
        }
        let mut left = self.primary()?;
        while Self::starts_primary(self.peek()) {
            let right = self.primary()?;
            left = Descriptor::Seq(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<Descriptor, SyntaxError> {
        let expected = ["a name", "a variable", "a constant", "(", "THE COMBINATION OF", "IF"];
        let Some(kind) = self.peek() else {
            return Err(self.error(&expected));
        };
        let d = match kind {
            TokenKind::Name(n, _) => Descriptor::Name(n.clone()),
            TokenKind::Var(v) => Descriptor::Var(v.clone()),
            TokenKind::Const(c) => Descriptor::Const(c.clone()),
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.descriptor()?;
                self.expect(&TokenKind::RParen, ")")?;
                return Ok(inner);
            }
            TokenKind::Keyword(Keyword::TheCombinationOf) => {
                self.pos += 1;
                self.expect(&TokenKind::LParen, "(")?;
                let mut parts = vec![self.descriptor()?];
                while self.peek() == Some(&TokenKind::Comma) {
                    self.pos += 1;
                    parts.push(self.descriptor()?);
                }
                self.expect(&TokenKind::RParen, ", or )")?;
                return Ok(Descriptor::Combination(parts));
            }
            _ => return Err(self.error(&expected)),
        };
        self.pos += 1;
        Ok(d)
    }

    fn rule(&mut self) -> Result<Rule, SyntaxError> {
        self.rule_level(0)
    }

    fn rule_level(&mut self, level: usize) -> Result<Rule, SyntaxError> {
        const LEVELS: [(Keyword, RuleOp); 4] = [
            (Keyword::Iff, RuleOp::Iff),
            (Keyword::Implies, RuleOp::Implies),
            (Keyword::Or, RuleOp::Or),
            (Keyword::And, RuleOp::And),
        ];
        let Some(&(kw, op)) = LEVELS.get(level) else {
            return self.unary();
        };
        let mut left = self.rule_level(level + 1)?;
        while self.keyword() == Some(kw) {
            self.pos += 1;
            let right = self.rule_level(level + 1)?;
            left = Rule::Conn(op, Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Rule, SyntaxError> {
        match self.keyword() {
            Some(Keyword::Not) => {
                self.pos += 1;
                Ok(Rule::Not(Box::new(self.unary()?)))
            }
            Some(Keyword::Always) => {
                self.pos += 1;
                Ok(Rule::Temporal(TemporalOp::Always, vec![self.unary()?]))
            }
            Some(Keyword::Sometime) => {
                self.pos += 1;
                Ok(Rule::Temporal(TemporalOp::Sometime, vec![self.unary()?]))
            }
            _ => self.precedes(),
        }
    }

    fn precedes(&mut self) -> Result<Rule, SyntaxError> {
        let mut left = self.rule_primary()?;
        while self.keyword() == Some(Keyword::Precedes) {
            self.pos += 1;
            let right = self.rule_primary()?;
            left = Rule::Temporal(TemporalOp::Precedes, vec![left, right]);
        }
        Ok(left)
    }

    fn rule_primary(&mut self) -> Result<Rule, SyntaxError> {
        if let Some(q) = self.keyword().and_then(quantifier) {
            self.pos += 1;
            return Ok(Rule::Quant(q, self.descriptor()?));
        }
        if self.peek() == Some(&TokenKind::LParen) {
            self.pos += 1;
            let inner = self.rule()?;
            self.expect(&TokenKind::RParen, ")")?;
            return Ok(inner);
        }
        Err(self.error(&["ANY", "SOME", "ALL", "NO", "NOT", "ALWAYS", "SOMETIME", "("]))
    }
}

/// Parses a whole token stream as one descriptor. `end` is the input length,
/// reported as the position of a premature end.
pub fn parse_descriptor(tokens: &[Token], end: usize) -> Result<Descriptor, SyntaxError> {
    let mut p = Parser { tokens, pos: 0, end };
    let d = p.descriptor()?;
    p.finish()?;
    Ok(d)
}

/// Parses a whole token stream as one rule.
pub fn parse_rule(tokens: &[Token], end: usize) -> Result<Rule, SyntaxError> {
    let mut p = Parser { tokens, pos: 0, end };
    let r = p.rule()?;
    p.finish()?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, BTreeSet};

    use super::*;
    use crate::descriptor::lexer::tokenize;
    use crate::descriptor::names::LexEntry;

    fn lexicon() -> BTreeMap<String, LexEntry> {
        [
            ("Person", LexEntry::Object("A".into())),
            ("Department", LexEntry::Object("B".into())),
            ("Car", LexEntry::Object("C".into())),
            ("working for", LexEntry::Pair("p".into(), "q".into())),
            ("owning", LexEntry::Role("o".into())),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    fn rule(input: &str) -> Result<Rule, SyntaxError> {
        let tokens = tokenize(input, &lexicon(), &BTreeSet::from(["v".to_string()])).unwrap();
        parse_rule(&tokens, input.len())
    }

    fn desc(input: &str) -> Descriptor {
        let tokens = tokenize(input, &lexicon(), &BTreeSet::new()).unwrap();
        parse_descriptor(&tokens, input.len()).unwrap()
    }

    fn name(n: &str) -> Descriptor {
        Descriptor::Name(n.into())
    }

    fn seq(parts: &[&str]) -> Descriptor {
        parts
            .iter()
            .map(|n| name(n))
            .reduce(|a, b| Descriptor::Seq(Box::new(a), Box::new(b)))
            .unwrap()
    }

    #[test]
    fn juxtaposition_is_left_nested() {
        assert_eq!(desc("Person working for Department"), seq(&["Person", "working for", "Department"]));
    }

    #[test]
    fn keyworded_connective_binds_looser_than_juxtaposition() {
        let r = rule("ALL Person MUST ALSO BE Person owning Car").unwrap();
        assert_eq!(
            r,
            Rule::Quant(
                Quantifier::All,
                Descriptor::Keyworded(DescOp::MustAlsoBe, vec![name("Person"), seq(&["Person", "owning", "Car"])])
            )
        );
    }

    #[test]
    fn connectives_are_left_associative() {
        let d = desc("Person AND ALSO Car OR IS Department");
        let inner = Descriptor::Keyworded(DescOp::AndAlso, vec![name("Person"), name("Car")]);
        assert_eq!(d, Descriptor::Keyworded(DescOp::OrIs, vec![inner, name("Department")]));
    }

    #[test]
    fn if_then_also() {
        assert_eq!(
            desc("IF Person THEN ALSO Person owning Car"),
            Descriptor::Keyworded(DescOp::IfThenAlso, vec![name("Person"), seq(&["Person", "owning", "Car"])])
        );
    }

    #[test]
    fn combination_and_parentheses() {
        assert_eq!(
            desc("THE COMBINATION OF (Person, Car owning) Department"),
            Descriptor::Seq(
                Box::new(Descriptor::Combination(vec![name("Person"), seq(&["Car", "owning"])])),
                Box::new(name("Department"))
            )
        );
        assert_eq!(desc("(Person)"), name("Person"));
    }

    #[test]
    fn rule_precedence() {
        let r = rule("ANY Person OR ANY Car AND NOT ALL Department IMPLIES SOME Car").unwrap();
        let any = |n: &str| Rule::Quant(Quantifier::Any, name(n));
        let and = Rule::Conn(
            RuleOp::And,
            Box::new(any("Car")),
            Box::new(Rule::Not(Box::new(Rule::Quant(Quantifier::All, name("Department"))))),
        );
        let or = Rule::Conn(RuleOp::Or, Box::new(any("Person")), Box::new(and));
        assert_eq!(
            r,
            Rule::Conn(RuleOp::Implies, Box::new(or), Box::new(Rule::Quant(Quantifier::Some, name("Car"))))
        );
    }

    #[test]
    fn precedes_at_both_levels() {
        assert_eq!(
            rule("ANY Person PRECEDES Car").unwrap(),
            Rule::Quant(Quantifier::Any, Descriptor::Keyworded(DescOp::Precedes, vec![name("Person"), name("Car")]))
        );
        assert_eq!(
            rule("ANY Person PRECEDES ANY Car").unwrap(),
            Rule::Temporal(
                TemporalOp::Precedes,
                vec![Rule::Quant(Quantifier::Any, name("Person")), Rule::Quant(Quantifier::Any, name("Car"))]
            )
        );
    }

    #[test]
    fn temporal_prefixes() {
        assert_eq!(
            rule("ALWAYS ALL Person").unwrap(),
            Rule::Temporal(TemporalOp::Always, vec![Rule::Quant(Quantifier::All, name("Person"))])
        );
        assert_eq!(
            rule("ALL SOMETIME Person").unwrap(),
            Rule::Quant(Quantifier::All, Descriptor::Keyworded(DescOp::Sometime, vec![name("Person")]))
        );
    }

    #[test]
    fn no_desugars_to_not_some() {
        assert_eq!(rule("NO Person owning Car").unwrap().desugar(), rule("NOT SOME Person owning Car").unwrap());
    }

    #[test]
    fn syntax_errors() {
        let e = rule("ANY (Person").unwrap_err();
        assert_eq!(e.position, "ANY (Person".len());
        assert_eq!(e.expected, vec![")".to_string()]);
        assert!(rule("Person").is_err());
        assert!(rule("ANY").is_err());
        assert!(rule("ANY Person)").is_err());
        assert!(rule("").is_err());
        let e = rule("ANY Person AND").unwrap_err();
        assert_eq!(e.found, "end of input");
    }
}
