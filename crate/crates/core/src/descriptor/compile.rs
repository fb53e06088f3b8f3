//! Descriptors to path expressions, rules to compiled rules.

use std::collections::BTreeMap;

use crate::path::{HeadOp, PathExpr};
use crate::rule::RuleExpr;

use super::names::LexEntry;
use super::parser::{DescOp, Descriptor, Quantifier, Rule, RuleOp, TemporalOp};
use super::DescriptorError;

pub type Lexicon = BTreeMap<String, LexEntry>;

fn entry_path(entry: &LexEntry) -> PathExpr {
    match entry {
        LexEntry::Object(o) => PathExpr::obj(o),
        LexEntry::Role(r) => PathExpr::role(r),
        LexEntry::ReverseRole(r) => PathExpr::role(r).reverse(),
        LexEntry::Pair(p, q) => PathExpr::role(p).concat(PathExpr::role(q).reverse()),
    }
}

/// `DSem`
pub fn dsem(d: &Descriptor, lexicon: &Lexicon) -> Result<PathExpr, DescriptorError> {
    let go = |d: &Descriptor| dsem(d, lexicon);
    Ok(match d {
        Descriptor::Name(n) => {
            let entry = lexicon.get(n).ok_or_else(|| DescriptorError::UnresolvableName(n.clone()))?;
            entry_path(entry)
        }
        Descriptor::Var(v) => PathExpr::var(v),
        Descriptor::Const(c) => PathExpr::constant(c),
        Descriptor::Seq(a, b) => go(a)?.concat(go(b)?),
        Descriptor::Combination(parts) => PathExpr::Confluence(parts.iter().map(go).collect::<Result<_, _>>()?),
        Descriptor::Keyworded(op, args) => {
            let mut args = args.iter().map(go).collect::<Result<Vec<_>, _>>()?.into_iter();
            let mut next = || args.next().expect("parser supplies every operand");
            let head = |h: HeadOp, a: PathExpr, b: PathExpr| PathExpr::head_conn(h, a, b);
            match op {
                DescOp::AndAlso => head(HeadOp::And, next(), next()),
                DescOp::MustAlsoBe | DescOp::IfThenAlso => head(HeadOp::Implies, next(), next()),
                DescOp::IfAndOnlyIf => head(HeadOp::Iff, next(), next()),
                DescOp::OrIs => head(HeadOp::Or, next(), next()),
                DescOp::CombinedWith => head(HeadOp::Plus, next(), next()),
                DescOp::ButNot => head(HeadOp::Minus, next(), next()),
                DescOp::Always => next().always(),
                DescOp::Sometime => next().sometime(),
                DescOp::Precedes => PathExpr::precedes(next(), next()),
            }
        }
    })
}

/// `RSem`, after rewriting `NO X` as `NOT SOME X`. `ANY` and `SOME` coincide.
pub fn rsem(r: &Rule, lexicon: &Lexicon) -> Result<RuleExpr, DescriptorError> {
    fn go(r: &Rule, lexicon: &Lexicon) -> Result<RuleExpr, DescriptorError> {
        Ok(match r {
            Rule::Quant(Quantifier::Any | Quantifier::Some, d) => RuleExpr::Any(dsem(d, lexicon)?),
            Rule::Quant(Quantifier::All, d) => RuleExpr::All(dsem(d, lexicon)?),
            Rule::Quant(Quantifier::No, _) => unreachable!("desugared"),
            Rule::Conn(op, a, b) => {
                let (a, b) = (go(a, lexicon)?, go(b, lexicon)?);
                match op {
                    RuleOp::And => RuleExpr::and(a, b),
                    RuleOp::Or => RuleExpr::or(a, b),
                    RuleOp::Implies => RuleExpr::implies(a, b),
                    RuleOp::Iff => RuleExpr::iff(a, b),
                }
            }
            Rule::Not(a) => RuleExpr::negate(go(a, lexicon)?),
            Rule::Temporal(op, args) => {
                let mut args = args.iter().map(|a| go(a, lexicon)).collect::<Result<Vec<_>, _>>()?.into_iter();
                let mut next = || args.next().expect("parser supplies every operand");
                match op {
                    TemporalOp::Always => RuleExpr::always(next()),
                    TemporalOp::Sometime => RuleExpr::sometime(next()),
                    TemporalOp::Precedes => RuleExpr::precedes(next(), next()),
                }
            }
        })
    }
    go(&r.clone().desugar(), lexicon)
}
