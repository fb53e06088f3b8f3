use std::collections::BTreeSet;
use std::fmt;

use crate::freq::FreqOp;
use crate::population::InstanceValue;
use crate::world::UniverseSpec;

use super::PathError;

/// Head-oriented connectives: the operator applied to the heads of both paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeadOp {
    And,
    Or,
    Plus,
    Minus,
    Implies,
    Iff,
}

impl HeadOp {
    pub const ALL: [HeadOp; 6] = [HeadOp::And, HeadOp::Or, HeadOp::Plus, HeadOp::Minus, HeadOp::Implies, HeadOp::Iff];

    pub fn name(self) -> &'static str {
        match self {
            HeadOp::And => "hand",
            HeadOp::Or => "hor",
            HeadOp::Plus => "hplus",
            HeadOp::Minus => "hminus",
            HeadOp::Implies => "himplies",
            HeadOp::Iff => "hiff",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathExpr {
    ObjType(String),
    Role(String),
    Const(InstanceValue),
    /// A variable from ω, bound by the enclosing rule.
    Var(String),
    One,
    Zero,
    Full,
    Concat(Box<PathExpr>, Box<PathExpr>),
    Reverse(Box<PathExpr>),
    Head(Box<PathExpr>),
    Tail(Box<PathExpr>),
    Confluence(Vec<PathExpr>),
    Binary(FreqOp, Box<PathExpr>, Box<PathExpr>),
    Not(Box<PathExpr>),
    HeadConn(HeadOp, Box<PathExpr>, Box<PathExpr>),
    Always(Box<PathExpr>),
    Sometime(Box<PathExpr>),
    Precedes(Box<PathExpr>, Box<PathExpr>),
}

impl PathExpr {
    pub fn obj(id: &str) -> Self {
        PathExpr::ObjType(id.to_string())
    }

    pub fn role(id: &str) -> Self {
        PathExpr::Role(id.to_string())
    }

    pub fn constant(label: &str) -> Self {
        PathExpr::Const(InstanceValue::atom(label))
    }

    pub fn var(name: &str) -> Self {
        PathExpr::Var(name.to_string())
    }

    pub fn concat(self, next: PathExpr) -> Self {
        PathExpr::Concat(Box::new(self), Box::new(next))
    }

    /// Left-nested concatenation of a non-empty sequence.
    pub fn concat_all<I: IntoIterator<Item = PathExpr>>(parts: I) -> Option<Self> {
        parts.into_iter().reduce(PathExpr::concat)
    }

    pub fn reverse(self) -> Self {
        PathExpr::Reverse(Box::new(self))
    }

    pub fn head(self) -> Self {
        PathExpr::Head(Box::new(self))
    }

    pub fn tail(self) -> Self {
        PathExpr::Tail(Box::new(self))
    }

    pub fn binary(op: FreqOp, p: PathExpr, q: PathExpr) -> Self {
        PathExpr::Binary(op, Box::new(p), Box::new(q))
    }

    pub fn negate(self) -> Self {
        PathExpr::Not(Box::new(self))
    }

    pub fn head_conn(op: HeadOp, p: PathExpr, q: PathExpr) -> Self {
        PathExpr::HeadConn(op, Box::new(p), Box::new(q))
    }

    /// Plain path implication `¬P ∨ Q`.
    pub fn implies(p: PathExpr, q: PathExpr) -> Self {
        PathExpr::binary(FreqOp::Join, p.negate(), q)
    }

    pub fn always(self) -> Self {
        PathExpr::Always(Box::new(self))
    }

    pub fn sometime(self) -> Self {
        PathExpr::Sometime(Box::new(self))
    }

    pub fn precedes(p: PathExpr, q: PathExpr) -> Self {
        PathExpr::Precedes(Box::new(p), Box::new(q))
    }

    /// `P hΘ Q` in terms of `Head`, `Not` and the pointwise connectives.
    pub fn expand_head_conn(op: HeadOp, p: &PathExpr, q: &PathExpr) -> PathExpr {
        let hp = p.clone().head();
        let hq = q.clone().head();
        match op {
            HeadOp::And => PathExpr::binary(FreqOp::Meet, hp, hq),
            HeadOp::Or => PathExpr::binary(FreqOp::Join, hp, hq),
            HeadOp::Plus => PathExpr::binary(FreqOp::Add, hp, hq),
            HeadOp::Minus => PathExpr::binary(FreqOp::Minus, hp, hq),
            HeadOp::Implies => PathExpr::implies(hp, hq),
            HeadOp::Iff => PathExpr::binary(
                FreqOp::Meet,
                PathExpr::implies(hp.clone(), hq.clone()),
                PathExpr::implies(hq, hp),
            ),
        }
    }

    pub fn children(&self) -> Vec<&PathExpr> {
        match self {
            PathExpr::ObjType(_)
            | PathExpr::Role(_)
            | PathExpr::Const(_)
            | PathExpr::Var(_)
            | PathExpr::One
            | PathExpr::Zero
            | PathExpr::Full => vec![],
            PathExpr::Reverse(p)
            | PathExpr::Head(p)
            | PathExpr::Tail(p)
            | PathExpr::Not(p)
            | PathExpr::Always(p)
            | PathExpr::Sometime(p) => vec![p],
            PathExpr::Concat(p, q)
            | PathExpr::Binary(_, p, q)
            | PathExpr::HeadConn(_, p, q)
            | PathExpr::Precedes(p, q) => vec![p, q],
            PathExpr::Confluence(ps) => ps.iter().collect(),
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(PathExpr::depth).max().unwrap_or(0)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |p| {
            if let PathExpr::Var(v) = p {
                out.insert(v.clone());
            }
        });
        out
    }

    pub fn has_temporal(&self) -> bool {
        let mut found = false;
        self.walk(&mut |p| {
            found |= matches!(p, PathExpr::Always(_) | PathExpr::Sometime(_) | PathExpr::Precedes(..));
        });
        found
    }

    fn walk(&self, f: &mut impl FnMut(&PathExpr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Constants, confluence arities and confluence nesting depth.
    pub fn universe_spec(&self) -> UniverseSpec {
        fn go(p: &PathExpr, spec: &mut UniverseSpec) -> usize {
            let inner = p.children().into_iter().map(|c| go(c, spec)).max().unwrap_or(0);
            match p {
                PathExpr::Const(c) => {
                    spec.constants.insert(c.clone());
                    0
                }
                PathExpr::Confluence(ps) => {
                    spec.arities.insert(ps.len());
                    inner + 1
                }
                _ => inner,
            }
        }
        let mut spec = UniverseSpec::default();
        spec.depth = go(self, &mut spec);
        spec
    }

    /// Rejects empty confluences anywhere in the expression.
    pub fn check(&self) -> Result<(), PathError> {
        let mut ok = true;
        self.walk(&mut |p| ok &= !matches!(p, PathExpr::Confluence(ps) if ps.is_empty()));
        if ok {
            Ok(())
        } else {
            Err(PathError::EmptyConfluence)
        }
    }
}

/// `P1 × … × Pn ≜ ⟨P1 ∘ ⊤, …, Pn ∘ ⊤⟩`
pub fn cartesian(parts: Vec<PathExpr>) -> Result<PathExpr, PathError> {
    if parts.is_empty() {
        return Err(PathError::EmptyProduct);
    }
    Ok(PathExpr::Confluence(parts.into_iter().map(|p| p.concat(PathExpr::Full)).collect()))
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathExpr::ObjType(o) => f.write_str(o),
            PathExpr::Role(r) => f.write_str(r),
            PathExpr::Const(c) => write!(f, "'{c}'"),
            PathExpr::Var(v) => write!(f, "{v}"),
            PathExpr::One => f.write_str("1"),
            PathExpr::Zero => f.write_str("0"),
            PathExpr::Full => f.write_str("⊤"),
            PathExpr::Concat(p, q) => write!(f, "{p} ∘ {q}"),
            PathExpr::Reverse(p) => match p.as_ref() {
                PathExpr::Role(_) | PathExpr::ObjType(_) => write!(f, "~{p}"),
                _ => write!(f, "~({p})"),
            },
            PathExpr::Head(p) => write!(f, "head({p})"),
            PathExpr::Tail(p) => write!(f, "tail({p})"),
            PathExpr::Confluence(ps) => {
                let parts: Vec<String> = ps.iter().map(ToString::to_string).collect();
                write!(f, "⟨{}⟩", parts.join(", "))
            }
            PathExpr::Binary(op, p, q) => write!(f, "({p} {} {q})", op.symbol()),
            PathExpr::Not(p) => write!(f, "¬({p})"),
            PathExpr::HeadConn(op, p, q) => write!(f, "({p} {} {q})", op.name()),
            PathExpr::Always(p) => write!(f, "□({p})"),
            PathExpr::Sometime(p) => write!(f, "◇({p})"),
            PathExpr::Precedes(p, q) => write!(f, "({p} precedes {q})"),
        }
    }
}
