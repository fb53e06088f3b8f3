//! Reference semantics: a path expression rewritten to a formula over its
//! head and tail terms.

use crate::freq::FreqOp;
use crate::logic::{Formula, Literal, Term};

use super::expr::PathExpr;

/// Supplies binder names that cannot clash with ω-variables (those never
/// contain an underscore).
#[derive(Debug, Default)]
pub struct Fresh(usize);

impl Fresh {
    pub fn new() -> Self {
        Fresh(0)
    }

    pub fn next(&mut self, stem: &str) -> String {
        self.0 += 1;
        format!("_{stem}{}", self.0)
    }
}

/// `x ⟦p⟧ y`
pub fn rewrite(p: &PathExpr, x: &Term, y: &Term) -> Formula {
    rewrite_with(p, x, y, &mut Fresh::new())
}

pub fn rewrite_with(p: &PathExpr, x: &Term, y: &Term, fresh: &mut Fresh) -> Formula {
    let eq = |a: &Term, b: &Term| Formula::Eq(a.clone(), b.clone());
    match p {
        PathExpr::ObjType(o) => Formula::and(Formula::ObjAtom(o.clone(), x.clone()), eq(x, y)),
        PathExpr::Role(r) => Formula::RoleAtom(r.clone(), x.clone(), y.clone()),
        PathExpr::Const(c) => Formula::and(eq(&Term::Const(c.clone()), x), eq(x, y)),
        PathExpr::Var(v) => Formula::and(eq(&Term::Var(v.clone()), x), eq(x, y)),
        PathExpr::One => eq(x, y),
        PathExpr::Zero => Formula::Lit(Literal::Zero),
        PathExpr::Full => Formula::Lit(Literal::One),
        PathExpr::Concat(a, b) => {
            let z = Term::Var(fresh.next("z"));
            let left = rewrite_with(a, x, &z, fresh);
            let right = rewrite_with(b, &z, y, fresh);
            let Term::Var(name) = z else { unreachable!() };
            Formula::Sum(name, Box::new(Formula::binary(FreqOp::Times, left, right)))
        }
        PathExpr::Reverse(a) => rewrite_with(a, y, x, fresh),
        PathExpr::Head(a) => {
            let z = fresh.next("z");
            let body = rewrite_with(a, x, &Term::Var(z.clone()), fresh);
            Formula::and(eq(x, y), Formula::exists(&z, body))
        }
        PathExpr::Tail(a) => {
            let z = fresh.next("z");
            let body = rewrite_with(a, &Term::Var(z.clone()), y, fresh);
            Formula::and(eq(x, y), Formula::exists(&z, body))
        }
        PathExpr::Confluence(parts) => {
            let vars: Vec<String> = parts.iter().map(|_| fresh.next("x")).collect();
            let conj = parts
                .iter()
                .zip(&vars)
                .map(|(part, v)| rewrite_with(part, &Term::Var(v.clone()), y, fresh))
                .rev()
                .reduce(|rest, f| Formula::and(f, rest))
                .unwrap_or(Formula::Lit(Literal::One));
            let tuple = Term::Tuple(vars.iter().map(|v| Term::Var(v.clone())).collect());
            let body = Formula::and(eq(x, &tuple), conj);
            vars.iter().rev().fold(body, |acc, v| Formula::exists(v, acc))
        }
        PathExpr::Binary(op, a, b) => {
            Formula::binary(*op, rewrite_with(a, x, y, fresh), rewrite_with(b, x, y, fresh))
        }
        PathExpr::Not(a) => Formula::negate(rewrite_with(a, x, y, fresh)),
        PathExpr::HeadConn(op, a, b) => rewrite_with(&PathExpr::expand_head_conn(*op, a, b), x, y, fresh),
        PathExpr::Always(a) => Formula::always(rewrite_with(a, x, y, fresh)),
        PathExpr::Sometime(a) => Formula::sometime(rewrite_with(a, x, y, fresh)),
        PathExpr::Precedes(a, b) => {
            Formula::precedes(rewrite_with(a, x, y, fresh), rewrite_with(b, x, y, fresh))
        }
    }
}

/// `ANY(P) ≜ ∃x,y. x⟦P⟧y`
pub fn any_formula(p: &PathExpr, fresh: &mut Fresh) -> Formula {
    let (x, y) = (fresh.next("h"), fresh.next("t"));
    let body = rewrite_with(p, &Term::Var(x.clone()), &Term::Var(y.clone()), fresh);
    Formula::exists(&x, Formula::exists(&y, body))
}

/// `ALL(P) ≜ ∀x,y. x⟦P⟧y`
pub fn all_formula(p: &PathExpr, fresh: &mut Fresh) -> Formula {
    let (x, y) = (fresh.next("h"), fresh.next("t"));
    let body = rewrite_with(p, &Term::Var(x.clone()), &Term::Var(y.clone()), fresh);
    Formula::forall(&x, Formula::forall(&y, body))
}
