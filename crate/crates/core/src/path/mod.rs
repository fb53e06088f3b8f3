//! The path-expression layer.
//!
//! A path expression denotes a weighted binary relation between heads and
//! tails. [`rewrite`] gives its meaning as a formula; [`eval_path`] computes
//! the same relation as a table without enumerating every formula instance.

mod expr;
mod rewrite;
mod table;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::freq::FreqError;
use crate::logic::{EvalContext, EvalError, Term, Valuation};
use crate::model::ModelError;
use crate::population::InstanceValue;
use crate::world::UniverseTooLarge;
use crate::Frequency;

pub use expr::{cartesian, HeadOp, PathExpr};
pub use rewrite::{all_formula, any_formula, rewrite, rewrite_with, Fresh};
pub use table::{FreqTable, TableEvaluator};

pub type Bindings = BTreeMap<String, InstanceValue>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("cartesian product of no paths")]
    EmptyProduct,
    #[error("confluence of no paths")]
    EmptyConfluence,
}

impl From<ModelError> for PathError {
    fn from(e: ModelError) -> Self {
        PathError::Eval(e.into())
    }
}

impl From<FreqError> for PathError {
    fn from(e: FreqError) -> Self {
        PathError::Eval(e.into())
    }
}

impl From<UniverseTooLarge> for PathError {
    fn from(e: UniverseTooLarge) -> Self {
        PathError::Eval(e.into())
    }
}

fn evaluator<'w>(ctx: &EvalContext<'w>, p: &PathExpr) -> Result<TableEvaluator<'w>, PathError> {
    let spec = ctx.universe_spec().cloned().unwrap_or_else(|| p.universe_spec());
    TableEvaluator::new(ctx.world(), ctx.domain(), &spec, ctx.time_index(), p.has_temporal())
}

/// The table of `p` at the context's time, over pairs of that time's universe.
pub fn eval_path(ctx: &EvalContext<'_>, p: &PathExpr) -> Result<FreqTable, PathError> {
    evaluator(ctx, p)?.table(p, ctx.env())
}

/// One table per assignment of the free ω-variables not bound by the context.
pub fn eval_path_bindings(ctx: &EvalContext<'_>, p: &PathExpr) -> Result<Vec<(Bindings, FreqTable)>, PathError> {
    let mut ev = evaluator(ctx, p)?;
    let free: Vec<String> = p.free_vars().into_iter().filter(|v| !ctx.env().contains_key(v)).collect();
    let universe = ev.universe_values().to_vec();
    let mut out = Vec::new();
    for env in assignments(&free, &universe, ctx.env()) {
        let table = ev.table(p, &env)?;
        out.push((env, table));
    }
    Ok(out)
}

/// Every extension of `base` binding `vars` to values of `universe`.
pub(crate) fn assignments(vars: &[String], universe: &[InstanceValue], base: &Bindings) -> Vec<Bindings> {
    let mut out = vec![base.clone()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|env| {
                universe.iter().map(move |value| {
                    let mut env = env.clone();
                    env.insert(v.clone(), value.clone());
                    env
                })
            })
            .collect();
    }
    out
}

/// `ANY(P)` at the context's time.
pub fn any(ctx: &EvalContext<'_>, p: &PathExpr) -> Result<Frequency, PathError> {
    evaluator(ctx, p)?.any(p, ctx.env())
}

/// `ALL(P)` at the context's time.
pub fn all(ctx: &EvalContext<'_>, p: &PathExpr) -> Result<Frequency, PathError> {
    evaluator(ctx, p)?.all(p, ctx.env())
}

/// The table obtained by valuating `x⟦p⟧y` for every pair separately.
pub fn reference_table(ctx: &EvalContext<'_>, p: &PathExpr) -> Result<FreqTable, PathError> {
    p.check()?;
    let spec = ctx.universe_spec().cloned().unwrap_or_else(|| p.universe_spec());
    let mut valuation = Valuation::new(ctx.world(), ctx.domain(), &spec)?;
    let (x, y) = ("_head".to_string(), "_tail".to_string());
    let formula = rewrite(p, &Term::Var(x.clone()), &Term::Var(y.clone()));
    let universe = valuation.universe(ctx.time_index()).to_vec();
    let base: Vec<(String, InstanceValue)> = ctx.env().iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let mut rows = BTreeMap::new();
    for a in &universe {
        for b in &universe {
            let mut env = base.clone();
            env.push((x.clone(), a.clone()));
            env.push((y.clone(), b.clone()));
            let v = valuation.eval(ctx.time_index(), &env, &formula)?;
            if !v.is_zero() {
                rows.insert((a.clone(), b.clone()), v);
            }
        }
    }
    Ok(FreqTable::from_rows(ctx.domain(), rows))
}
