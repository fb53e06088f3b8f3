//! The logic layer: a multi-valued predicate calculus with temporal operators,
//! valued in a frequency domain over a population sequence.
//!
//! Quantifiers range over the universe of the evaluation time: the active
//! domain, the expression's constants, and the tuples its confluences can
//! form (see [`UniverseSpec`]). `Sum` is the ⊕-folding binder that path
//! concatenation uses to count alternative intermediate instances.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::freq::{count, meet_all, FreqError, FreqOp, Frequency, FrequencyDomain};
use crate::model::ModelError;
use crate::population::InstanceValue;
use crate::world::{UniverseSpec, UniverseTooLarge, World};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error(transparent)]
    Freq(#[from] FreqError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Universe(#[from] UniverseTooLarge),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(InstanceValue),
    Tuple(Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Var(v) => {
                out.insert(v);
            }
            Term::Const(_) => {}
            Term::Tuple(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    fn mentions(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::Const(_) => false,
            Term::Tuple(ts) => ts.iter().any(|t| t.mentions(var)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "'{c}'"),
            Term::Tuple(ts) => {
                let parts: Vec<String> = ts.iter().map(ToString::to_string).collect();
                write!(f, "⟨{}⟩", parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    One,
    Zero,
    Value(Frequency),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    /// `o(i)`
    ObjAtom(String, Term),
    /// `r(i, j)`: `i` plays `r` in fact `j`.
    RoleAtom(String, Term, Term),
    /// Term equality, valued one or zero.
    Eq(Term, Term),
    Binary(FreqOp, Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    /// ⊕-fold over the universe.
    Sum(String, Box<Formula>),
    Always(Box<Formula>),
    Next(Box<Formula>),
    Sometime(Box<Formula>),
    Precedes(Box<Formula>, Box<Formula>),
    Lit(Literal),
}

impl Formula {
    pub fn binary(op: FreqOp, a: Formula, b: Formula) -> Self {
        Formula::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::binary(FreqOp::Meet, a, b)
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::binary(FreqOp::Join, a, b)
    }

    pub fn negate(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    /// `¬a ∨ b`
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::negate(a), b)
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn exists(var: &str, body: Formula) -> Self {
        Formula::Exists(var.to_string(), Box::new(body))
    }

    pub fn forall(var: &str, body: Formula) -> Self {
        Formula::Forall(var.to_string(), Box::new(body))
    }

    pub fn always(body: Formula) -> Self {
        Formula::Always(Box::new(body))
    }

    pub fn next(body: Formula) -> Self {
        Formula::Next(Box::new(body))
    }

    pub fn sometime(body: Formula) -> Self {
        Formula::Sometime(Box::new(body))
    }

    pub fn precedes(a: Formula, b: Formula) -> Self {
        Formula::Precedes(Box::new(a), Box::new(b))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn walk<'a>(f: &'a Formula, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
            let mut terms = BTreeSet::new();
            match f {
                Formula::ObjAtom(_, t) => t.collect_vars(&mut terms),
                Formula::RoleAtom(_, a, b) | Formula::Eq(a, b) => {
                    a.collect_vars(&mut terms);
                    b.collect_vars(&mut terms);
                }
                Formula::Binary(_, a, b) | Formula::Precedes(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                Formula::Not(a) | Formula::Always(a) | Formula::Next(a) | Formula::Sometime(a) => {
                    walk(a, bound, out)
                }
                Formula::Forall(v, a) | Formula::Exists(v, a) | Formula::Sum(v, a) => {
                    bound.push(v);
                    walk(a, bound, out);
                    bound.pop();
                }
                Formula::Lit(_) => {}
            }
            for v in terms {
                if !bound.contains(&v) {
                    out.insert(v.to_string());
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Universe contributions of a standalone formula: its constants and tuple
    /// terms, with depth the deepest tuple nesting inside one term.
    pub fn universe_spec(&self) -> UniverseSpec {
        fn term(t: &Term, spec: &mut UniverseSpec) -> usize {
            match t {
                Term::Var(_) => 0,
                Term::Const(c) => {
                    spec.constants.insert(c.clone());
                    0
                }
                Term::Tuple(ts) => {
                    spec.arities.insert(ts.len());
                    1 + ts.iter().map(|t| term(t, spec)).max().unwrap_or(0)
                }
            }
        }
        fn walk(f: &Formula, spec: &mut UniverseSpec) {
            let depth = match f {
                Formula::ObjAtom(_, t) => term(t, spec),
                Formula::RoleAtom(_, a, b) | Formula::Eq(a, b) => term(a, spec).max(term(b, spec)),
                Formula::Binary(_, a, b) | Formula::Precedes(a, b) => {
                    walk(a, spec);
                    walk(b, spec);
                    0
                }
                Formula::Not(a)
                | Formula::Always(a)
                | Formula::Next(a)
                | Formula::Sometime(a)
                | Formula::Forall(_, a)
                | Formula::Exists(_, a)
                | Formula::Sum(_, a) => {
                    walk(a, spec);
                    0
                }
                Formula::Lit(_) => 0,
            };
            spec.depth = spec.depth.max(depth);
        }
        let mut spec = UniverseSpec::default();
        walk(self, &mut spec);
        spec
    }
}

/// Evaluation judgment `Pop ⊨_t^v φ`: world, domain, time and variable bindings.
#[derive(Debug, Clone)]
pub struct EvalContext<'w> {
    world: &'w World<'w>,
    domain: FrequencyDomain,
    time: usize,
    env: BTreeMap<String, InstanceValue>,
    spec: Option<UniverseSpec>,
}

impl<'w> EvalContext<'w> {
    pub fn new(world: &'w World<'w>, domain: FrequencyDomain, time: i64) -> Result<Self, EvalError> {
        Ok(EvalContext {
            world,
            domain,
            time: world.index_of(time)?,
            env: BTreeMap::new(),
            spec: None,
        })
    }

    /// Context at the first recorded snapshot.
    pub fn first(world: &'w World<'w>, domain: FrequencyDomain) -> Self {
        EvalContext {
            world,
            domain,
            time: 0,
            env: BTreeMap::new(),
            spec: None,
        }
    }

    pub fn with_binding(mut self, var: &str, value: InstanceValue) -> Self {
        self.env.insert(var.to_string(), value);
        self
    }

    /// Fixes the universe contributions instead of deriving them from the formula.
    pub fn with_universe(mut self, spec: UniverseSpec) -> Self {
        self.spec = Some(spec);
        self
    }

    pub fn at_index(mut self, index: usize) -> Self {
        self.time = index;
        self
    }

    pub fn world(&self) -> &'w World<'w> {
        self.world
    }

    pub fn domain(&self) -> FrequencyDomain {
        self.domain
    }

    pub fn time(&self) -> i64 {
        self.world.time(self.time)
    }

    pub fn time_index(&self) -> usize {
        self.time
    }

    pub fn env(&self) -> &BTreeMap<String, InstanceValue> {
        &self.env
    }

    pub fn universe_spec(&self) -> Option<&UniverseSpec> {
        self.spec.as_ref()
    }
}

/// The active domain at the context's time.
pub fn active_domain(ctx: &EvalContext<'_>) -> BTreeSet<InstanceValue> {
    ctx.world.active_domain(ctx.time).clone()
}

/// `VSem(φ)` at the context's time.
pub fn vsem(ctx: &EvalContext<'_>, f: &Formula) -> Result<Frequency, EvalError> {
    vsem_traced(ctx, f).map(|(v, _)| v)
}

/// As [`vsem`], also returning the times at which `○` ran past the last snapshot.
pub fn vsem_traced(ctx: &EvalContext<'_>, f: &Formula) -> Result<(Frequency, BTreeSet<i64>), EvalError> {
    let spec = ctx.spec.clone().unwrap_or_else(|| f.universe_spec());
    let mut valuation = Valuation::new(ctx.world, ctx.domain, &spec)?;
    let env: Vec<(String, InstanceValue)> = ctx.env.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let value = valuation.eval(ctx.time, &env, f)?;
    Ok((value, valuation.horizon_hits().clone()))
}

/// Reusable evaluator over one world, domain and universe.
pub struct Valuation<'w> {
    world: &'w World<'w>,
    domain: FrequencyDomain,
    universes: Vec<Vec<InstanceValue>>,
    members: Vec<HashSet<InstanceValue>>,
    pops: Vec<HashMap<String, BTreeSet<InstanceValue>>>,
    roles: Vec<HashMap<String, HashMap<InstanceValue, BTreeSet<InstanceValue>>>>,
    env: Vec<(String, InstanceValue)>,
    horizon: BTreeSet<i64>,
}

impl<'w> Valuation<'w> {
    pub fn new(world: &'w World<'w>, domain: FrequencyDomain, spec: &UniverseSpec) -> Result<Self, EvalError> {
        let universes: Vec<Vec<InstanceValue>> =
            world.universes(spec)?.into_iter().map(|u| u.into_iter().collect()).collect();
        let members = universes.iter().map(|u| u.iter().cloned().collect()).collect();
        Ok(Valuation {
            world,
            domain,
            universes,
            members,
            pops: vec![HashMap::new(); world.len()],
            roles: vec![HashMap::new(); world.len()],
            env: Vec::new(),
            horizon: BTreeSet::new(),
        })
    }

    pub fn universe(&self, time: usize) -> &[InstanceValue] {
        &self.universes[time]
    }

    pub fn horizon_hits(&self) -> &BTreeSet<i64> {
        &self.horizon
    }

    pub fn eval(&mut self, time: usize, env: &[(String, InstanceValue)], f: &Formula) -> Result<Frequency, EvalError> {
        self.env.clear();
        self.env.extend(env.iter().cloned());
        self.value(time, f)
    }

    fn term<'t>(&'t self, t: &'t Term) -> Result<Cow<'t, InstanceValue>, EvalError> {
        match t {
            Term::Var(v) => self
                .env
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, val)| Cow::Borrowed(val))
                .ok_or_else(|| EvalError::UnboundVariable(v.clone())),
            Term::Const(c) => Ok(Cow::Borrowed(c)),
            Term::Tuple(ts) => Ok(Cow::Owned(InstanceValue::Tuple(
                ts.iter().map(|t| self.term(t).map(Cow::into_owned)).collect::<Result<_, _>>()?,
            ))),
        }
    }

    fn load_pop(&mut self, time: usize, type_id: &str) -> Result<(), EvalError> {
        if !self.pops[time].contains_key(type_id) {
            let pop = self.world.model().pop(self.world.snapshot(time), type_id)?;
            self.pops[time].insert(type_id.to_string(), pop);
        }
        Ok(())
    }

    fn load_role(&mut self, time: usize, role: &str) -> Result<(), EvalError> {
        if !self.roles[time].contains_key(role) {
            let mut ext: HashMap<InstanceValue, BTreeSet<InstanceValue>> = HashMap::new();
            for (player, fact) in self.world.model().role_extension(self.world.snapshot(time), role)? {
                ext.entry(player).or_default().insert(fact);
            }
            self.roles[time].insert(role.to_string(), ext);
        }
        Ok(())
    }

    fn bind<T>(&mut self, var: &str, value: InstanceValue, k: impl FnOnce(&mut Self) -> T) -> T {
        self.env.push((var.to_string(), value));
        let out = k(self);
        self.env.pop();
        out
    }

    fn fold_binder(&mut self, time: usize, op: FreqOp, start: Frequency, var: &str, body: &Formula) -> Result<Frequency, EvalError> {
        let mut acc = start;
        let Some(first) = self.universes[time].first().cloned() else { return Ok(acc) };
        self.env.push((var.to_string(), first));
        let slot = self.env.len() - 1;
        let mut result = Ok(());
        for idx in 0..self.universes[time].len() {
            self.env[slot].1 = self.universes[time][idx].clone();
            match self.value(time, body).and_then(|v| Ok(acc.apply(op, &v)?)) {
                Ok(v) => acc = v,
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
        }
        self.env.pop();
        result.map(|_| acc)
    }

    /// For `∃v. ∃…. (t = ⟨…, v, …⟩ ∧ φ)` with `t` already bound, the only
    /// assignment of `v` that can be non-zero is the matching component of `t`.
    fn tuple_guard<'f>(&self, var: &str, body: &'f Formula) -> Option<(&'f Term, usize)> {
        let mut inner: Vec<&str> = Vec::new();
        let mut cur = body;
        while let Formula::Exists(v, b) = cur {
            inner.push(v);
            cur = b;
        }
        let Formula::Binary(FreqOp::Meet, guard, _) = cur else { return None };
        let Formula::Eq(bound, Term::Tuple(parts)) = guard.as_ref() else { return None };
        if bound.mentions(var) || inner.iter().any(|v| bound.mentions(v)) {
            return None;
        }
        let pos = parts.iter().position(|p| matches!(p, Term::Var(v) if v == var))?;
        Some((bound, pos))
    }

    fn value(&mut self, time: usize, f: &Formula) -> Result<Frequency, EvalError> {
        let d = self.domain;
        match f {
            Formula::ObjAtom(o, t) => {
                self.load_pop(time, o)?;
                let i = self.term(t)?;
                Ok(count(self.pops[time][o.as_str()].get(i.as_ref()), d))
            }
            Formula::RoleAtom(r, a, b) => {
                self.load_role(time, r)?;
                let (i, j) = (self.term(a)?, self.term(b)?);
                let facts = self.roles[time][r.as_str()].get(i.as_ref());
                Ok(count(facts.and_then(|fs| fs.get(j.as_ref())), d))
            }
            Formula::Eq(a, b) => Ok(if self.term(a)? == self.term(b)? { d.one() } else { d.zero() }),
            Formula::Binary(op, a, b) => {
                let va = self.value(time, a)?;
                let absorbed = match op {
                    FreqOp::Times => d.zero_is_sparse(),
                    FreqOp::Meet => d.meet_zero_absorbs(),
                    _ => false,
                };
                if absorbed && va.is_zero() {
                    return Ok(va);
                }
                let vb = self.value(time, b)?;
                Ok(va.apply(*op, &vb)?)
            }
            Formula::Not(a) => Ok(d.one().minus(&self.value(time, a)?)?),
            Formula::Forall(v, body) => self.fold_binder(time, FreqOp::Meet, d.one(), v, body),
            Formula::Exists(v, body) => {
                if d.zero_is_sparse() {
                    if let Some((bound, pos)) = self.tuple_guard(v, body) {
                        let target = self.term(bound)?;
                        let candidate = match target.components() {
                            Some(parts) if Some(parts.len()) == guard_arity(body) => parts[pos].clone(),
                            _ => return Ok(d.zero()),
                        };
                        if !self.members[time].contains(&candidate) {
                            return Ok(d.zero());
                        }
                        let v = self.bind(v, candidate, |s| s.value(time, body))?;
                        return Ok(d.zero().join(&v)?);
                    }
                }
                self.fold_binder(time, FreqOp::Join, d.zero(), v, body)
            }
            Formula::Sum(v, body) => self.fold_binder(time, FreqOp::Add, d.zero(), v, body),
            Formula::Always(a) => {
                let vs = self.at_all_times(a)?;
                Ok(meet_all(vs, d)?)
            }
            Formula::Next(a) => match self.next_index(time) {
                Some(n) => self.value(n, a),
                None => Ok(d.zero()),
            },
            Formula::Sometime(a) => {
                let vs = self.at_all_times(a)?;
                Ok(sometime_over(&vs, d)?)
            }
            Formula::Precedes(x, y) => {
                let (xs, ys) = (self.at_all_times(x)?, self.at_all_times(y)?);
                self.next_index(self.world.len() - 1);
                Ok(precedes_over(&xs, &ys, d)?)
            }
            Formula::Lit(Literal::One) => Ok(d.one()),
            Formula::Lit(Literal::Zero) => Ok(d.zero()),
            Formula::Lit(Literal::Value(v)) => {
                if v.domain() != d {
                    return Err(FreqError::DomainMismatch { left: v.domain(), right: d }.into());
                }
                Ok(v.clone())
            }
        }
    }

    fn at_all_times(&mut self, f: &Formula) -> Result<Vec<Frequency>, EvalError> {
        (0..self.world.len()).map(|s| self.value(s, f)).collect()
    }

    fn next_index(&mut self, time: usize) -> Option<usize> {
        if time + 1 < self.world.len() {
            Some(time + 1)
        } else {
            self.horizon.insert(self.world.time(time));
            None
        }
    }
}

/// `◇ = ¬□¬` over per-time values.
pub fn sometime_over(values: &[Frequency], d: FrequencyDomain) -> Result<Frequency, FreqError> {
    let one = d.one();
    let negated = values.iter().map(|v| one.minus(v)).collect::<Result<Vec<_>, _>>()?;
    one.minus(&meet_all(negated, d)?)
}

/// `□((x ∧ ○y) ⟹ (○¬x ∧ ¬y))` over per-time values, with `○` zero past the
/// last time.
pub fn precedes_over(xs: &[Frequency], ys: &[Frequency], d: FrequencyDomain) -> Result<Frequency, FreqError> {
    let (one, zero) = (d.one(), d.zero());
    let mut steps = Vec::with_capacity(xs.len());
    for (s, (x, y)) in xs.iter().zip(ys).enumerate() {
        let (next_y, next_not_x) = match (xs.get(s + 1), ys.get(s + 1)) {
            (Some(nx), Some(ny)) => (ny.clone(), one.minus(nx)?),
            _ => (zero.clone(), zero.clone()),
        };
        let premise = x.meet(&next_y)?;
        let conclusion = next_not_x.meet(&one.minus(y)?)?;
        steps.push(one.minus(&premise)?.join(&conclusion)?);
    }
    meet_all(steps, d)
}

fn guard_arity(body: &Formula) -> Option<usize> {
    let mut cur = body;
    while let Formula::Exists(_, b) = cur {
        cur = b;
    }
    match cur {
        Formula::Binary(_, guard, _) => match guard.as_ref() {
            Formula::Eq(_, Term::Tuple(parts)) => Some(parts.len()),
            _ => None,
        },
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Model, ModelBuilder};
    use crate::population::{FactInstance, PopulationSequence, Snapshot};

    fn model() -> Model {
        ModelBuilder::new()
            .entity("A")
            .entity("B")
            .entity("X")
            .fact("F", &[("p", "A"), ("q", "B")])
            .build()
            .unwrap()
    }

    fn join_snapshot() -> Snapshot {
        let mut s = Snapshot::new(0).with_objects("A", ["1", "2", "3"]).with_objects("B", ["A", "B", "C"]);
        for (a, b) in [("1", "A"), ("2", "B"), ("3", "A"), ("1", "C")] {
            s = s.with_fact(
                "F",
                FactInstance::new(
                    InstanceValue::tuple_of(&[a, b]),
                    [("p".to_string(), a.into()), ("q".to_string(), b.into())],
                ),
            );
        }
        s
    }

    fn c(label: &str) -> Term {
        Term::Const(InstanceValue::atom(label))
    }

    #[test]
    fn object_atom_counts_membership() {
        let m = model();
        let seq = PopulationSequence::single(join_snapshot());
        let w = World::new(&m, &seq);
        let ctx = EvalContext::first(&w, FrequencyDomain::Nat);
        assert_eq!(vsem(&ctx, &Formula::ObjAtom("B".into(), c("A"))).unwrap(), Frequency::Nat(1));
        assert_eq!(vsem(&ctx, &Formula::ObjAtom("B".into(), c("1"))).unwrap(), Frequency::Nat(0));
    }

    #[test]
    fn role_atom() {
        let m = model();
        let seq = PopulationSequence::single(join_snapshot());
        let w = World::new(&m, &seq);
        let ctx = EvalContext::first(&w, FrequencyDomain::Nat);
        let f = Formula::RoleAtom("p".into(), c("1"), Term::Const(InstanceValue::tuple_of(&["1", "A"])));
        assert_eq!(vsem(&ctx, &f).unwrap(), Frequency::Nat(1));
    }

    #[test]
    fn exists_over_empty_population() {
        let m = model();
        let seq = PopulationSequence::single(Snapshot::new(0).with_objects("A", ["1"]));
        let w = World::new(&m, &seq);
        let ctx = EvalContext::first(&w, FrequencyDomain::Nat);
        let f = Formula::exists("x", Formula::ObjAtom("B".into(), Term::var("x")));
        assert_eq!(vsem(&ctx, &f).unwrap(), Frequency::Nat(0));
    }

    #[test]
    fn sometime_sees_later_snapshot() {
        let m = model();
        let seq = PopulationSequence::new(vec![
            Snapshot::new(0),
            Snapshot::new(1),
            Snapshot::new(2).with_objects("X", ["v"]),
        ])
        .unwrap();
        let w = World::new(&m, &seq);
        let ctx = EvalContext::first(&w, FrequencyDomain::Bool);
        let f = Formula::sometime(Formula::ObjAtom("X".into(), c("v")));
        assert_eq!(vsem(&ctx, &f).unwrap(), Frequency::Bool(true));
        let f = Formula::always(Formula::ObjAtom("X".into(), c("v")));
        assert_eq!(vsem(&ctx, &f).unwrap(), Frequency::Bool(false));
    }

    #[test]
    fn next_at_horizon_is_zero_and_traced() {
        let m = model();
        let seq = PopulationSequence::new(vec![Snapshot::new(0), Snapshot::new(4)]).unwrap();
        let w = World::new(&m, &seq);
        let ctx = EvalContext::new(&w, FrequencyDomain::Nat, 4).unwrap();
        let (v, hits) = vsem_traced(&ctx, &Formula::next(Formula::Lit(Literal::One))).unwrap();
        assert_eq!(v, Frequency::Nat(0));
        assert_eq!(hits, BTreeSet::from([4]));
        let ctx = EvalContext::new(&w, FrequencyDomain::Nat, 0).unwrap();
        assert_eq!(vsem(&ctx, &Formula::next(Formula::Lit(Literal::One))).unwrap(), Frequency::Nat(1));
    }

    #[test]
    fn precedes_follows_abbreviation() {
        // x at 0 and y at 1: premise fires at 0; x gone at 1 and y absent at 0 → holds.
        let m = model();
        let seq = PopulationSequence::new(vec![
            Snapshot::new(0).with_objects("X", ["x"]),
            Snapshot::new(1).with_objects("X", ["y"]),
        ])
        .unwrap();
        let w = World::new(&m, &seq);
        let ctx = EvalContext::first(&w, FrequencyDomain::Bool);
        let x = Formula::ObjAtom("X".into(), c("x"));
        let y = Formula::ObjAtom("X".into(), c("y"));
        assert_eq!(vsem(&ctx, &Formula::precedes(x.clone(), y.clone())).unwrap(), Frequency::Bool(true));
        // reversed: y never holds then x next; premise never fires → vacuous truth
        assert_eq!(vsem(&ctx, &Formula::precedes(y, x)).unwrap(), Frequency::Bool(true));
        // x persisting into the next step violates ○¬x
        let persist = PopulationSequence::new(vec![
            Snapshot::new(0).with_objects("X", ["x"]),
            Snapshot::new(1).with_objects("X", ["x", "y"]),
        ])
        .unwrap();
        let w = World::new(&m, &persist);
        let ctx = EvalContext::first(&w, FrequencyDomain::Bool);
        let x = Formula::ObjAtom("X".into(), c("x"));
        let y = Formula::ObjAtom("X".into(), c("y"));
        assert_eq!(vsem(&ctx, &Formula::precedes(x, y)).unwrap(), Frequency::Bool(false));
    }

    #[test]
    fn unbound_variable() {
        let m = model();
        let seq = PopulationSequence::single(Snapshot::new(0));
        let w = World::new(&m, &seq);
        let ctx = EvalContext::first(&w, FrequencyDomain::Nat);
        let err = vsem(&ctx, &Formula::ObjAtom("A".into(), Term::var("x"))).unwrap_err();
        assert_eq!(err, EvalError::UnboundVariable("x".into()));
    }

    #[test]
    fn literal_domain_is_checked() {
        let m = model();
        let seq = PopulationSequence::single(Snapshot::new(0));
        let w = World::new(&m, &seq);
        let ctx = EvalContext::first(&w, FrequencyDomain::Nat);
        let f = Formula::Lit(Literal::Value(Frequency::Int(3)));
        assert!(matches!(vsem(&ctx, &f), Err(EvalError::Freq(FreqError::DomainMismatch { .. }))));
    }

    #[test]
    fn nat_negation_clamps() {
        let m = model();
        let seq = PopulationSequence::single(Snapshot::new(0));
        let w = World::new(&m, &seq);
        let ctx = EvalContext::first(&w, FrequencyDomain::Nat);
        let f = Formula::negate(Formula::Lit(Literal::Value(Frequency::Nat(3))));
        assert_eq!(vsem(&ctx, &f).unwrap(), Frequency::Nat(0));
    }

    #[test]
    fn tuple_guard_matches_full_enumeration() {
        // ∃a.∃b. (t = ⟨a,b⟩ ∧ A(a)) in Nat with and without pruning agree.
        let m = model();
        let seq = PopulationSequence::single(join_snapshot());
        let w = World::new(&m, &seq);
        let body = Formula::exists(
            "a",
            Formula::exists(
                "b",
                Formula::and(
                    Formula::Eq(Term::var("t"), Term::Tuple(vec![Term::var("a"), Term::var("b")])),
                    Formula::ObjAtom("A".into(), Term::var("a")),
                ),
            ),
        );
        let spec = UniverseSpec { arities: [2].into(), depth: 1, ..Default::default() };
        for t in [InstanceValue::tuple_of(&["1", "A"]), InstanceValue::tuple_of(&["A", "1"]), InstanceValue::atom("1")] {
            let pruned = vsem(
                &EvalContext::first(&w, FrequencyDomain::Nat).with_binding("t", t.clone()).with_universe(spec.clone()),
                &body,
            )
            .unwrap();
            let dist = FrequencyDomain::Dist(crate::freq::BaseKind::Nat);
            let full = vsem(&EvalContext::first(&w, dist).with_binding("t", t).with_universe(spec.clone()), &body).unwrap();
            assert_eq!(pruned.is_truthy(), full.is_truthy());
        }
    }

    #[test]
    fn free_variables() {
        let f = Formula::exists("x", Formula::RoleAtom("p".into(), Term::var("x"), Term::var("y")));
        assert_eq!(f.free_vars(), BTreeSet::from(["y".to_string()]));
    }
}
