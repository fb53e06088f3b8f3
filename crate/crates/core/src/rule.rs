//! Domain rules: closed combinations of `ANY`/`ALL` path verdicts under the
//! logical and temporal connectives.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::freq::{meet_all, Frequency, FrequencyDomain};
use crate::logic::{precedes_over, sometime_over, Formula};
use crate::path::{all_formula, any_formula, assignments, Bindings, Fresh, PathError, PathExpr, TableEvaluator};
use crate::population::InstanceValue;
use crate::world::{UniverseSpec, World};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleExpr {
    Any(PathExpr),
    All(PathExpr),
    And(Box<RuleExpr>, Box<RuleExpr>),
    Or(Box<RuleExpr>, Box<RuleExpr>),
    Implies(Box<RuleExpr>, Box<RuleExpr>),
    Iff(Box<RuleExpr>, Box<RuleExpr>),
    Not(Box<RuleExpr>),
    Always(Box<RuleExpr>),
    Sometime(Box<RuleExpr>),
    Precedes(Box<RuleExpr>, Box<RuleExpr>),
}

impl RuleExpr {
    pub fn and(a: RuleExpr, b: RuleExpr) -> Self {
        RuleExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: RuleExpr, b: RuleExpr) -> Self {
        RuleExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: RuleExpr, b: RuleExpr) -> Self {
        RuleExpr::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: RuleExpr, b: RuleExpr) -> Self {
        RuleExpr::Iff(Box::new(a), Box::new(b))
    }

    pub fn negate(a: RuleExpr) -> Self {
        RuleExpr::Not(Box::new(a))
    }

    pub fn always(a: RuleExpr) -> Self {
        RuleExpr::Always(Box::new(a))
    }

    pub fn sometime(a: RuleExpr) -> Self {
        RuleExpr::Sometime(Box::new(a))
    }

    pub fn precedes(a: RuleExpr, b: RuleExpr) -> Self {
        RuleExpr::Precedes(Box::new(a), Box::new(b))
    }

    /// Every path under a quantifier, left to right.
    pub fn paths(&self) -> Vec<&PathExpr> {
        fn walk<'a>(r: &'a RuleExpr, out: &mut Vec<&'a PathExpr>) {
            match r {
                RuleExpr::Any(p) | RuleExpr::All(p) => out.push(p),
                RuleExpr::Not(a) | RuleExpr::Always(a) | RuleExpr::Sometime(a) => walk(a, out),
                RuleExpr::And(a, b)
                | RuleExpr::Or(a, b)
                | RuleExpr::Implies(a, b)
                | RuleExpr::Iff(a, b)
                | RuleExpr::Precedes(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.paths().into_iter().flat_map(|p| p.free_vars()).collect()
    }

    fn formula(&self, fresh: &mut Fresh) -> Formula {
        let mut two = |a: &RuleExpr, b: &RuleExpr| (a.formula(fresh), b.formula(fresh));
        match self {
            RuleExpr::Any(p) => any_formula(p, fresh),
            RuleExpr::All(p) => all_formula(p, fresh),
            RuleExpr::And(a, b) => {
                let (a, b) = two(a, b);
                Formula::and(a, b)
            }
            RuleExpr::Or(a, b) => {
                let (a, b) = two(a, b);
                Formula::or(a, b)
            }
            RuleExpr::Implies(a, b) => {
                let (a, b) = two(a, b);
                Formula::implies(a, b)
            }
            RuleExpr::Iff(a, b) => {
                let (a, b) = two(a, b);
                Formula::iff(a, b)
            }
            RuleExpr::Precedes(a, b) => {
                let (a, b) = two(a, b);
                Formula::precedes(a, b)
            }
            RuleExpr::Not(a) => Formula::negate(a.formula(fresh)),
            RuleExpr::Always(a) => Formula::always(a.formula(fresh)),
            RuleExpr::Sometime(a) => Formula::sometime(a.formula(fresh)),
        }
    }
}

impl fmt::Display for RuleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleExpr::Any(p) => write!(f, "ANY {p}"),
            RuleExpr::All(p) => write!(f, "ALL {p}"),
            RuleExpr::And(a, b) => write!(f, "({a} AND {b})"),
            RuleExpr::Or(a, b) => write!(f, "({a} OR {b})"),
            RuleExpr::Implies(a, b) => write!(f, "({a} IMPLIES {b})"),
            RuleExpr::Iff(a, b) => write!(f, "({a} IFF {b})"),
            RuleExpr::Not(a) => write!(f, "NOT {a}"),
            RuleExpr::Always(a) => write!(f, "ALWAYS {a}"),
            RuleExpr::Sometime(a) => write!(f, "SOMETIME {a}"),
            RuleExpr::Precedes(a, b) => write!(f, "({a} PRECEDES {b})"),
        }
    }
}

/// A rule with its free ω-variables closed existentially at the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompiledRule {
    expr: RuleExpr,
    vars: Vec<String>,
}

impl CompiledRule {
    pub fn new(expr: RuleExpr) -> Self {
        let vars = expr.free_vars().into_iter().collect();
        CompiledRule { expr, vars }
    }

    pub fn expr(&self) -> &RuleExpr {
        &self.expr
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Constants and confluence arities of every path in the rule.
    pub fn universe_spec(&self) -> UniverseSpec {
        let mut spec = UniverseSpec::default();
        for p in self.expr.paths() {
            spec.merge(&p.universe_spec());
        }
        spec
    }

    /// The rule as one formula: `∃v…. body` with ANY/ALL rewritten.
    pub fn to_formula(&self) -> Formula {
        let body = self.expr.formula(&mut Fresh::new());
        self.vars.iter().rev().fold(body, |acc, v| Formula::exists(v, acc))
    }
}

/// Pairs falsifying an `ALL` reached through `□` and `AND`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub time: i64,
    pub pairs: Vec<(InstanceValue, InstanceValue)>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleOutcome {
    /// The rule's value at each evaluated time.
    pub values: Vec<(i64, Frequency)>,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
    /// Set when a `PRECEDES` read past the last snapshot.
    pub horizon: bool,
}

/// Witness pairs kept per failing `ALL` and time.
pub const WITNESS_LIMIT: usize = 20;

/// Evaluates compiled rules over one world.
pub struct RuleEngine<'w> {
    world: &'w World<'w>,
    domain: FrequencyDomain,
}

impl<'w> RuleEngine<'w> {
    pub fn new(world: &'w World<'w>, domain: FrequencyDomain) -> Self {
        RuleEngine { world, domain }
    }

    /// The rule's value at snapshot index `time`.
    pub fn value(&self, rule: &CompiledRule, time: usize) -> Result<Frequency, PathError> {
        Run::new(self, rule).root(time)
    }

    /// Values at `times` (snapshot indices; every snapshot when `None`). The
    /// rule passes when it is truthy at each of them.
    pub fn evaluate(&self, rule: &CompiledRule, times: Option<&[usize]>) -> Result<RuleOutcome, PathError> {
        let all: Vec<usize> = (0..self.world.len()).collect();
        let times = times.unwrap_or(&all);
        let mut run = Run::new(self, rule);
        let mut values = Vec::with_capacity(times.len());
        let mut failing = Vec::new();
        for &t in times {
            let v = run.root(t)?;
            if !v.is_truthy() {
                failing.push(t);
            }
            values.push((self.world.time(t), v));
        }
        let mut witnesses = Vec::new();
        if !failing.is_empty() && rule.vars.is_empty() {
            let mut seen = BTreeSet::new();
            run.witnesses(&rule.expr, &failing, &mut seen, &mut witnesses)?;
        }
        Ok(RuleOutcome {
            passed: failing.is_empty(),
            values,
            witnesses,
            horizon: run.horizon,
        })
    }
}

struct Run<'r, 'w> {
    engine: &'r RuleEngine<'w>,
    rule: &'r CompiledRule,
    spec: UniverseSpec,
    evaluators: HashMap<(*const PathExpr, usize), TableEvaluator<'w>>,
    horizon: bool,
}

impl<'r, 'w> Run<'r, 'w> {
    fn new(engine: &'r RuleEngine<'w>, rule: &'r CompiledRule) -> Self {
        Run {
            engine,
            rule,
            spec: rule.universe_spec(),
            evaluators: HashMap::new(),
            horizon: false,
        }
    }

    fn root(&mut self, time: usize) -> Result<Frequency, PathError> {
        let d = self.engine.domain;
        if self.rule.vars.is_empty() {
            return self.value(&self.rule.expr, time, &Bindings::new());
        }
        let universe: Vec<InstanceValue> =
            self.spec.expand(self.engine.world.active_domain(time))?.into_iter().collect();
        let mut acc = d.zero();
        for env in assignments(&self.rule.vars, &universe, &Bindings::new()) {
            acc = acc.join(&self.value(&self.rule.expr, time, &env)?)?;
        }
        Ok(acc)
    }

    fn evaluator(&mut self, p: &PathExpr, time: usize) -> Result<&mut TableEvaluator<'w>, PathError> {
        let key = (p as *const PathExpr, time);
        if !self.evaluators.contains_key(&key) {
            let ev = TableEvaluator::new(self.engine.world, self.engine.domain, &self.spec, time, p.has_temporal())?;
            self.evaluators.insert(key, ev);
        }
        Ok(self.evaluators.get_mut(&key).expect("inserted above"))
    }

    fn quantified(&mut self, p: &PathExpr, time: usize, env: &Bindings, all: bool) -> Result<Frequency, PathError> {
        let ev = self.evaluator(p, time)?;
        let v = if all { ev.all(p, env)? } else { ev.any(p, env)? };
        let hit = ev.horizon_hit();
        self.horizon |= hit;
        Ok(v)
    }

    fn at_all_times(&mut self, r: &RuleExpr, env: &Bindings) -> Result<Vec<Frequency>, PathError> {
        (0..self.engine.world.len()).map(|s| self.value(r, s, env)).collect()
    }

    fn value(&mut self, r: &RuleExpr, time: usize, env: &Bindings) -> Result<Frequency, PathError> {
        let d = self.engine.domain;
        let one = d.one();
        Ok(match r {
            RuleExpr::Any(p) => self.quantified(p, time, env, false)?,
            RuleExpr::All(p) => self.quantified(p, time, env, true)?,
            RuleExpr::And(a, b) => self.value(a, time, env)?.meet(&self.value(b, time, env)?)?,
            RuleExpr::Or(a, b) => self.value(a, time, env)?.join(&self.value(b, time, env)?)?,
            RuleExpr::Implies(a, b) => {
                let (va, vb) = (self.value(a, time, env)?, self.value(b, time, env)?);
                one.minus(&va)?.join(&vb)?
            }
            RuleExpr::Iff(a, b) => {
                let (va, vb) = (self.value(a, time, env)?, self.value(b, time, env)?);
                one.minus(&va)?.join(&vb)?.meet(&one.minus(&vb)?.join(&va)?)?
            }
            RuleExpr::Not(a) => one.minus(&self.value(a, time, env)?)?,
            RuleExpr::Always(a) => meet_all(self.at_all_times(a, env)?, d)?,
            RuleExpr::Sometime(a) => sometime_over(&self.at_all_times(a, env)?, d)?,
            RuleExpr::Precedes(a, b) => {
                self.horizon = true;
                let xs = self.at_all_times(a, env)?;
                precedes_over(&xs, &self.at_all_times(b, env)?, d)?
            }
        })
    }

    fn witnesses(
        &mut self,
        r: &RuleExpr,
        times: &[usize],
        seen: &mut BTreeSet<(*const PathExpr, usize)>,
        out: &mut Vec<Witness>,
    ) -> Result<(), PathError> {
        let env = Bindings::new();
        match r {
            RuleExpr::All(p) => {
                for &t in times {
                    if !seen.insert((p as *const PathExpr, t)) {
                        continue;
                    }
                    let ev = self.evaluator(p, t)?;
                    if ev.all(p, &env)?.is_truthy() {
                        continue;
                    }
                    let (pairs, truncated) = ev.falsifying_pairs(p, &env, WITNESS_LIMIT)?;
                    out.push(Witness {
                        time: self.engine.world.time(t),
                        pairs,
                        truncated,
                    });
                }
            }
            RuleExpr::Always(a) => {
                let all: Vec<usize> = (0..self.engine.world.len()).collect();
                self.witnesses(a, &all, seen, out)?;
            }
            RuleExpr::And(a, b) => {
                self.witnesses(a, times, seen, out)?;
                self.witnesses(b, times, seen, out)?;
            }
            _ => {}
        }
        out.sort_by_key(|w| w.time);
        Ok(())
    }
}
