//! Table-based evaluation of path expressions.
//!
//! Values are interned to dense ids and each intermediate relation is a
//! table of explicit rows over a default value. In Bool, Nat and Int zero
//! annihilates ⊗ and is neutral for ⊕ and ∨, so composition only visits
//! stored rows. Distributions lack those laws; there every value is computed
//! in universe order exactly as the reference valuation would.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::freq::{count, meet_all, FreqOp, Frequency, FrequencyDomain};
use crate::logic::{precedes_over, sometime_over};
use crate::population::InstanceValue;
use crate::world::{UniverseSpec, World};

use super::{Bindings, PathError, PathExpr};

/// Rows `(head, tail) ↦ frequency`; absent rows are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqTable {
    domain: FrequencyDomain,
    rows: BTreeMap<(InstanceValue, InstanceValue), Frequency>,
}

impl FreqTable {
    pub fn from_rows(domain: FrequencyDomain, rows: BTreeMap<(InstanceValue, InstanceValue), Frequency>) -> Self {
        let rows = rows.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        FreqTable { domain, rows }
    }

    pub fn domain(&self) -> FrequencyDomain {
        self.domain
    }

    pub fn get(&self, head: &InstanceValue, tail: &InstanceValue) -> Frequency {
        self.rows.get(&(head.clone(), tail.clone())).cloned().unwrap_or_else(|| self.domain.zero())
    }

    pub fn rows(&self) -> &BTreeMap<(InstanceValue, InstanceValue), Frequency> {
        &self.rows
    }

    pub fn iter(&self) -> impl Iterator<Item = (&InstanceValue, &InstanceValue, &Frequency)> {
        self.rows.iter().map(|((h, t), v)| (h, t, v))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Equality with distribution probabilities compared up to `tol`.
    pub fn approx_eq(&self, other: &FreqTable, tol: f64) -> bool {
        self.rows.len() == other.rows.len()
            && self.rows.iter().all(|(k, v)| match (v, other.rows.get(k)) {
                (Frequency::Dist(a), Some(Frequency::Dist(b))) => a.approx_eq(b, tol),
                (a, Some(b)) => a == b,
                (_, None) => false,
            })
    }
}

type Key = (u32, u32);

#[derive(Debug, Clone)]
struct Table {
    default: Frequency,
    rows: HashMap<Key, Frequency>,
}

impl Table {
    fn constant(value: Frequency) -> Self {
        Table { default: value, rows: HashMap::new() }
    }

    fn get(&self, a: u32, b: u32) -> &Frequency {
        self.rows.get(&(a, b)).unwrap_or(&self.default)
    }

    fn insert(&mut self, key: Key, value: Frequency) {
        if value != self.default {
            self.rows.insert(key, value);
        }
    }
}

/// Evaluates path expressions at one time point of a world.
pub struct TableEvaluator<'w> {
    world: &'w World<'w>,
    domain: FrequencyDomain,
    time: usize,
    carrier: Vec<InstanceValue>,
    ids: HashMap<InstanceValue, u32>,
    /// Tuple values of the carrier, as component ids.
    components: Vec<Option<Vec<u32>>>,
    /// Per time: the universe as sorted ids, and membership by id.
    universe: Vec<Vec<u32>>,
    member: Vec<Vec<bool>>,
    env: Bindings,
    memo: HashMap<(usize, usize), Rc<Table>>,
    horizon_hit: bool,
}

impl<'w> TableEvaluator<'w> {
    /// `temporal` widens the carrier to the universes of every snapshot so
    /// that temporal operators can evaluate outer pairs at other times.
    pub fn new(
        world: &'w World<'w>,
        domain: FrequencyDomain,
        spec: &UniverseSpec,
        time: usize,
        temporal: bool,
    ) -> Result<Self, PathError> {
        let times: Vec<usize> = if temporal { (0..world.len()).collect() } else { vec![time] };
        let mut per_time = vec![None; world.len()];
        let mut all = std::collections::BTreeSet::new();
        for &s in &times {
            let u = spec.expand(world.active_domain(s))?;
            all.extend(u.iter().cloned());
            per_time[s] = Some(u);
        }
        let carrier: Vec<InstanceValue> = all.into_iter().collect();
        let ids: HashMap<InstanceValue, u32> = carrier.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        let components = carrier
            .iter()
            .map(|v| v.components().and_then(|cs| cs.iter().map(|c| ids.get(c).copied()).collect::<Option<Vec<_>>>()))
            .collect();
        let mut universe = Vec::with_capacity(world.len());
        let mut member = Vec::with_capacity(world.len());
        for u in per_time {
            let list: Vec<u32> = u.iter().flatten().map(|v| ids[v]).collect();
            let mut m = vec![false; carrier.len()];
            for &i in &list {
                m[i as usize] = true;
            }
            universe.push(list);
            member.push(m);
        }
        Ok(TableEvaluator {
            world,
            domain,
            time,
            carrier,
            ids,
            components,
            universe,
            member,
            env: Bindings::new(),
            memo: HashMap::new(),
            horizon_hit: false,
        })
    }

    /// The universe at the evaluation time.
    pub fn universe_values(&self) -> Vec<InstanceValue> {
        self.universe[self.time].iter().map(|&i| self.carrier[i as usize].clone()).collect()
    }

    /// Whether a `precedes` ran past the last snapshot in the latest evaluation.
    pub fn horizon_hit(&self) -> bool {
        self.horizon_hit
    }

    pub fn table(&mut self, p: &PathExpr, env: &Bindings) -> Result<FreqTable, PathError> {
        let t = self.root(p, env)?;
        let u = &self.universe[self.time];
        let mut rows = BTreeMap::new();
        let mut put = |a: u32, b: u32, v: &Frequency| {
            if !v.is_zero() {
                rows.insert((self.carrier[a as usize].clone(), self.carrier[b as usize].clone()), v.clone());
            }
        };
        if t.default.is_zero() {
            for (&(a, b), v) in &t.rows {
                if self.member[self.time][a as usize] && self.member[self.time][b as usize] {
                    put(a, b, v);
                }
            }
        } else {
            for &a in u {
                for &b in u {
                    put(a, b, t.get(a, b));
                }
            }
        }
        Ok(FreqTable { domain: self.domain, rows })
    }

    /// `∃x,y` folded in universe order.
    pub fn any(&mut self, p: &PathExpr, env: &Bindings) -> Result<Frequency, PathError> {
        self.quantify(p, env, FreqOp::Join)
    }

    /// `∀x,y` folded in universe order.
    pub fn all(&mut self, p: &PathExpr, env: &Bindings) -> Result<Frequency, PathError> {
        self.quantify(p, env, FreqOp::Meet)
    }

    /// Pairs of the evaluation-time universe whose value is zero, in value
    /// order, at most `limit` of them; the flag reports truncation.
    pub fn falsifying_pairs(
        &mut self,
        p: &PathExpr,
        env: &Bindings,
        limit: usize,
    ) -> Result<(Vec<(InstanceValue, InstanceValue)>, bool), PathError> {
        let t = self.root(p, env)?;
        let u = &self.universe[self.time];
        let mut out = Vec::new();
        if t.default.is_truthy() {
            let mut keys: Vec<Key> = t
                .rows
                .iter()
                .filter(|(&(a, b), v)| {
                    !v.is_truthy() && self.member[self.time][a as usize] && self.member[self.time][b as usize]
                })
                .map(|(k, _)| *k)
                .collect();
            keys.sort_unstable();
            let truncated = keys.len() > limit;
            for (a, b) in keys.into_iter().take(limit) {
                out.push((self.carrier[a as usize].clone(), self.carrier[b as usize].clone()));
            }
            return Ok((out, truncated));
        }
        for &a in u {
            for &b in u {
                if !t.get(a, b).is_truthy() {
                    if out.len() == limit {
                        return Ok((out, true));
                    }
                    out.push((self.carrier[a as usize].clone(), self.carrier[b as usize].clone()));
                }
            }
        }
        Ok((out, false))
    }

    fn quantify(&mut self, p: &PathExpr, env: &Bindings, op: FreqOp) -> Result<Frequency, PathError> {
        let t = self.root(p, env)?;
        let d = self.domain;
        let start = if op == FreqOp::Join { d.zero() } else { d.one() };
        let mut acc = start.clone();
        for &a in &self.universe[self.time] {
            let mut inner = start.clone();
            for &b in &self.universe[self.time] {
                inner = inner.apply(op, t.get(a, b))?;
            }
            acc = acc.apply(op, &inner)?;
        }
        Ok(acc)
    }

    fn root(&mut self, p: &PathExpr, env: &Bindings) -> Result<Rc<Table>, PathError> {
        p.check()?;
        self.env = env.clone();
        self.memo.clear();
        self.horizon_hit = false;
        let desugared = desugar(p);
        let out = self.eval(&desugared, self.time);
        self.memo.clear();
        out
    }

    fn diagonal(&self, ids: impl IntoIterator<Item = u32>, value: Frequency) -> Table {
        let mut t = Table::constant(self.domain.zero());
        for i in ids {
            t.insert((i, i), value.clone());
        }
        t
    }

    fn eval(&mut self, p: &PathExpr, s: usize) -> Result<Rc<Table>, PathError> {
        let key = (p as *const PathExpr as usize, s);
        if let Some(t) = self.memo.get(&key) {
            return Ok(t.clone());
        }
        let t = Rc::new(self.compute(p, s)?);
        self.memo.insert(key, t.clone());
        Ok(t)
    }

    fn compute(&mut self, p: &PathExpr, s: usize) -> Result<Table, PathError> {
        let d = self.domain;
        let one = d.one();
        let zero = d.zero();
        Ok(match p {
            PathExpr::ObjType(o) => {
                let pop = self.world.model().pop(self.world.snapshot(s), o)?;
                let member = count(std::iter::once(()), d).meet(&one)?;
                self.diagonal(pop.iter().filter_map(|v| self.ids.get(v).copied()), member)
            }
            PathExpr::Role(r) => {
                let ext = self.world.model().role_extension(self.world.snapshot(s), r)?;
                let value = count(std::iter::once(()), d);
                let mut t = Table::constant(zero);
                for (player, fact) in &ext {
                    if let (Some(&a), Some(&b)) = (self.ids.get(player), self.ids.get(fact)) {
                        t.insert((a, b), value.clone());
                    }
                }
                t
            }
            PathExpr::Const(c) => {
                let id = self.ids.get(c).copied();
                self.diagonal(id, one.meet(&one)?)
            }
            PathExpr::Var(v) => {
                let value = self
                    .env
                    .get(v)
                    .ok_or_else(|| crate::logic::EvalError::UnboundVariable(v.clone()))?;
                let id = self.ids.get(value).copied();
                self.diagonal(id, one.meet(&one)?)
            }
            PathExpr::One => self.diagonal(0..self.carrier.len() as u32, one),
            PathExpr::Zero => Table::constant(zero),
            PathExpr::Full => Table::constant(one),
            PathExpr::Concat(a, b) => {
                let (ta, tb) = (self.eval(a, s)?, self.eval(b, s)?);
                self.concat(&ta, &tb, s)?
            }
            PathExpr::Reverse(a) => {
                let ta = self.eval(a, s)?;
                Table {
                    default: ta.default.clone(),
                    rows: ta.rows.iter().map(|(&(x, y), v)| ((y, x), v.clone())).collect(),
                }
            }
            PathExpr::Head(a) => {
                let ta = self.eval(a, s)?;
                self.projection(&ta, s, false)?
            }
            PathExpr::Tail(a) => {
                let ta = self.eval(a, s)?;
                self.projection(&ta, s, true)?
            }
            PathExpr::Confluence(parts) => {
                let tables = parts.iter().map(|q| self.eval(q, s)).collect::<Result<Vec<_>, _>>()?;
                self.confluence(&tables, s)?
            }
            PathExpr::Binary(op, a, b) => {
                let (ta, tb) = (self.eval(a, s)?, self.eval(b, s)?);
                pointwise(&[&ta, &tb], |v| Ok(v[0].apply(*op, v[1])?))?
            }
            PathExpr::Not(a) => {
                let ta = self.eval(a, s)?;
                pointwise(&[&ta], |v| Ok(one.minus(v[0])?))?
            }
            PathExpr::HeadConn(..) => unreachable!("head connectives are desugared before evaluation"),
            PathExpr::Always(a) => {
                let ts = self.at_all_times(a)?;
                let refs: Vec<&Table> = ts.iter().map(Rc::as_ref).collect();
                pointwise(&refs, |v| Ok(meet_all(v.iter().map(|&x| x.clone()), d)?))?
            }
            PathExpr::Sometime(a) => {
                let ts = self.at_all_times(a)?;
                let refs: Vec<&Table> = ts.iter().map(Rc::as_ref).collect();
                pointwise(&refs, |v| Ok(sometime_over(&v.iter().map(|&x| x.clone()).collect::<Vec<_>>(), d)?))?
            }
            PathExpr::Precedes(a, b) => {
                self.horizon_hit = true;
                let xs = self.at_all_times(a)?;
                let ys = self.at_all_times(b)?;
                let n = xs.len();
                let refs: Vec<&Table> = xs.iter().chain(ys.iter()).map(Rc::as_ref).collect();
                pointwise(&refs, |v| {
                    let v: Vec<Frequency> = v.iter().map(|&x| x.clone()).collect();
                    Ok(precedes_over(&v[..n], &v[n..], d)?)
                })?
            }
        })
    }

    fn at_all_times(&mut self, p: &PathExpr) -> Result<Vec<Rc<Table>>, PathError> {
        (0..self.world.len()).map(|r| self.eval(p, r)).collect()
    }

    fn n(&self) -> u32 {
        self.carrier.len() as u32
    }

    /// `Σ_z a(x,z) ⊗ b(z,y)` over the universe at `s`.
    fn concat(&self, ta: &Table, tb: &Table, s: usize) -> Result<Table, PathError> {
        let d = self.domain;
        let zero = d.zero();
        let member = &self.member[s];
        let mut out = Table::constant(zero.clone());
        if d.zero_is_sparse() && (ta.default.is_zero() || tb.default.is_zero()) {
            let mut acc: HashMap<Key, Frequency> = HashMap::new();
            let mut add = |key: Key, term: Frequency| -> Result<(), PathError> {
                if term.is_zero() {
                    return Ok(());
                }
                let slot = acc.entry(key).or_insert_with(|| zero.clone());
                *slot = slot.add(&term)?;
                Ok(())
            };
            if ta.default.is_zero() {
                let by_head = tb.default.is_zero().then(|| index_by_head(tb));
                for (&(x, z), va) in &ta.rows {
                    if !member[z as usize] || va.is_zero() {
                        continue;
                    }
                    match &by_head {
                        Some(index) => {
                            for &(y, vb) in index.get(&z).into_iter().flatten() {
                                add((x, y), va.times(vb)?)?;
                            }
                        }
                        None => {
                            for y in 0..self.n() {
                                add((x, y), va.times(tb.get(z, y))?)?;
                            }
                        }
                    }
                }
            } else {
                for (&(z, y), vb) in &tb.rows {
                    if !member[z as usize] || vb.is_zero() {
                        continue;
                    }
                    for x in 0..self.n() {
                        add((x, y), ta.get(x, z).times(vb)?)?;
                    }
                }
            }
            for (k, v) in acc {
                out.insert(k, v);
            }
            return Ok(out);
        }
        let u = &self.universe[s];
        for x in 0..self.n() {
            for y in 0..self.n() {
                let mut acc = zero.clone();
                for &z in u {
                    let va = ta.get(x, z);
                    let term = if d.zero_is_sparse() && va.is_zero() { va.clone() } else { va.times(tb.get(z, y))? };
                    acc = acc.add(&term)?;
                }
                out.insert((x, y), acc);
            }
        }
        Ok(out)
    }

    /// `x = y ∧ ∃z. x P z` (or `∃z. z P y` for the tail).
    fn projection(&self, ta: &Table, s: usize, tail: bool) -> Result<Table, PathError> {
        let d = self.domain;
        let (zero, one) = (d.zero(), d.one());
        let member = &self.member[s];
        let u = &self.universe[s];
        let at = |end: u32, z: u32| if tail { ta.get(z, end) } else { ta.get(end, z) };
        let mut out = Table::constant(zero.clone());
        if d.zero_is_sparse() {
            let mut witness: HashMap<u32, Frequency> = HashMap::new();
            if ta.default.is_zero() {
                for (&(x, y), v) in &ta.rows {
                    let (end, z) = if tail { (y, x) } else { (x, y) };
                    if member[z as usize] {
                        let slot = witness.entry(end).or_insert_with(|| zero.clone());
                        *slot = slot.join(v)?;
                    }
                }
            } else {
                for end in 0..self.n() {
                    let mut acc = zero.clone();
                    for &z in u {
                        acc = acc.join(at(end, z))?;
                    }
                    witness.insert(end, acc);
                }
            }
            for (end, ex) in witness {
                out.insert((end, end), one.meet(&ex)?);
            }
            return Ok(out);
        }
        for end in 0..self.n() {
            let mut ex = zero.clone();
            for &z in u {
                ex = ex.join(at(end, z))?;
            }
            for other in 0..self.n() {
                let eq = if other == end { &one } else { &zero };
                let key = if tail { (other, end) } else { (end, other) };
                out.insert(key, eq.meet(&ex)?);
            }
        }
        Ok(out)
    }

    /// `∃x1..xn. x = ⟨x1..xn⟩ ∧ x1 P1 y ∧ … ∧ xn Pn y`
    fn confluence(&self, tables: &[Rc<Table>], s: usize) -> Result<Table, PathError> {
        let d = self.domain;
        let (zero, one) = (d.zero(), d.one());
        let n = tables.len();
        let member = &self.member[s];
        let u = &self.universe[s];
        let chain = |xs: &[u32], y: u32| -> Result<Frequency, PathError> {
            let mut acc = tables[n - 1].get(xs[n - 1], y).clone();
            for i in (0..n - 1).rev() {
                let v = tables[i].get(xs[i], y);
                acc = if d.meet_zero_absorbs() && v.is_zero() { v.clone() } else { v.meet(&acc)? };
            }
            Ok(acc)
        };
        let mut out = Table::constant(zero.clone());
        if d.zero_is_sparse() {
            let indexes: Vec<Option<HashMap<u32, Vec<u32>>>> = tables
                .iter()
                .map(|t| {
                    t.default.is_zero().then(|| {
                        let mut by_tail: HashMap<u32, Vec<u32>> = HashMap::new();
                        for (&(x, y), v) in &t.rows {
                            if member[x as usize] && !v.is_zero() {
                                by_tail.entry(y).or_default().push(x);
                            }
                        }
                        by_tail
                    })
                })
                .collect();
            let tails: Vec<u32> = match indexes.iter().flatten().next() {
                Some(first) => {
                    let mut ys: Vec<u32> = first
                        .keys()
                        .copied()
                        .filter(|y| indexes.iter().flatten().all(|ix| ix.contains_key(y)))
                        .collect();
                    ys.sort_unstable();
                    ys
                }
                None => (0..self.n()).collect(),
            };
            for y in tails {
                let candidates: Vec<&[u32]> = indexes
                    .iter()
                    .map(|ix| match ix {
                        Some(ix) => ix[&y].as_slice(),
                        None => u.as_slice(),
                    })
                    .collect();
                for_each_combination(&candidates, |xs| {
                    let tuple = InstanceValue::Tuple(xs.iter().map(|&x| self.carrier[x as usize].clone()).collect());
                    let Some(&head) = self.ids.get(&tuple) else { return Ok(()) };
                    let mut v = one.meet(&chain(xs, y)?)?;
                    for _ in 0..n {
                        v = zero.join(&v)?;
                    }
                    out.insert((head, y), v);
                    Ok(())
                })?;
            }
            return Ok(out);
        }
        for head in 0..self.n() {
            let parts = self.components[head as usize].as_deref();
            for y in 0..self.n() {
                let mut xs = Vec::with_capacity(n);
                let v = self.nested_exists(&mut xs, n, u, &|xs: &[u32]| {
                    let eq = if parts == Some(xs) { &one } else { &zero };
                    Ok(eq.meet(&chain(xs, y)?)?)
                })?;
                out.insert((head, y), v);
            }
        }
        Ok(out)
    }

    fn nested_exists(
        &self,
        xs: &mut Vec<u32>,
        n: usize,
        u: &[u32],
        body: &dyn Fn(&[u32]) -> Result<Frequency, PathError>,
    ) -> Result<Frequency, PathError> {
        if xs.len() == n {
            return body(xs);
        }
        let mut acc = self.domain.zero();
        for &x in u {
            xs.push(x);
            let v = self.nested_exists(xs, n, u, body)?;
            xs.pop();
            acc = acc.join(&v)?;
        }
        Ok(acc)
    }
}

fn index_by_head(t: &Table) -> HashMap<u32, Vec<(u32, &Frequency)>> {
    let mut index: HashMap<u32, Vec<(u32, &Frequency)>> = HashMap::new();
    for (&(z, y), v) in &t.rows {
        if !v.is_zero() {
            index.entry(z).or_default().push((y, v));
        }
    }
    index
}

fn for_each_combination(
    lists: &[&[u32]],
    mut f: impl FnMut(&[u32]) -> Result<(), PathError>,
) -> Result<(), PathError> {
    if lists.iter().any(|l| l.is_empty()) {
        return Ok(());
    }
    let mut index = vec![0usize; lists.len()];
    let mut current: Vec<u32> = lists.iter().map(|l| l[0]).collect();
    loop {
        f(&current)?;
        let mut pos = lists.len();
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < lists[pos].len() {
                current[pos] = lists[pos][index[pos]];
                break;
            }
            index[pos] = 0;
            current[pos] = lists[pos][0];
        }
    }
}

/// Applies `f` to the values of every key stored in any table, and to the defaults.
fn pointwise(tables: &[&Table], f: impl Fn(&[&Frequency]) -> Result<Frequency, PathError>) -> Result<Table, PathError> {
    let defaults: Vec<&Frequency> = tables.iter().map(|t| &t.default).collect();
    let mut out = Table::constant(f(&defaults)?);
    let mut keys: Vec<Key> = tables.iter().flat_map(|t| t.rows.keys().copied()).collect();
    keys.sort_unstable();
    keys.dedup();
    for key in keys {
        let values: Vec<&Frequency> = tables.iter().map(|t| t.get(key.0, key.1)).collect();
        let v = f(&values)?;
        out.insert(key, v);
    }
    Ok(out)
}

/// Replaces head connectives by their expansion so every node evaluated has a
/// stable address for memoization.
fn desugar(p: &PathExpr) -> PathExpr {
    let b = |q: &PathExpr| Box::new(desugar(q));
    match p {
        PathExpr::HeadConn(op, a, c) => desugar(&PathExpr::expand_head_conn(*op, a, c)),
        PathExpr::Concat(a, c) => PathExpr::Concat(b(a), b(c)),
        PathExpr::Reverse(a) => PathExpr::Reverse(b(a)),
        PathExpr::Head(a) => PathExpr::Head(b(a)),
        PathExpr::Tail(a) => PathExpr::Tail(b(a)),
        PathExpr::Confluence(ps) => PathExpr::Confluence(ps.iter().map(desugar).collect()),
        PathExpr::Binary(op, a, c) => PathExpr::Binary(*op, b(a), b(c)),
        PathExpr::Not(a) => PathExpr::Not(b(a)),
        PathExpr::Always(a) => PathExpr::Always(b(a)),
        PathExpr::Sometime(a) => PathExpr::Sometime(b(a)),
        PathExpr::Precedes(a, c) => PathExpr::Precedes(b(a), b(c)),
        leaf => leaf.clone(),
    }
}
