#![allow(dead_code)]

use orc_core::freq::FreqOp;
use orc_core::logic::{Formula, Literal, Term};
use orc_core::path::{HeadOp, PathExpr};
use orc_core::population::FactInstance;
use orc_core::rule::RuleExpr;
use orc_core::{InstanceValue, Model, ModelBuilder, PopulationSequence, Snapshot};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub mod oracles;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// A fact whose value is the tuple of its bindings in role order.
pub fn fact(bindings: &[(&str, InstanceValue)]) -> FactInstance {
    FactInstance::new(
        InstanceValue::tuple(bindings.iter().map(|(_, v)| v.clone())),
        bindings.iter().map(|(r, v)| (r.to_string(), v.clone())),
    )
}

/// F(p:A, q:B) and G(r:B, s:L) with the populations behind the composed
/// path tables.
pub fn join_model() -> Model {
    ModelBuilder::new()
        .entity("A")
        .entity("B")
        .entity("L")
        .fact("F", &[("p", "A"), ("q", "B")])
        .fact("G", &[("r", "B"), ("s", "L")])
        .object_name("A", "Person")
        .object_name("B", "Department")
        .object_name("L", "Location")
        .object_name("F", "Department coworkership")
        .role_name("p", "is a coworker in")
        .reverse_role_name("p", "has coworker")
        .role_name("q", "is employer in")
        .reverse_role_name("q", "has employer")
        .pair_name("p", "q", "working for")
        .build()
        .unwrap()
}

pub fn join_snapshot() -> Snapshot {
    let mut s = Snapshot::new(0)
        .with_objects("A", ["1", "2", "3"])
        .with_objects("B", ["A", "B", "C"])
        .with_objects("L", ["l", "k"]);
    for (a, b) in [("1", "A"), ("2", "B"), ("3", "A"), ("1", "C")] {
        s = s.with_fact("F", fact(&[("p", a.into()), ("q", b.into())]));
    }
    for (b, l) in [("A", "l"), ("C", "l"), ("C", "k"), ("B", "k")] {
        s = s.with_fact("G", fact(&[("r", b.into()), ("s", l.into())]));
    }
    s
}

pub fn join_population() -> PopulationSequence {
    PopulationSequence::single(join_snapshot())
}

/// F(p:A, q:B) objectified as the player of r in G(r:F, s:C).
pub fn constraints_model() -> Model {
    ModelBuilder::new()
        .entity("A")
        .entity("B")
        .entity("C")
        .fact("F", &[("p", "A"), ("q", "B")])
        .fact("G", &[("r", "F"), ("s", "C")])
        .build()
        .unwrap()
}

/// A random model with its type ids, role ids and instance labels.
pub struct RandomWorld {
    pub model: Model,
    pub seq: PopulationSequence,
    pub object_types: Vec<String>,
    pub roles: Vec<String>,
    pub labels: Vec<String>,
}

pub struct WorldShape {
    pub max_instances: usize,
    pub max_facts: usize,
    pub max_snapshots: usize,
}

/// Object types A, B, C (S ⊏ A) and up to four fact types of arity 1 or 2.
pub fn random_world(rng: &mut ChaCha8Rng, shape: &WorldShape) -> RandomWorld {
    let object_types: Vec<String> = ["A", "B", "C", "S"].iter().map(|s| s.to_string()).collect();
    let fact_count = rng.gen_range(1..=4);
    let mut builder = ModelBuilder::new().entity("A").entity("B").entity("C").entity("S").subtype("S", "A");
    let mut facts: Vec<(String, Vec<(String, String)>)> = Vec::new();
    let mut roles = Vec::new();
    for f in 0..fact_count {
        let arity = rng.gen_range(1..=2);
        let rs: Vec<(String, String)> = (0..arity)
            .map(|i| {
                let role = format!("r{f}{i}");
                roles.push(role.clone());
                (role, object_types.choose(rng).unwrap().clone())
            })
            .collect();
        let spec: Vec<(&str, &str)> = rs.iter().map(|(r, p)| (r.as_str(), p.as_str())).collect();
        builder = builder.fact(&format!("F{f}"), &spec);
        facts.push((format!("F{f}"), rs));
    }
    let model = builder.build().unwrap();

    let labels: Vec<String> = (0..shape.max_instances).map(|i| format!("i{i}")).collect();
    let snapshots = rng.gen_range(1..=shape.max_snapshots);
    let mut seq = Vec::new();
    for t in 0..snapshots {
        let mut snap = Snapshot::new(t as i64 * 2);
        let n = rng.gen_range(shape.max_instances / 2..=shape.max_instances);
        for label in labels.choose_multiple(rng, n) {
            let ty = object_types.choose(rng).unwrap();
            snap = snap.with_objects(ty, [label.as_str()]);
        }
        let mut used = std::collections::BTreeSet::new();
        for _ in 0..rng.gen_range(1..=shape.max_facts.max(1)) {
            let (fid, rs) = facts.choose(rng).unwrap();
            let bindings: Vec<(&str, InstanceValue)> = rs
                .iter()
                .map(|(r, player)| {
                    let pool: Vec<InstanceValue> = model.pop(&snap, player).unwrap().into_iter().collect();
                    let v = pool
                        .choose(rng)
                        .cloned()
                        .unwrap_or_else(|| InstanceValue::atom(labels.choose(rng).unwrap().clone()));
                    (r.as_str(), v)
                })
                .collect();
            let f = fact(&bindings);
            if used.insert((fid.clone(), f.value.clone())) {
                snap = snap.with_fact(fid, f);
            }
        }
        seq.push(snap);
    }
    RandomWorld {
        model,
        seq: PopulationSequence::new(seq).unwrap(),
        object_types,
        roles,
        labels,
    }
}

pub struct PathShape {
    pub depth: usize,
    pub confluence: bool,
    pub temporal: bool,
    pub vars: Vec<String>,
}

pub fn random_path(rng: &mut ChaCha8Rng, w: &RandomWorld, shape: &PathShape) -> PathExpr {
    let mut confluence_left = shape.confluence;
    gen(rng, w, shape, shape.depth, &mut confluence_left)
}

fn leaf(rng: &mut ChaCha8Rng, w: &RandomWorld, shape: &PathShape) -> PathExpr {
    match rng.gen_range(0..10) {
        0..=2 => PathExpr::obj(w.object_types.choose(rng).unwrap()),
        3..=6 => PathExpr::role(w.roles.choose(rng).unwrap()),
        7 => PathExpr::constant(w.labels.choose(rng).unwrap()),
        8 if !shape.vars.is_empty() => PathExpr::var(shape.vars.choose(rng).unwrap()),
        _ => [PathExpr::One, PathExpr::Zero, PathExpr::Full].choose(rng).unwrap().clone(),
    }
}

fn gen(rng: &mut ChaCha8Rng, w: &RandomWorld, shape: &PathShape, depth: usize, conf: &mut bool) -> PathExpr {
    if depth <= 1 || rng.gen_bool(0.25) {
        return leaf(rng, w, shape);
    }
    let d = depth - 1;
    let ops = [FreqOp::Join, FreqOp::Meet, FreqOp::Add, FreqOp::Times, FreqOp::Minus];
    loop {
        match rng.gen_range(0..12) {
            0..=2 => return gen(rng, w, shape, d, conf).concat(gen(rng, w, shape, d, conf)),
            3 => return gen(rng, w, shape, d, conf).reverse(),
            4 => return gen(rng, w, shape, d, conf).head(),
            5 => return gen(rng, w, shape, d, conf).tail(),
            6 => {
                let op = *ops.choose(rng).unwrap();
                return PathExpr::binary(op, gen(rng, w, shape, d, conf), gen(rng, w, shape, d, conf));
            }
            7 => return gen(rng, w, shape, d, conf).negate(),
            8 => {
                let op = *HeadOp::ALL.choose(rng).unwrap();
                return PathExpr::head_conn(op, gen(rng, w, shape, d, conf), gen(rng, w, shape, d, conf));
            }
            9 if *conf => {
                *conf = false;
                let arity = rng.gen_range(1..=2);
                return PathExpr::Confluence((0..arity).map(|_| gen(rng, w, shape, d, conf)).collect());
            }
            10 if shape.temporal => {
                let p = gen(rng, w, shape, d, conf);
                return if rng.gen_bool(0.5) { p.always() } else { p.sometime() };
            }
            11 if shape.temporal => {
                return PathExpr::precedes(gen(rng, w, shape, d, conf), gen(rng, w, shape, d, conf));
            }
            _ => continue,
        }
    }
}

/// A closed formula over `w`: atoms use bound variables or instance labels.
pub fn random_formula(rng: &mut ChaCha8Rng, w: &RandomWorld, depth: usize, temporal: bool) -> Formula {
    formula(rng, w, depth, temporal, &mut Vec::new())
}

fn term(rng: &mut ChaCha8Rng, w: &RandomWorld, scope: &[String]) -> Term {
    if !scope.is_empty() && rng.gen_bool(0.7) {
        Term::Var(scope.choose(rng).unwrap().clone())
    } else {
        Term::Const(InstanceValue::atom(w.labels.choose(rng).unwrap().clone()))
    }
}

fn formula(rng: &mut ChaCha8Rng, w: &RandomWorld, depth: usize, temporal: bool, scope: &mut Vec<String>) -> Formula {
    if depth <= 1 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..6) {
            0 | 1 => Formula::ObjAtom(w.object_types.choose(rng).unwrap().clone(), term(rng, w, scope)),
            2 | 3 => Formula::RoleAtom(w.roles.choose(rng).unwrap().clone(), term(rng, w, scope), term(rng, w, scope)),
            4 => Formula::Eq(term(rng, w, scope), term(rng, w, scope)),
            _ => Formula::Lit([Literal::One, Literal::Zero].choose(rng).unwrap().clone()),
        };
    }
    let d = depth - 1;
    loop {
        match rng.gen_range(0..10) {
            0 | 1 => {
                let op = *[FreqOp::Join, FreqOp::Meet, FreqOp::Add, FreqOp::Times, FreqOp::Minus].choose(rng).unwrap();
                let a = formula(rng, w, d, temporal, scope);
                return Formula::binary(op, a, formula(rng, w, d, temporal, scope));
            }
            2 => return Formula::negate(formula(rng, w, d, temporal, scope)),
            3 | 4 => {
                let v = format!("v{}", scope.len());
                scope.push(v.clone());
                let body = formula(rng, w, d, temporal, scope);
                scope.pop();
                return if rng.gen_bool(0.5) { Formula::exists(&v, body) } else { Formula::forall(&v, body) };
            }
            5 if temporal => return Formula::always(formula(rng, w, d, temporal, scope)),
            6 if temporal => return Formula::next(formula(rng, w, d, temporal, scope)),
            7 if temporal => return Formula::sometime(formula(rng, w, d, temporal, scope)),
            8 if temporal => {
                let a = formula(rng, w, d, temporal, scope);
                return Formula::precedes(a, formula(rng, w, d, temporal, scope));
            }
            _ => continue,
        }
    }
}

/// A rule over random paths; `vars` may occur free and get closed at the root.
pub fn random_rule(rng: &mut ChaCha8Rng, w: &RandomWorld, depth: usize, shape: &PathShape) -> RuleExpr {
    if depth <= 1 || rng.gen_bool(0.3) {
        let p = random_path(rng, w, shape);
        return if rng.gen_bool(0.5) { RuleExpr::Any(p) } else { RuleExpr::All(p) };
    }
    let d = depth - 1;
    let sub = |rng: &mut ChaCha8Rng| random_rule(rng, w, d, shape);
    match rng.gen_range(0..9) {
        0 => RuleExpr::and(sub(rng), sub(rng)),
        1 => RuleExpr::or(sub(rng), sub(rng)),
        2 => RuleExpr::implies(sub(rng), sub(rng)),
        3 => RuleExpr::iff(sub(rng), sub(rng)),
        4 => RuleExpr::negate(sub(rng)),
        5 => RuleExpr::always(sub(rng)),
        6 => RuleExpr::sometime(sub(rng)),
        7 => RuleExpr::precedes(sub(rng), sub(rng)),
        _ => RuleExpr::negate(RuleExpr::Any(random_path(rng, w, shape))),
    }
}
