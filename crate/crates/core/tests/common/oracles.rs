//! Brute-force set-semantics oracles for the constraint kinds.

use std::collections::{BTreeMap, BTreeSet};

use orc_core::constraint::Constraint;
use orc_core::population::FactInstance;
use orc_core::{InstanceValue, Model, ModelBuilder, PopulationSequence, Snapshot};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::fact;

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

// The schema: A with subtypes S and T, B and C,
// F(p:A, q:B) objectified as the player of r in G(r:F, s:C), and H(h1:A, h2:B).

pub fn oracle_model() -> Model {
    ModelBuilder::new()
        .entity("A")
        .entity("B")
        .entity("C")
        .entity("S")
        .entity("T")
        .subtype("S", "A")
        .subtype("T", "A")
        .fact("F", &[("p", "A"), ("q", "B")])
        .fact("G", &[("r", "F"), ("s", "C")])
        .fact("H", &[("h1", "A"), ("h2", "B")])
        .build()
        .unwrap()
}

pub fn stored(s: &Snapshot, ty: &str) -> BTreeSet<InstanceValue> {
    s.objects.get(ty).cloned().unwrap_or_default()
}

pub fn pop_a(s: &Snapshot) -> BTreeSet<InstanceValue> {
    ["A", "S", "T"].iter().flat_map(|t| stored(s, t)).collect()
}

pub fn facts<'s>(s: &'s Snapshot, f: &str) -> &'s [FactInstance] {
    s.facts.get(f).map(Vec::as_slice).unwrap_or(&[])
}

pub fn bound(f: &FactInstance, role: &str) -> InstanceValue {
    f.bindings[role].clone()
}

pub fn random_snapshot(rng: &mut ChaCha8Rng, t: i64) -> Snapshot {
    let labels: Vec<String> = (0..10).map(|i| format!("i{i}")).collect();
    let n = rng.gen_range(3..=10);
    let mut s = Snapshot::new(t);
    for label in labels.choose_multiple(rng, n) {
        let ty = *["A", "S", "T", "B", "C"].choose(rng).unwrap();
        s = s.with_objects(ty, [label.as_str()]);
        if ty == "S" && rng.gen_bool(0.2) {
            s = s.with_objects("T", [label.as_str()]);
        }
    }
    let a: Vec<InstanceValue> = pop_a(&s).into_iter().collect();
    let b: Vec<InstanceValue> = stored(&s, "B").into_iter().collect();
    let c: Vec<InstanceValue> = stored(&s, "C").into_iter().collect();
    let add_fact = |s: Snapshot, ft: &str, binds: &[(&str, InstanceValue)]| {
        let f = fact(binds);
        if facts(&s, ft).iter().any(|g| g.value == f.value) {
            s
        } else {
            s.with_fact(ft, f)
        }
    };
    if !a.is_empty() && !b.is_empty() {
        for _ in 0..rng.gen_range(0..=5) {
            let (x, y) = (a.choose(rng).unwrap().clone(), b.choose(rng).unwrap().clone());
            s = add_fact(s, "F", &[("p", x), ("q", y)]);
        }
        if rng.gen_bool(0.5) {
            for x in &a {
                if !facts(&s, "F").iter().any(|f| &bound(f, "p") == x) {
                    let y = b.choose(rng).unwrap().clone();
                    s = add_fact(s, "F", &[("p", x.clone()), ("q", y)]);
                }
            }
        }
        if rng.gen_bool(0.5) {
            let copies: Vec<_> = facts(&s, "F").iter().map(|f| (bound(f, "p"), bound(f, "q"))).collect();
            for (x, y) in copies {
                s = add_fact(s, "H", &[("h1", x), ("h2", y)]);
            }
        }
        for _ in 0..rng.gen_range(0..=2) {
            let (x, y) = (a.choose(rng).unwrap().clone(), b.choose(rng).unwrap().clone());
            s = add_fact(s, "H", &[("h1", x), ("h2", y)]);
        }
    }
    let fs: Vec<InstanceValue> = facts(&s, "F").iter().map(|f| f.value.clone()).collect();
    if !fs.is_empty() && !c.is_empty() {
        for _ in 0..rng.gen_range(0..=4) {
            let (x, y) = (fs.choose(rng).unwrap().clone(), c.choose(rng).unwrap().clone());
            s = add_fact(s, "G", &[("r", x), ("s", y)]);
        }
    }
    s
}

pub fn random_sequence(rng: &mut ChaCha8Rng) -> PopulationSequence {
    let n = rng.gen_range(1..=2);
    PopulationSequence::new((0..n).map(|t| random_snapshot(rng, t)).collect()).unwrap()
}

pub fn mandatory_oracle(s: &Snapshot) -> bool {
    let players: BTreeSet<_> = facts(s, "F")
        .iter()
        .map(|f| bound(f, "p"))
        .chain(facts(s, "H").iter().map(|f| bound(f, "h1")))
        .collect();
    pop_a(s).is_subset(&players)
}

/// Join rows of Unique(q, s): ((q-player, s-player), G fact) through r.
pub fn unique_oracle(s: &Snapshot) -> bool {
    let f_by_value: BTreeMap<_, _> = facts(s, "F").iter().map(|f| (f.value.clone(), f)).collect();
    let mut fd: BTreeMap<(InstanceValue, InstanceValue), BTreeSet<InstanceValue>> = BTreeMap::new();
    for g in facts(s, "G") {
        if let Some(f) = f_by_value.get(&bound(g, "r")) {
            fd.entry((bound(f, "q"), bound(g, "s"))).or_default().insert(g.value.clone());
        }
    }
    fd.values().all(|c| c.len() == 1)
}

pub fn unique_p_oracle(s: &Snapshot) -> bool {
    let mut by_p: BTreeMap<InstanceValue, BTreeSet<InstanceValue>> = BTreeMap::new();
    for f in facts(s, "F") {
        by_p.entry(bound(f, "p")).or_default().insert(f.value.clone());
    }
    by_p.values().all(|c| c.len() == 1)
}

pub fn subset_oracle(s: &Snapshot) -> bool {
    let rows = |ft: &str, a: &str, b: &str| -> BTreeSet<_> { facts(s, ft).iter().map(|f| (bound(f, a), bound(f, b))).collect() };
    rows("F", "p", "q").is_subset(&rows("H", "h1", "h2"))
}

pub fn exclusive_oracle(s: &Snapshot) -> bool {
    stored(s, "S").is_disjoint(&stored(s, "T"))
}

pub fn total_oracle(s: &Snapshot) -> bool {
    let covered: BTreeSet<_> = stored(s, "S").union(&stored(s, "T")).cloned().collect();
    pop_a(s).is_subset(&covered)
}

pub fn ext_unique_oracle(s: &Snapshot) -> bool {
    let mut varieties: BTreeMap<InstanceValue, BTreeSet<InstanceValue>> = BTreeMap::new();
    for f in facts(s, "F") {
        varieties.entry(bound(f, "p")).or_default().insert(bound(f, "q"));
    }
    let distinct: BTreeSet<_> = varieties.values().collect();
    distinct.len() == varieties.len()
}

pub type Oracle = fn(&Snapshot) -> bool;

pub fn oracle_cases() -> Vec<(Vec<Constraint>, Oracle)> {
    vec![
        (
            vec![Constraint::Mandatory {
                object_type: "A".into(),
                roles: set(&["p", "h1"]),
            }],
            mandatory_oracle,
        ),
        (
            vec![Constraint::Unique { roles: names(&["q", "s"]) }],
            unique_oracle,
        ),
        (vec![Constraint::Unique { roles: names(&["p"]) }], unique_p_oracle),
        (
            vec![Constraint::SubsetC {
                roles1: names(&["p", "q"]),
                roles2: names(&["h1", "h2"]),
            }],
            subset_oracle,
        ),
        (vec![Constraint::Exclusive { types: names(&["S", "T"]) }], exclusive_oracle),
        (
            vec![
                Constraint::TotalSpec {
                    supertype: Some("A".into()),
                    subs: names(&["S", "T"]),
                },
                Constraint::TotalSpec {
                    supertype: None,
                    subs: names(&["S", "T"]),
                },
            ],
            total_oracle,
        ),
        (
            vec![Constraint::ExtUnique {
                fact_type: "F".into(),
                roles: set(&["q"]),
            }],
            ext_unique_oracle,
        ),
    ]
}
